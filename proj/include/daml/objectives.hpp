#pragma once

// Training objectives summed over the periods of a split:
//
//   NLL:  sum_t -log p(y_t)                      (- log prior for MAP models)
//   BPR:  sum_t L_t,  L_t = -BPR(TopK(r_t), y_t)
//   DAML: sum_t [lambda max(eps + L_t, 0) - log p(y_t)]   (- log prior)
//
// r_t is the ratio ranking of M draws from the model. The BPR gradient is
// score-function (d r / d phi) times perturbed top-K Jacobian (d b / d r)
// times dJ/db, evaluated right to left as two vector products so no P x S
// or S x S matrix is formed. For BPR-only training dJ/db is -y / oracle sum
// with the indicator always on.
//
// Randomness for period t in a given epoch comes from two streams derived
// from (seed, epoch, t): one for the M model draws, one for the J noise
// vectors. Results do not depend on the thread count.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "daml/bpr.hpp"
#include "daml/linalg.hpp"
#include "daml/models/model.hpp"
#include "daml/panel.hpp"
#include "daml/rng.hpp"

namespace daml {

enum class Objective { kNll, kBpr, kDaml };

std::string to_string(Objective objective);
Objective parse_objective(const std::string& name);

struct ObjectiveConfig {
  Objective objective = Objective::kNll;
  std::size_t k = 1;
  double epsilon = 0.0;
  double lambda = 30.0;
  std::size_t num_samples = 1000;       // M
  std::size_t num_perturbations = 100;  // J
  double sigma = 0.05;
  std::uint64_t seed = 0;
  unsigned threads = 1;

  void validate(std::size_t num_sites) const;
};

struct ObjectiveResult {
  double value = 0.0;
  Vector grad;                 // d value / d phi
  double nll = 0.0;            // sum_t -log p(y_t), prior excluded
  double neg_logprior = 0.0;   // -log p(phi), 0 when unused
  double penalty = 0.0;        // sum_t lambda max(g_t, 0)   (DAML)
  double bpr_sum = 0.0;        // sum_t BPR of the sampled ranking (BPR, DAML)
  std::size_t periods = 0;
  std::size_t violated = 0;    // periods with g_t > 0 (DAML)
  std::size_t degenerate = 0;  // periods with an all-zero outcome
};

/// Stream of the M model draws for period t of an epoch.
Rng sample_stream(std::uint64_t seed, std::uint64_t epoch, std::size_t t);
/// Stream of the J perturbation vectors for period t of an epoch.
Rng noise_stream(std::uint64_t seed, std::uint64_t epoch, std::size_t t);

/// Value and gradient of the configured objective. NLL runs draw nothing.
/// Throws NumericalError naming the period and term on a non-finite value.
ObjectiveResult evaluate_objective(const GenerativeModel& model, const PanelDataset& panel, SplitRange split,
                                   const ObjectiveConfig& cfg, std::uint64_t epoch);

/// sum_t -log p(y_t) over the split, minus log p(phi) where defined.
double nll_objective(const GenerativeModel& model, const PanelDataset& panel, SplitRange split);

struct SplitMetrics {
  double nll_total = 0.0;  // sum_t -log p(y_t), no prior
  double nll_mean = 0.0;   // per period
  double bpr_mean = 0.0;   // mean over periods of per-period BPR
  std::vector<double> bpr;
  std::size_t degenerate = 0;
};

/// Held-out style metrics: NLL and the per-period BPR of the ratio ranking
/// built from M fresh draws (stream tag `role`, independent of training).
SplitMetrics evaluate_split(const GenerativeModel& model, const PanelDataset& panel, SplitRange split,
                            std::size_t k, std::size_t num_samples, std::uint64_t seed, unsigned threads = 1,
                            std::uint64_t role = stream::kEval);

}  // namespace daml
