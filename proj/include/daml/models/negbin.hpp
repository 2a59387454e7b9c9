#pragma once

// Negative binomial mixed-effects regression for count panels:
//
//   y_st ~ NegBin(mu_st, q),   log mu_st = beta0 + beta' x_st + b0_s + b1_s t
//   NB(y; r, q) = Gamma(y + r) / (Gamma(r) y!) q^r (1 - q)^y
//
// mu_st is the (real-valued) number of successes to stop at, q the success
// probability shared by all sites, so E[y] = mu (1 - q) / q. Random effects
// (b0_s, b1_s) carry a zero-mean bivariate normal prior with covariance
// built from (sigma0, sigma1, rho); the prior is what makes NLL training MAP.
//
// Unconstrained layout of phi:
//   beta0, beta[D], b0[S], b1[S], q_raw, xi0, xi1, u
// with q = sigmoid(q_raw), sigma_i = softplus(xi_i), rho = tanh(u).
//
// The period index t used in logpdf/sample is the absolute period of the
// bound panel; it selects x_st and is also the time regressor.

#include <memory>

#include "daml/models/model.hpp"
#include "daml/panel.hpp"

namespace daml {

struct NegBinParams {
  double beta0 = 0.0;
  Vector beta;  // D
  Vector b0;    // S
  Vector b1;    // S
  double q = 0.5;
  double sigma0 = 1.0;
  double sigma1 = 1.0;
  double rho = 0.0;
};

class NegBinMixedEffects final : public GenerativeModel {
 public:
  explicit NegBinMixedEffects(std::shared_ptr<const PanelDataset> panel);

  std::string family() const override { return "negbin"; }
  std::size_t num_sites() const override { return sites_; }
  std::size_t num_features() const { return features_; }

  std::vector<ParamBlock> param_blocks() const override;
  std::vector<std::pair<std::string, long long>> shape_metadata() const override;

  double logpdf(std::span<const double> y, std::size_t t) const override;
  double logpdf_grad(std::span<const double> y, std::size_t t, std::span<double> grad) const override;
  double logprior() const override;
  double logprior_grad(std::span<double> grad) const override;
  bool has_prior() const override { return true; }
  void sample(std::size_t t, Rng& rng, Matrix& out) const override;
  using GenerativeModel::sample;

  std::unique_ptr<GenerativeModel> clone() const override;

  NegBinParams constrained() const;
  void set_constrained(const NegBinParams& params);

  /// log mu_st for the current parameters.
  double log_mean(std::size_t s, std::size_t t) const;

  /// log NB(y; r, q) with log q and log(1 - q) supplied for stability.
  static double log_pmf(double y, double r, double log_q, double log_1mq);

  const PanelDataset& panel() const { return *panel_; }

 private:
  std::size_t idx_beta0() const { return 0; }
  std::size_t idx_beta() const { return 1; }
  std::size_t idx_b0() const { return 1 + features_; }
  std::size_t idx_b1() const { return 1 + features_ + sites_; }
  std::size_t idx_q() const { return 1 + features_ + 2 * sites_; }
  std::size_t idx_xi0() const { return idx_q() + 1; }
  std::size_t idx_xi1() const { return idx_q() + 2; }
  std::size_t idx_u() const { return idx_q() + 3; }

  void check_period(std::size_t t) const;

  std::shared_ptr<const PanelDataset> panel_;
  std::size_t sites_;
  std::size_t features_;
};

}  // namespace daml
