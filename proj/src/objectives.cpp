#include "daml/objectives.hpp"

#include <algorithm>
#include <cmath>

#include "daml/error.hpp"
#include "daml/kernels.hpp"
#include "daml/parallel.hpp"
#include "daml/ranking.hpp"
#include "daml/smoothing.hpp"
#include "daml/topk.hpp"

namespace daml {

namespace {

struct PeriodTerms {
  Vector grad;
  double nll = 0.0;
  double penalty = 0.0;
  double loss = 0.0;  // L_t = -BPR
  bool violated = false;
  bool degenerate = false;
};

void check_finite(double value, std::size_t t, const char* term) {
  if (!std::isfinite(value)) {
    throw NumericalError("non-finite " + std::string(term) + " at period t=" + std::to_string(t));
  }
}

void check_split(const PanelDataset& panel, SplitRange split, std::size_t model_sites) {
  if (split.end > panel.num_periods) throw ValidationError("split extends past the panel");
  if (model_sites != panel.num_sites) {
    throw ValidationError("model has " + std::to_string(model_sites) + " sites but the panel has " +
                          std::to_string(panel.num_sites));
  }
}

PeriodTerms period_terms(const GenerativeModel& model, const PanelDataset& panel, std::size_t t,
                         const ObjectiveConfig& cfg, std::uint64_t epoch) {
  const std::size_t num_params = model.num_params();
  const std::size_t sites = panel.num_sites;
  const auto y = panel.y(t);
  PeriodTerms out;
  out.grad.assign(num_params, 0.0);
  Vector scratch(num_params);

  if (cfg.objective != Objective::kBpr) {
    out.nll = -model.logpdf_grad(y, t, scratch);
    check_finite(out.nll, t, "negative log-likelihood");
    kernels::axpy(-1.0, scratch, out.grad);
  }
  if (cfg.objective == Objective::kNll) return out;

  const std::size_t draws = cfg.num_samples;
  Matrix batch(draws, sites);
  Rng sampler = sample_stream(cfg.seed, epoch, t);
  model.sample(t, sampler, batch);
  Matrix ratios;
  sample_ratios(batch, ratios);
  Vector r(sites, 0.0);
  for (std::size_t m = 0; m < draws; ++m) kernels::axpy(1.0, ratios.row(m), r);
  kernels::scale(1.0 / static_cast<double>(draws), r);

  const double denom = oracle_topk_sum(y, cfg.k);
  out.degenerate = !(denom > 0.0);
  const TopKIds ids = topk_ids(r, cfg.k);
  out.loss = -bpr(ids, y, cfg.k, DegeneratePolicy::kDefineAsOneSilent);
  check_finite(out.loss, t, "BPR loss");

  Vector grad_b;
  if (cfg.objective == Objective::kBpr) {
    grad_b = grad_penalty_wrt_mask(y, cfg.k, 1.0, 1.0, DegeneratePolicy::kDefineAsOneSilent);
  } else {
    const double g = constraint_g(out.loss, cfg.epsilon);
    out.penalty = penalty_term(g, cfg.lambda);
    out.violated = g > 0.0;
    grad_b = grad_penalty_wrt_mask(y, cfg.k, g, cfg.lambda, DegeneratePolicy::kDefineAsOneSilent);
  }
  if (std::all_of(grad_b.begin(), grad_b.end(), [](double v) { return v == 0.0; })) return out;

  SmoothingConfig smoothing{cfg.sigma, cfg.num_perturbations, cfg.k};
  Rng noise_rng = noise_stream(cfg.seed, epoch, t);
  const Matrix noise = draw_perturbations(noise_rng, cfg.num_perturbations, sites);
  const Vector v = perturbed_topk_vjp(r, smoothing, noise, grad_b);

  // Score-function product: (1/M) sum_m score_m (ratio_m . v).
  const double inv_m = 1.0 / static_cast<double>(draws);
  for (std::size_t m = 0; m < draws; ++m) {
    const double w = kernels::dot(ratios.row(m), v);
    if (w == 0.0) continue;
    const double lp = model.logpdf_grad(batch.row(m), t, scratch);
    check_finite(lp, t, "sample log-density");
    kernels::axpy(w * inv_m, scratch, out.grad);
  }
  for (double gi : out.grad) check_finite(gi, t, "gradient");
  return out;
}

}  // namespace

std::string to_string(Objective objective) {
  switch (objective) {
    case Objective::kNll: return "nll";
    case Objective::kBpr: return "bpr";
    case Objective::kDaml: return "daml";
  }
  return "unknown";
}

Objective parse_objective(const std::string& name) {
  std::string lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "nll" || lower == "map") return Objective::kNll;
  if (lower == "bpr") return Objective::kBpr;
  if (lower == "daml") return Objective::kDaml;
  throw ValidationError("unknown objective '" + name + "' (expected nll, bpr or daml)");
}

void ObjectiveConfig::validate(std::size_t num_sites) const {
  validate_k(k, num_sites);
  if (objective == Objective::kNll) return;
  if (num_samples == 0) throw ValidationError("M must be >= 1");
  if (num_perturbations == 0) throw ValidationError("J must be >= 1");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ValidationError("sigma must be positive");
  if (objective == Objective::kDaml) BprConfig{k, epsilon, lambda}.validate(num_sites);
}

Rng sample_stream(std::uint64_t seed, std::uint64_t epoch, std::size_t t) {
  return make_rng(seed, {stream::kEpoch, epoch, stream::kPeriod, t, stream::kSamples});
}

Rng noise_stream(std::uint64_t seed, std::uint64_t epoch, std::size_t t) {
  return make_rng(seed, {stream::kEpoch, epoch, stream::kPeriod, t, stream::kNoise});
}

ObjectiveResult evaluate_objective(const GenerativeModel& model, const PanelDataset& panel, SplitRange split,
                                   const ObjectiveConfig& cfg, std::uint64_t epoch) {
  check_split(panel, split, model.num_sites());
  cfg.validate(panel.num_sites);
  const std::size_t periods = split.size();
  std::vector<PeriodTerms> terms(periods);
  parallel_for(periods, cfg.threads, [&](std::size_t i) {
    terms[i] = period_terms(model, panel, split.begin + i, cfg, epoch);
  });

  ObjectiveResult res;
  res.grad.assign(model.num_params(), 0.0);
  res.periods = periods;
  // Fixed t-order reduction.
  for (const PeriodTerms& pt : terms) {
    kernels::axpy(1.0, pt.grad, res.grad);
    res.nll += pt.nll;
    res.penalty += pt.penalty;
    res.bpr_sum += -pt.loss;
    res.violated += pt.violated ? 1 : 0;
    res.degenerate += pt.degenerate ? 1 : 0;
  }
  switch (cfg.objective) {
    case Objective::kNll: res.value = res.nll; break;
    case Objective::kBpr: res.value = -res.bpr_sum; break;
    case Objective::kDaml: res.value = res.nll + res.penalty; break;
  }
  if (cfg.objective != Objective::kBpr && model.has_prior()) {
    Vector prior_grad(model.num_params());
    const double lp = model.logprior_grad(prior_grad);
    if (!std::isfinite(lp)) throw NumericalError("non-finite log prior");
    res.neg_logprior = -lp;
    res.value += res.neg_logprior;
    kernels::axpy(-1.0, prior_grad, res.grad);
  }
  if (!std::isfinite(res.value)) throw NumericalError("non-finite objective value");
  return res;
}

double nll_objective(const GenerativeModel& model, const PanelDataset& panel, SplitRange split) {
  check_split(panel, split, model.num_sites());
  double total = 0.0;
  for (std::size_t t = split.begin; t < split.end; ++t) {
    const double lp = model.logpdf(panel.y(t), t);
    check_finite(lp, t, "log-likelihood");
    total -= lp;
  }
  if (model.has_prior()) total -= model.logprior();
  return total;
}

SplitMetrics evaluate_split(const GenerativeModel& model, const PanelDataset& panel, SplitRange split,
                            std::size_t k, std::size_t num_samples, std::uint64_t seed, unsigned threads,
                            std::uint64_t role) {
  check_split(panel, split, model.num_sites());
  validate_k(k, panel.num_sites);
  if (num_samples == 0) throw ValidationError("evaluation M must be >= 1");
  const std::size_t periods = split.size();
  SplitMetrics out;
  out.bpr.assign(periods, 0.0);
  std::vector<double> nll(periods, 0.0);
  std::vector<std::uint8_t> degenerate(periods, 0);
  parallel_for(periods, threads, [&](std::size_t i) {
    const std::size_t t = split.begin + i;
    const auto y = panel.y(t);
    nll[i] = -model.logpdf(y, t);
    Rng rng = make_rng(seed, {role, t});
    Matrix batch(num_samples, panel.num_sites);
    model.sample(t, rng, batch);
    const Vector r = ratio_rank(batch);
    degenerate[i] = oracle_topk_sum(y, k) > 0.0 ? 0 : 1;
    out.bpr[i] = bpr(topk_ids(r, k), y, k, DegeneratePolicy::kDefineAsOneSilent);
  });
  for (std::size_t i = 0; i < periods; ++i) {
    out.nll_total += nll[i];
    out.bpr_mean += out.bpr[i];
    out.degenerate += degenerate[i];
  }
  if (periods > 0) {
    out.nll_mean = out.nll_total / static_cast<double>(periods);
    out.bpr_mean /= static_cast<double>(periods);
  }
  return out;
}

}  // namespace daml
