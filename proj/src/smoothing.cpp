#include "daml/smoothing.hpp"

#include <cmath>
#include <string>

#include "daml/bpr.hpp"
#include "daml/error.hpp"
#include "daml/kernels.hpp"
#include "daml/topk.hpp"

namespace daml {

namespace {

void check_noise(std::span<const double> r, const SmoothingConfig& cfg, const Matrix& noise) {
  validate_ranking(r);
  cfg.validate(r.size());
  if (noise.rows != cfg.num_perturbations || noise.cols != r.size()) {
    throw ValidationError("perturbation noise must be J x S");
  }
}

// Calls fn(j, ids) with the top-K ids of r + sigma z_j for each j.
template <typename Fn>
void for_each_perturbed_selection(std::span<const double> r, const SmoothingConfig& cfg,
                                  const Matrix& noise, Fn&& fn) {
  TopKSelector selector;
  Vector shifted(r.size());
  for (std::size_t j = 0; j < noise.rows; ++j) {
    std::copy(r.begin(), r.end(), shifted.begin());
    kernels::axpy(cfg.sigma, noise.row(j), shifted);
    fn(j, selector.select(shifted, cfg.k));
  }
}

}  // namespace

void SmoothingConfig::validate(std::size_t num_sites) const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ValidationError("smoothing sigma must be positive, got " + std::to_string(sigma));
  }
  if (num_perturbations == 0) throw ValidationError("smoothing J must be >= 1");
  validate_k(k, num_sites);
}

Matrix draw_perturbations(Rng& rng, std::size_t num_perturbations, std::size_t num_sites) {
  Matrix z(num_perturbations, num_sites);
  fill_standard_normal(rng, z.data);
  return z;
}

Vector perturbed_topk_forward(std::span<const double> r, const SmoothingConfig& cfg, const Matrix& noise) {
  check_noise(r, cfg, noise);
  std::vector<std::size_t> counts(r.size(), 0);
  for_each_perturbed_selection(r, cfg, noise, [&](std::size_t, std::span<const std::size_t> ids) {
    for (std::size_t a : ids) ++counts[a];
  });
  Vector out(r.size());
  const double inv_j = 1.0 / static_cast<double>(noise.rows);
  for (std::size_t s = 0; s < r.size(); ++s) out[s] = static_cast<double>(counts[s]) * inv_j;
  return out;
}

Vector perturbed_topk_forward(std::span<const double> r, const SmoothingConfig& cfg, Rng& rng) {
  cfg.validate(r.size());
  return perturbed_topk_forward(r, cfg, draw_perturbations(rng, cfg.num_perturbations, r.size()));
}

Matrix perturbed_topk_jacobian(std::span<const double> r, const SmoothingConfig& cfg, const Matrix& noise) {
  check_noise(r, cfg, noise);
  Matrix jac(r.size(), r.size());
  for_each_perturbed_selection(r, cfg, noise, [&](std::size_t j, std::span<const std::size_t> ids) {
    for (std::size_t a : ids) kernels::axpy(1.0, noise.row(j), jac.row(a));
  });
  kernels::scale(1.0 / (static_cast<double>(noise.rows) * cfg.sigma), jac.data);
  return jac;
}

Matrix perturbed_topk_jacobian(std::span<const double> r, const SmoothingConfig& cfg, Rng& rng) {
  cfg.validate(r.size());
  return perturbed_topk_jacobian(r, cfg, draw_perturbations(rng, cfg.num_perturbations, r.size()));
}

Vector perturbed_topk_vjp(std::span<const double> r, const SmoothingConfig& cfg, const Matrix& noise,
                          std::span<const double> g) {
  check_noise(r, cfg, noise);
  if (g.size() != r.size()) throw ValidationError("perturbed_topk_vjp: g has wrong length");
  Vector out(r.size(), 0.0);
  for_each_perturbed_selection(r, cfg, noise, [&](std::size_t j, std::span<const std::size_t> ids) {
    double weight = 0.0;
    for (std::size_t a : ids) weight += g[a];
    if (weight != 0.0) kernels::axpy(weight, noise.row(j), out);
  });
  kernels::scale(1.0 / (static_cast<double>(noise.rows) * cfg.sigma), out);
  return out;
}

SmoothedGradCheck smoothed_loss_grad_check(std::span<const double> r, std::span<const double> y,
                                           const SmoothingConfig& cfg, Rng& rng, double fd_step) {
  validate_ranking(r);
  cfg.validate(r.size());
  if (y.size() != r.size()) throw ValidationError("smoothed_loss_grad_check: y has wrong length");
  const std::size_t sites = r.size();
  const std::size_t draws = cfg.num_perturbations;
  const Matrix noise = draw_perturbations(rng, draws, sites);

  // dL/db for L(b) = -y . b / denom; zero for a degenerate outcome.
  Vector grad_b = grad_penalty_wrt_mask(y, cfg.k, 1.0, 1.0, DegeneratePolicy::kDefineAsOneSilent);

  SmoothedGradCheck out;
  out.estimated = perturbed_topk_vjp(r, cfg, noise, grad_b);

  // Per-draw loss values L_j at the frozen perturbed points.
  Vector loss(draws, 0.0);
  for_each_perturbed_selection(r, cfg, noise, [&](std::size_t j, std::span<const std::size_t> ids) {
    for (std::size_t a : ids) loss[j] += grad_b[a];
  });

  // Standard error of the per-draw terms L_j z_jc / sigma.
  out.standard_error.assign(sites, 0.0);
  for (std::size_t c = 0; c < sites; ++c) {
    double mean = 0.0, sq = 0.0;
    for (std::size_t j = 0; j < draws; ++j) {
      const double term = loss[j] * noise(j, c) / cfg.sigma;
      mean += term;
      sq += term * term;
    }
    mean /= static_cast<double>(draws);
    const double var = draws > 1 ? (sq / static_cast<double>(draws) - mean * mean) *
                                       static_cast<double>(draws) / static_cast<double>(draws - 1)
                                 : 0.0;
    out.standard_error[c] = std::sqrt(std::max(var, 0.0) / static_cast<double>(draws));
  }

  // Likelihood-ratio reweighted smoothed loss at r + delta e_c.
  auto smoothed = [&](std::size_t c, double delta) {
    double total = 0.0;
    const double inv_var = 1.0 / (cfg.sigma * cfg.sigma);
    for (std::size_t j = 0; j < draws; ++j) {
      // u_j - r = sigma z_j; shifting r_c by delta changes only coordinate c.
      const double d0 = cfg.sigma * noise(j, c);
      const double d1 = d0 - delta;
      const double log_w = -0.5 * (d1 * d1 - d0 * d0) * inv_var;
      total += loss[j] * std::exp(log_w);
    }
    return total / static_cast<double>(draws);
  };
  const double h = fd_step * cfg.sigma;
  out.finite_difference.resize(sites);
  for (std::size_t c = 0; c < sites; ++c) {
    out.finite_difference[c] = (smoothed(c, h) - smoothed(c, -h)) / (2.0 * h);
  }
  return out;
}

}  // namespace daml
