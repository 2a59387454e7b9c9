#pragma once

// Independent reference computations shared by the unit tests and the
// acceptance suite.

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <stdexcept>

#include "daml/linalg.hpp"
#include "daml/models/tgmm.hpp"
#include "daml/objectives.hpp"
#include "daml/panel.hpp"
#include "daml/rng.hpp"
#include "daml/smoothing.hpp"
#include "support.hpp"

namespace daml::test {

inline double chi2_critical(std::size_t dof, double alpha = 0.001) {
  return boost::math::quantile(boost::math::complement(boost::math::chi_squared(static_cast<double>(dof)), alpha));
}

// Truncated-normal CDF on [0, inf).
inline double trunc_cdf(double y, double mu, double sigma) {
  const double z0 = normal_cdf(-mu / sigma);
  return (normal_cdf((y - mu) / sigma) - z0) / (1.0 - z0);
}

inline double nb_pmf(double y, double r, double q) {
  return std::exp(std::lgamma(y + r) - std::lgamma(r) - std::lgamma(y + 1.0) + r * std::log(q) + y * std::log1p(-q));
}

/// Central differences of a smooth surrogate of the DAML objective of a
/// TGMM with K = 1 at the given epoch. The surrogate freezes that epoch's
/// model draws and perturbation noise and re-weights them by likelihood
/// ratios (sample density, and the Gaussian density of u = r + sigma z), so
/// its gradient at the current parameters is the quantity the estimator
/// targets. Every period must violate its constraint.
inline Vector daml_surrogate_fd(const TruncGaussMixture& m, const PanelDataset& p, const ObjectiveConfig& cfg,
                                std::uint64_t epoch, double h = 1e-5) {
  if (cfg.k != 1) throw std::invalid_argument("surrogate oracle handles K = 1");
  const std::size_t sites = p.num_sites, draws = cfg.num_samples, pert = cfg.num_perturbations;
  const SplitRange split = p.train;
  struct Frozen {
    Matrix batch, ratio, u;
    Vector r0, c, logp0;
    std::vector<std::size_t> pick;
  };
  std::vector<Frozen> frozen(split.size());
  for (std::size_t i = 0; i < split.size(); ++i) {
    const std::size_t t = split.begin + i;
    Frozen& f = frozen[i];
    Rng sampler = sample_stream(cfg.seed, epoch, t);
    f.batch = Matrix(draws, sites);
    m.sample(t, sampler, f.batch);
    f.ratio = Matrix(draws, sites);
    f.r0.assign(sites, 0.0);
    f.logp0.resize(draws);
    for (std::size_t d = 0; d < draws; ++d) {
      double tot = 0.0;
      for (std::size_t s = 0; s < sites; ++s) tot += f.batch(d, s);
      for (std::size_t s = 0; s < sites; ++s) {
        f.ratio(d, s) = tot > 0.0 ? f.batch(d, s) / tot : 0.0;
        f.r0[s] += f.ratio(d, s) / static_cast<double>(draws);
      }
      f.logp0[d] = m.logpdf(f.batch.row(d), t);
    }
    // Penalty slope frozen at the current parameters.
    const auto y = p.y(t);
    const double top = *std::max_element(y.begin(), y.end());
    const std::size_t chosen = static_cast<std::size_t>(std::max_element(f.r0.begin(), f.r0.end()) - f.r0.begin());
    if (!(cfg.epsilon - y[chosen] / top > 0.0)) throw std::invalid_argument("surrogate oracle needs every g_t > 0");
    f.c.resize(sites);
    for (std::size_t s = 0; s < sites; ++s) f.c[s] = -cfg.lambda * y[s] / top;
    Rng noise_rng = noise_stream(cfg.seed, epoch, t);
    const Matrix z = draw_perturbations(noise_rng, pert, sites);
    f.u = Matrix(pert, sites);
    for (std::size_t j = 0; j < pert; ++j) {
      for (std::size_t s = 0; s < sites; ++s) f.u(j, s) = f.r0[s] + cfg.sigma * z(j, s);
      std::size_t best = 0;
      for (std::size_t s = 1; s < sites; ++s) {
        if (f.u(j, s) > f.u(j, best)) best = s;
      }
      f.pick.push_back(best);
    }
  }

  auto surrogate = [&](const Vector& phi) {
    TruncGaussMixture mm(m.num_sites(), m.num_components());
    mm.set_params(phi);
    double total = 0.0;
    for (std::size_t i = 0; i < split.size(); ++i) {
      const std::size_t t = split.begin + i;
      const Frozen& f = frozen[i];
      total -= mm.logpdf(p.y(t), t);
      Vector r(sites, 0.0);
      for (std::size_t d = 0; d < draws; ++d) {
        const double w = std::exp(mm.logpdf(f.batch.row(d), t) - f.logp0[d]);
        for (std::size_t s = 0; s < sites; ++s) r[s] += w * f.ratio(d, s) / static_cast<double>(draws);
      }
      for (std::size_t j = 0; j < pert; ++j) {
        double d1 = 0.0, d0 = 0.0;
        for (std::size_t s = 0; s < sites; ++s) {
          d1 += (f.u(j, s) - r[s]) * (f.u(j, s) - r[s]);
          d0 += (f.u(j, s) - f.r0[s]) * (f.u(j, s) - f.r0[s]);
        }
        const double w = std::exp(-(d1 - d0) / (2.0 * cfg.sigma * cfg.sigma));
        total += f.c[f.pick[j]] * w / static_cast<double>(pert);
      }
    }
    return total;
  };
  return central_diff(surrogate, Vector(m.params().begin(), m.params().end()), h);
}

}  // namespace daml::test
