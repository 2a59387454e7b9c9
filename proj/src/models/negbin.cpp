#include "daml/models/negbin.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/special_functions/digamma.hpp>

#include "daml/error.hpp"
#include "daml/models/transforms.hpp"

namespace daml {

namespace {

// log(1 - tanh(u)^2) = -2 log cosh(u), written to avoid overflow.
double log_one_minus_tanh_sq(double u) {
  const double a = std::abs(u);
  return -2.0 * (a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2);
}

void check_counts(std::span<const double> y, std::size_t sites) {
  if (y.size() != sites) throw ValidationError("negbin: outcome length does not match S");
  for (std::size_t s = 0; s < y.size(); ++s) {
    if (!(y[s] >= 0.0) || y[s] != std::floor(y[s])) {
      throw ValidationError("negbin: y[" + std::to_string(s) + "] is not a non-negative integer");
    }
  }
}

}  // namespace

NegBinMixedEffects::NegBinMixedEffects(std::shared_ptr<const PanelDataset> panel)
    : panel_(std::move(panel)) {
  if (!panel_) throw ValidationError("negbin: panel is null");
  sites_ = panel_->num_sites;
  features_ = panel_->num_features;
  if (sites_ == 0) throw ValidationError("negbin: panel has no sites");
  phi_.assign(1 + features_ + 2 * sites_ + 4, 0.0);
}

std::vector<ParamBlock> NegBinMixedEffects::param_blocks() const {
  return {{"beta0", 1, 1, idx_beta0()}, {"beta", features_, 1, idx_beta()},
          {"b0", sites_, 1, idx_b0()},  {"b1", sites_, 1, idx_b1()},
          {"q_raw", 1, 1, idx_q()},     {"xi0", 1, 1, idx_xi0()},
          {"xi1", 1, 1, idx_xi1()},     {"u", 1, 1, idx_u()}};
}

std::vector<std::pair<std::string, long long>> NegBinMixedEffects::shape_metadata() const {
  return {{"S", static_cast<long long>(sites_)}, {"D", static_cast<long long>(features_)}};
}

void NegBinMixedEffects::check_period(std::size_t t) const {
  if (t >= panel_->num_periods) {
    throw ValidationError("negbin: period " + std::to_string(t) + " is outside the bound panel");
  }
}

double NegBinMixedEffects::log_mean(std::size_t s, std::size_t t) const {
  double eta = phi_[idx_beta0()] + phi_[idx_b0() + s] + phi_[idx_b1() + s] * static_cast<double>(t);
  if (features_ > 0) {
    auto x = panel_->x(t, s);
    for (std::size_t d = 0; d < features_; ++d) eta += phi_[idx_beta() + d] * x[d];
  }
  return eta;
}

namespace {

double checked_mean(double eta, std::size_t s, std::size_t t) {
  const double r = std::exp(eta);
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw NumericalError("negbin: mean exp(eta) is " + std::to_string(r) + " at site " + std::to_string(s) +
                         ", t=" + std::to_string(t));
  }
  return r;
}

}  // namespace

double NegBinMixedEffects::log_pmf(double y, double r, double log_q, double log_1mq) {
  return std::lgamma(y + r) - std::lgamma(r) - std::lgamma(y + 1.0) + r * log_q + y * log_1mq;
}

double NegBinMixedEffects::logpdf(std::span<const double> y, std::size_t t) const {
  check_counts(y, sites_);
  check_period(t);
  const double q_raw = phi_[idx_q()];
  const double log_q = -transforms::softplus(-q_raw);
  const double log_1mq = -transforms::softplus(q_raw);
  double total = 0.0;
  for (std::size_t s = 0; s < sites_; ++s) {
    total += log_pmf(y[s], checked_mean(log_mean(s, t), s, t), log_q, log_1mq);
  }
  return total;
}

double NegBinMixedEffects::logpdf_grad(std::span<const double> y, std::size_t t, std::span<double> grad) const {
  check_counts(y, sites_);
  check_period(t);
  std::fill(grad.begin(), grad.end(), 0.0);
  const double q_raw = phi_[idx_q()];
  const double q = transforms::sigmoid(q_raw);
  const double log_q = -transforms::softplus(-q_raw);
  const double log_1mq = -transforms::softplus(q_raw);
  const double tt = static_cast<double>(t);
  double total = 0.0;
  double d_qraw = 0.0;
  for (std::size_t s = 0; s < sites_; ++s) {
    const double r = checked_mean(log_mean(s, t), s, t);
    total += log_pmf(y[s], r, log_q, log_1mq);
    // d/dr = digamma(y + r) - digamma(r) + log q; eta = log r.
    double d_r = log_q;
    if (y[s] > 0.0) d_r += boost::math::digamma(y[s] + r) - boost::math::digamma(r);
    const double d_eta = r * d_r;
    grad[idx_beta0()] += d_eta;
    if (features_ > 0) {
      auto x = panel_->x(t, s);
      for (std::size_t d = 0; d < features_; ++d) grad[idx_beta() + d] += d_eta * x[d];
    }
    grad[idx_b0() + s] += d_eta;
    grad[idx_b1() + s] += d_eta * tt;
    d_qraw += r * (1.0 - q) - y[s] * q;
  }
  grad[idx_q()] = d_qraw;
  return total;
}

double NegBinMixedEffects::logprior() const {
  const double s0 = transforms::softplus(phi_[idx_xi0()]);
  const double s1 = transforms::softplus(phi_[idx_xi1()]);
  const double u = phi_[idx_u()];
  const double rho = std::tanh(u);
  const double one_m_rho2 = std::exp(log_one_minus_tanh_sq(u));
  const double norm = -std::log(2.0 * std::numbers::pi) - std::log(s0) - std::log(s1) -
                      0.5 * log_one_minus_tanh_sq(u);
  double total = 0.0;
  for (std::size_t s = 0; s < sites_; ++s) {
    const double a = phi_[idx_b0() + s] / s0;
    const double b = phi_[idx_b1() + s] / s1;
    const double quad = a * a - 2.0 * rho * a * b + b * b;
    total += norm - 0.5 * quad / one_m_rho2;
  }
  return total;
}

double NegBinMixedEffects::logprior_grad(std::span<double> grad) const {
  std::fill(grad.begin(), grad.end(), 0.0);
  const double xi0 = phi_[idx_xi0()];
  const double xi1 = phi_[idx_xi1()];
  const double s0 = transforms::softplus(xi0);
  const double s1 = transforms::softplus(xi1);
  const double u = phi_[idx_u()];
  const double rho = std::tanh(u);
  const double one_m_rho2 = std::exp(log_one_minus_tanh_sq(u));
  const double norm = -std::log(2.0 * std::numbers::pi) - std::log(s0) - std::log(s1) -
                      0.5 * log_one_minus_tanh_sq(u);
  double total = 0.0;
  double d_s0 = 0.0, d_s1 = 0.0, d_u = 0.0;
  for (std::size_t s = 0; s < sites_; ++s) {
    const double b0 = phi_[idx_b0() + s];
    const double b1 = phi_[idx_b1() + s];
    const double a = b0 / s0;
    const double b = b1 / s1;
    const double quad = a * a - 2.0 * rho * a * b + b * b;
    total += norm - 0.5 * quad / one_m_rho2;
    grad[idx_b0() + s] = -(a - rho * b) / (s0 * one_m_rho2);
    grad[idx_b1() + s] = -(b - rho * a) / (s1 * one_m_rho2);
    d_s0 += -1.0 / s0 + (a * a - rho * a * b) / (s0 * one_m_rho2);
    d_s1 += -1.0 / s1 + (b * b - rho * a * b) / (s1 * one_m_rho2);
    // d/du with drho/du = 1 - rho^2.
    d_u += rho + a * b - quad * rho / one_m_rho2;
  }
  grad[idx_xi0()] = d_s0 * transforms::softplus_grad(xi0);
  grad[idx_xi1()] = d_s1 * transforms::softplus_grad(xi1);
  grad[idx_u()] = d_u;
  return total;
}

void NegBinMixedEffects::sample(std::size_t t, Rng& rng, Matrix& out) const {
  check_period(t);
  if (out.cols != sites_) throw ValidationError("negbin: sample buffer has wrong width");
  const double q = transforms::sigmoid(phi_[idx_q()]);
  const double scale = (1.0 - q) / q;
  std::vector<double> shape(sites_);
  for (std::size_t s = 0; s < sites_; ++s) shape[s] = checked_mean(log_mean(s, t), s, t);
  for (std::size_t m = 0; m < out.rows; ++m) {
    for (std::size_t s = 0; s < sites_; ++s) {
      const double g = gamma_variate(rng, shape[s], scale);
      out(m, s) = static_cast<double>(poisson_variate(rng, g));
    }
  }
}

std::unique_ptr<GenerativeModel> NegBinMixedEffects::clone() const {
  return std::make_unique<NegBinMixedEffects>(*this);
}

NegBinParams NegBinMixedEffects::constrained() const {
  NegBinParams p;
  p.beta0 = phi_[idx_beta0()];
  p.beta.assign(phi_.begin() + idx_beta(), phi_.begin() + idx_beta() + features_);
  p.b0.assign(phi_.begin() + idx_b0(), phi_.begin() + idx_b0() + sites_);
  p.b1.assign(phi_.begin() + idx_b1(), phi_.begin() + idx_b1() + sites_);
  p.q = transforms::sigmoid(phi_[idx_q()]);
  p.sigma0 = transforms::softplus(phi_[idx_xi0()]);
  p.sigma1 = transforms::softplus(phi_[idx_xi1()]);
  p.rho = std::tanh(phi_[idx_u()]);
  return p;
}

void NegBinMixedEffects::set_constrained(const NegBinParams& p) {
  if (p.beta.size() != features_ || p.b0.size() != sites_ || p.b1.size() != sites_) {
    throw ValidationError("negbin: constrained parameter shapes do not match (S, D)");
  }
  if (!(p.q > 0.0 && p.q < 1.0)) throw ValidationError("negbin: q must lie in (0, 1)");
  if (!(p.sigma0 > 0.0 && p.sigma1 > 0.0)) throw ValidationError("negbin: sigmas must be positive");
  if (!(p.rho > -1.0 && p.rho < 1.0)) throw ValidationError("negbin: rho must lie in (-1, 1)");
  Vector phi(phi_.size());
  phi[idx_beta0()] = p.beta0;
  std::copy(p.beta.begin(), p.beta.end(), phi.begin() + idx_beta());
  std::copy(p.b0.begin(), p.b0.end(), phi.begin() + idx_b0());
  std::copy(p.b1.begin(), p.b1.end(), phi.begin() + idx_b1());
  phi[idx_q()] = transforms::logit(p.q);
  phi[idx_xi0()] = transforms::softplus_inverse(p.sigma0);
  phi[idx_xi1()] = transforms::softplus_inverse(p.sigma1);
  phi[idx_u()] = std::atanh(p.rho);
  set_params(phi);
}

}  // namespace daml
