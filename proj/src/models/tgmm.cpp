#include "daml/models/tgmm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "daml/error.hpp"
#include "daml/models/transforms.hpp"

namespace daml {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;

void check_support(std::span<const double> y, std::size_t sites) {
  if (y.size() != sites) throw ValidationError("tgmm: outcome length does not match S");
  for (std::size_t s = 0; s < y.size(); ++s) {
    if (!(y[s] >= 0.0)) {
      throw DomainError("tgmm: y[" + std::to_string(s) + "] is outside [0, inf)");
    }
  }
}

}  // namespace

TruncGaussMixture::TruncGaussMixture(std::size_t num_sites, std::size_t num_components)
    : sites_(num_sites), components_(num_components) {
  if (num_sites == 0 || num_components == 0) {
    throw ValidationError("tgmm: S and L must be positive");
  }
  phi_.assign(2 * components_ + sites_ * components_, 0.0);
  refresh();
}

std::vector<ParamBlock> TruncGaussMixture::param_blocks() const {
  return {{"mu_raw", components_, 1, 0},
          {"sigma_raw", components_, 1, components_},
          {"pi_raw", sites_, components_, 2 * components_}};
}

std::vector<std::pair<std::string, long long>> TruncGaussMixture::shape_metadata() const {
  return {{"S", static_cast<long long>(sites_)}, {"L", static_cast<long long>(components_)}};
}

void TruncGaussMixture::refresh() {
  const std::size_t nl = components_;
  mu_.resize(nl);
  sigma_.resize(nl);
  log_norm_.resize(nl);
  for (std::size_t l = 0; l < nl; ++l) {
    mu_[l] = transforms::softplus(phi_[l]);
    sigma_[l] = kSigmaFloor + transforms::softplus(phi_[nl + l]);
    log_norm_[l] = transforms::log_normal_cdf(mu_[l] / sigma_[l]);
  }
  pi_ = Matrix(sites_, nl);
  log_pi_ = Matrix(sites_, nl);
  for (std::size_t s = 0; s < sites_; ++s) {
    std::span<const double> raw(phi_.data() + 2 * nl + s * nl, nl);
    transforms::softmax(raw, pi_.row(s));
    const double lse = transforms::log_sum_exp(raw);
    for (std::size_t l = 0; l < nl; ++l) log_pi_(s, l) = raw[l] - lse;
  }
}

double TruncGaussMixture::log_trunc_normal(double y, double mu, double sigma) {
  const double z = (y - mu) / sigma;
  return -kHalfLog2Pi - std::log(sigma) - 0.5 * z * z - transforms::log_normal_cdf(mu / sigma);
}

double TruncGaussMixture::logpdf(std::span<const double> y, std::size_t) const {
  check_support(y, sites_);
  const std::size_t nl = components_;
  std::vector<double> terms(nl);
  double total = 0.0;
  for (std::size_t s = 0; s < sites_; ++s) {
    for (std::size_t l = 0; l < nl; ++l) {
      const double z = (y[s] - mu_[l]) / sigma_[l];
      terms[l] = log_pi_(s, l) - kHalfLog2Pi - std::log(sigma_[l]) - 0.5 * z * z - log_norm_[l];
    }
    total += transforms::log_sum_exp(terms);
  }
  return total;
}

double TruncGaussMixture::logpdf_grad(std::span<const double> y, std::size_t, std::span<double> grad) const {
  check_support(y, sites_);
  const std::size_t nl = components_;
  std::fill(grad.begin(), grad.end(), 0.0);
  // Per-component pieces that do not depend on y.
  std::vector<double> mills(nl), log_sigma(nl);
  for (std::size_t l = 0; l < nl; ++l) {
    const double a = mu_[l] / sigma_[l];
    mills[l] = std::exp(-0.5 * a * a - kHalfLog2Pi - log_norm_[l]);  // phi(a) / Phi(a)
    log_sigma[l] = std::log(sigma_[l]);
  }
  std::vector<double> terms(nl), zs(nl);
  std::vector<double> dmu(nl, 0.0), dsg(nl, 0.0);

  double total = 0.0;
  for (std::size_t s = 0; s < sites_; ++s) {
    for (std::size_t l = 0; l < nl; ++l) {
      zs[l] = (y[s] - mu_[l]) / sigma_[l];
      terms[l] = log_pi_(s, l) - kHalfLog2Pi - log_sigma[l] - 0.5 * zs[l] * zs[l] - log_norm_[l];
    }
    const double lse = transforms::log_sum_exp(terms);
    total += lse;
    double* g_pi = grad.data() + 2 * nl + s * nl;
    for (std::size_t l = 0; l < nl; ++l) {
      const double w = std::exp(terms[l] - lse);
      const double inv_sigma = 1.0 / sigma_[l];
      dmu[l] += w * (zs[l] - mills[l]) * inv_sigma;
      dsg[l] += w * (-1.0 + zs[l] * zs[l] + mills[l] * mu_[l] * inv_sigma) * inv_sigma;
      g_pi[l] = w - pi_(s, l);
    }
  }
  for (std::size_t l = 0; l < nl; ++l) {
    grad[l] = dmu[l] * transforms::softplus_grad(phi_[l]);
    grad[nl + l] = dsg[l] * transforms::softplus_grad(phi_[nl + l]);
  }
  return total;
}

void TruncGaussMixture::sample(std::size_t, Rng& rng, Matrix& out) const {
  if (out.cols != sites_) throw ValidationError("tgmm: sample buffer has wrong width");
  const std::size_t nl = components_;
  for (std::size_t m = 0; m < out.rows; ++m) {
    for (std::size_t s = 0; s < sites_; ++s) {
      const double u = uniform01(rng);
      std::size_t comp = nl - 1;
      double cum = 0.0;
      for (std::size_t l = 0; l < nl; ++l) {
        cum += pi_(s, l);
        if (u < cum) {
          comp = l;
          break;
        }
      }
      double v;
      do {
        v = mu_[comp] + sigma_[comp] * standard_normal(rng);
      } while (v < 0.0);
      out(m, s) = v;
    }
  }
}

std::unique_ptr<GenerativeModel> TruncGaussMixture::clone() const {
  return std::make_unique<TruncGaussMixture>(*this);
}

TgmmParams TruncGaussMixture::constrained() const { return {mu_, sigma_, pi_}; }

void TruncGaussMixture::set_constrained(const TgmmParams& params) {
  const std::size_t nl = components_;
  if (params.mu.size() != nl || params.sigma.size() != nl || params.pi.rows != sites_ ||
      params.pi.cols != nl) {
    throw ValidationError("tgmm: constrained parameter shapes do not match (S, L)");
  }
  Vector phi(phi_.size());
  for (std::size_t l = 0; l < nl; ++l) {
    if (!(params.mu[l] > 0.0)) throw ValidationError("tgmm: mu must be positive");
    if (!(params.sigma[l] > kSigmaFloor)) throw ValidationError("tgmm: sigma must exceed 0.2");
    phi[l] = transforms::softplus_inverse(params.mu[l]);
    phi[nl + l] = transforms::softplus_inverse(params.sigma[l] - kSigmaFloor);
  }
  for (std::size_t s = 0; s < sites_; ++s) {
    double mean_log = 0.0;
    for (std::size_t l = 0; l < nl; ++l) {
      if (!(params.pi(s, l) > 0.0)) throw ValidationError("tgmm: pi entries must be positive");
      mean_log += std::log(params.pi(s, l));
    }
    mean_log /= static_cast<double>(nl);
    for (std::size_t l = 0; l < nl; ++l) {
      phi[2 * nl + s * nl + l] = std::log(params.pi(s, l)) - mean_log;
    }
  }
  set_params(phi);
}

}  // namespace daml
