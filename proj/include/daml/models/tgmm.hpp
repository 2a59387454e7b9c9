#pragma once

// Per-site mixture of L Gaussians truncated to [0, inf), with global
// component means/scales and site-specific mixture weights:
//
//   p(y_s) = sum_l pi_{s,l} N+(y_s | mu_l, sigma_l^2),
//   N+(y | mu, sigma^2) = N(y | mu, sigma^2) / Phi(mu / sigma).
//
// Unconstrained layout of phi: mu_raw[L], sigma_raw[L], pi_raw[S x L] with
// mu = softplus(mu_raw), sigma = 0.2 + softplus(sigma_raw) and
// pi_s = softmax(pi_raw_s). Sites are independent given phi and the model
// ignores the period index.

#include <cstddef>

#include "daml/models/model.hpp"

namespace daml {

struct TgmmParams {
  Vector mu;     // L
  Vector sigma;  // L, each >= kSigmaFloor
  Matrix pi;     // S x L, rows sum to 1
};

class TruncGaussMixture final : public GenerativeModel {
 public:
  static constexpr double kSigmaFloor = 0.2;

  TruncGaussMixture(std::size_t num_sites, std::size_t num_components);

  std::string family() const override { return "tgmm"; }
  std::size_t num_sites() const override { return sites_; }
  std::size_t num_components() const { return components_; }

  std::vector<ParamBlock> param_blocks() const override;
  std::vector<std::pair<std::string, long long>> shape_metadata() const override;

  double logpdf(std::span<const double> y, std::size_t t) const override;
  double logpdf_grad(std::span<const double> y, std::size_t t, std::span<double> grad) const override;
  void sample(std::size_t t, Rng& rng, Matrix& out) const override;
  using GenerativeModel::sample;

  std::unique_ptr<GenerativeModel> clone() const override;

  /// Constrained view of the current phi.
  TgmmParams constrained() const;
  /// Sets phi from constrained values (inverse transform). Each pi row must
  /// be strictly positive; the raw row is log(pi) centred to mean zero.
  void set_constrained(const TgmmParams& params);

  /// log N+(y | mu, sigma^2) for one component.
  static double log_trunc_normal(double y, double mu, double sigma);

 protected:
  void refresh() override;

 private:
  std::size_t sites_;
  std::size_t components_;
  // Cached constrained parameters.
  Vector mu_;
  Vector sigma_;
  Vector log_norm_;  // log Phi(mu/sigma) per component
  Matrix log_pi_;
  Matrix pi_;
};

}  // namespace daml
