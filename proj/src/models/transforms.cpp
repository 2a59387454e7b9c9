#include "daml/models/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace daml::transforms {

double softplus(double x) {
  if (x > 30.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double softplus_inverse(double y) {
  if (y > 30.0) return y + std::log(-std::expm1(-y));
  return std::log(std::expm1(y));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus_grad(double x) { return sigmoid(x); }

double logit(double p) { return std::log(p) - std::log1p(-p); }

void softmax(std::span<const double> raw, std::span<double> out) {
  const double mx = *std::max_element(raw.begin(), raw.end());
  double total = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    out[i] = std::exp(raw[i] - mx);
    total += out[i];
  }
  for (double& v : out) v /= total;
}

double log_sum_exp(std::span<const double> v) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double x : v) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double total = 0.0;
  for (double x : v) total += std::exp(x - mx);
  return mx + std::log(total);
}

double normal_cdf(double a) { return 0.5 * std::erfc(-a / std::numbers::sqrt2); }

double normal_pdf(double a) { return std::exp(-0.5 * a * a) / std::sqrt(2.0 * std::numbers::pi); }

double log_normal_cdf(double a) {
  if (a > -20.0) return std::log(normal_cdf(a));
  // Asymptotic series for the lower tail: Phi(a) ~ pdf(a)/(-a) * (1 - 1/a^2 + 3/a^4).
  const double a2 = a * a;
  return -0.5 * a2 - std::log(-a) - 0.5 * std::log(2.0 * std::numbers::pi) +
         std::log1p(-1.0 / a2 + 3.0 / (a2 * a2));
}

}  // namespace daml::transforms
