#pragma once

// Bijections between unconstrained reals and constrained parameter domains,
// plus their derivatives (with respect to the unconstrained input).

#include <span>

namespace daml::transforms {

double softplus(double x);
double softplus_inverse(double y);   // y > 0
double softplus_grad(double x);      // = sigmoid(x)

double sigmoid(double x);
double logit(double p);              // 0 < p < 1

// tanh / atanh are std::tanh / std::atanh; d tanh(u)/du = 1 - tanh(u)^2.

/// Row softmax of `raw` into `out` (same length).
void softmax(std::span<const double> raw, std::span<double> out);
/// log-sum-exp of a span; -inf for an all -inf input.
double log_sum_exp(std::span<const double> v);

/// log Phi(a) for the standard normal CDF, accurate in both tails.
double log_normal_cdf(double a);
double normal_cdf(double a);
double normal_pdf(double a);

}  // namespace daml::transforms
