#pragma once

// Perturbed (stochastically smoothed) top-K.
//
// With J standard-normal noise vectors z_j and b_j = TopKMask(r + sigma z_j, K):
//   forward:  b_hat = (1/J) sum_j b_j
//   jacobian: (1/(J sigma)) sum_j outer(b_j, z_j), entry (a, c) ~ d E[b_a] / d r_c
//
// Callers that need a forward/backward pair draw the noise once
// (draw_perturbations) and pass the same matrix to both calls.

#include <cstddef>
#include <span>

#include "daml/linalg.hpp"
#include "daml/rng.hpp"

namespace daml {

struct SmoothingConfig {
  double sigma = 0.05;
  std::size_t num_perturbations = 100;  // J
  std::size_t k = 1;

  void validate(std::size_t num_sites) const;
};

/// J x S matrix of i.i.d. standard normals.
Matrix draw_perturbations(Rng& rng, std::size_t num_perturbations, std::size_t num_sites);

Vector perturbed_topk_forward(std::span<const double> r, const SmoothingConfig& cfg, const Matrix& noise);
Vector perturbed_topk_forward(std::span<const double> r, const SmoothingConfig& cfg, Rng& rng);

Matrix perturbed_topk_jacobian(std::span<const double> r, const SmoothingConfig& cfg, const Matrix& noise);
Matrix perturbed_topk_jacobian(std::span<const double> r, const SmoothingConfig& cfg, Rng& rng);

/// jacobian^T g without forming the S x S matrix:
/// (1/(J sigma)) sum_j z_j (b_j . g).
Vector perturbed_topk_vjp(std::span<const double> r, const SmoothingConfig& cfg, const Matrix& noise,
                          std::span<const double> g);

struct SmoothedGradCheck {
  Vector estimated;          // jacobian^T grad_b L
  Vector finite_difference;  // central differences of the frozen-noise smoothed loss
  Vector standard_error;     // Monte-Carlo standard error of `estimated`
};

/// Compares the estimator against finite differences of the smoothed BPR
/// loss L(b) = -y . b / oracle_topk_sum(y) under frozen noise. The noise is
/// drawn once at r; the smoothed loss at r' reuses the same perturbed points
/// u_j = r + sigma z_j, weighted by the Gaussian density ratio
/// N(u_j; r', sigma^2) / N(u_j; r, sigma^2), which makes it differentiable
/// in r' while leaving its value at r unchanged.
SmoothedGradCheck smoothed_loss_grad_check(std::span<const double> r, std::span<const double> y,
                                           const SmoothingConfig& cfg, Rng& rng,
                                           double fd_step = 1e-6);

}  // namespace daml
