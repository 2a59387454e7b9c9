#pragma once

// Common contract for probabilistic count models p_phi(y_t).
//
// Parameters are a flat vector phi of unconstrained reals; each family maps
// it to its constrained parameters internally. Gradients returned by
// logpdf_grad / logprior_grad are with respect to phi. Models are value
// objects: every method is const except set_params.

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "daml/linalg.hpp"
#include "daml/rng.hpp"

namespace daml {

/// Named slice of phi; shape is rows x cols (cols == 1 for vectors).
struct ParamBlock {
  std::string name;
  std::size_t rows = 1;
  std::size_t cols = 1;
  std::size_t offset = 0;

  std::size_t size() const { return rows * cols; }
};

class GenerativeModel {
 public:
  virtual ~GenerativeModel() = default;

  virtual std::string family() const = 0;
  virtual std::size_t num_sites() const = 0;

  std::size_t num_params() const { return phi_.size(); }
  std::span<const double> params() const { return phi_; }
  /// Throws ValidationError on a size mismatch or non-finite entry.
  void set_params(std::span<const double> phi);

  virtual std::vector<ParamBlock> param_blocks() const = 0;
  /// Integer shape metadata needed to rebuild the model (e.g. {"L", 2}).
  virtual std::vector<std::pair<std::string, long long>> shape_metadata() const = 0;

  /// log p_phi(y | period t). `t` indexes the bound panel where relevant.
  virtual double logpdf(std::span<const double> y, std::size_t t) const = 0;
  /// Writes d logpdf / d phi into `grad` (overwriting) and returns logpdf.
  virtual double logpdf_grad(std::span<const double> y, std::size_t t, std::span<double> grad) const = 0;

  /// log p(phi) for MAP families; zero otherwise.
  virtual double logprior() const { return 0.0; }
  /// Writes d logprior / d phi into `grad` (overwriting) and returns logprior.
  virtual double logprior_grad(std::span<double> grad) const;
  virtual bool has_prior() const { return false; }

  /// Fills `out` (rows preset to the number of draws, cols == S) with i.i.d.
  /// draws from p_phi(y_t).
  virtual void sample(std::size_t t, Rng& rng, Matrix& out) const = 0;

  virtual std::unique_ptr<GenerativeModel> clone() const = 0;

  /// Convenience: M draws as a fresh matrix.
  Matrix sample(std::size_t t, Rng& rng, std::size_t m) const;

 protected:
  /// Called after phi_ changes so families can cache constrained values.
  virtual void refresh() {}

  Vector phi_;
};

}  // namespace daml
