#pragma once

// First-order optimizers over a flat parameter vector. Both minimise: the
// update moves against the supplied gradient.

#include <cstddef>
#include <span>
#include <string>

#include "daml/linalg.hpp"

namespace daml {

enum class OptimizerKind { kSgd, kAdam };

std::string to_string(OptimizerKind kind);
OptimizerKind parse_optimizer(const std::string& name);

struct OptimizerState {
  OptimizerKind kind = OptimizerKind::kAdam;
  double step_size = 0.1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long long steps = 0;
  Vector m;  // first moment (Adam)
  Vector v;  // second moment (Adam)
};

class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double step_size, std::size_t num_params);
  explicit Optimizer(OptimizerState state);

  /// phi <- phi - update(grad).
  void step(std::span<double> phi, std::span<const double> grad);

  const OptimizerState& state() const { return state_; }

 private:
  OptimizerState state_;
};

}  // namespace daml
