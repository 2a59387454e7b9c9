#include "daml/optim.hpp"

#include <cmath>

#include "daml/error.hpp"

namespace daml {

std::string to_string(OptimizerKind kind) { return kind == OptimizerKind::kSgd ? "sgd" : "adam"; }

OptimizerKind parse_optimizer(const std::string& name) {
  if (name == "sgd" || name == "SGD") return OptimizerKind::kSgd;
  if (name == "adam" || name == "ADAM" || name == "Adam") return OptimizerKind::kAdam;
  throw ValidationError("unknown optimizer '" + name + "' (expected sgd or adam)");
}

Optimizer::Optimizer(OptimizerKind kind, double step_size, std::size_t num_params) {
  if (!(step_size > 0.0) || !std::isfinite(step_size)) {
    throw ValidationError("step size must be positive and finite");
  }
  state_.kind = kind;
  state_.step_size = step_size;
  if (kind == OptimizerKind::kAdam) {
    state_.m.assign(num_params, 0.0);
    state_.v.assign(num_params, 0.0);
  }
}

Optimizer::Optimizer(OptimizerState state) : state_(std::move(state)) {
  if (!(state_.step_size > 0.0)) throw ValidationError("step size must be positive");
  if (state_.kind == OptimizerKind::kAdam && state_.m.size() != state_.v.size()) {
    throw ValidationError("Adam moment vectors differ in length");
  }
}

void Optimizer::step(std::span<double> phi, std::span<const double> grad) {
  if (grad.size() != phi.size()) throw ValidationError("optimizer: gradient has wrong length");
  ++state_.steps;
  const double lr = state_.step_size;
  if (state_.kind == OptimizerKind::kSgd) {
    for (std::size_t i = 0; i < phi.size(); ++i) phi[i] -= lr * grad[i];
    return;
  }
  if (state_.m.size() != phi.size()) throw ValidationError("optimizer: state sized for another model");
  const double b1 = state_.beta1, b2 = state_.beta2;
  const double t = static_cast<double>(state_.steps);
  const double c1 = 1.0 - std::pow(b1, t);
  const double c2 = 1.0 - std::pow(b2, t);
  for (std::size_t i = 0; i < phi.size(); ++i) {
    state_.m[i] = b1 * state_.m[i] + (1.0 - b1) * grad[i];
    state_.v[i] = b2 * state_.v[i] + (1.0 - b2) * grad[i] * grad[i];
    const double m_hat = state_.m[i] / c1;
    const double v_hat = state_.v[i] / c2;
    phi[i] -= lr * m_hat / (std::sqrt(v_hat) + state_.eps);
  }
}

}  // namespace daml
