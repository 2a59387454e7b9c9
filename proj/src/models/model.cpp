#include "daml/models/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "daml/error.hpp"

namespace daml {

void GenerativeModel::set_params(std::span<const double> phi) {
  if (phi.size() != phi_.size()) {
    throw ValidationError(family() + ": expected " + std::to_string(phi_.size()) +
                          " parameters, got " + std::to_string(phi.size()));
  }
  for (std::size_t i = 0; i < phi.size(); ++i) {
    if (!std::isfinite(phi[i])) {
      throw ValidationError(family() + ": parameter " + std::to_string(i) + " is not finite");
    }
  }
  std::copy(phi.begin(), phi.end(), phi_.begin());
  refresh();
}

double GenerativeModel::logprior_grad(std::span<double> grad) const {
  std::fill(grad.begin(), grad.end(), 0.0);
  return 0.0;
}

Matrix GenerativeModel::sample(std::size_t t, Rng& rng, std::size_t m) const {
  Matrix out(m, num_sites());
  sample(t, rng, out);
  return out;
}

}  // namespace daml
