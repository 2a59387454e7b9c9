#include "daml/models/fixed_models.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "daml/error.hpp"
#include "daml/models/transforms.hpp"

namespace daml {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

QuantizedGaussian::QuantizedGaussian(Vector means, double sigma)
    : means_(std::move(means)), sigma_(sigma) {
  if (means_.empty()) throw ValidationError("quantized_gaussian: no sites");
  if (!(sigma_ > 0.0)) throw ValidationError("quantized_gaussian: sigma must be positive");
  for (double m : means_) {
    if (!(m >= 0.0)) throw ValidationError("quantized_gaussian: means must be >= 0");
  }
}

std::vector<std::pair<std::string, long long>> QuantizedGaussian::shape_metadata() const {
  return {{"S", static_cast<long long>(means_.size())}};
}

double QuantizedGaussian::logpdf(std::span<const double> y, std::size_t) const {
  if (y.size() != means_.size()) throw ValidationError("quantized_gaussian: wrong outcome length");
  double total = 0.0;
  for (std::size_t s = 0; s < y.size(); ++s) {
    if (y[s] < 0.0 || y[s] != std::floor(y[s])) return kNegInf;
    const double hi = transforms::normal_cdf((y[s] + 0.5 - means_[s]) / sigma_);
    const double lo = y[s] == 0.0 ? 0.0 : transforms::normal_cdf((y[s] - 0.5 - means_[s]) / sigma_);
    total += std::log(hi - lo);
  }
  return total;
}

void QuantizedGaussian::sample(std::size_t, Rng& rng, Matrix& out) const {
  if (out.cols != means_.size()) throw ValidationError("quantized_gaussian: wrong buffer width");
  for (std::size_t m = 0; m < out.rows; ++m) {
    for (std::size_t s = 0; s < out.cols; ++s) {
      const double v = std::round(means_[s] + sigma_ * standard_normal(rng));
      out(m, s) = v < 0.0 ? 0.0 : v;
    }
  }
}

std::unique_ptr<GenerativeModel> QuantizedGaussian::clone() const {
  return std::make_unique<QuantizedGaussian>(*this);
}

PointMass::PointMass(std::shared_ptr<const PanelDataset> panel) : panel_(std::move(panel)) {
  if (!panel_) throw ValidationError("point_mass: panel is null");
}

std::vector<std::pair<std::string, long long>> PointMass::shape_metadata() const {
  return {{"S", static_cast<long long>(panel_->num_sites)}};
}

double PointMass::logpdf(std::span<const double> y, std::size_t t) const {
  auto truth = panel_->y(t);
  if (y.size() != truth.size()) throw ValidationError("point_mass: wrong outcome length");
  for (std::size_t s = 0; s < y.size(); ++s) {
    if (y[s] != truth[s]) return kNegInf;
  }
  return 0.0;
}

void PointMass::sample(std::size_t t, Rng&, Matrix& out) const {
  auto truth = panel_->y(t);
  for (std::size_t m = 0; m < out.rows; ++m) {
    std::copy(truth.begin(), truth.end(), out.row(m).begin());
  }
}

std::unique_ptr<GenerativeModel> PointMass::clone() const { return std::make_unique<PointMass>(*this); }

AbcDemoModel::AbcDemoModel() = default;

double AbcDemoModel::logpdf(std::span<const double> y, std::size_t) const {
  if (y.size() != kSites) throw ValidationError("abc_demo: wrong outcome length");
  double total = 0.0;
  for (std::size_t s = 0; s < kSites; ++s) {
    if (s < 3) {
      if (y[s] != kTypeAValue) return kNegInf;
    } else if (s < 6) {
      if (y[s] == kTypeBValue) total += std::log(kTypeBProb);
      else if (y[s] == 0.0) total += std::log1p(-kTypeBProb);
      else return kNegInf;
    } else {
      if (y[s] == kTypeCValue) total += std::log(kTypeCProb);
      else if (y[s] == 0.0) total += std::log1p(-kTypeCProb);
      else return kNegInf;
    }
  }
  return total;
}

void AbcDemoModel::draw(Rng& rng, std::span<double> y) {
  for (std::size_t s = 0; s < 3; ++s) y[s] = kTypeAValue;
  for (std::size_t s = 3; s < 6; ++s) y[s] = uniform01(rng) < kTypeBProb ? kTypeBValue : 0.0;
  for (std::size_t s = 6; s < 9; ++s) y[s] = uniform01(rng) < kTypeCProb ? kTypeCValue : 0.0;
}

void AbcDemoModel::sample(std::size_t, Rng& rng, Matrix& out) const {
  if (out.cols != kSites) throw ValidationError("abc_demo: wrong buffer width");
  for (std::size_t m = 0; m < out.rows; ++m) draw(rng, out.row(m));
}

std::unique_ptr<GenerativeModel> AbcDemoModel::clone() const {
  return std::make_unique<AbcDemoModel>(*this);
}

}  // namespace daml
