#pragma once

// Parameter-free reference models (P = 0): the data-generating truth of the
// synthetic 1D task, the perfect-foresight point mass, and the nine-site
// type A/B/C ranking demo. They satisfy the GenerativeModel contract so the
// same ranking and evaluation code runs on them.

#include <memory>

#include "daml/models/model.hpp"
#include "daml/panel.hpp"

namespace daml {

class FixedModel : public GenerativeModel {
 public:
  std::vector<ParamBlock> param_blocks() const override { return {}; }
  double logpdf_grad(std::span<const double> y, std::size_t t, std::span<double>) const override {
    return logpdf(y, t);
  }
};

/// y_s = max(0, round(N(mean_s, sigma^2))), independent over sites and time.
class QuantizedGaussian final : public FixedModel {
 public:
  QuantizedGaussian(Vector means, double sigma);

  std::string family() const override { return "quantized_gaussian"; }
  std::size_t num_sites() const override { return means_.size(); }
  std::vector<std::pair<std::string, long long>> shape_metadata() const override;
  double logpdf(std::span<const double> y, std::size_t t) const override;
  void sample(std::size_t t, Rng& rng, Matrix& out) const override;
  using GenerativeModel::sample;
  std::unique_ptr<GenerativeModel> clone() const override;

  const Vector& means() const { return means_; }
  double sigma() const { return sigma_; }

 private:
  Vector means_;
  double sigma_;
};

/// Point mass at the observed y_t of a bound panel (perfect foresight).
class PointMass final : public FixedModel {
 public:
  explicit PointMass(std::shared_ptr<const PanelDataset> panel);

  std::string family() const override { return "point_mass"; }
  std::size_t num_sites() const override { return panel_->num_sites; }
  std::vector<std::pair<std::string, long long>> shape_metadata() const override;
  double logpdf(std::span<const double> y, std::size_t t) const override;
  void sample(std::size_t t, Rng& rng, Matrix& out) const override;
  using GenerativeModel::sample;
  std::unique_ptr<GenerativeModel> clone() const override;

 private:
  std::shared_ptr<const PanelDataset> panel_;
};

/// Nine independent sites: #1-3 type A (always 7), #4-6 type B (0 w.p. 0.35,
/// 10 w.p. 0.65), #7-9 type C (0 w.p. 0.9, 80 w.p. 0.1).
class AbcDemoModel final : public FixedModel {
 public:
  static constexpr std::size_t kSites = 9;
  static constexpr double kTypeAValue = 7.0;
  static constexpr double kTypeBValue = 10.0;
  static constexpr double kTypeBProb = 0.65;
  static constexpr double kTypeCValue = 80.0;
  static constexpr double kTypeCProb = 0.1;

  AbcDemoModel();

  std::string family() const override { return "abc_demo"; }
  std::size_t num_sites() const override { return kSites; }
  std::vector<std::pair<std::string, long long>> shape_metadata() const override { return {}; }
  double logpdf(std::span<const double> y, std::size_t t) const override;
  void sample(std::size_t t, Rng& rng, Matrix& out) const override;
  using GenerativeModel::sample;
  std::unique_ptr<GenerativeModel> clone() const override;

  /// Draws one joint outcome into `y` (length 9).
  static void draw(Rng& rng, std::span<double> y);
};

}  // namespace daml
