#include "daml/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "daml/bpr.hpp"
#include "daml/csv.hpp"
#include "daml/error.hpp"
#include "daml/parallel.hpp"
#include "daml/ranking.hpp"
#include "daml/rng.hpp"
#include "daml/topk.hpp"

namespace daml {

namespace {

void check_split(const PanelDataset& panel, SplitRange split) {
  if (split.empty()) throw ValidationError("evaluation split is empty");
  if (split.end > panel.num_periods) throw ValidationError("evaluation split extends past the panel");
}

// Accumulates BPR/MAE/RMSE of a deterministic point forecast.
BaselineMetrics score_point_forecasts(const PanelDataset& panel, SplitRange split, std::size_t k,
                                      const std::vector<Vector>& forecasts) {
  BaselineMetrics m;
  double abs_err = 0.0, sq_err = 0.0;
  for (std::size_t i = 0; i < split.size(); ++i) {
    const auto y = panel.y(split.begin + i);
    const Vector& f = forecasts[i];
    m.bpr_mean += bpr(topk_ids(f, k), y, k, DegeneratePolicy::kDefineAsOneSilent);
    for (std::size_t s = 0; s < panel.num_sites; ++s) {
      const double e = f[s] - y[s];
      abs_err += std::abs(e);
      sq_err += e * e;
    }
  }
  const double cells = static_cast<double>(split.size() * panel.num_sites);
  m.bpr_mean /= static_cast<double>(split.size());
  m.mae = abs_err / cells;
  m.rmse = std::sqrt(sq_err / cells);
  return m;
}

}  // namespace

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw ValidationError("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("quantile level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

BaselineMetrics zero_baseline(const PanelDataset& panel, SplitRange split, std::size_t k) {
  check_split(panel, split);
  validate_k(k, panel.num_sites);
  return score_point_forecasts(panel, split, k, std::vector<Vector>(split.size(), Vector(panel.num_sites, 0.0)));
}

BaselineMetrics historical_baseline(const PanelDataset& panel, SplitRange split, std::size_t k, std::size_t lags) {
  check_split(panel, split);
  validate_k(k, panel.num_sites);
  if (lags == 0) throw ValidationError("historical baseline needs at least one lag");
  std::vector<Vector> forecasts(split.size(), Vector(panel.num_sites, 0.0));
  for (std::size_t i = 0; i < split.size(); ++i) {
    const std::size_t t = split.begin + i;
    const std::size_t avail = std::min(lags, t);
    if (avail == 0) continue;
    for (std::size_t j = 1; j <= avail; ++j) {
      const auto y = panel.y(t - j);
      for (std::size_t s = 0; s < panel.num_sites; ++s) forecasts[i][s] += y[s];
    }
    for (double& v : forecasts[i]) v /= static_cast<double>(avail);
  }
  return score_point_forecasts(panel, split, k, forecasts);
}

EvaluationReport evaluate_model(const GenerativeModel& model, const PanelDataset& panel, SplitRange split,
                                const EvaluateOptions& options) {
  check_split(panel, split);
  validate_k(options.k, panel.num_sites);
  if (options.num_samples == 0 || options.num_trials == 0) throw ValidationError("evaluation needs M, trials >= 1");
  if (model.num_sites() != panel.num_sites) throw ValidationError("model and panel disagree on S");
  const std::size_t periods = split.size();
  const std::size_t sites = panel.num_sites;
  const std::size_t k = options.k;

  EvaluationReport rep;
  rep.periods = periods;
  for (std::size_t t = split.begin; t < split.end; ++t) {
    const double lp = model.logpdf(panel.y(t), t);
    if (!std::isfinite(lp)) warn("log-likelihood is not finite at period " + std::to_string(t));
    rep.nll_total -= lp;
    if (!(oracle_topk_sum(panel.y(t), k) > 0.0)) ++rep.degenerate_periods;
  }
  rep.nll_mean = rep.nll_total / static_cast<double>(periods);
  rep.loglik_mean = -rep.nll_mean;
  if (rep.degenerate_periods > 0) {
    warn(std::to_string(rep.degenerate_periods) + " evaluation period(s) have no events; their BPR is taken as 1");
  }

  rep.bpr_trials.assign(options.num_trials, 0.0);
  parallel_for(options.num_trials, options.threads, [&](std::size_t trial) {
    Matrix batch(options.num_samples, sites);
    double total = 0.0;
    for (std::size_t t = split.begin; t < split.end; ++t) {
      Rng rng = make_rng(options.seed, {stream::kTrial, trial, stream::kPeriod, t});
      model.sample(t, rng, batch);
      const Vector r = ratio_rank(batch);
      total += bpr(topk_ids(r, k), panel.y(t), k, DegeneratePolicy::kDefineAsOneSilent);
    }
    rep.bpr_trials[trial] = total / static_cast<double>(periods);
  });
  for (double b : rep.bpr_trials) rep.bpr_mean += b;
  rep.bpr_mean /= static_cast<double>(options.num_trials);
  rep.bpr_p05 = quantile(rep.bpr_trials, 0.05);
  rep.bpr_p50 = quantile(rep.bpr_trials, 0.50);
  rep.bpr_p95 = quantile(rep.bpr_trials, 0.95);

  std::vector<Vector> point(periods);
  parallel_for(periods, options.threads, [&](std::size_t i) {
    const std::size_t t = split.begin + i;
    Rng rng = make_rng(options.seed, {stream::kEval, t});
    Matrix batch(options.num_samples, sites);
    model.sample(t, rng, batch);
    point[i] = mean_rank(batch);
  });
  const BaselineMetrics pm = score_point_forecasts(panel, split, k, point);
  rep.mae = pm.mae;
  rep.rmse = pm.rmse;
  rep.zero = zero_baseline(panel, split, k);
  rep.historical = historical_baseline(panel, split, k, options.history_lags);
  return rep;
}

void write_bpr_samples(const std::filesystem::path& path, const std::vector<double>& values) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << csv::schema_comment() << "\nbpr\n";
  for (double v : values) out << csv::real(v) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<double> read_bpr_samples(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<double> out;
  std::string line;
  bool header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "bpr") throw IoError(path.string() + ": expected header 'bpr'");
      header = true;
      continue;
    }
    out.push_back(csv::parse_real(line, path.string() + ":" + std::to_string(line_no)));
  }
  return out;
}

}  // namespace daml
