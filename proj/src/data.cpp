#include "daml/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "daml/csv.hpp"
#include "daml/error.hpp"
#include "daml/rng.hpp"

namespace daml {

PanelDataset::PanelDataset(std::size_t sites, std::size_t periods, std::size_t feats)
    : num_sites(sites),
      num_periods(periods),
      num_features(feats),
      counts(sites * periods, 0.0),
      features(sites * periods * feats, 0.0) {
  site_ids.reserve(sites);
  for (std::size_t s = 0; s < sites; ++s) site_ids.push_back("site" + std::to_string(s));
  feature_names.reserve(feats);
  for (std::size_t d = 0; d < feats; ++d) feature_names.push_back("x" + std::to_string(d));
  train = {0, periods};
}

void PanelDataset::validate() const {
  if (num_sites == 0 || num_periods == 0) throw ValidationError("panel needs S >= 1 and T >= 1");
  if (counts.size() != num_sites * num_periods) throw ValidationError("panel counts have the wrong size");
  if (features.size() != num_sites * num_periods * num_features) {
    throw ValidationError("panel features have the wrong size");
  }
  if (site_ids.size() != num_sites) throw ValidationError("panel needs one id per site");
  if (feature_names.size() != num_features) throw ValidationError("panel needs one name per feature");
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double c = counts[i];
    if (!std::isfinite(c) || c < 0.0 || c != std::floor(c)) {
      throw ValidationError("count at t=" + std::to_string(i / num_sites) + ", site=" + std::to_string(i % num_sites) +
                            " is not a non-negative integer");
    }
  }
  for (double x : features) {
    if (!std::isfinite(x)) throw ValidationError("panel features must be finite");
  }
  const SplitRange parts[] = {train, val, test};
  std::size_t prev_end = 0;
  for (const SplitRange& r : parts) {
    if (r.empty()) continue;
    if (r.end > num_periods) throw ValidationError("split range extends past T");
    if (r.begin < prev_end) throw ValidationError("splits must be ordered train < val < test and disjoint");
    prev_end = r.end;
  }
}

PanelDataset gen_synthetic_1d(std::uint64_t seed) {
  constexpr std::size_t kSites = std::size(kSynthetic1dMeans);
  constexpr std::size_t kPeriods = 500;
  PanelDataset panel(kSites, kPeriods);
  Rng rng = make_rng(seed, {stream::kData, 1});
  for (std::size_t t = 0; t < kPeriods; ++t) {
    auto y = panel.y(t);
    for (std::size_t s = 0; s < kSites; ++s) {
      const double v = std::round(kSynthetic1dMeans[s] + kSynthetic1dSigma * standard_normal(rng));
      y[s] = std::max(0.0, v);
    }
  }
  return panel;
}

PanelDataset gen_synthetic_negbin(std::uint64_t seed, const NegBinPanelSpec& spec) {
  if (spec.num_sites < 2 || spec.num_periods < 3) throw ValidationError("negbin panel needs S >= 2 and T >= 3");
  PanelDataset panel(spec.num_sites, spec.num_periods, spec.num_features);
  Rng site_rng = make_rng(seed, {stream::kData, 2, 0});
  Rng feat_rng = make_rng(seed, {stream::kData, 2, 1});
  Rng count_rng = make_rng(seed, {stream::kData, 2, 2});
  std::vector<double> level(spec.num_sites);
  std::vector<bool> bursty(spec.num_sites);
  for (std::size_t s = 0; s < spec.num_sites; ++s) {
    bursty[s] = s % 2 == 1;
    level[s] = 2.0 + 6.0 * uniform01(site_rng);
  }
  fill_standard_normal(feat_rng, panel.features);
  for (std::size_t t = 0; t < spec.num_periods; ++t) {
    auto y = panel.y(t);
    for (std::size_t s = 0; s < spec.num_sites; ++s) {
      double effect = 0.0;
      for (double x : panel.x(t, s)) effect += 0.15 * x;
      const double mean = level[s] * std::exp(effect);
      if (bursty[s]) {
        // Zero most of the time, otherwise a large burst with the same mean.
        y[s] = uniform01(count_rng) < 0.2 ? static_cast<double>(poisson_variate(count_rng, 5.0 * mean)) : 0.0;
      } else {
        y[s] = static_cast<double>(poisson_variate(count_rng, mean));
      }
    }
  }
  for (std::size_t s = 0; s < spec.num_sites; ++s) panel.site_ids[s] = (bursty[s] ? "bursty" : "steady") + std::to_string(s);
  assign_splits(panel, spec.train_fraction, spec.val_fraction);
  return panel;
}

void assign_splits(PanelDataset& panel, double train_fraction, double val_fraction) {
  if (!(train_fraction > 0.0) || !(val_fraction >= 0.0) || train_fraction + val_fraction > 1.0 + 1e-12) {
    throw ValidationError("split fractions must satisfy 0 < train, 0 <= val, train + val <= 1");
  }
  const std::size_t t = panel.num_periods;
  const auto n_train = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(t))));
  const auto n_val = std::min(t - std::min(t, n_train),
                              static_cast<std::size_t>(std::llround(val_fraction * static_cast<double>(t))));
  panel.train = {0, std::min(n_train, t)};
  panel.val = {panel.train.end, panel.train.end + n_val};
  panel.test = {panel.val.end, t};
}

namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

}  // namespace

PanelDataset load_panel_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open panel file " + path.string());
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || line[0] == '#') continue;
    header = csv::split_line(line);
    break;
  }
  if (header.empty()) throw ValidationError(path.string() + ": missing header row");
  for (auto& h : header) h = trim(h);
  if (header.size() < 3 || header[0] != "site_id" || header[1] != "time_index" || header[2] != "count") {
    throw ValidationError(path.string() + ": header must start with site_id,time_index,count");
  }
  const std::size_t num_features = header.size() - 3;

  struct Row {
    std::size_t site;
    long long time;
    double count;
    std::vector<double> x;
    std::size_t line;
  };
  std::vector<Row> rows;
  std::vector<std::string> site_order;
  std::unordered_map<std::string, std::size_t> site_index;
  long long max_time = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || line[0] == '#') continue;
    const std::string where = path.string() + ": row " + std::to_string(line_no);
    std::vector<std::string> f;
    try {
      f = csv::split_line(line);
    } catch (const ValidationError& e) {
      throw ValidationError(where + ": " + e.what());
    }
    if (f.size() != header.size()) {
      throw ValidationError(where + ": expected " + std::to_string(header.size()) + " fields, got " +
                            std::to_string(f.size()));
    }
    Row r;
    r.line = line_no;
    const std::string id = trim(f[0]);
    if (id.empty()) throw ValidationError(where + ": empty site_id");
    auto [it, inserted] = site_index.emplace(id, site_order.size());
    if (inserted) site_order.push_back(id);
    r.site = it->second;
    r.time = csv::parse_int(f[1], where + " time_index");
    if (r.time < 0) throw ValidationError(where + ": time_index must be >= 0");
    const long long c = csv::parse_int(f[2], where + " count");
    if (c < 0) throw ValidationError(where + ": negative count " + std::to_string(c));
    r.count = static_cast<double>(c);
    r.x.resize(num_features);
    for (std::size_t d = 0; d < num_features; ++d) {
      r.x[d] = csv::parse_real(f[3 + d], where + " " + header[3 + d]);
      if (!std::isfinite(r.x[d])) throw ValidationError(where + ": non-finite feature " + header[3 + d]);
    }
    max_time = std::max(max_time, r.time);
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw ValidationError(path.string() + ": no data rows");

  const std::size_t sites = site_order.size();
  const auto periods = static_cast<std::size_t>(max_time + 1);
  PanelDataset panel(sites, periods, num_features);
  panel.site_ids = site_order;
  panel.feature_names.assign(header.begin() + 3, header.end());
  std::vector<std::size_t> seen_line(sites * periods, 0);
  for (const Row& r : rows) {
    const std::size_t cell = static_cast<std::size_t>(r.time) * sites + r.site;
    if (seen_line[cell] != 0) {
      throw ValidationError(path.string() + ": row " + std::to_string(r.line) + ": duplicate cell (site " +
                            site_order[r.site] + ", time " + std::to_string(r.time) + "), first at row " +
                            std::to_string(seen_line[cell]));
    }
    seen_line[cell] = r.line;
    panel.counts[cell] = r.count;
    std::copy(r.x.begin(), r.x.end(), panel.x(static_cast<std::size_t>(r.time), r.site).begin());
  }
  std::ostringstream missing;
  std::size_t n_missing = 0;
  for (std::size_t t = 0; t < periods; ++t) {
    for (std::size_t s = 0; s < sites; ++s) {
      if (seen_line[t * sites + s] == 0) {
        if (n_missing < 20) missing << (n_missing ? ", " : "") << "(" << site_order[s] << ", " << t << ")";
        ++n_missing;
      }
    }
  }
  if (n_missing > 0) {
    throw ValidationError(path.string() + ": grid is not dense; " + std::to_string(n_missing) +
                          " missing (site, time) cell(s): " + missing.str() + (n_missing > 20 ? ", ..." : ""));
  }
  panel.validate();
  return panel;
}

void write_panel_csv(const std::filesystem::path& path, const PanelDataset& panel) {
  panel.validate();
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << csv::schema_comment() << '\n';
  out << "site_id,time_index,count";
  for (const auto& name : panel.feature_names) out << ',' << csv::quote(name);
  out << '\n';
  for (std::size_t s = 0; s < panel.num_sites; ++s) {
    for (std::size_t t = 0; t < panel.num_periods; ++t) {
      out << csv::quote(panel.site_ids[s]) << ',' << t << ',' << static_cast<long long>(panel.y(t)[s]);
      for (double x : panel.x(t, s)) out << ',' << csv::real(x);
      out << '\n';
    }
  }
  if (!out) throw IoError("write failed for " + path.string());
}

PanelDataset make_lag_features(const PanelDataset& panel, std::size_t n_lags) {
  const std::size_t d_old = panel.num_features;
  const std::size_t d_new = d_old + 2 * n_lags;
  PanelDataset out(panel.num_sites, panel.num_periods, d_new);
  out.site_ids = panel.site_ids;
  out.counts = panel.counts;
  out.train = panel.train;
  out.val = panel.val;
  out.test = panel.test;
  out.feature_names = panel.feature_names;
  for (std::size_t k = 1; k <= n_lags; ++k) out.feature_names.push_back("lag_" + std::to_string(k));
  for (std::size_t k = 1; k <= n_lags; ++k) out.feature_names.push_back("lag_" + std::to_string(k) + "_missing");
  for (std::size_t t = 0; t < panel.num_periods; ++t) {
    for (std::size_t s = 0; s < panel.num_sites; ++s) {
      auto dst = out.x(t, s);
      const auto src = panel.x(t, s);
      std::copy(src.begin(), src.end(), dst.begin());
      for (std::size_t k = 1; k <= n_lags; ++k) {
        const bool have = t >= k;
        dst[d_old + k - 1] = have ? panel.y(t - k)[s] : 0.0;
        dst[d_old + n_lags + k - 1] = have ? 0.0 : 1.0;
      }
    }
  }
  return out;
}

void standardize_features(PanelDataset& panel) {
  const std::size_t d = panel.num_features;
  if (d == 0) return;
  const SplitRange tr = panel.train.empty() ? SplitRange{0, panel.num_periods} : panel.train;
  const double n = static_cast<double>(tr.size() * panel.num_sites);
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    for (std::size_t t = tr.begin; t < tr.end; ++t) {
      for (std::size_t s = 0; s < panel.num_sites; ++s) mean += panel.x(t, s)[j];
    }
    mean /= n;
    double var = 0.0;
    for (std::size_t t = tr.begin; t < tr.end; ++t) {
      for (std::size_t s = 0; s < panel.num_sites; ++s) {
        const double dev = panel.x(t, s)[j] - mean;
        var += dev * dev;
      }
    }
    const double sd = std::sqrt(var / n);
    const double inv = sd > 1e-12 ? 1.0 / sd : 1.0;
    for (std::size_t t = 0; t < panel.num_periods; ++t) {
      for (std::size_t s = 0; s < panel.num_sites; ++s) {
        double& x = panel.x(t, s)[j];
        x = (x - mean) * inv;
      }
    }
  }
}

}  // namespace daml
