#include "daml/abc_demo.hpp"

#include <cmath>
#include <fstream>

#include "daml/bpr.hpp"
#include "daml/csv.hpp"
#include "daml/error.hpp"
#include "daml/models/fixed_models.hpp"
#include "daml/parallel.hpp"
#include "daml/rng.hpp"
#include "daml/topk.hpp"

namespace daml {

namespace {

using Abc = AbcDemoModel;

struct OutcomeTable {
  Matrix values;  // 64 x 9
  Matrix ratios;  // 64 x 9
  Vector prob;    // 64
};

const OutcomeTable& outcome_table() {
  static const OutcomeTable table = [] {
    OutcomeTable tb;
    tb.values = Matrix(kAbcOutcomes, Abc::kSites);
    tb.ratios = Matrix(kAbcOutcomes, Abc::kSites);
    tb.prob.resize(kAbcOutcomes);
    for (std::size_t o = 0; o < kAbcOutcomes; ++o) {
      const Vector y = abc_outcome(o);
      double total = 0.0;
      for (std::size_t s = 0; s < Abc::kSites; ++s) {
        tb.values(o, s) = y[s];
        total += y[s];
      }
      for (std::size_t s = 0; s < Abc::kSites; ++s) tb.ratios(o, s) = y[s] / total;
      tb.prob[o] = abc_outcome_probability(o);
    }
    return tb;
  }();
  return table;
}

// Multinomial(M, prob) by sequential conditional binomials.
void draw_outcome_counts(Rng& rng, std::size_t m, const Vector& prob, std::vector<long long>& counts) {
  counts.assign(prob.size(), 0);
  long long left = static_cast<long long>(m);
  double mass_left = 1.0;
  for (std::size_t o = 0; o + 1 < prob.size() && left > 0; ++o) {
    const double p = mass_left > 0.0 ? std::min(1.0, prob[o] / mass_left) : 1.0;
    counts[o] = binomial_variate(rng, left, p);
    left -= counts[o];
    mass_left -= prob[o];
  }
  counts.back() += left;
}

}  // namespace

Vector abc_outcome(std::size_t o) {
  if (o >= kAbcOutcomes) throw ValidationError("ABC outcome index out of range");
  Vector y(Abc::kSites);
  for (std::size_t i = 0; i < 3; ++i) {
    y[i] = Abc::kTypeAValue;
    y[3 + i] = (o >> i) & 1U ? Abc::kTypeBValue : 0.0;
    y[6 + i] = (o >> (3 + i)) & 1U ? Abc::kTypeCValue : 0.0;
  }
  return y;
}

double abc_outcome_probability(std::size_t o) {
  if (o >= kAbcOutcomes) throw ValidationError("ABC outcome index out of range");
  double p = 1.0;
  for (std::size_t i = 0; i < 3; ++i) {
    p *= (o >> i) & 1U ? Abc::kTypeBProb : 1.0 - Abc::kTypeBProb;
    p *= (o >> (3 + i)) & 1U ? Abc::kTypeCProb : 1.0 - Abc::kTypeCProb;
  }
  return p;
}

Vector abc_exact_ratio_expectation() {
  const OutcomeTable& tb = outcome_table();
  Vector r(Abc::kSites, 0.0);
  for (std::size_t o = 0; o < kAbcOutcomes; ++o) {
    for (std::size_t s = 0; s < Abc::kSites; ++s) r[s] += tb.prob[o] * tb.ratios(o, s);
  }
  return r;
}

Vector abc_exact_mean() {
  const OutcomeTable& tb = outcome_table();
  Vector r(Abc::kSites, 0.0);
  for (std::size_t o = 0; o < kAbcOutcomes; ++o) {
    for (std::size_t s = 0; s < Abc::kSites; ++s) r[s] += tb.prob[o] * tb.values(o, s);
  }
  return r;
}

AbcDemoResult run_abc_demo(const AbcDemoOptions& options) {
  if (options.num_trials == 0) throw ValidationError("demo needs at least one trial");
  if (options.num_samples == 0) throw ValidationError("demo needs M >= 1");
  if (options.ks.empty()) throw ValidationError("demo needs at least one K");
  for (std::size_t k : options.ks) validate_k(k, Abc::kSites);
  const OutcomeTable& tb = outcome_table();
  const std::size_t nk = options.ks.size();
  const std::size_t sites = Abc::kSites;

  struct Trial {
    std::vector<double> mean_bpr, ratio_bpr;
    std::vector<std::uint8_t> mean_top3, ratio_top3;
    Vector mean_r, ratio_r;
  };
  std::vector<Trial> trials(options.num_trials);
  parallel_for(options.num_trials, options.threads, [&](std::size_t i) {
    Rng truth_rng = make_rng(options.seed, {stream::kTruth, i});
    Rng batch_rng = make_rng(options.seed, {stream::kTrial, i});
    Vector y(sites);
    Abc::draw(truth_rng, y);
    std::vector<long long> counts;
    draw_outcome_counts(batch_rng, options.num_samples, tb.prob, counts);
    Trial& tr = trials[i];
    tr.mean_r.assign(sites, 0.0);
    tr.ratio_r.assign(sites, 0.0);
    const double inv_m = 1.0 / static_cast<double>(options.num_samples);
    for (std::size_t o = 0; o < kAbcOutcomes; ++o) {
      if (counts[o] == 0) continue;
      const double w = static_cast<double>(counts[o]) * inv_m;
      for (std::size_t s = 0; s < sites; ++s) {
        tr.mean_r[s] += w * tb.values(o, s);
        tr.ratio_r[s] += w * tb.ratios(o, s);
      }
    }
    tr.mean_bpr.resize(nk);
    tr.ratio_bpr.resize(nk);
    for (std::size_t j = 0; j < nk; ++j) {
      const std::size_t k = options.ks[j];
      tr.mean_bpr[j] = bpr(topk_ids(tr.mean_r, k), y, k);
      tr.ratio_bpr[j] = bpr(topk_ids(tr.ratio_r, k), y, k);
    }
    tr.mean_top3 = topk_mask(tr.mean_r, 3);
    tr.ratio_top3 = topk_mask(tr.ratio_r, 3);
  });

  AbcDemoResult res;
  res.ks = options.ks;
  res.mean_bpr.assign(nk, 0.0);
  res.ratio_bpr.assign(nk, 0.0);
  res.mean_bpr_se.assign(nk, 0.0);
  res.ratio_bpr_se.assign(nk, 0.0);
  res.mean_top3_freq.assign(sites, 0.0);
  res.ratio_top3_freq.assign(sites, 0.0);
  res.mean_rank_avg.assign(sites, 0.0);
  res.ratio_rank_avg.assign(sites, 0.0);
  std::vector<double> mean_sq(nk, 0.0), ratio_sq(nk, 0.0);
  for (const Trial& tr : trials) {
    for (std::size_t j = 0; j < nk; ++j) {
      res.mean_bpr[j] += tr.mean_bpr[j];
      res.ratio_bpr[j] += tr.ratio_bpr[j];
      mean_sq[j] += tr.mean_bpr[j] * tr.mean_bpr[j];
      ratio_sq[j] += tr.ratio_bpr[j] * tr.ratio_bpr[j];
    }
    for (std::size_t s = 0; s < sites; ++s) {
      res.mean_top3_freq[s] += tr.mean_top3[s];
      res.ratio_top3_freq[s] += tr.ratio_top3[s];
      res.mean_rank_avg[s] += tr.mean_r[s];
      res.ratio_rank_avg[s] += tr.ratio_r[s];
    }
  }
  const double n = static_cast<double>(options.num_trials);
  auto finish = [n](double& sum, double sq, double& se) {
    sum /= n;
    const double var = n > 1 ? std::max(0.0, (sq - n * sum * sum) / (n - 1)) : 0.0;
    se = std::sqrt(var / n);
  };
  for (std::size_t j = 0; j < nk; ++j) {
    finish(res.mean_bpr[j], mean_sq[j], res.mean_bpr_se[j]);
    finish(res.ratio_bpr[j], ratio_sq[j], res.ratio_bpr_se[j]);
  }
  for (std::size_t s = 0; s < sites; ++s) {
    res.mean_top3_freq[s] /= n;
    res.ratio_top3_freq[s] /= n;
    res.mean_rank_avg[s] /= n;
    res.ratio_rank_avg[s] /= n;
  }
  return res;
}

double abc_expected_bpr(Estimator estimator, std::size_t k, std::size_t num_trials, std::size_t num_samples,
                        std::uint64_t seed, unsigned threads) {
  AbcDemoOptions opts;
  opts.num_trials = num_trials;
  opts.num_samples = num_samples;
  opts.seed = seed;
  opts.threads = threads;
  opts.ks = {k};
  const AbcDemoResult res = run_abc_demo(opts);
  return estimator == Estimator::kMean ? res.mean_bpr[0] : res.ratio_bpr[0];
}

void write_abc_demo_csv(const std::filesystem::path& path, const AbcDemoResult& result,
                        const AbcDemoOptions& options) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << csv::schema_comment() << '\n';
  out << "# trials: " << options.num_trials << ", M: " << options.num_samples << ", seed: " << options.seed << '\n';
  out << "table,estimator,k,site,value,std_error\n";
  for (std::size_t j = 0; j < result.ks.size(); ++j) {
    out << "bpr,mean," << result.ks[j] << ",," << csv::real(result.mean_bpr[j]) << ','
        << csv::real(result.mean_bpr_se[j]) << '\n';
    out << "bpr,ratio," << result.ks[j] << ",," << csv::real(result.ratio_bpr[j]) << ','
        << csv::real(result.ratio_bpr_se[j]) << '\n';
  }
  const std::size_t sites = result.mean_top3_freq.size();
  for (std::size_t s = 0; s < sites; ++s) {
    out << "top3_freq,mean,3," << s + 1 << ',' << csv::real(result.mean_top3_freq[s]) << ",\n";
  }
  for (std::size_t s = 0; s < sites; ++s) {
    out << "top3_freq,ratio,3," << s + 1 << ',' << csv::real(result.ratio_top3_freq[s]) << ",\n";
  }
  for (std::size_t s = 0; s < sites; ++s) {
    out << "rank_avg,mean,," << s + 1 << ',' << csv::real(result.mean_rank_avg[s]) << ",\n";
  }
  for (std::size_t s = 0; s < sites; ++s) {
    out << "rank_avg,ratio,," << s + 1 << ',' << csv::real(result.ratio_rank_avg[s]) << ",\n";
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace daml
