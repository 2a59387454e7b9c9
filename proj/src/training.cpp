#include "daml/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include "daml/csv.hpp"
#include "daml/error.hpp"
#include "daml/kernels.hpp"
#include "daml/models/negbin.hpp"
#include "daml/models/tgmm.hpp"

namespace daml {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double quantile_sorted(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::vector<double> train_counts(const PanelDataset& panel) {
  std::vector<double> values;
  for (std::size_t t = panel.train.begin; t < panel.train.end; ++t) {
    const auto y = panel.y(t);
    values.insert(values.end(), y.begin(), y.end());
  }
  if (values.empty()) throw ValidationError("quantile init needs a non-empty training split");
  return values;
}

void quantile_start(GenerativeModel& model, const PanelDataset& panel, Rng& rng) {
  std::vector<double> values = train_counts(panel);
  std::sort(values.begin(), values.end());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());

  if (auto* tgmm = dynamic_cast<TruncGaussMixture*>(&model)) {
    const std::size_t comps = tgmm->num_components();
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / static_cast<double>(values.size()));
    TgmmParams p;
    p.mu.resize(comps);
    p.sigma.assign(comps, std::max(TruncGaussMixture::kSigmaFloor + 0.5, sd / static_cast<double>(comps)));
    std::vector<double> levels(comps);
    for (double& u : levels) u = uniform01(rng);
    std::sort(levels.begin(), levels.end());
    for (std::size_t l = 0; l < comps; ++l) p.mu[l] = std::max(0.5, quantile_sorted(values, levels[l]));
    p.pi = Matrix(tgmm->num_sites(), comps, 1.0 / static_cast<double>(comps));
    tgmm->set_constrained(p);
    return;
  }
  if (auto* nb = dynamic_cast<NegBinMixedEffects*>(&model)) {
    NegBinParams p = nb->constrained();
    p.beta.assign(nb->num_features(), 0.0);
    p.b0.assign(nb->num_sites(), 0.0);
    p.b1.assign(nb->num_sites(), 0.0);
    p.q = 0.5;
    p.beta0 = std::log(std::max(mean, 0.1));  // E[y] = mu (1 - q) / q = mu at q = 0.5
    p.sigma0 = 1.0;
    p.sigma1 = 0.1;
    p.rho = 0.0;
    nb->set_constrained(p);
    return;
  }
  throw ValidationError("quantile init is not defined for model family '" + model.family() + "'");
}

double norm2(std::span<const double> v) { return std::sqrt(kernels::dot(v, v)); }

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

double selection_score(const TrainConfig& cfg, const SplitMetrics& val) {
  switch (cfg.objective) {
    case Objective::kNll: return val.nll_mean;
    case Objective::kBpr: return -val.bpr_mean;
    case Objective::kDaml: {
      if (val.bpr.empty()) return kInf;
      double pen = 0.0;
      for (double b : val.bpr) pen += penalty_term(constraint_g(-b, cfg.epsilon), cfg.lambda);
      return val.nll_mean + pen / static_cast<double>(val.bpr.size());
    }
  }
  return kInf;
}

}  // namespace

std::string to_string(InitMode mode) { return mode == InitMode::kNormal ? "normal" : "quantile"; }

InitMode parse_init_mode(const std::string& name) {
  if (name == "normal") return InitMode::kNormal;
  if (name == "quantile") return InitMode::kQuantile;
  throw ValidationError("unknown init mode '" + name + "' (expected normal or quantile)");
}

void TrainConfig::validate(std::size_t num_sites) const {
  objective_config().validate(num_sites);
  if (!(step_size > 0.0) || !std::isfinite(step_size)) throw ValidationError("step_size must be positive");
  if (eval_every == 0) throw ValidationError("eval_every must be >= 1");
  if (eval_samples == 0) throw ValidationError("eval_samples must be >= 1");
  if (patience == 0) throw ValidationError("patience must be >= 1");
  if (!(init_scale >= 0.0) || !std::isfinite(init_scale)) throw ValidationError("init_scale must be >= 0");
  if (!(grad_tol >= 0.0)) throw ValidationError("grad_tol must be >= 0");
  if (objective == Objective::kDaml && !(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw ValidationError("DAML epsilon must lie in [0, 1]");
  }
}

ObjectiveConfig TrainConfig::objective_config() const {
  ObjectiveConfig oc;
  oc.objective = objective;
  oc.k = k;
  oc.epsilon = epsilon;
  oc.lambda = lambda;
  oc.num_samples = num_samples;
  oc.num_perturbations = num_perturbations;
  oc.sigma = sigma;
  oc.seed = seed;
  oc.threads = threads;
  return oc;
}

void initialize_params(GenerativeModel& model, const PanelDataset& panel, const TrainConfig& cfg) {
  if (!cfg.init_params.empty()) {
    model.set_params(cfg.init_params);
    return;
  }
  Vector phi(model.num_params(), 0.0);
  Rng rng = make_rng(cfg.seed, {stream::kInit});
  if (cfg.init == InitMode::kQuantile) {
    quantile_start(model, panel, rng);
    phi.assign(model.params().begin(), model.params().end());
  }
  for (double& v : phi) v += cfg.init_scale * standard_normal(rng);
  model.set_params(phi);
}

TrainResult train(GenerativeModel& model, const PanelDataset& panel, const TrainConfig& cfg) {
  cfg.validate(panel.num_sites);
  if (model.num_sites() != panel.num_sites) throw ValidationError("model and panel disagree on S");
  if (panel.train.empty()) throw ValidationError("training split is empty");
  const ObjectiveConfig ocfg = cfg.objective_config();
  const SplitRange val_split = panel.val_or_train();
  const bool write_files = !cfg.output_dir.empty();
  const auto last_path = cfg.output_dir / "last.ckpt";
  const auto best_path = cfg.output_dir / "best.ckpt";
  const auto metrics_path = cfg.output_dir / "metrics.csv";
  if (write_files) std::filesystem::create_directories(cfg.output_dir);

  TrainResult result;
  Optimizer optimizer(cfg.optimizer, cfg.step_size, model.num_params());
  double best_score = kInf;
  long long stale = 0;
  long long start_epoch = 0;

  auto evaluate_into = [&](EpochRecord& rec) {
    const SplitMetrics tr = evaluate_split(model, panel, panel.train, cfg.k, cfg.eval_samples, cfg.seed, cfg.threads);
    const SplitMetrics va = evaluate_split(model, panel, val_split, cfg.k, cfg.eval_samples, cfg.seed, cfg.threads);
    rec.train_nll = tr.nll_mean;
    rec.train_bpr_mean = tr.bpr_mean;
    rec.val_nll = va.nll_mean;
    rec.val_bpr_mean = va.bpr_mean;
    rec.evaluated = true;
    return selection_score(cfg, va);
  };
  auto snapshot = [&](long long epoch, const EpochRecord& rec, double score) {
    Checkpoint ck = make_checkpoint(model, epoch);
    ck.scalars["objective"] = rec.objective;
    ck.scalars["val_nll"] = rec.val_nll;
    ck.scalars["val_bpr_mean"] = rec.val_bpr_mean;
    ck.scalars["train_nll"] = rec.train_nll;
    ck.scalars["train_bpr_mean"] = rec.train_bpr_mean;
    ck.scalars["selection_score"] = score;
    return ck;
  };
  auto save_last = [&](long long epoch, const EpochRecord& rec) {
    if (!write_files) return;
    Checkpoint ck = snapshot(epoch, rec, best_score);
    ck.scalars["best_score"] = best_score;
    ck.scalars["stale_evals"] = static_cast<double>(stale);
    ck.optimizer = optimizer.state();
    save_checkpoint(last_path, ck);
    write_metrics_csv(metrics_path, result.history);
  };

  const bool resuming = cfg.resume && write_files && std::filesystem::exists(last_path);
  if (resuming) {
    const Checkpoint last = load_checkpoint(last_path);
    if (last.family != model.family() || last.phi.size() != model.num_params()) {
      throw ValidationError("resume checkpoint does not match the configured model");
    }
    if (!last.optimizer) throw ValidationError("resume checkpoint has no optimizer state");
    model.set_params(last.phi);
    optimizer = Optimizer(*last.optimizer);
    start_epoch = last.epoch;
    best_score = last.scalar("best_score", kInf);
    stale = static_cast<long long>(last.scalar("stale_evals", 0.0));
    result.best = load_checkpoint(best_path);
    if (std::filesystem::exists(metrics_path)) {
      for (const EpochRecord& r : read_metrics_csv(metrics_path)) {
        if (r.epoch <= start_epoch) result.history.push_back(r);
      }
    }
  } else {
    initialize_params(model, panel, cfg);
    const auto t0 = std::chrono::steady_clock::now();
    EpochRecord rec;
    rec.epoch = 0;
    const ObjectiveResult res = evaluate_objective(model, panel, panel.train, ocfg, 0);
    if (res.degenerate > 0) {
      warn(std::to_string(res.degenerate) + " training period(s) have no events; their BPR is taken as 1");
    }
    rec.objective = res.value;
    rec.grad_norm = norm2(res.grad);
    best_score = evaluate_into(rec);
    rec.wall_ms = cfg.record_timing ? elapsed_ms(t0) : 0.0;
    result.history.push_back(rec);
    result.best = snapshot(0, rec, best_score);
    if (write_files) save_checkpoint(best_path, result.best);
    save_last(0, rec);
  }

  result.epochs_run = start_epoch;
  result.stop_reason = "max_epochs";
  Vector phi(model.params().begin(), model.params().end());
  for (long long epoch = start_epoch + 1; epoch <= static_cast<long long>(cfg.max_epochs); ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    EpochRecord rec;
    rec.epoch = epoch;
    const ObjectiveResult res = evaluate_objective(model, panel, panel.train, ocfg, static_cast<std::uint64_t>(epoch));
    rec.objective = res.value;
    rec.grad_norm = norm2(res.grad);
    if (!std::isfinite(rec.grad_norm)) throw NumericalError("non-finite gradient at epoch " + std::to_string(epoch));
    if (rec.grad_norm < cfg.grad_tol) {
      result.stop_reason = "converged";
      break;
    }
    optimizer.step(phi, res.grad);
    for (std::size_t i = 0; i < phi.size(); ++i) {
      if (!std::isfinite(phi[i])) {
        throw NumericalError("parameter " + std::to_string(i) + " became non-finite at epoch " + std::to_string(epoch));
      }
    }
    model.set_params(phi);
    result.epochs_run = epoch;

    const bool do_eval = epoch % static_cast<long long>(cfg.eval_every) == 0 ||
                         epoch == static_cast<long long>(cfg.max_epochs);
    if (do_eval) {
      const double score = evaluate_into(rec);
      rec.wall_ms = cfg.record_timing ? elapsed_ms(t0) : 0.0;
      if (score < best_score) {
        best_score = score;
        stale = 0;
        result.best = snapshot(epoch, rec, score);
        if (write_files) save_checkpoint(best_path, result.best);
      } else {
        ++stale;
      }
      result.history.push_back(rec);
      save_last(epoch, rec);
      if (stale >= static_cast<long long>(cfg.patience)) {
        result.stop_reason = "patience";
        break;
      }
    } else {
      rec.wall_ms = cfg.record_timing ? elapsed_ms(t0) : 0.0;
      result.history.push_back(rec);
    }
  }
  if (write_files && !result.history.empty()) {
    save_last(result.epochs_run, result.history.back());
  }
  return result;
}

void write_metrics_csv(const std::filesystem::path& path, const std::vector<EpochRecord>& history) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << csv::schema_comment() << '\n';
  out << "epoch,objective,train_nll,train_bpr_mean,val_nll,val_bpr_mean,grad_norm,wall_ms\n";
  for (const EpochRecord& r : history) {
    out << r.epoch << ',' << csv::real(r.objective) << ',';
    if (r.evaluated) {
      out << csv::real(r.train_nll) << ',' << csv::real(r.train_bpr_mean) << ',' << csv::real(r.val_nll) << ','
          << csv::real(r.val_bpr_mean);
    } else {
      out << ",,,";
    }
    out << ',' << csv::real(r.grad_norm) << ',' << csv::real(r.wall_ms) << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<EpochRecord> read_metrics_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<EpochRecord> out;
  std::string line;
  bool header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    const auto f = csv::split_line(line);
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (f.size() != 8) throw IoError(where + ": expected 8 columns");
    EpochRecord r;
    r.epoch = csv::parse_int(f[0], where);
    r.objective = csv::parse_real(f[1], where);
    r.evaluated = !f[2].empty();
    if (r.evaluated) {
      r.train_nll = csv::parse_real(f[2], where);
      r.train_bpr_mean = csv::parse_real(f[3], where);
      r.val_nll = csv::parse_real(f[4], where);
      r.val_bpr_mean = csv::parse_real(f[5], where);
    }
    r.grad_norm = csv::parse_real(f[6], where);
    r.wall_ms = csv::parse_real(f[7], where);
    out.push_back(r);
  }
  return out;
}

}  // namespace daml
