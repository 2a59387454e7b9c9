#include "daml/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "daml/error.hpp"

namespace daml {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string run_label(const TrainConfig& cfg) {
  char buf[160];
  if (cfg.objective == Objective::kNll) {
    std::snprintf(buf, sizeof buf, "nll_seed%llu_lr%g", static_cast<unsigned long long>(cfg.seed), cfg.step_size);
  } else if (cfg.objective == Objective::kBpr) {
    std::snprintf(buf, sizeof buf, "bpr_seed%llu_lr%g_sig%g", static_cast<unsigned long long>(cfg.seed),
                  cfg.step_size, cfg.sigma);
  } else {
    std::snprintf(buf, sizeof buf, "daml_eps%.4f_seed%llu_lr%g_sig%g", cfg.epsilon,
                  static_cast<unsigned long long>(cfg.seed), cfg.step_size, cfg.sigma);
  }
  return buf;
}

}  // namespace

TrialResult trial_row(const SweepRun& run) {
  TrialResult r;
  r.model_label = run.label;
  r.objective = to_string(run.config.objective);
  r.epsilon = run.config.objective == Objective::kDaml ? run.config.epsilon : kNaN;
  r.lambda = run.config.objective == Objective::kDaml ? run.config.lambda : kNaN;
  r.seed = run.config.seed;
  r.step_size = run.config.step_size;
  r.sigma = run.config.objective == Objective::kNll ? kNaN : run.config.sigma;
  r.status = run.ok ? "ok" : "failed";
  r.error = run.error;
  r.test_loglik = r.bpr_mean = r.bpr_p05 = r.bpr_p50 = r.bpr_p95 = kNaN;
  if (run.ok) {
    const Checkpoint& b = run.result.best;
    r.best_epoch = b.epoch;
    r.train_loglik = -b.scalar("train_nll", kNaN);
    r.train_bpr_mean = b.scalar("train_bpr_mean", kNaN);
    r.val_loglik = -b.scalar("val_nll", kNaN);
    r.val_bpr_mean = b.scalar("val_bpr_mean", kNaN);
    if (!run.config.output_dir.empty()) r.checkpoint_path = (run.config.output_dir / "best.ckpt").string();
  } else {
    r.train_loglik = r.train_bpr_mean = r.val_loglik = r.val_bpr_mean = kNaN;
  }
  return r;
}

double SweepRun::val_nll() const { return ok ? result.best.scalar("val_nll", kNaN) : kNaN; }
double SweepRun::val_bpr() const { return ok ? result.best.scalar("val_bpr_mean", kNaN) : kNaN; }

std::vector<SweepRun> sweep(const ModelFactory& factory, const PanelDataset& panel, const TrainConfig& base,
                            const SweepGrid& grid) {
  if (grid.seeds.empty() || grid.step_sizes.empty()) throw ValidationError("sweep grid needs seeds and step sizes");
  std::vector<double> sigmas = grid.sigmas;
  if (base.objective == Objective::kNll || sigmas.empty()) sigmas = {base.sigma};
  std::vector<SweepRun> runs;
  for (double lr : grid.step_sizes) {
    for (double sigma : sigmas) {
      for (std::uint64_t seed : grid.seeds) {
        SweepRun run;
        run.config = base;
        run.config.step_size = lr;
        run.config.sigma = sigma;
        run.config.seed = seed;
        run.label = run_label(run.config);
        if (!base.output_dir.empty()) run.config.output_dir = base.output_dir / run.label;
        try {
          auto model = factory();
          run.result = train(*model, panel, run.config);
          model->set_params(run.result.best.phi);
          run.model = std::move(model);
          run.ok = true;
        } catch (const std::exception& e) {
          run.error = e.what();
          warn("run " + run.label + " failed: " + run.error);
        }
        runs.push_back(std::move(run));
      }
    }
  }
  return runs;
}

std::optional<std::size_t> select_run(Objective objective, const std::vector<SweepRun>& runs,
                                      double reference_val_bpr) {
  std::optional<std::size_t> best;
  auto better = [&](std::size_t i, auto key) {
    if (!runs[i].ok || !std::isfinite(key(runs[i]))) return;
    if (!best || key(runs[i]) > key(runs[*best])) best = i;
  };
  const auto loglik = [](const SweepRun& r) { return -r.val_nll(); };
  const auto bpr = [](const SweepRun& r) { return r.val_bpr(); };
  switch (objective) {
    case Objective::kNll:
      for (std::size_t i = 0; i < runs.size(); ++i) better(i, loglik);
      break;
    case Objective::kBpr:
      for (std::size_t i = 0; i < runs.size(); ++i) better(i, bpr);
      break;
    case Objective::kDaml:
      for (std::size_t i = 0; i < runs.size(); ++i) {
        if (runs[i].ok && runs[i].val_bpr() >= reference_val_bpr) better(i, loglik);
      }
      if (!best) {
        for (std::size_t i = 0; i < runs.size(); ++i) better(i, bpr);
      }
      break;
  }
  return best;
}

std::vector<double> default_epsilon_grid(double nll_bpr, double best_bpr, std::size_t count) {
  std::vector<double> eps;
  const double lo = std::clamp(std::min(nll_bpr, best_bpr), 0.0, 1.0);
  const double hi = std::clamp(std::max(nll_bpr, best_bpr), 0.0, 1.0);
  for (std::size_t i = 1; i <= count; ++i) {
    eps.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count + 1));
  }
  eps.push_back(1.0);
  std::sort(eps.begin(), eps.end());
  eps.erase(std::unique(eps.begin(), eps.end()), eps.end());
  return eps;
}

ParetoResult run_pareto(const ModelFactory& factory, const PanelDataset& panel, const ParetoConfig& config) {
  ParetoResult out;
  const bool write_files = !config.output_dir.empty();
  if (write_files) std::filesystem::create_directories(config.output_dir / "bpr_samples");
  const SplitRange test = panel.test_or_train();

  Vector warm;
  auto stage = [&](Objective objective, double epsilon) {
    TrainConfig base = config.base;
    base.objective = objective;
    base.epsilon = epsilon;
    if (objective == Objective::kDaml) base.init_params = warm;
    if (write_files) base.output_dir = config.output_dir / "runs";
    if (objective == Objective::kNll) {
      if (config.nll_max_epochs) base.max_epochs = *config.nll_max_epochs;
      return sweep(factory, panel, base, config.nll_grid ? *config.nll_grid : config.grid);
    }
    return sweep(factory, panel, base, config.grid);
  };
  auto keep = [&](std::vector<SweepRun>& runs, std::optional<std::size_t> pick) {
    for (const SweepRun& r : runs) out.all_runs.push_back(trial_row(r));
    if (!pick) return false;
    SweepRun& run = runs[*pick];
    ParetoModel pm;
    pm.row = trial_row(run);
    const EvaluationReport rep = evaluate_model(*run.model, panel, test, config.eval);
    pm.row.test_loglik = rep.loglik_mean;
    pm.row.bpr_mean = rep.bpr_mean;
    pm.row.bpr_p05 = rep.bpr_p05;
    pm.row.bpr_p50 = rep.bpr_p50;
    pm.row.bpr_p95 = rep.bpr_p95;
    if (write_files) {
      const auto samples = config.output_dir / "bpr_samples" / (run.label + ".csv");
      write_bpr_samples(samples, rep.bpr_trials);
      pm.row.bpr_samples_path = std::filesystem::relative(samples, config.output_dir).string();
    }
    pm.model = std::move(run.model);
    out.selected.push_back(std::move(pm));
    return true;
  };

  std::vector<SweepRun> nll_runs = stage(Objective::kNll, 0.0);
  const auto nll_pick = select_run(Objective::kNll, nll_runs);
  if (!nll_pick) throw NumericalError("every NLL run failed; cannot anchor the frontier");
  const double nll_val_bpr = nll_runs[*nll_pick].val_bpr();
  const double nll_train_bpr = nll_runs[*nll_pick].result.best.scalar("train_bpr_mean", 0.0);
  if (config.warm_start_daml) warm = nll_runs[*nll_pick].result.best.phi;
  keep(nll_runs, nll_pick);

  std::vector<SweepRun> bpr_runs = stage(Objective::kBpr, 0.0);
  const auto bpr_pick = select_run(Objective::kBpr, bpr_runs);
  double best_train_bpr = nll_train_bpr;
  if (bpr_pick) best_train_bpr = std::max(best_train_bpr, bpr_runs[*bpr_pick].result.best.scalar("train_bpr_mean", 0.0));
  keep(bpr_runs, bpr_pick);

  out.epsilons = config.epsilons ? *config.epsilons : default_epsilon_grid(nll_train_bpr, best_train_bpr);
  std::sort(out.epsilons.begin(), out.epsilons.end());
  for (double eps : out.epsilons) {
    if (!(eps >= 0.0 && eps <= 1.0)) throw ValidationError("epsilon grid values must lie in [0, 1]");
    std::vector<SweepRun> runs = stage(Objective::kDaml, eps);
    keep(runs, select_run(Objective::kDaml, runs, nll_val_bpr));
  }

  if (write_files) {
    std::vector<TrialResult> rows;
    for (const ParetoModel& pm : out.selected) rows.push_back(pm.row);
    write_trial_results(config.output_dir / "results.csv", rows);
    write_trial_results(config.output_dir / "all_runs.csv", out.all_runs);
  }
  return out;
}

}  // namespace daml
