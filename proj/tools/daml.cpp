// daml: command-line driver.
//
//   daml demo-appb [--trials N] [--M M] [--seed S] [--out FILE]
//   daml train CONFIG [--output DIR] [--seed S] [--objective O] [--epsilon E]
//                     [--max-epochs N] [--resume]
//   daml pareto CONFIG [--output DIR] [--epsilons E1,E2,...]
//   daml evaluate --checkpoint FILE (--config CONFIG | --dataset NAME|CSV)
//                 [--k K] [--M M] [--trials N] [--split train|val|test] [--out FILE]
//   daml gen-data --generator NAME [--seed S] --out FILE
//
// Every command takes --threads. Flags override config values, which
// override built-in defaults.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "daml/abc_demo.hpp"
#include "daml/checkpoint.hpp"
#include "daml/config.hpp"
#include "daml/csv.hpp"
#include "daml/data.hpp"
#include "daml/error.hpp"
#include "daml/evaluate.hpp"
#include "daml/results.hpp"
#include "daml/sweep.hpp"
#include "daml/training.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// NaN and infinities are not valid JSON numbers.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json baseline_json(const daml::BaselineMetrics& b) {
  return {{"bpr_mean", number(b.bpr_mean)}, {"mae", number(b.mae)}, {"rmse", number(b.rmse)}};
}

void write_json(const fs::path& path, const json& doc) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw daml::IoError("cannot open " + path.string() + " for writing");
  out << doc.dump(2) << '\n';
  if (!out) throw daml::IoError("write failed for " + path.string());
}

// ---- demo-appb

struct DemoFlags {
  daml::AbcDemoOptions opts;
  std::string out = "appb.csv";
};

int cmd_demo_appb(const DemoFlags& f) {
  const auto t0 = std::chrono::steady_clock::now();
  const daml::AbcDemoResult res = daml::run_abc_demo(f.opts);
  const fs::path out(f.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  daml::write_abc_demo_csv(out, res, f.opts);

  std::printf("%-8s %-10s %-10s\n", "K", "mean", "ratio");
  for (std::size_t i = 0; i < res.ks.size(); ++i) {
    std::printf("%-8zu %-10.4f %-10.4f\n", res.ks[i], res.mean_bpr[i], res.ratio_bpr[i]);
  }
  std::printf("top-3 frequency  mean:");
  for (double v : res.mean_top3_freq) std::printf(" %.3f", v);
  std::printf("\ntop-3 frequency ratio:");
  for (double v : res.ratio_top3_freq) std::printf(" %.3f", v);
  std::printf("\n");

  fs::path manifest = out;
  manifest.replace_extension(".manifest.json");
  const json cfg = {{"trials", f.opts.num_trials}, {"M", f.opts.num_samples}, {"seed", f.opts.seed},
                    {"ks", f.opts.ks}, {"threads", f.opts.threads}};
  daml::write_manifest(manifest, "demo-appb", cfg,
                       {{"seeds", {f.opts.seed}}, {"outputs", {out.filename().string()}},
                        {"timing", {{"wall_seconds", seconds_since(t0)}}}});
  return kExitOk;
}

// ---- train

struct TrainFlags {
  std::string config;
  std::string output;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> objective;
  std::optional<double> epsilon;
  std::optional<std::size_t> max_epochs;
  bool resume = false;
  std::optional<unsigned> threads;
};

void apply_threads(daml::RunConfig& cfg, std::optional<unsigned> threads) {
  if (!threads) return;
  cfg.threads = *threads;
  cfg.train.threads = *threads;
  cfg.evaluate.threads = *threads;
}

int cmd_train(const TrainFlags& f) {
  const auto t0 = std::chrono::steady_clock::now();
  daml::RunConfig cfg = daml::load_run_config(f.config);
  if (!f.output.empty()) cfg.output_dir = f.output;
  if (f.seed) {
    cfg.train.seed = *f.seed;
    cfg.evaluate.seed = *f.seed;
  }
  if (f.objective) cfg.train.objective = daml::parse_objective(*f.objective);
  if (f.epsilon) cfg.train.epsilon = *f.epsilon;
  if (f.max_epochs) cfg.train.max_epochs = *f.max_epochs;
  cfg.train.resume = f.resume;
  apply_threads(cfg, f.threads);
  if (cfg.output_dir.empty()) throw daml::ValidationError("train needs an output directory (output_dir or --output)");

  const auto panel = daml::build_dataset(cfg.dataset);
  const daml::ModelFactory factory = daml::model_factory(cfg.model, panel);
  cfg.train.validate(panel->num_sites);

  daml::SweepGrid grid;
  if (cfg.sweep) {
    grid = *cfg.sweep;
  } else {
    grid.seeds = {cfg.train.seed};
    grid.step_sizes = {cfg.train.step_size};
    grid.sigmas = {cfg.train.sigma};
  }
  daml::TrainConfig base = cfg.train;
  base.output_dir = cfg.output_dir / "runs";
  fs::create_directories(base.output_dir);
  std::vector<daml::SweepRun> runs = daml::sweep(factory, *panel, base, grid);

  std::vector<daml::TrialResult> rows;
  for (const daml::SweepRun& r : runs) rows.push_back(daml::trial_row(r));
  const auto pick = daml::select_run(cfg.train.objective, runs);
  if (!pick) throw daml::NumericalError("every training run failed");

  daml::EvaluateOptions eval = cfg.evaluate;
  eval.k = cfg.train.k;
  const daml::EvaluationReport rep = daml::evaluate_model(*runs[*pick].model, *panel, panel->test_or_train(), eval);
  daml::TrialResult& row = rows[*pick];
  row.test_loglik = rep.loglik_mean;
  row.bpr_mean = rep.bpr_mean;
  row.bpr_p05 = rep.bpr_p05;
  row.bpr_p50 = rep.bpr_p50;
  row.bpr_p95 = rep.bpr_p95;
  const fs::path samples = cfg.output_dir / "bpr_samples" / (runs[*pick].label + ".csv");
  fs::create_directories(samples.parent_path());
  daml::write_bpr_samples(samples, rep.bpr_trials);
  row.bpr_samples_path = fs::relative(samples, cfg.output_dir).string();
  daml::write_trial_results(cfg.output_dir / "results.csv", rows);

  for (const daml::TrialResult& r : rows) {
    std::printf("%-40s %-7s best_epoch %-5lld train_loglik %.4f train_bpr %.4f val_bpr %.4f\n", r.model_label.c_str(),
                r.status.c_str(), r.best_epoch, r.train_loglik, r.train_bpr_mean, r.val_bpr_mean);
  }
  std::printf("selected %s: test_loglik %.4f bpr mean %.4f [p05 %.4f, p95 %.4f]\n", runs[*pick].label.c_str(),
              rep.loglik_mean, rep.bpr_mean, rep.bpr_p05, rep.bpr_p95);

  json seeds = json::array();
  for (auto s : grid.seeds) seeds.push_back(s);
  daml::write_manifest(cfg.output_dir / "manifest.json", "train", daml::to_json(cfg),
                       {{"seeds", seeds},
                        {"selected", runs[*pick].label},
                        {"timing", {{"wall_seconds", seconds_since(t0)}}}});
  return kExitOk;
}

// ---- pareto

struct ParetoFlags {
  std::string config;
  std::string output;
  std::optional<std::vector<double>> epsilons;
  std::optional<unsigned> threads;
};

int cmd_pareto(const ParetoFlags& f) {
  const auto t0 = std::chrono::steady_clock::now();
  daml::RunConfig cfg = daml::load_run_config(f.config);
  if (!f.output.empty()) cfg.output_dir = f.output;
  if (f.epsilons) {
    for (double e : *f.epsilons) {
      if (!(e >= 0.0 && e <= 1.0)) throw daml::ValidationError("--epsilons values must lie in [0, 1]");
    }
    cfg.epsilons = *f.epsilons;
  }
  apply_threads(cfg, f.threads);
  if (cfg.output_dir.empty()) throw daml::ValidationError("pareto needs an output directory (output_dir or --output)");

  const auto panel = daml::build_dataset(cfg.dataset);
  cfg.train.validate(panel->num_sites);
  daml::ParetoConfig pc;
  pc.base = cfg.train;
  if (cfg.sweep) {
    pc.grid = *cfg.sweep;
  } else {
    pc.grid.seeds = {cfg.train.seed};
    pc.grid.step_sizes = {cfg.train.step_size};
    pc.grid.sigmas = {cfg.train.sigma};
  }
  pc.epsilons = cfg.epsilons;
  pc.eval = cfg.evaluate;
  pc.eval.k = cfg.train.k;
  pc.output_dir = cfg.output_dir;
  pc.warm_start_daml = cfg.warm_start_daml;
  pc.nll_grid = cfg.nll_sweep;
  pc.nll_max_epochs = cfg.nll_max_epochs;
  const daml::ParetoResult res = daml::run_pareto(daml::model_factory(cfg.model, panel), *panel, pc);

  std::printf("%-40s %-12s %-12s %-10s %-10s %-10s\n", "model", "test_loglik", "train_bpr", "bpr_p05", "bpr_p50",
              "bpr_p95");
  for (const daml::ParetoModel& m : res.selected) {
    std::printf("%-40s %-12.4f %-12.4f %-10.4f %-10.4f %-10.4f\n", m.row.model_label.c_str(), m.row.test_loglik,
                m.row.train_bpr_mean, m.row.bpr_p05, m.row.bpr_p50, m.row.bpr_p95);
  }
  json seeds = json::array();
  for (auto s : pc.grid.seeds) seeds.push_back(s);
  if (pc.nll_grid) {
    for (auto s : pc.nll_grid->seeds) seeds.push_back(s);
  }
  daml::write_manifest(cfg.output_dir / "manifest.json", "pareto", daml::to_json(cfg),
                       {{"seeds", seeds},
                        {"epsilons", res.epsilons},
                        {"timing", {{"wall_seconds", seconds_since(t0)}}}});
  return kExitOk;
}

// ---- evaluate

struct EvaluateFlags {
  std::string checkpoint;
  std::string config;
  std::string dataset;
  std::uint64_t data_seed = 0;
  std::optional<std::size_t> k;
  std::optional<std::size_t> num_samples;
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> seed;
  std::string split = "test";
  std::string out = "metrics.json";
  std::optional<unsigned> threads;
};

int cmd_evaluate(const EvaluateFlags& f) {
  const auto t0 = std::chrono::steady_clock::now();
  daml::RunConfig cfg;
  if (!f.config.empty()) cfg = daml::load_run_config(f.config);
  if (!f.dataset.empty()) {
    if (f.dataset == "synthetic_1d" || f.dataset == "synthetic_negbin") {
      cfg.dataset.generator = f.dataset;
      cfg.dataset.seed = f.data_seed;
    } else {
      cfg.dataset.generator = "csv";
      cfg.dataset.path = f.dataset;
    }
  } else if (f.config.empty()) {
    throw daml::ValidationError("evaluate needs --config or --dataset");
  }
  daml::EvaluateOptions eval = cfg.evaluate;
  eval.k = f.k ? *f.k : cfg.train.k;
  if (f.num_samples) eval.num_samples = *f.num_samples;
  if (f.trials) eval.num_trials = *f.trials;
  if (f.seed) eval.seed = *f.seed;
  if (f.threads) eval.threads = *f.threads;

  const auto panel = daml::build_dataset(cfg.dataset);
  daml::SplitRange split;
  if (f.split == "train") {
    split = panel->train;
  } else if (f.split == "val") {
    split = panel->val_or_train();
  } else if (f.split == "test") {
    split = panel->test_or_train();
  } else {
    throw daml::ValidationError("--split must be train, val or test");
  }
  const daml::Checkpoint ckpt = daml::load_checkpoint(f.checkpoint);
  const auto model = daml::restore_model(ckpt, panel);
  const daml::EvaluationReport rep = daml::evaluate_model(*model, *panel, split, eval);

  const fs::path out(f.out);
  json doc = {{"schema_version", daml::csv::kSchemaVersion},
              {"checkpoint", f.checkpoint},
              {"family", ckpt.family},
              {"split", f.split},
              {"split_begin", split.begin},
              {"split_end", split.end},
              {"k", eval.k},
              {"M", eval.num_samples},
              {"trials", eval.num_trials},
              {"seed", eval.seed},
              {"periods", rep.periods},
              {"nll_total", number(rep.nll_total)},
              {"nll_mean", number(rep.nll_mean)},
              {"loglik_mean", number(rep.loglik_mean)},
              {"bpr_mean", rep.bpr_mean},
              {"bpr_p05", rep.bpr_p05},
              {"bpr_p50", rep.bpr_p50},
              {"bpr_p95", rep.bpr_p95},
              {"mae", rep.mae},
              {"rmse", rep.rmse},
              {"degenerate_periods", rep.degenerate_periods},
              {"bpr_aggregation", "mean over periods of per-period BPR"},
              {"baselines", {{"zero", baseline_json(rep.zero)}, {"historical", baseline_json(rep.historical)}}}};
  write_json(out, doc);
  fs::path samples = out;
  samples.replace_extension(".bpr_samples.csv");
  daml::write_bpr_samples(samples, rep.bpr_trials);

  std::printf("loglik_mean %.4f bpr_mean %.4f [p05 %.4f, p50 %.4f, p95 %.4f] mae %.4f rmse %.4f\n", rep.loglik_mean,
              rep.bpr_mean, rep.bpr_p05, rep.bpr_p50, rep.bpr_p95, rep.mae, rep.rmse);
  std::printf("baselines: zero bpr %.4f, historical bpr %.4f\n", rep.zero.bpr_mean, rep.historical.bpr_mean);

  fs::path manifest = out;
  manifest.replace_extension(".manifest.json");
  daml::write_manifest(manifest, "evaluate", daml::to_json(cfg),
                       {{"checkpoint", f.checkpoint},
                        {"seeds", {eval.seed}},
                        {"timing", {{"wall_seconds", seconds_since(t0)}}}});
  return kExitOk;
}

// ---- gen-data

struct GenFlags {
  std::string generator = "synthetic_1d";
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_gen_data(const GenFlags& f) {
  daml::PanelDataset panel;
  if (f.generator == "synthetic_1d") {
    panel = daml::gen_synthetic_1d(f.seed);
  } else if (f.generator == "synthetic_negbin") {
    panel = daml::gen_synthetic_negbin(f.seed);
  } else {
    throw daml::ValidationError("--generator must be synthetic_1d or synthetic_negbin");
  }
  const fs::path out(f.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  daml::write_panel_csv(out, panel);
  std::printf("wrote %zu sites x %zu periods to %s\n", panel.num_sites, panel.num_periods, f.out.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decision-aware training of count forecasters for top-K site selection"};
  app.require_subcommand(1);
  app.set_version_flag("--version", daml::git_describe());

  DemoFlags demo;
  auto* demo_cmd = app.add_subcommand("demo-appb", "Mean vs ratio ranking on the three-type toy problem");
  demo_cmd->add_option("--trials", demo.opts.num_trials, "Number of trials")->check(CLI::PositiveNumber);
  demo_cmd->add_option("--M", demo.opts.num_samples, "Samples per trial")->check(CLI::PositiveNumber);
  demo_cmd->add_option("--seed", demo.opts.seed, "Random seed");
  demo_cmd->add_option("--out", demo.out, "Output CSV");
  demo_cmd->add_option("--threads", demo.opts.threads, "Worker threads")->check(CLI::PositiveNumber);

  TrainFlags tr;
  auto* train_cmd = app.add_subcommand("train", "Train one model or a hyperparameter sweep");
  train_cmd->add_option("config", tr.config, "JSON run config")->required();
  train_cmd->add_option("--output", tr.output, "Output directory");
  train_cmd->add_option("--seed", tr.seed, "Training seed");
  train_cmd->add_option("--objective", tr.objective, "nll, bpr or daml");
  train_cmd->add_option("--epsilon", tr.epsilon, "DAML BPR threshold");
  train_cmd->add_option("--max-epochs", tr.max_epochs, "Epoch budget");
  train_cmd->add_flag("--resume", tr.resume, "Continue from last.ckpt in each run directory");
  train_cmd->add_option("--threads", tr.threads, "Worker threads")->check(CLI::PositiveNumber);

  ParetoFlags pa;
  auto* pareto_cmd = app.add_subcommand("pareto", "Likelihood-vs-BPR frontier: NLL, BPR and DAML over an epsilon grid");
  pareto_cmd->add_option("config", pa.config, "JSON run config")->required();
  pareto_cmd->add_option("--output", pa.output, "Output directory");
  pareto_cmd->add_option("--epsilons", pa.epsilons, "Comma-separated epsilon grid")->delimiter(',');
  pareto_cmd->add_option("--threads", pa.threads, "Worker threads")->check(CLI::PositiveNumber);

  EvaluateFlags ev;
  auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate a checkpoint on a dataset split");
  eval_cmd->add_option("--checkpoint", ev.checkpoint, "Checkpoint file")->required();
  eval_cmd->add_option("--config", ev.config, "JSON run config (dataset section used)");
  eval_cmd->add_option("--dataset", ev.dataset, "synthetic_1d, synthetic_negbin or a panel CSV path");
  eval_cmd->add_option("--data-seed", ev.data_seed, "Generator seed for --dataset");
  eval_cmd->add_option("--k", ev.k, "Budget K");
  eval_cmd->add_option("--M", ev.num_samples, "Samples per period");
  eval_cmd->add_option("--trials", ev.trials, "BPR trials");
  eval_cmd->add_option("--seed", ev.seed, "Evaluation seed");
  eval_cmd->add_option("--split", ev.split, "train, val or test");
  eval_cmd->add_option("--out", ev.out, "Metrics JSON path");
  eval_cmd->add_option("--threads", ev.threads, "Worker threads")->check(CLI::PositiveNumber);

  GenFlags gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "Write a synthetic panel CSV");
  gen_cmd->add_option("--generator", gen.generator, "synthetic_1d or synthetic_negbin");
  gen_cmd->add_option("--seed", gen.seed, "Generator seed");
  gen_cmd->add_option("--out", gen.out, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  daml::set_warning_handler([](std::string_view msg) { std::cerr << "warning: " << msg << '\n'; });
  try {
    if (*demo_cmd) return cmd_demo_appb(demo);
    if (*train_cmd) return cmd_train(tr);
    if (*pareto_cmd) return cmd_pareto(pa);
    if (*eval_cmd) return cmd_evaluate(ev);
    if (*gen_cmd) return cmd_gen_data(gen);
  } catch (const daml::ValidationError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const daml::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const daml::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const daml::DomainError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const daml::DegenerateOutcomeError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}
