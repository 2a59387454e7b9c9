#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "daml/bpr.hpp"
#include "daml/checkpoint.hpp"
#include "daml/data.hpp"
#include "daml/error.hpp"
#include "daml/models/fixed_models.hpp"
#include "daml/models/negbin.hpp"
#include "daml/models/tgmm.hpp"
#include "daml/objectives.hpp"
#include "daml/optim.hpp"
#include "daml/smoothing.hpp"
#include "daml/sweep.hpp"
#include "daml/topk.hpp"
#include "daml/training.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace daml;

namespace {

PanelDataset small_panel() {
  PanelDataset p(4, 12);
  const double base[4] = {2, 9, 4, 12};
  for (std::size_t t = 0; t < 12; ++t) {
    for (std::size_t s = 0; s < 4; ++s) p.y(t)[s] = base[s] + static_cast<double>((t * 7 + s * 3) % 5);
  }
  p.train = {0, 8};
  p.val = {8, 10};
  p.test = {10, 12};
  return p;
}

TruncGaussMixture small_tgmm(std::uint64_t seed = 1) {
  TruncGaussMixture m(4, 2);
  TrainConfig cfg;
  cfg.seed = seed;
  cfg.init = InitMode::kQuantile;
  initialize_params(m, small_panel(), cfg);
  return m;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

// ---- objectives

TEST_CASE("objective names") {
  CHECK(parse_objective("nll") == Objective::kNll);
  CHECK(parse_objective("DAML") == Objective::kDaml);
  CHECK(parse_objective("bpr") == Objective::kBpr);
  CHECK(to_string(Objective::kDaml) == "daml");
  CHECK_THROWS_AS(parse_objective("mse"), ValidationError);
}

TEST_CASE("NLL objective is the summed negative log-likelihood") {
  const PanelDataset p = small_panel();
  const TruncGaussMixture m = small_tgmm();
  ObjectiveConfig cfg;
  const ObjectiveResult res = evaluate_objective(m, p, p.train, cfg, 0);
  double expect = 0.0;
  for (std::size_t t = 0; t < 8; ++t) expect -= m.logpdf(p.y(t), t);
  CHECK(res.value == doctest::Approx(expect).epsilon(1e-14));
  CHECK(nll_objective(m, p, p.train) == doctest::Approx(expect).epsilon(1e-14));
  CHECK(res.penalty == 0.0);
  CHECK(res.periods == 8);
}

TEST_CASE("duplicating the data doubles the data term") {
  const PanelDataset p = small_panel();
  PanelDataset twice(4, 24);
  for (std::size_t t = 0; t < 24; ++t) {
    for (std::size_t s = 0; s < 4; ++s) twice.y(t)[s] = p.y(t % 12)[s];
  }
  twice.train = {0, 24};
  PanelDataset once = p;
  once.train = {0, 12};
  const TruncGaussMixture m = small_tgmm();
  CHECK(nll_objective(m, twice, twice.train) == doctest::Approx(2.0 * nll_objective(m, once, once.train)).epsilon(1e-15));
}

TEST_CASE("point mass on the observed data has zero NLL") {
  auto p = std::make_shared<PanelDataset>(small_panel());
  PointMass pm(p);
  CHECK(nll_objective(pm, *p, p->train) == 0.0);
}

TEST_CASE("DAML with epsilon = 0 equals NLL exactly") {
  const PanelDataset p = small_panel();
  const TruncGaussMixture m = small_tgmm();
  ObjectiveConfig nll;
  ObjectiveConfig daml{Objective::kDaml, 2, 0.0, 30.0, 64, 50, 0.05, 9, 1};
  for (std::uint64_t epoch : {0u, 3u}) {
    const ObjectiveResult a = evaluate_objective(m, p, p.train, nll, epoch);
    const ObjectiveResult b = evaluate_objective(m, p, p.train, daml, epoch);
    CHECK(a.value == b.value);
    CHECK(a.grad == b.grad);
    CHECK(b.penalty == 0.0);
  }
}

TEST_CASE("satisfied constraints leave exactly the NLL gradient") {
  const PanelDataset p = small_panel();
  const TruncGaussMixture m = small_tgmm();
  ObjectiveConfig daml{Objective::kDaml, 2, 0.05, 30.0, 64, 50, 0.05, 9, 1};
  const ObjectiveResult b = evaluate_objective(m, p, p.train, daml, 1);
  REQUIRE(b.violated == 0);
  const ObjectiveResult a = evaluate_objective(m, p, p.train, ObjectiveConfig{}, 1);
  CHECK(a.grad == b.grad);
  CHECK(a.value == b.value);
}

TEST_CASE("BPR objective value is minus the summed BPR") {
  const PanelDataset p = small_panel();
  const TruncGaussMixture m = small_tgmm();
  ObjectiveConfig cfg{Objective::kBpr, 2, 0.0, 30.0, 64, 50, 0.05, 9, 1};
  const ObjectiveResult r = evaluate_objective(m, p, p.train, cfg, 2);
  CHECK(r.value == -r.bpr_sum);
  CHECK(r.nll == 0.0);
  CHECK(r.bpr_sum <= 8.0);
}

TEST_CASE("objective does not depend on the thread count") {
  const PanelDataset p = small_panel();
  const TruncGaussMixture m = small_tgmm();
  ObjectiveConfig cfg{Objective::kDaml, 2, 0.99, 30.0, 64, 50, 0.05, 9, 1};
  const ObjectiveResult a = evaluate_objective(m, p, p.train, cfg, 4);
  cfg.threads = 3;
  const ObjectiveResult b = evaluate_objective(m, p, p.train, cfg, 4);
  CHECK(a.value == b.value);
  CHECK(a.grad == b.grad);
}

TEST_CASE("non-finite terms are reported with the period") {
  PanelDataset p(1, 3);
  p.counts = {5, 0, 5};
  p.train = {0, 3};
  QuantizedGaussian far({1000.0}, 1.0);
  try {
    evaluate_objective(far, p, p.train, ObjectiveConfig{}, 0);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("t=0") != std::string::npos);
  }
}

TEST_CASE("assembled DAML gradient matches frozen-randomness finite differences") {
  // S = 3, T = 2, one-component TGMM: P = 5.
  PanelDataset p(3, 2);
  p.counts = {1, 2, 8, 6, 0, 3};
  p.train = {0, 2};
  TruncGaussMixture m(3, 1);
  m.set_params(Vector{1.2, 0.4, 0.3, -0.2, 0.1});
  ObjectiveConfig cfg{Objective::kDaml, 1, 1.0, 30.0, 40, 300, 0.05, 17, 1};

  std::uint64_t epoch = 0;
  ObjectiveResult res;
  for (; epoch < 50; ++epoch) {
    res = evaluate_objective(m, p, p.train, cfg, epoch);
    if (res.violated == 2) break;
  }
  REQUIRE(res.violated == 2);

  const Vector phi0(m.params().begin(), m.params().end());
  const Vector fd = test::daml_surrogate_fd(m, p, cfg, epoch);
  for (std::size_t i = 0; i < phi0.size(); ++i) {
    INFO("param " << i << " estimator " << res.grad[i] << " fd " << fd[i]);
    CHECK(test::close_rel(res.grad[i], fd[i], 1e-3));
  }
}

// ---- optimizers

TEST_CASE("SGD step") {
  Optimizer opt(OptimizerKind::kSgd, 0.5, 2);
  Vector phi = {1.0, -1.0};
  opt.step(phi, Vector{2.0, -4.0});
  CHECK(phi == Vector{0.0, 1.0});
}

TEST_CASE("Adam first step moves each coordinate by the step size") {
  Optimizer opt(OptimizerKind::kAdam, 0.1, 2);
  Vector phi = {0.0, 0.0};
  opt.step(phi, Vector{3.0, -0.002});
  CHECK(phi[0] == doctest::Approx(-0.1).epsilon(1e-6));
  CHECK(phi[1] == doctest::Approx(0.1).epsilon(1e-4));
  CHECK(opt.state().steps == 1);
}

TEST_CASE("Adam minimises a quadratic") {
  Optimizer opt(OptimizerKind::kAdam, 0.05, 2);
  Vector phi = {3.0, -2.0};
  for (int i = 0; i < 2000; ++i) opt.step(phi, Vector{2.0 * (phi[0] - 1.0), 8.0 * (phi[1] + 0.5)});
  CHECK(phi[0] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(phi[1] == doctest::Approx(-0.5).epsilon(1e-3));
  CHECK(parse_optimizer("adam") == OptimizerKind::kAdam);
  CHECK_THROWS_AS(parse_optimizer("lbfgs"), ValidationError);
}

// ---- checkpoints

TEST_CASE("checkpoint round trip is bit-exact") {
  const auto dir = test::scratch_dir("ckpt");
  TruncGaussMixture m = small_tgmm(3);
  Checkpoint ck = make_checkpoint(m, 17);
  ck.scalars["val_nll"] = 1.0 / 3.0;
  ck.scalars["best_score"] = std::numeric_limits<double>::infinity();
  Optimizer opt(OptimizerKind::kAdam, 0.01, m.num_params());
  Vector phi(m.params().begin(), m.params().end());
  Vector g(phi.size(), 0.1);
  opt.step(phi, g);
  ck.optimizer = opt.state();
  save_checkpoint(dir / "a.ckpt", ck);
  const Checkpoint back = load_checkpoint(dir / "a.ckpt");
  CHECK(back.family == "tgmm");
  CHECK(back.epoch == 17);
  CHECK(back.phi == ck.phi);
  CHECK(back.scalars == ck.scalars);
  REQUIRE(back.optimizer);
  CHECK(back.optimizer->m == ck.optimizer->m);
  CHECK(back.optimizer->v == ck.optimizer->v);
  CHECK(back.optimizer->steps == 1);
  CHECK(back.blocks.size() == 3);
  const auto restored = restore_model(back, nullptr);
  CHECK(Vector(restored->params().begin(), restored->params().end()) == ck.phi);
}

TEST_CASE("negbin and point-mass checkpoints restore against a panel") {
  const auto dir = test::scratch_dir("ckpt_nb");
  auto panel = std::make_shared<PanelDataset>(gen_synthetic_negbin(2));
  NegBinMixedEffects nb(panel);
  Vector phi(nb.num_params());
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = 0.01 * static_cast<double>(i);
  nb.set_params(phi);
  save_checkpoint(dir / "nb.ckpt", make_checkpoint(nb, 0));
  const auto back = restore_model(load_checkpoint(dir / "nb.ckpt"), panel);
  CHECK(back->family() == "negbin");
  CHECK(back->logpdf(panel->y(3), 3) == nb.logpdf(panel->y(3), 3));
  PointMass pm(panel);
  save_checkpoint(dir / "pm.ckpt", make_checkpoint(pm, 0));
  CHECK(restore_model(load_checkpoint(dir / "pm.ckpt"), panel)->logpdf(panel->y(1), 1) == 0.0);
}

TEST_CASE("checkpoint load errors") {
  const auto dir = test::scratch_dir("ckpt_err");
  CHECK_THROWS_AS(load_checkpoint(dir / "missing.ckpt"), IoError);
  TruncGaussMixture m = small_tgmm();
  save_checkpoint(dir / "ok.ckpt", make_checkpoint(m, 1));
  std::string text = read_file(dir / "ok.ckpt");
  {
    std::ofstream out(dir / "trunc.ckpt");
    out << text.substr(0, text.size() / 2);
  }
  CHECK_THROWS_AS(load_checkpoint(dir / "trunc.ckpt"), IoError);
  {
    std::ofstream out(dir / "garbage.ckpt");
    out << "hello\n";
  }
  CHECK_THROWS_AS(load_checkpoint(dir / "garbage.ckpt"), IoError);
}

// ---- training

namespace {

TrainConfig quick_config(Objective objective) {
  TrainConfig cfg;
  cfg.objective = objective;
  cfg.k = 2;
  cfg.epsilon = 0.9;
  cfg.num_samples = 32;
  cfg.num_perturbations = 20;
  cfg.max_epochs = 12;
  cfg.eval_every = 3;
  cfg.eval_samples = 50;
  cfg.seed = 5;
  cfg.init = InitMode::kQuantile;
  cfg.record_timing = false;
  return cfg;
}

}  // namespace

TEST_CASE("training is deterministic for a fixed seed") {
  const PanelDataset p = small_panel();
  for (Objective obj : {Objective::kNll, Objective::kBpr, Objective::kDaml}) {
    TruncGaussMixture a(4, 2), b(4, 2);
    const TrainResult ra = train(a, p, quick_config(obj));
    const TrainResult rb = train(b, p, quick_config(obj));
    CHECK(ra.best.phi == rb.best.phi);
    CHECK(Vector(a.params().begin(), a.params().end()) == Vector(b.params().begin(), b.params().end()));
    REQUIRE(ra.history.size() == rb.history.size());
    for (std::size_t i = 0; i < ra.history.size(); ++i) {
      CHECK(ra.history[i].objective == rb.history[i].objective);
      CHECK(ra.history[i].grad_norm == rb.history[i].grad_norm);
    }
  }
}

TEST_CASE("training is independent of the thread count") {
  const PanelDataset p = small_panel();
  TruncGaussMixture a(4, 2), b(4, 2);
  TrainConfig cfg = quick_config(Objective::kDaml);
  const TrainResult ra = train(a, p, cfg);
  cfg.threads = 3;
  const TrainResult rb = train(b, p, cfg);
  CHECK(ra.best.phi == rb.best.phi);
  CHECK(ra.history.back().objective == rb.history.back().objective);
}

TEST_CASE("DAML at epsilon = 0 trains exactly like NLL") {
  const PanelDataset p = small_panel();
  TruncGaussMixture a(4, 2), b(4, 2);
  TrainConfig nll = quick_config(Objective::kNll);
  TrainConfig daml = quick_config(Objective::kDaml);
  daml.epsilon = 0.0;
  const TrainResult ra = train(a, p, nll);
  const TrainResult rb = train(b, p, daml);
  REQUIRE(ra.history.size() == rb.history.size());
  for (std::size_t i = 0; i < ra.history.size(); ++i) CHECK(ra.history[i].objective == rb.history[i].objective);
  CHECK(ra.best.phi == rb.best.phi);
}

TEST_CASE("zero-epoch run returns the initialisation") {
  const PanelDataset p = small_panel();
  TruncGaussMixture m(4, 2), ref(4, 2);
  TrainConfig cfg = quick_config(Objective::kNll);
  cfg.max_epochs = 0;
  const TrainResult r = train(m, p, cfg);
  initialize_params(ref, p, cfg);
  CHECK(r.best.epoch == 0);
  CHECK(r.best.phi == Vector(ref.params().begin(), ref.params().end()));
  CHECK(r.epochs_run == 0);
  REQUIRE(r.history.size() == 1);
  CHECK(r.history[0].evaluated);
}

TEST_CASE("warm start begins from the given parameters") {
  const PanelDataset p = small_panel();
  TruncGaussMixture m(4, 2);
  TrainConfig cfg = quick_config(Objective::kDaml);
  cfg.max_epochs = 0;
  cfg.init_params = Vector(m.num_params(), 0.25);
  const TrainResult r = train(m, p, cfg);
  CHECK(r.best.phi == cfg.init_params);
}

TEST_CASE("resume reproduces the uninterrupted run") {
  const PanelDataset p = small_panel();
  const auto dir = test::scratch_dir("resume");
  TrainConfig cfg = quick_config(Objective::kDaml);
  cfg.output_dir = dir / "full";
  TruncGaussMixture a(4, 2);
  const TrainResult full = train(a, p, cfg);

  cfg.output_dir = dir / "split";
  cfg.max_epochs = 6;
  TruncGaussMixture b(4, 2);
  train(b, p, cfg);
  cfg.max_epochs = 12;
  cfg.resume = true;
  TruncGaussMixture c(4, 2);
  const TrainResult resumed = train(c, p, cfg);

  CHECK(resumed.best.phi == full.best.phi);
  CHECK(resumed.best.epoch == full.best.epoch);
  CHECK(Vector(c.params().begin(), c.params().end()) == Vector(a.params().begin(), a.params().end()));
  CHECK(read_file(dir / "full" / "metrics.csv") == read_file(dir / "split" / "metrics.csv"));
  CHECK(read_file(dir / "full" / "best.ckpt") == read_file(dir / "split" / "best.ckpt"));
}

TEST_CASE("training writes metrics and checkpoints") {
  const PanelDataset p = small_panel();
  const auto dir = test::scratch_dir("train_out");
  TrainConfig cfg = quick_config(Objective::kBpr);
  cfg.output_dir = dir;
  TruncGaussMixture m(4, 2);
  const TrainResult r = train(m, p, cfg);
  const auto rows = read_metrics_csv(dir / "metrics.csv");
  REQUIRE(rows.size() == r.history.size());
  CHECK(rows.front().epoch == 0);
  CHECK(rows[1].evaluated == false);
  CHECK(rows[3].evaluated);
  CHECK(rows[3].val_bpr_mean == r.history[3].val_bpr_mean);
  CHECK(read_file(dir / "metrics.csv").rfind("# schema_version: 1\n", 0) == 0);
  CHECK(load_checkpoint(dir / "best.ckpt").phi == r.best.phi);
  CHECK(load_checkpoint(dir / "last.ckpt").optimizer.has_value());
}

TEST_CASE("NLL training recovers the Gaussian mean") {
  PanelDataset p(1, 200);
  double mean = 0.0;
  for (std::size_t t = 0; t < 200; ++t) {
    p.y(t)[0] = 50.0 + std::round(5.0 * std::sin(0.37 * static_cast<double>(t)) + 2.0 * std::cos(1.3 * t));
    mean += p.y(t)[0] / 200.0;
  }
  p.train = {0, 200};
  TruncGaussMixture m(1, 1);
  TrainConfig cfg;
  cfg.init = InitMode::kQuantile;
  cfg.max_epochs = 3000;
  cfg.patience = 10000;
  cfg.eval_every = 100;
  cfg.eval_samples = 10;
  const TrainResult r = train(m, p, cfg);
  m.set_params(r.best.phi);
  CHECK(std::abs(m.constrained().mu[0] - mean) < 0.05);

  // At the closed-form maximiser (truncation is negligible this far from
  // zero) the summed gradient vanishes.
  double var = 0.0;
  for (std::size_t t = 0; t < 200; ++t) var += (p.y(t)[0] - mean) * (p.y(t)[0] - mean) / 200.0;
  m.set_constrained({{mean}, {std::sqrt(var)}, Matrix(1, 1, 1.0)});
  const ObjectiveResult g = evaluate_objective(m, p, p.train, ObjectiveConfig{}, 0);
  double norm = 0.0;
  for (double v : g.grad) norm += v * v;
  CHECK(std::sqrt(norm) < 1e-6);
}

TEST_CASE("NLL training of a well-specified mixture recovers the component means") {
  const PanelDataset p = gen_synthetic_1d(0);
  std::vector<SweepRun> runs;
  TrainConfig cfg;
  cfg.init = InitMode::kQuantile;
  cfg.max_epochs = 1500;
  cfg.eval_every = 50;
  cfg.eval_samples = 20;
  cfg.k = 5;
  SweepGrid grid;
  grid.seeds = {0, 1, 2, 3};
  runs = sweep([] { return std::make_unique<TruncGaussMixture>(7, 7); }, p, cfg, grid);
  const auto pick = select_run(Objective::kNll, runs);
  REQUIRE(pick);
  auto& m = dynamic_cast<TruncGaussMixture&>(*runs[*pick].model);
  Vector mu = m.constrained().mu;
  std::sort(mu.begin(), mu.end());
  for (std::size_t l = 0; l < 7; ++l) {
    INFO("component " << l << " mean " << mu[l]);
    CHECK(std::abs(mu[l] - kSynthetic1dMeans[l]) <= 1.0);
  }
  // Best-so-far training NLL never increases along the history.
  double best = std::numeric_limits<double>::infinity();
  for (const EpochRecord& rec : runs[*pick].result.history) {
    if (!rec.evaluated) continue;
    CHECK(std::min(best, rec.train_nll) <= best);
    best = std::min(best, rec.train_nll);
  }
  CHECK(best < runs[*pick].result.history.front().train_nll);
}

TEST_CASE("config validation") {
  const PanelDataset p = small_panel();
  TruncGaussMixture m(4, 2);
  TrainConfig cfg = quick_config(Objective::kDaml);
  cfg.k = 5;
  CHECK_THROWS_AS(train(m, p, cfg), ValidationError);
  cfg = quick_config(Objective::kDaml);
  cfg.sigma = 0.0;
  CHECK_THROWS_AS(train(m, p, cfg), ValidationError);
  cfg = quick_config(Objective::kNll);
  cfg.step_size = -1.0;
  CHECK_THROWS_AS(train(m, p, cfg), ValidationError);
  TruncGaussMixture wrong(3, 2);
  CHECK_THROWS_AS(train(wrong, p, quick_config(Objective::kNll)), ValidationError);
}

// ---- sweeps

TEST_CASE("single-point sweep equals a single train call") {
  const PanelDataset p = small_panel();
  TrainConfig cfg = quick_config(Objective::kDaml);
  SweepGrid grid{{cfg.seed}, {cfg.step_size}, {cfg.sigma}};
  const auto runs = sweep([] { return std::make_unique<TruncGaussMixture>(4, 2); }, p, cfg, grid);
  REQUIRE(runs.size() == 1);
  REQUIRE(runs[0].ok);
  TruncGaussMixture m(4, 2);
  CHECK(train(m, p, cfg).best.phi == runs[0].result.best.phi);
}

TEST_CASE("failed runs are recorded and the sweep continues") {
  const PanelDataset p = small_panel();
  TrainConfig cfg = quick_config(Objective::kNll);
  int calls = 0;
  auto factory = [&]() -> std::unique_ptr<GenerativeModel> {
    if (calls++ == 0) return std::make_unique<TruncGaussMixture>(3, 2);  // wrong S
    return std::make_unique<TruncGaussMixture>(4, 2);
  };
  set_warning_handler(nullptr);
  const auto runs = sweep(factory, p, cfg, SweepGrid{{1, 2}, {0.1}, {0.05}});
  set_warning_handler([](std::string_view) {});
  REQUIRE(runs.size() == 2);
  CHECK_FALSE(runs[0].ok);
  CHECK_FALSE(runs[0].error.empty());
  CHECK(runs[1].ok);
  CHECK(trial_row(runs[0]).status == "failed");
  CHECK(std::isnan(trial_row(runs[0]).train_loglik));
  CHECK(select_run(Objective::kNll, runs) == std::optional<std::size_t>(1));
}

TEST_CASE("selection rules") {
  auto run = [](double val_nll, double val_bpr, bool ok = true) {
    SweepRun r;
    r.ok = ok;
    r.result.best.scalars["val_nll"] = val_nll;
    r.result.best.scalars["val_bpr_mean"] = val_bpr;
    return r;
  };
  std::vector<SweepRun> runs;
  runs.push_back(run(10.0, 0.80));
  runs.push_back(run(12.0, 0.95));
  runs.push_back(run(11.0, 0.90));
  runs.push_back(run(1.0, 0.99, false));
  CHECK(*select_run(Objective::kNll, runs) == 0);
  CHECK(*select_run(Objective::kBpr, runs) == 1);
  CHECK(*select_run(Objective::kDaml, runs, 0.85) == 2);
  CHECK(*select_run(Objective::kDaml, runs, 0.97) == 1);
  std::vector<SweepRun> failed;
  failed.push_back(run(1.0, 1.0, false));
  CHECK_FALSE(select_run(Objective::kNll, failed).has_value());
}

TEST_CASE("default epsilon grid brackets the achievable BPR range") {
  const auto eps = default_epsilon_grid(0.8, 0.9);
  REQUIRE(eps.size() == 5);
  CHECK(eps[0] == doctest::Approx(0.82));
  CHECK(eps[3] == doctest::Approx(0.88));
  CHECK(eps.back() == 1.0);
  CHECK(default_epsilon_grid(1.0, 1.0) == std::vector<double>{1.0});
}

TEST_CASE("pareto with an empty epsilon grid yields only NLL and BPR rows") {
  const PanelDataset p = small_panel();
  const auto dir = test::scratch_dir("pareto_empty");
  ParetoConfig pc;
  pc.base = quick_config(Objective::kNll);
  pc.grid = SweepGrid{{1}, {0.1}, {0.05}};
  pc.epsilons = std::vector<double>{};
  pc.eval.k = 2;
  pc.eval.num_samples = 20;
  pc.eval.num_trials = 10;
  pc.output_dir = dir;
  const ParetoResult res = run_pareto([] { return std::make_unique<TruncGaussMixture>(4, 2); }, p, pc);
  REQUIRE(res.selected.size() == 2);
  CHECK(res.selected[0].row.objective == "nll");
  CHECK(res.selected[1].row.objective == "bpr");
  const auto rows = read_trial_results(dir / "results.csv");
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CHECK(r.bpr_p05 <= r.bpr_p50);
    CHECK(r.bpr_p50 <= r.bpr_p95);
    CHECK(std::filesystem::exists(dir / r.bpr_samples_path));
  }
}

TEST_CASE("pareto DAML stage is warm-started from the selected NLL model") {
  const PanelDataset p = small_panel();
  ParetoConfig pc;
  pc.base = quick_config(Objective::kNll);
  pc.base.max_epochs = 0;
  pc.grid = SweepGrid{{1}, {0.1}, {0.05}};
  pc.epsilons = std::vector<double>{0.9};
  pc.eval.k = 2;
  pc.eval.num_samples = 10;
  pc.eval.num_trials = 4;
  const ParetoResult res = run_pareto([] { return std::make_unique<TruncGaussMixture>(4, 2); }, p, pc);
  REQUIRE(res.selected.size() == 3);
  const auto nll_phi = res.selected[0].model->params();
  const auto daml_phi = res.selected[2].model->params();
  CHECK(Vector(nll_phi.begin(), nll_phi.end()) == Vector(daml_phi.begin(), daml_phi.end()));
}
