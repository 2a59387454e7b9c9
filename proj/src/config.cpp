#include "daml/config.hpp"

#include <fstream>
#include <set>

#include "daml/checkpoint.hpp"
#include "daml/data.hpp"
#include "daml/error.hpp"
#include "daml/models/negbin.hpp"
#include "daml/models/tgmm.hpp"

namespace daml {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ValidationError(where + " must be a JSON object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) throw ValidationError("unknown config key '" + where + "." + it.key() + "'");
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw ValidationError("config key '" + where + "." + key + "' has the wrong type");
  }
}

// Non-negative integer key.
void read_count(const json& obj, const char* key, std::size_t& out, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  if (!it->is_number_integer() || it->get<long long>() < 0) {
    throw ValidationError("config key '" + where + "." + key + "' must be a non-negative integer");
  }
  out = it->get<std::size_t>();
}

void read_seed(const json& obj, const char* key, std::uint64_t& out, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  if (!it->is_number_integer() || (it->is_number_integer() && !it->is_number_unsigned() && it->get<long long>() < 0)) {
    throw ValidationError("config key '" + where + "." + key + "' must be a non-negative integer");
  }
  out = it->get<std::uint64_t>();
}

SweepGrid parse_grid(const json& obj, const std::string& where) {
  reject_unknown(obj, where, {"seeds", "step_sizes", "sigmas"});
  SweepGrid g;
  read(obj, "seeds", g.seeds, where);
  read(obj, "step_sizes", g.step_sizes, where);
  read(obj, "sigmas", g.sigmas, where);
  if (g.seeds.empty() || g.step_sizes.empty() || g.sigmas.empty()) {
    throw ValidationError(where + ".seeds, step_sizes and sigmas must be non-empty");
  }
  for (double v : g.step_sizes) {
    if (!(v > 0.0)) throw ValidationError(where + ".step_sizes must be positive");
  }
  for (double v : g.sigmas) {
    if (!(v > 0.0)) throw ValidationError(where + ".sigmas must be positive");
  }
  return g;
}

json grid_json(const SweepGrid& g) { return {{"seeds", g.seeds}, {"step_sizes", g.step_sizes}, {"sigmas", g.sigmas}}; }

}  // namespace

RunConfig parse_run_config(const json& doc) {
  RunConfig cfg;
  reject_unknown(doc, "config",
                 {"dataset", "model", "train", "sweep", "nll_sweep", "nll_max_epochs", "evaluate", "epsilons",
                  "warm_start_daml", "output_dir", "threads"});
  if (auto it = doc.find("dataset"); it != doc.end()) {
    const std::string w = "dataset";
    reject_unknown(*it, w, {"generator", "path", "seed", "n_lags", "standardize", "train_fraction", "val_fraction"});
    DatasetConfig& d = cfg.dataset;
    read(*it, "generator", d.generator, w);
    std::string path;
    read(*it, "path", path, w);
    d.path = path;
    read_seed(*it, "seed", d.seed, w);
    read_count(*it, "n_lags", d.n_lags, w);
    read(*it, "standardize", d.standardize, w);
    read(*it, "train_fraction", d.train_fraction, w);
    read(*it, "val_fraction", d.val_fraction, w);
    if (d.generator != "synthetic_1d" && d.generator != "synthetic_negbin" && d.generator != "csv") {
      throw ValidationError("dataset.generator must be synthetic_1d, synthetic_negbin or csv");
    }
    if (d.generator == "csv" && d.path.empty()) throw ValidationError("dataset.path is required for csv input");
  }
  if (auto it = doc.find("model"); it != doc.end()) {
    reject_unknown(*it, "model", {"family", "components"});
    read(*it, "family", cfg.model.family, "model");
    read_count(*it, "components", cfg.model.components, "model");
    if (cfg.model.family != "tgmm" && cfg.model.family != "negbin") {
      throw ValidationError("model.family must be tgmm or negbin");
    }
    if (cfg.model.components == 0) throw ValidationError("model.components must be >= 1");
  }
  if (auto it = doc.find("train"); it != doc.end()) {
    const std::string w = "train";
    reject_unknown(*it, w,
                   {"objective", "k", "epsilon", "lambda", "M", "J", "sigma", "step_size", "max_epochs", "seed",
                    "eval_every", "optimizer", "init", "init_scale", "patience", "grad_tol", "eval_samples",
                    "record_timing"});
    TrainConfig& t = cfg.train;
    std::string s;
    if (it->contains("objective")) {
      read(*it, "objective", s, w);
      t.objective = parse_objective(s);
    }
    read_count(*it, "k", t.k, w);
    read(*it, "epsilon", t.epsilon, w);
    read(*it, "lambda", t.lambda, w);
    read_count(*it, "M", t.num_samples, w);
    read_count(*it, "J", t.num_perturbations, w);
    read(*it, "sigma", t.sigma, w);
    read(*it, "step_size", t.step_size, w);
    read_count(*it, "max_epochs", t.max_epochs, w);
    read_seed(*it, "seed", t.seed, w);
    read_count(*it, "eval_every", t.eval_every, w);
    if (it->contains("optimizer")) {
      read(*it, "optimizer", s, w);
      t.optimizer = parse_optimizer(s);
    }
    if (it->contains("init")) {
      read(*it, "init", s, w);
      t.init = parse_init_mode(s);
    }
    read(*it, "init_scale", t.init_scale, w);
    read_count(*it, "patience", t.patience, w);
    read(*it, "grad_tol", t.grad_tol, w);
    read_count(*it, "eval_samples", t.eval_samples, w);
    read(*it, "record_timing", t.record_timing, w);
  }
  if (auto it = doc.find("sweep"); it != doc.end()) cfg.sweep = parse_grid(*it, "sweep");
  if (auto it = doc.find("nll_sweep"); it != doc.end()) cfg.nll_sweep = parse_grid(*it, "nll_sweep");
  if (doc.contains("nll_max_epochs")) {
    std::size_t n = 0;
    read_count(doc, "nll_max_epochs", n, "config");
    cfg.nll_max_epochs = n;
  }
  if (auto it = doc.find("evaluate"); it != doc.end()) {
    reject_unknown(*it, "evaluate", {"M", "trials", "history_lags"});
    read_count(*it, "M", cfg.evaluate.num_samples, "evaluate");
    read_count(*it, "trials", cfg.evaluate.num_trials, "evaluate");
    read_count(*it, "history_lags", cfg.evaluate.history_lags, "evaluate");
  }
  if (doc.contains("epsilons")) {
    std::vector<double> eps;
    read(doc, "epsilons", eps, "config");
    for (double e : eps) {
      if (!(e >= 0.0 && e <= 1.0)) throw ValidationError("epsilons must lie in [0, 1]");
    }
    cfg.epsilons = eps;
  }
  read(doc, "warm_start_daml", cfg.warm_start_daml, "config");
  std::string out;
  read(doc, "output_dir", out, "config");
  cfg.output_dir = out;
  read(doc, "threads", cfg.threads, "config");
  cfg.train.threads = cfg.threads;
  cfg.evaluate.threads = cfg.threads;
  cfg.evaluate.k = cfg.train.k;
  cfg.evaluate.seed = cfg.train.seed;
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_run_config(doc);
}

nlohmann::json to_json(const RunConfig& c) {
  const TrainConfig& t = c.train;
  json doc = {
      {"dataset",
       {{"generator", c.dataset.generator},
        {"path", c.dataset.path.string()},
        {"seed", c.dataset.seed},
        {"n_lags", c.dataset.n_lags},
        {"standardize", c.dataset.standardize},
        {"train_fraction", c.dataset.train_fraction},
        {"val_fraction", c.dataset.val_fraction}}},
      {"model", {{"family", c.model.family}, {"components", c.model.components}}},
      {"train",
       {{"objective", to_string(t.objective)},
        {"k", t.k},
        {"epsilon", t.epsilon},
        {"lambda", t.lambda},
        {"M", t.num_samples},
        {"J", t.num_perturbations},
        {"sigma", t.sigma},
        {"step_size", t.step_size},
        {"max_epochs", t.max_epochs},
        {"seed", t.seed},
        {"eval_every", t.eval_every},
        {"optimizer", to_string(t.optimizer)},
        {"init", to_string(t.init)},
        {"init_scale", t.init_scale},
        {"patience", t.patience},
        {"grad_tol", t.grad_tol},
        {"eval_samples", t.eval_samples},
        {"record_timing", t.record_timing}}},
      {"evaluate",
       {{"M", c.evaluate.num_samples}, {"trials", c.evaluate.num_trials}, {"history_lags", c.evaluate.history_lags}}},
      {"warm_start_daml", c.warm_start_daml},
      {"output_dir", c.output_dir.string()},
      {"threads", c.threads}};
  if (c.sweep) doc["sweep"] = grid_json(*c.sweep);
  if (c.nll_sweep) doc["nll_sweep"] = grid_json(*c.nll_sweep);
  if (c.nll_max_epochs) doc["nll_max_epochs"] = *c.nll_max_epochs;
  if (c.epsilons) doc["epsilons"] = *c.epsilons;
  return doc;
}

std::shared_ptr<const PanelDataset> build_dataset(const DatasetConfig& cfg) {
  PanelDataset panel;
  if (cfg.generator == "synthetic_1d") {
    panel = gen_synthetic_1d(cfg.seed);
  } else if (cfg.generator == "synthetic_negbin") {
    NegBinPanelSpec spec;
    spec.train_fraction = cfg.train_fraction;
    spec.val_fraction = cfg.val_fraction;
    panel = gen_synthetic_negbin(cfg.seed, spec);
  } else if (cfg.generator == "csv") {
    panel = load_panel_csv(cfg.path);
    assign_splits(panel, cfg.train_fraction, cfg.val_fraction);
  } else {
    throw ValidationError("unknown dataset generator '" + cfg.generator + "'");
  }
  if (cfg.n_lags > 0) panel = make_lag_features(panel, cfg.n_lags);
  if (cfg.standardize) standardize_features(panel);
  panel.validate();
  return std::make_shared<const PanelDataset>(std::move(panel));
}

ModelFactory model_factory(const ModelConfig& cfg, std::shared_ptr<const PanelDataset> panel) {
  if (cfg.family == "tgmm") {
    const std::size_t sites = panel->num_sites, comps = cfg.components;
    return [sites, comps] { return std::make_unique<TruncGaussMixture>(sites, comps); };
  }
  if (cfg.family == "negbin") {
    return [panel] { return std::make_unique<NegBinMixedEffects>(panel); };
  }
  throw ValidationError("unknown model family '" + cfg.family + "'");
}

}  // namespace daml
