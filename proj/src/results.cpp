#include "daml/results.hpp"

#include <fstream>

#include "daml/csv.hpp"
#include "daml/error.hpp"

#ifndef DAML_GIT_DESCRIBE
#define DAML_GIT_DESCRIBE "unknown"
#endif

namespace daml {

const std::vector<std::string>& trial_result_columns() {
  static const std::vector<std::string> cols = {
      "model_label", "objective",      "epsilon",       "lambda",     "seed",         "step_size",
      "sigma",       "status",         "best_epoch",    "train_loglik", "train_bpr_mean", "val_loglik",
      "val_bpr_mean", "test_loglik",   "bpr_mean",      "bpr_p05",    "bpr_p50",      "bpr_p95",
      "bpr_samples_path", "checkpoint_path", "error"};
  return cols;
}

void write_trial_results(const std::filesystem::path& path, const std::vector<TrialResult>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << csv::schema_comment() << '\n';
  const auto& cols = trial_result_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const TrialResult& r : rows) {
    out << csv::quote(r.model_label) << ',' << r.objective << ',' << csv::real(r.epsilon) << ','
        << csv::real(r.lambda) << ',' << r.seed << ',' << csv::real(r.step_size) << ',' << csv::real(r.sigma) << ','
        << r.status << ',' << r.best_epoch << ',' << csv::real(r.train_loglik) << ','
        << csv::real(r.train_bpr_mean) << ',' << csv::real(r.val_loglik) << ',' << csv::real(r.val_bpr_mean) << ','
        << csv::real(r.test_loglik) << ',' << csv::real(r.bpr_mean) << ',' << csv::real(r.bpr_p05) << ','
        << csv::real(r.bpr_p50) << ',' << csv::real(r.bpr_p95) << ',' << csv::quote(r.bpr_samples_path) << ','
        << csv::quote(r.checkpoint_path) << ',' << csv::quote(r.error) << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<TrialResult> read_trial_results(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<TrialResult> rows;
  std::string line;
  bool header = false;
  std::size_t line_no = 0;
  const auto& cols = trial_result_columns();
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto f = csv::split_line(line);
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (!header) {
      if (f != cols) throw IoError(where + ": unexpected TrialResult header");
      header = true;
      continue;
    }
    if (f.size() != cols.size()) throw IoError(where + ": expected " + std::to_string(cols.size()) + " columns");
    TrialResult r;
    r.model_label = f[0];
    r.objective = f[1];
    r.epsilon = csv::parse_real(f[2], where);
    r.lambda = csv::parse_real(f[3], where);
    r.seed = static_cast<std::uint64_t>(std::stoull(f[4]));
    r.step_size = csv::parse_real(f[5], where);
    r.sigma = csv::parse_real(f[6], where);
    r.status = f[7];
    r.best_epoch = csv::parse_int(f[8], where);
    r.train_loglik = csv::parse_real(f[9], where);
    r.train_bpr_mean = csv::parse_real(f[10], where);
    r.val_loglik = csv::parse_real(f[11], where);
    r.val_bpr_mean = csv::parse_real(f[12], where);
    r.test_loglik = csv::parse_real(f[13], where);
    r.bpr_mean = csv::parse_real(f[14], where);
    r.bpr_p05 = csv::parse_real(f[15], where);
    r.bpr_p50 = csv::parse_real(f[16], where);
    r.bpr_p95 = csv::parse_real(f[17], where);
    r.bpr_samples_path = f[18];
    r.checkpoint_path = f[19];
    r.error = f[20];
    rows.push_back(std::move(r));
  }
  if (!header) throw IoError(path.string() + ": missing header");
  return rows;
}

std::string git_describe() { return DAML_GIT_DESCRIBE; }

void write_manifest(const std::filesystem::path& path, const std::string& command, const nlohmann::json& config,
                    const nlohmann::json& extra) {
  nlohmann::json doc = {{"schema_version", csv::kSchemaVersion},
                        {"tool", "daml"},
                        {"git_describe", git_describe()},
                        {"command", command},
                        {"config", config}};
  for (auto it = extra.begin(); it != extra.end(); ++it) doc[it.key()] = it.value();
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace daml
