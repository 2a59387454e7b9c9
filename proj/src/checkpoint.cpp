#include "daml/checkpoint.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "daml/error.hpp"
#include "daml/models/fixed_models.hpp"
#include "daml/models/negbin.hpp"
#include "daml/models/tgmm.hpp"

namespace daml {

namespace {

constexpr int kSchemaVersion = 1;

std::string fmt_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_values(std::ostream& out, std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << ' ';
    out << fmt_real(values[i]);
  }
  out << '\n';
}

class Reader {
 public:
  Reader(std::istream& in, std::string path) : in_(in), path_(std::move(path)) {}

  // Next non-empty, non-comment line split into tokens; false at EOF.
  bool next(std::vector<std::string>& tokens) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (line.empty() || line[0] == '#') continue;
      tokens.clear();
      std::istringstream ss(line);
      for (std::string tok; ss >> tok;) tokens.push_back(tok);
      if (!tokens.empty()) return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw IoError(path_ + ":" + std::to_string(line_no_) + ": " + what);
  }

  double real(const std::string& tok) const {
    double v = 0.0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    if (tok == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (tok == "inf") return std::numeric_limits<double>::infinity();
    if (tok == "-inf") return -std::numeric_limits<double>::infinity();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) fail("bad real '" + tok + "'");
    return v;
  }

  long long integer(const std::string& tok) const {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) fail("bad integer '" + tok + "'");
    return v;
  }

  Vector values(std::size_t n) {
    std::vector<std::string> tokens;
    if (n == 0) return {};
    if (!next(tokens)) fail("unexpected end of file");
    if (tokens.size() != n) fail("expected " + std::to_string(n) + " values, got " + std::to_string(tokens.size()));
    Vector out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = real(tokens[i]);
    return out;
  }

 private:
  std::istream& in_;
  std::string path_;
  std::size_t line_no_ = 0;
};

long long shape_value(const std::vector<std::pair<std::string, long long>>& shape, const std::string& key) {
  for (const auto& [k, v] : shape) {
    if (k == key) return v;
  }
  throw ValidationError("model shape is missing '" + key + "'");
}

}  // namespace

double Checkpoint::scalar(const std::string& name, double fallback) const {
  auto it = scalars.find(name);
  return it == scalars.end() ? fallback : it->second;
}

Checkpoint make_checkpoint(const GenerativeModel& model, long long epoch) {
  Checkpoint ckpt;
  ckpt.family = model.family();
  ckpt.shape = model.shape_metadata();
  ckpt.blocks = model.param_blocks();
  ckpt.phi.assign(model.params().begin(), model.params().end());
  ckpt.epoch = epoch;
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << "# daml checkpoint\n";
    out << "schema_version " << kSchemaVersion << '\n';
    out << "family " << ckpt.family << '\n';
    for (const auto& [k, v] : ckpt.shape) out << "meta " << k << ' ' << v << '\n';
    out << "epoch " << ckpt.epoch << '\n';
    for (const auto& [k, v] : ckpt.scalars) out << "scalar " << k << ' ' << fmt_real(v) << '\n';
    for (const ParamBlock& b : ckpt.blocks) {
      out << "block " << b.name << ' ' << b.rows << ' ' << b.cols << '\n';
      write_values(out, std::span<const double>(ckpt.phi).subspan(b.offset, b.size()));
    }
    if (ckpt.optimizer) {
      const OptimizerState& s = *ckpt.optimizer;
      out << "optimizer " << to_string(s.kind) << ' ' << fmt_real(s.step_size) << ' ' << fmt_real(s.beta1)
          << ' ' << fmt_real(s.beta2) << ' ' << fmt_real(s.eps) << ' ' << s.steps << ' ' << s.m.size() << '\n';
      if (!s.m.empty()) {
        write_values(out, s.m);
        write_values(out, s.v);
      }
    }
    out << "end\n";
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move checkpoint into place at " + path.string() + ": " + ec.message());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  Reader reader(in, path.string());
  Checkpoint ckpt;
  std::vector<std::string> tok;
  bool saw_version = false, saw_end = false;
  std::vector<std::pair<ParamBlock, Vector>> blocks;
  while (reader.next(tok)) {
    const std::string& key = tok[0];
    if (key == "schema_version" && tok.size() == 2) {
      if (reader.integer(tok[1]) != kSchemaVersion) reader.fail("unsupported schema_version " + tok[1]);
      saw_version = true;
    } else if (key == "family" && tok.size() == 2) {
      ckpt.family = tok[1];
    } else if (key == "meta" && tok.size() == 3) {
      ckpt.shape.emplace_back(tok[1], reader.integer(tok[2]));
    } else if (key == "epoch" && tok.size() == 2) {
      ckpt.epoch = reader.integer(tok[1]);
    } else if (key == "scalar" && tok.size() == 3) {
      ckpt.scalars[tok[1]] = reader.real(tok[2]);
    } else if (key == "block" && tok.size() == 4) {
      ParamBlock b;
      b.name = tok[1];
      b.rows = static_cast<std::size_t>(reader.integer(tok[2]));
      b.cols = static_cast<std::size_t>(reader.integer(tok[3]));
      blocks.emplace_back(b, reader.values(b.size()));
    } else if (key == "optimizer" && tok.size() == 8) {
      OptimizerState s;
      s.kind = parse_optimizer(tok[1]);
      s.step_size = reader.real(tok[2]);
      s.beta1 = reader.real(tok[3]);
      s.beta2 = reader.real(tok[4]);
      s.eps = reader.real(tok[5]);
      s.steps = reader.integer(tok[6]);
      const auto n = static_cast<std::size_t>(reader.integer(tok[7]));
      s.m = reader.values(n);
      s.v = reader.values(n);
      ckpt.optimizer = std::move(s);
    } else if (key == "end" && tok.size() == 1) {
      saw_end = true;
      break;
    } else {
      reader.fail("unrecognised line starting with '" + key + "'");
    }
  }
  if (!saw_version) throw IoError(path.string() + ": missing schema_version");
  if (!saw_end) throw IoError(path.string() + ": truncated checkpoint (no 'end' line)");
  if (ckpt.family.empty()) throw IoError(path.string() + ": missing family");
  std::size_t offset = 0;
  for (auto& [b, values] : blocks) {
    b.offset = offset;
    offset += b.size();
    ckpt.phi.insert(ckpt.phi.end(), values.begin(), values.end());
    ckpt.blocks.push_back(b);
  }
  return ckpt;
}

std::unique_ptr<GenerativeModel> make_model(const std::string& family,
                                            const std::vector<std::pair<std::string, long long>>& shape,
                                            std::shared_ptr<const PanelDataset> panel) {
  if (family == "tgmm") {
    const long long s = shape_value(shape, "S");
    const long long l = shape_value(shape, "L");
    if (s < 1 || l < 1) throw ValidationError("tgmm needs S >= 1 and L >= 1");
    return std::make_unique<TruncGaussMixture>(static_cast<std::size_t>(s), static_cast<std::size_t>(l));
  }
  if (family == "negbin" || family == "point_mass") {
    if (!panel) throw ValidationError(family + " model needs a dataset");
    for (const auto& [k, v] : shape) {
      if (k == "S" && v != static_cast<long long>(panel->num_sites)) {
        throw ValidationError(family + ": checkpoint has S=" + std::to_string(v) + " but dataset has " +
                              std::to_string(panel->num_sites) + " sites");
      }
      if (k == "D" && v != static_cast<long long>(panel->num_features)) {
        throw ValidationError(family + ": checkpoint has D=" + std::to_string(v) + " but dataset has " +
                              std::to_string(panel->num_features) + " features");
      }
    }
    if (family == "negbin") return std::make_unique<NegBinMixedEffects>(std::move(panel));
    return std::make_unique<PointMass>(std::move(panel));
  }
  if (family == "abc_demo") return std::make_unique<AbcDemoModel>();
  throw ValidationError("unknown model family '" + family + "'");
}

std::unique_ptr<GenerativeModel> restore_model(const Checkpoint& ckpt, std::shared_ptr<const PanelDataset> panel) {
  auto model = make_model(ckpt.family, ckpt.shape, std::move(panel));
  if (model->num_params() != ckpt.phi.size()) {
    throw ValidationError("checkpoint holds " + std::to_string(ckpt.phi.size()) + " parameters; " +
                          ckpt.family + " expects " + std::to_string(model->num_params()));
  }
  model->set_params(ckpt.phi);
  return model;
}

}  // namespace daml
