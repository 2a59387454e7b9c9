#pragma once

// Self-describing text checkpoints:
//
//   # daml checkpoint
//   schema_version 1
//   family tgmm
//   meta S 7
//   meta L 2
//   epoch 40
//   scalar objective <value>
//   block mu_raw 2 1
//   <values>
//   optimizer adam <step_size> <beta1> <beta2> <eps> <steps> <P>
//   <m values>
//   <v values>
//   end
//
// Reals are written with 17 significant digits so a save/load round trip
// is bit-exact.

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "daml/linalg.hpp"
#include "daml/models/model.hpp"
#include "daml/optim.hpp"
#include "daml/panel.hpp"

namespace daml {

struct Checkpoint {
  std::string family;
  std::vector<std::pair<std::string, long long>> shape;
  std::vector<ParamBlock> blocks;
  Vector phi;
  long long epoch = 0;
  // Named scalar metrics (objective, val_nll, val_bpr, best_score, ...).
  std::map<std::string, double> scalars;
  std::optional<OptimizerState> optimizer;

  double scalar(const std::string& name, double fallback) const;
};

/// Snapshot of a model's parameters and shape.
Checkpoint make_checkpoint(const GenerativeModel& model, long long epoch);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Builds an empty model of the named family. `shape` supplies S, L, D as
/// needed; families that read features or counts need `panel`.
std::unique_ptr<GenerativeModel> make_model(const std::string& family,
                                            const std::vector<std::pair<std::string, long long>>& shape,
                                            std::shared_ptr<const PanelDataset> panel);

/// make_model followed by set_params(ckpt.phi).
std::unique_ptr<GenerativeModel> restore_model(const Checkpoint& ckpt, std::shared_ptr<const PanelDataset> panel);

}  // namespace daml
