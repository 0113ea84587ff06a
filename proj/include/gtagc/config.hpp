// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gtagc/model.hpp"
#include "gtagc/training.hpp"

namespace gtagc {

/// Input files. Either content/cites or edges/features(/labels) is used.
struct DataConfig {
  std::string name = "dataset";
  std::filesystem::path content;
  std::filesystem::path cites;
  std::filesystem::path edges;
  std::filesystem::path features;
  std::filesystem::path labels;
  int expected_clusters = 0;
  bool normalize_features = true;

  bool operator==(const DataConfig&) const = default;
};

struct SweepConfig {
  std::string parameter;            // "section.key" or "ablation"
  std::vector<std::string> values;  // raw text, parsed like the config value

  bool operator==(const SweepConfig&) const = default;
};

struct RunConfig {
  DataConfig data;
  ModelConfig model;   // model.n_clusters == 0 means "take from the dataset"
  TrainConfig train;
  std::filesystem::path output_dir = "runs";
  std::filesystem::path cache_dir;  // empty: <output_dir>/cache
  std::uint64_t seed = 0;
  int runs = 1;                     // run i uses seed + i
  int threads = 1;
  SweepConfig sweep;

  std::vector<std::uint64_t> seeds() const;

  bool operator==(const RunConfig&) const = default;
};

/// Defaults for every key, with model.n_clusters = 0.
RunConfig default_run_config();

/// Parses INI text. Unknown sections or keys raise ErrorKind::Config naming
/// the closest valid key. Relative paths resolve against `base_dir`.
RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

/// Complete INI listing of every key; parse_run_config inverts it exactly.
std::string format_run_config(const RunConfig& cfg);

/// Applies one `section.key = value` assignment (also used by sweeps).
void set_config_value(RunConfig& cfg, const std::string& dotted_key, const std::string& value);

/// Every accepted "section.key" name.
const std::vector<std::string>& config_keys();

std::size_t edit_distance(const std::string& a, const std::string& b);

}  // namespace gtagc
