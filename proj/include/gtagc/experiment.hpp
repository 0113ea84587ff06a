// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gtagc/config.hpp"
#include "gtagc/metrics.hpp"
#include "gtagc/training.hpp"

namespace gtagc {

/// Loads the configured files and applies feature normalisation.
Graph load_dataset(const DataConfig& data);

/// Spectral bundle for the model's filter order and k_pe, read from or
/// written to `cache_dir` when it is non-empty.
SpectralBundle prepare_spectral(const Graph& g, const ModelConfig& model, const std::filesystem::path& cache_dir);

/// Copy of cfg.model with n_clusters taken from the data when it is 0.
ModelConfig resolve_model(const RunConfig& cfg, const Graph& g);

struct RunOutcome {
  std::uint64_t seed = 0;
  std::filesystem::path dir;
  std::optional<EvalReport> report;
  int best_epoch = -1;
  int epochs_run = 0;
  double seconds = 0.0;
};

/// Trains one seed and writes checkpoint.bin, history.csv, assignments.csv,
/// metrics.csv (labelled data only) and config.ini into `dir`.
RunOutcome run_single(const RunConfig& cfg, const Graph& g, const SpectralBundle& bundle,
                      std::uint64_t seed, const std::filesystem::path& dir);

/// Trains every seed of cfg into <output_dir>/seed_<s>/ and writes
/// <output_dir>/summary.csv and config.ini.
std::vector<RunOutcome> run_train(const RunConfig& cfg);

/// Same, with a preloaded graph (sweeps reuse one load).
std::vector<RunOutcome> run_train(const RunConfig& cfg, const Graph& g);

struct EvalOutcome {
  Labels assignments;
  Matrix embedding;
  std::optional<EvalReport> report;
};

/// Recomputes embeddings and assignments for a checkpoint on a dataset.
/// Writes eval_metrics.csv (labelled data) and, when asked, embeddings.csv.
EvalOutcome run_eval(const std::filesystem::path& checkpoint, const RunConfig& cfg,
                     const std::filesystem::path& out_dir, bool export_embeddings);

struct SweepRow {
  std::string value;
  std::uint64_t seed = 0;
  std::optional<EvalReport> report;
  std::string status = "ok";
};

/// Applies each sweep value to a copy of cfg and trains every seed. Failed
/// runs are recorded and the sweep continues. Writes <output_dir>/summary.csv.
std::vector<SweepRow> run_sweep(const RunConfig& cfg);

/// Sets the three component switches for an ablation preset:
/// full, baseline, filter_only, pe_only, global_only.
void apply_ablation(ModelConfig& model, const std::string& preset);

/// Mean of each metric over the rows that produced a report.
EvalReport mean_report(const std::vector<EvalReport>& reports);

}  // namespace gtagc
