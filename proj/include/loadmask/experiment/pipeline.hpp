#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "loadmask/data/channel_series.hpp"
#include "loadmask/experiment/config.hpp"
#include "loadmask/metrics/report.hpp"

// Subcommands of the command-line runner. Each writes its artifacts under cfg.out_dir (or
// cfg.data_dir for gen-synthetic) and records them in that directory's manifest.json.
//
//   <out>/nilm/<appliance>.json, nilm/loss_<appliance>.csv
//   <out>/agent/<cell>/policy.json, agent/<cell>/train_log.csv
//   <out>/eval/<cell>/results.json, trace.csv, load_curves.csv, disagg_<a>.csv, predictions_<a>.csv
//
// where <cell> is lambda_<l>_seed_<s> for a trained policy and noop for the baseline.

namespace loadmask::experiment {

inline constexpr const char* kCodeVersion = "1.0.0";

std::string cell_name(double lambda, std::uint64_t seed);

/// Writes synthetic day files day_000.csv .. into cfg.data_dir.
std::vector<std::filesystem::path> cmd_gen_synthetic(const ExperimentConfig& cfg);

/// Reads day `index` and cuts it to one aligned day.
data::DaySlice load_day(const ExperimentConfig& cfg, int index);

/// Fits one adversary per configured appliance on the training days.
std::vector<std::filesystem::path> cmd_train_nilm(const ExperimentConfig& cfg);

/// Trains the load-shaping agent on the evaluation day with cfg.lambda and cfg.seed.
std::filesystem::path cmd_train_agent(const ExperimentConfig& cfg);

struct EvaluateOptions {
  std::optional<std::filesystem::path> policy;  // unset: the no-op baseline
  std::filesystem::path nilm_dir;               // empty: <out>/nilm
  std::filesystem::path out_dir;                // empty: <out>/eval/<cell>
};

/// Rolls one greedy day, attacks the masked load and writes results.json plus figure data.
metrics::ExperimentResult cmd_evaluate(const ExperimentConfig& cfg, const EvaluateOptions& opts);

/// Trains and evaluates every (lambda, seed) cell plus the baseline. Cells run in parallel
/// with isolated output directories. Returns the results.json paths.
std::vector<std::filesystem::path> cmd_sweep(const ExperimentConfig& cfg);

/// Collects every eval/*/results.json under cfg.out_dir into summary.csv (one row per
/// cell) and returns the table text.
std::string cmd_report(const ExperimentConfig& cfg);

/// Appends a run record to <dir>/manifest.json, atomically.
void record_manifest(const std::filesystem::path& dir, const std::string& command, const ExperimentConfig& cfg,
                     const std::vector<std::filesystem::path>& artifacts);

}  // namespace loadmask::experiment
