#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "loadmask/env/episode.hpp"
#include "loadmask/nilm/seq2point.hpp"

// CSV schemas. All numbers are written in shortest round-trip form, so reading a file back
// reproduces the doubles bit for bit.
//
//   trace.csv        minute,demand_kw,requested_kw,applied_kw,delta_b_kwh,masked_kw,battery_kwh,
//                    battery_next_kwh,price,done,privacy_raw,cost_raw,system_raw,battery_raw,
//                    privacy_norm,cost_norm,system_norm,total,tau,delta_t,case
//   load_curves.csv  minute,demand_kw,masked_kw
//   disagg_<a>.csv   minute,true_kw,predicted_kw,predicted_on
//   predictions_<a>.csv  minute,predicted_kw,predicted_on,true_on
namespace loadmask::metrics {

inline constexpr const char* kTraceHeader =
    "minute,demand_kw,requested_kw,applied_kw,delta_b_kwh,masked_kw,battery_kwh,battery_next_kwh,price,done,"
    "privacy_raw,cost_raw,system_raw,battery_raw,privacy_norm,cost_norm,system_norm,total,tau,delta_t,case";
inline constexpr const char* kLoadCurvesHeader = "minute,demand_kw,masked_kw";
inline constexpr const char* kDisaggHeader = "minute,true_kw,predicted_kw,predicted_on";
inline constexpr const char* kPredictionsHeader = "minute,predicted_kw,predicted_on,true_on";

void write_trace_csv(const std::filesystem::path& path, const env::EpisodeTrace& trace);
env::EpisodeTrace read_trace_csv(const std::filesystem::path& path);

/// Per-appliance inputs for the disaggregation overlay.
struct ApplianceAttack {
  std::vector<double> true_kw;
  nilm::AttackOutput attack;
};

/// Writes load_curves.csv and one disagg_<appliance>.csv per entry. Returns the paths.
std::vector<std::filesystem::path> export_figures(const env::EpisodeTrace& trace,
                                                  const std::map<std::string, ApplianceAttack>& attacks,
                                                  const std::filesystem::path& out_dir);

void write_predictions_csv(const std::filesystem::path& path, const nilm::AttackOutput& attack,
                           const std::vector<bool>* truth);

/// Columns of any of the CSVs above, by header name; values parsed as doubles.
std::map<std::string, std::vector<double>> read_numeric_csv(const std::filesystem::path& path,
                                                            std::vector<std::string>* header = nullptr);

}  // namespace loadmask::metrics
