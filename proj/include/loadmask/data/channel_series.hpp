#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace loadmask::data {

/// One metered channel. Timestamps are local-naive epoch seconds, strictly increasing.
struct ChannelSeries {
  std::string name;
  std::vector<std::int64_t> timestamps;
  std::vector<double> power_kw;

  [[nodiscard]] std::size_t size() const { return timestamps.size(); }
  /// Throws ValidationError on unequal lengths, unsorted timestamps or invalid power.
  void validate() const;
};

/// Channels aligned on one 1-minute grid.
struct Household {
  ChannelSeries aggregate;
  std::map<std::string, ChannelSeries> appliances;

  void validate_alignment() const;
  /// Share of minutes where aggregate >= every single appliance.
  [[nodiscard]] double dominance_fraction() const;
};

/// `timestamp_unix_s,power_w` (comma or whitespace separated, optional header line).
/// Watts become kW, rows are sorted and duplicate timestamps collapse to their mean.
/// Malformed rows are reported with their line numbers.
ChannelSeries load_channel_csv(const std::filesystem::path& path, const std::string& name);

/// Wide aligned format: header `timestamp,aggregate_w,<appliance>_w,...`.
Household load_wide_csv(const std::filesystem::path& path);
void write_wide_csv(const std::filesystem::path& path, const Household& household);

struct ResampleResult {
  ChannelSeries series;
  std::vector<std::string> warnings;
};

/// Averages samples into 1-minute buckets. Runs of empty buckets no longer than
/// `gap_limit_minutes` are forward-filled; longer runs are zero-filled with a warning.
ResampleResult resample_1min(const ChannelSeries& series, int gap_limit_minutes = 5);

/// Resamples every channel and trims them to their common grid.
Household align_household(const ChannelSeries& aggregate, const std::vector<ChannelSeries>& appliances,
                          int gap_limit_minutes = 5, std::vector<std::string>* warnings = nullptr);

/// One day's aligned minute data.
struct DaySlice {
  std::int64_t start_timestamp = 0;
  std::vector<double> demand;                          // aggregate kW, 1440 values
  std::map<std::string, std::vector<double>> appliance_kw;
  std::map<std::string, std::vector<bool>> truth_on;  // appliance_kw > threshold
};

inline constexpr double kOnThresholdKw = 0.5;

/// Cuts [date 00:00, date 23:59] from an aligned household. Throws ValidationError naming
/// the first channel that does not cover the whole day.
DaySlice make_day(const Household& household, std::chrono::year_month_day date,
                  double on_threshold_kw = kOnThresholdKw);
DaySlice make_day(const Household& household, std::int64_t day_start_timestamp,
                  double on_threshold_kw = kOnThresholdKw);

/// Truth labels: power > threshold.
std::vector<bool> on_labels(const std::vector<double>& power_kw, double threshold_kw = kOnThresholdKw);

std::int64_t day_start(std::chrono::year_month_day date);

}  // namespace loadmask::data
