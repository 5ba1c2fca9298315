#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "loadmask/data/channel_series.hpp"

namespace loadmask::data {

/// Rectangular on/off appliance placed at random times each day.
struct PulseSpec {
  std::string name;
  double power_kw = 0.0;
  int duration_minutes = 1;
  int per_day = 0;
  int earliest_minute = 0;    // allowed start window, minutes after midnight
  int latest_minute = 1440;   // pulses end no later than this
};

struct SyntheticSpec {
  double base_load_kw = 0.25;
  std::vector<PulseSpec> appliances;
  double noise_sigma_kw = 0.01;
  std::uint64_t seed = 0;
  std::int64_t start_timestamp = 1368921600;  // 2013-05-19 00:00, local-naive

  /// Throws ValidationError for negative powers, zero durations or pulses that cannot fit.
  void validate() const;
};

/// Base load + non-overlapping rectangular pulses per appliance + clamped Gaussian noise
/// on the aggregate. Deterministic under spec.seed.
Household generate_synthetic(const SyntheticSpec& spec, int days);

}  // namespace loadmask::data
