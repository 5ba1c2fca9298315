#include "loadmask/data/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "loadmask/core/error.hpp"
#include "loadmask/core/random.hpp"

namespace loadmask::data {
namespace {

constexpr int kMinutes = 1440;

}  // namespace

void SyntheticSpec::validate() const {
  if (!(base_load_kw >= 0.0) || !std::isfinite(base_load_kw)) throw ValidationError("synthetic: base_load_kw must be >= 0");
  if (!(noise_sigma_kw >= 0.0) || !std::isfinite(noise_sigma_kw))
    throw ValidationError("synthetic: noise_sigma_kw must be >= 0");
  for (const auto& a : appliances) {
    const std::string where = "synthetic appliance '" + a.name + "': ";
    if (a.name.empty()) throw ValidationError("synthetic: appliance without a name");
    if (a.name == "aggregate") throw ValidationError(where + "name is reserved");
    if (!(a.power_kw >= 0.0) || !std::isfinite(a.power_kw)) throw ValidationError(where + "power must be >= 0");
    if (a.duration_minutes < 1) throw ValidationError(where + "duration must be >= 1 minute");
    if (a.per_day < 0) throw ValidationError(where + "per_day must be >= 0");
    if (a.earliest_minute < 0 || a.latest_minute > kMinutes || a.earliest_minute >= a.latest_minute)
      throw ValidationError(where + "allowed range must satisfy 0 <= earliest < latest <= 1440");
    const int room = a.latest_minute - a.earliest_minute;
    if (a.duration_minutes > room) throw ValidationError(where + "pulse longer than its allowed range");
    if (static_cast<long>(a.per_day) * a.duration_minutes > room)
      throw ValidationError(where + "daily pulses cannot fit without overlapping");
  }
  for (std::size_t i = 0; i < appliances.size(); ++i)
    for (std::size_t j = i + 1; j < appliances.size(); ++j)
      if (appliances[i].name == appliances[j].name)
        throw ValidationError("synthetic: duplicate appliance '" + appliances[i].name + "'");
}

Household generate_synthetic(const SyntheticSpec& spec, int days) {
  spec.validate();
  if (days < 1) throw ValidationError("synthetic: days must be >= 1");
  Rng rng = make_stream(spec.seed, streams::kSynth);
  const auto n = static_cast<std::size_t>(days) * kMinutes;

  Household hh;
  hh.aggregate.name = "aggregate";
  hh.aggregate.timestamps.resize(n);
  for (std::size_t k = 0; k < n; ++k) hh.aggregate.timestamps[k] = spec.start_timestamp + static_cast<std::int64_t>(k) * 60;
  std::vector<double> total(n, spec.base_load_kw);

  for (const auto& a : spec.appliances) {
    ChannelSeries ch{a.name, hh.aggregate.timestamps, std::vector<double>(n, 0.0)};
    std::uniform_int_distribution<int> start_dist(a.earliest_minute, a.latest_minute - a.duration_minutes);
    for (int d = 0; d < days; ++d) {
      std::vector<bool> busy(kMinutes, false);
      int placed = 0;
      // Rejection sampling; validate() guarantees a packing exists, the attempt cap
      // falls back to a left-to-right sweep for very dense specs.
      for (int attempt = 0; placed < a.per_day && attempt < 1000 * (a.per_day + 1); ++attempt) {
        const int s = start_dist(rng);
        // Keep one idle minute between pulses so consecutive pulses stay distinct events.
        const int lo = std::max(a.earliest_minute, s - 1);
        const int hi = std::min(a.latest_minute, s + a.duration_minutes + 1);
        if (std::any_of(busy.begin() + lo, busy.begin() + hi, [](bool b) { return b; })) continue;
        std::fill(busy.begin() + s, busy.begin() + s + a.duration_minutes, true);
        ++placed;
      }
      for (int s = a.earliest_minute; placed < a.per_day && s + a.duration_minutes <= a.latest_minute; ++s) {
        if (std::any_of(busy.begin() + s, busy.begin() + s + a.duration_minutes, [](bool b) { return b; })) continue;
        std::fill(busy.begin() + s, busy.begin() + s + a.duration_minutes, true);
        ++placed;
      }
      for (int m = 0; m < kMinutes; ++m)
        if (busy[static_cast<std::size_t>(m)]) ch.power_kw[static_cast<std::size_t>(d) * kMinutes + m] = a.power_kw;
    }
    for (std::size_t k = 0; k < n; ++k) total[k] += ch.power_kw[k];
    hh.appliances.emplace(a.name, std::move(ch));
  }

  std::normal_distribution<double> noise(0.0, 1.0);
  hh.aggregate.power_kw.resize(n);
  for (std::size_t k = 0; k < n; ++k)
    hh.aggregate.power_kw[k] = std::max(0.0, total[k] + spec.noise_sigma_kw * noise(rng));
  return hh;
}

}  // namespace loadmask::data
