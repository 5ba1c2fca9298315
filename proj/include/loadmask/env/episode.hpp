#pragma once

#include <functional>
#include <span>
#include <vector>

#include "loadmask/env/household.hpp"
#include "loadmask/reward/reward_engine.hpp"

namespace loadmask::env {

/// One simulated minute.
struct TraceRow {
  int minute = 0;
  double demand = 0.0;          // kW
  double requested_action = 0.0;
  double applied_action = 0.0;  // kW
  double delta_b = 0.0;         // kWh
  double masked = 0.0;          // kW
  double battery = 0.0;         // kWh before the action
  double battery_next = 0.0;    // kWh after the action
  double price = 0.0;           // GBP/kWh
  bool done = false;
  reward::RewardBreakdown reward;
};

using EpisodeTrace = std::vector<TraceRow>;

/// Maps a state to one of the action space's levels (kW).
using Policy = std::function<double(const EnvState&)>;

/// Steps one day of a demand series, scoring every transition with a reward engine.
class EpisodeRunner {
 public:
  EpisodeRunner(std::vector<double> demand, ActionSpace actions, BatteryConfig battery, TariffSchedule tariff,
                reward::RewardEngine& engine);

  /// Starts a new episode at minute 1 with b_initial and a freshly seeded window.
  const EnvState& reset();

  /// Applies `requested_action` (kW, must be an action level) and returns the recorded row.
  TraceRow advance(double requested_action);

  [[nodiscard]] const EnvState& state() const { return state_; }
  [[nodiscard]] bool finished() const { return finished_; }
  [[nodiscard]] int horizon() const { return static_cast<int>(demand_.size()); }
  [[nodiscard]] const ActionSpace& actions() const { return actions_; }
  [[nodiscard]] const BatteryConfig& battery() const { return battery_; }
  [[nodiscard]] std::span<const double> demand() const { return demand_; }
  [[nodiscard]] reward::RewardEngine& engine() { return engine_; }

 private:
  std::vector<double> demand_;
  ActionSpace actions_;
  BatteryConfig battery_;
  TariffSchedule tariff_;
  reward::RewardEngine& engine_;
  EnvState state_;
  bool finished_ = true;
};

/// Runs `policy` over the whole series. The trace has exactly demand.size() rows.
EpisodeTrace run_episode(const Policy& policy, std::span<const double> demand, const ActionSpace& actions,
                         const BatteryConfig& battery, const TariffSchedule& tariff, reward::RewardEngine& engine);

}  // namespace loadmask::env
