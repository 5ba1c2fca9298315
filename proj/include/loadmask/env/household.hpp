#pragma once

#include <cstddef>
#include <utility>
#include <vector>

// Battery-backed household simulated one sample at a time.
//
// Units: demand and masked load in kW, battery content in kWh, actions (battery
// charge/discharge rates) in kW, positive = charging.
namespace loadmask::env {

inline constexpr int kMinutesPerDay = 1440;

/// How a battery energy exchange shows up on the meter.
///
/// kEnergyPerStep: masked = demand + delta_b, adding the per-step energy (kWh) directly
/// to the demand reading. Meter must stay non-negative, so delta_b >= -demand.
///
/// kPower: masked = demand + delta_b / dt_hours, i.e. the battery's average power over the
/// step. Meter non-negativity then bounds the action by -demand / eta.
enum class MeterCoupling { kEnergyPerStep, kPower };

struct BatteryConfig {
  double b_min = 0.0;
  double b_max = 1.5;
  double e_max = 5.0;
  double eta = 1.0;
  double b_initial = 1.5;
  double dt_hours = 1.0 / 60.0;
  MeterCoupling coupling = MeterCoupling::kEnergyPerStep;

  /// Throws ValidationError on any violated invariant.
  void validate() const;
};

/// Two-rate time-of-use tariff. Minutes in [peak_start_minute, peak_end_minute) after
/// midnight are billed at the peak price.
struct TariffSchedule {
  double peak_price = 0.304;
  double offpeak_price = 0.132;
  int peak_start_minute = 420;
  int peak_end_minute = 1440;

  void validate() const;
};

struct EnvState {
  double demand = 0.0;   // kW
  double battery = 0.0;  // kWh
  int minute = 1;        // 1-based sample index within the episode
};

/// Discrete battery rates the agent chooses from.
class ActionSpace {
 public:
  /// Validates: strictly increasing, symmetric about 0, contains 0, within [-e_max, e_max].
  ActionSpace(std::vector<double> levels, double e_max);

  /// `count` evenly spaced levels over [-e_max, e_max]. `count` must be odd and >= 3.
  static ActionSpace uniform(std::size_t count, double e_max);

  [[nodiscard]] const std::vector<double>& levels() const { return levels_; }
  [[nodiscard]] std::size_t size() const { return levels_.size(); }
  [[nodiscard]] double level(std::size_t index) const { return levels_.at(index); }
  [[nodiscard]] bool contains(double value) const;
  [[nodiscard]] std::size_t zero_index() const;

 private:
  std::vector<double> levels_;
};

struct ActionBounds {
  double a_min;
  double a_max;
};

struct StepResult {
  double masked_load;      // kW
  double delta_b;          // kWh
  EnvState next_state;
  double applied_action;   // kW
  double requested_action; // kW
  double price;            // GBP/kWh
  bool done;
};

/// Legal action interval for `state`. Always contains 0.
ActionBounds feasible_action_bounds(const EnvState& state, const BatteryConfig& cfg);

/// Price for 1-based `minute`, which covers wall-clock [minute-1, minute) after midnight.
/// Throws ValidationError outside [1, 1440].
double price_at(int minute, const TariffSchedule& tariff);

/// Meter reading produced by demand plus a battery exchange of `delta_b` kWh.
double masked_load(double demand, double delta_b, const BatteryConfig& cfg);

/// One transition. The requested action is clipped to the feasible bounds before it is
/// applied. Throws ValidationError if `requested_action` is non-finite or not in `actions`.
StepResult step(const EnvState& state, double requested_action, const ActionSpace& actions,
                const BatteryConfig& cfg, const TariffSchedule& tariff, double next_demand, int horizon);

}  // namespace loadmask::env
