#include "loadmask/env/household.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "loadmask/core/error.hpp"

namespace loadmask::env {
namespace {

constexpr double kLevelTolerance = 1e-9;

}  // namespace

void BatteryConfig::validate() const {
  auto fail = [](const std::string& what) { throw ValidationError("battery: " + what); };
  if (!(std::isfinite(b_min) && std::isfinite(b_max) && std::isfinite(e_max) && std::isfinite(eta) &&
        std::isfinite(b_initial) && std::isfinite(dt_hours)))
    fail("all parameters must be finite");
  if (!(b_min >= 0.0 && b_min < b_max)) fail("require 0 <= b_min < b_max");
  if (!(e_max > 0.0)) fail("require e_max > 0");
  if (!(eta > 0.0 && eta <= 1.0)) fail("require 0 < eta <= 1");
  if (!(b_initial >= b_min && b_initial <= b_max)) fail("require b_min <= b_initial <= b_max");
  if (!(dt_hours > 0.0)) fail("require dt_hours > 0");
}

void TariffSchedule::validate() const {
  if (!(std::isfinite(peak_price) && std::isfinite(offpeak_price)))
    throw ValidationError("tariff: prices must be finite");
  if (!(offpeak_price >= 0.0 && offpeak_price <= peak_price))
    throw ValidationError("tariff: require 0 <= offpeak_price <= peak_price");
  if (!(peak_start_minute >= 0 && peak_start_minute <= peak_end_minute && peak_end_minute <= kMinutesPerDay))
    throw ValidationError("tariff: require 0 <= peak_start_minute <= peak_end_minute <= 1440");
}

ActionSpace::ActionSpace(std::vector<double> levels, double e_max) : levels_(std::move(levels)) {
  if (levels_.empty()) throw ValidationError("action space: no levels");
  for (std::size_t k = 0; k < levels_.size(); ++k) {
    if (!std::isfinite(levels_[k])) throw ValidationError("action space: non-finite level");
    if (std::abs(levels_[k]) > e_max + kLevelTolerance)
      throw ValidationError("action space: level outside [-e_max, e_max]");
    if (k > 0 && !(levels_[k] > levels_[k - 1])) throw ValidationError("action space: levels not strictly increasing");
    if (std::abs(levels_[k] + levels_[levels_.size() - 1 - k]) > kLevelTolerance)
      throw ValidationError("action space: levels not symmetric about 0");
  }
  if (!contains(0.0)) throw ValidationError("action space: 0 is not a level");
}

ActionSpace ActionSpace::uniform(std::size_t count, double e_max) {
  if (count < 3 || count % 2 == 0) throw ValidationError("action space: count must be odd and >= 3");
  std::vector<double> levels(count);
  const auto half = static_cast<double>(count / 2);
  for (std::size_t k = 0; k < count; ++k) {
    const double frac = (static_cast<double>(k) - half) / half;  // exact at both ends and at 0
    levels[k] = frac * e_max;
  }
  return ActionSpace(std::move(levels), e_max);
}

bool ActionSpace::contains(double value) const {
  return std::ranges::any_of(levels_, [&](double l) { return std::abs(l - value) <= kLevelTolerance; });
}

std::size_t ActionSpace::zero_index() const {
  return static_cast<std::size_t>(
      std::ranges::find_if(levels_, [](double l) { return std::abs(l) <= kLevelTolerance; }) - levels_.begin());
}

ActionBounds feasible_action_bounds(const EnvState& state, const BatteryConfig& cfg) {
  const double per_action = cfg.dt_hours * cfg.eta;  // kWh moved per kW of action
  // Largest energy the battery may release this step without driving the meter negative.
  const double meter_floor = cfg.coupling == MeterCoupling::kPower ? -state.demand * cfg.dt_hours : -state.demand;
  const double lo = std::max(std::max(meter_floor, cfg.b_min - state.battery) / per_action, -cfg.e_max);
  const double hi = std::min((cfg.b_max - state.battery) / per_action, cfg.e_max);
  // Rounding in the divisions above must never exclude the no-op.
  return {std::min(lo, 0.0), std::max(hi, 0.0)};
}

double price_at(int minute, const TariffSchedule& tariff) {
  if (minute < 1 || minute > kMinutesPerDay)
    throw ValidationError("price_at: minute " + std::to_string(minute) + " outside [1, 1440]");
  const int wall = minute - 1;
  return wall >= tariff.peak_start_minute && wall < tariff.peak_end_minute ? tariff.peak_price : tariff.offpeak_price;
}

double masked_load(double demand, double delta_b, const BatteryConfig& cfg) {
  const double m = cfg.coupling == MeterCoupling::kPower ? demand + delta_b / cfg.dt_hours : demand + delta_b;
  return std::max(m, 0.0);  // clears -1e-17 style residue at the discharge bound
}

StepResult step(const EnvState& state, double requested_action, const ActionSpace& actions,
                const BatteryConfig& cfg, const TariffSchedule& tariff, double next_demand, int horizon) {
  if (!std::isfinite(requested_action)) throw ValidationError("step: non-finite action");
  if (!actions.contains(requested_action))
    throw ValidationError("step: action " + std::to_string(requested_action) + " kW is not in the action space");
  if (!(next_demand >= 0.0) || !std::isfinite(next_demand)) throw ValidationError("step: invalid next demand");
  const auto [a_min, a_max] = feasible_action_bounds(state, cfg);
  const double applied = std::clamp(requested_action, a_min, a_max);
  const double delta_b = applied * cfg.dt_hours * cfg.eta;
  const double battery = std::clamp(state.battery + delta_b, cfg.b_min, cfg.b_max);
  StepResult r{};
  r.requested_action = requested_action;
  r.applied_action = applied;
  r.delta_b = battery - state.battery;
  r.masked_load = masked_load(state.demand, r.delta_b, cfg);
  r.price = price_at(((state.minute - 1) % kMinutesPerDay) + 1, tariff);
  r.done = state.minute >= horizon;
  r.next_state = EnvState{next_demand, battery, state.minute + 1};
  return r;
}

}  // namespace loadmask::env
