#include "loadmask/env/episode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "loadmask/core/error.hpp"

namespace loadmask::env {

EpisodeRunner::EpisodeRunner(std::vector<double> demand, ActionSpace actions, BatteryConfig battery,
                             TariffSchedule tariff, reward::RewardEngine& engine)
    : demand_(std::move(demand)),
      actions_(std::move(actions)),
      battery_(battery),
      tariff_(tariff),
      engine_(engine) {
  battery_.validate();
  tariff_.validate();
  if (demand_.empty()) throw ValidationError("episode: empty demand series");
  if (demand_.size() > static_cast<std::size_t>(kMinutesPerDay))
    throw ValidationError("episode: demand series longer than one day");
  for (double d : demand_)
    if (!(d >= 0.0) || !std::isfinite(d)) throw ValidationError("episode: demand must be finite and >= 0");
}

const EnvState& EpisodeRunner::reset() {
  state_ = EnvState{demand_.front(), battery_.b_initial, 1};
  engine_.begin_episode(demand_.front());
  finished_ = false;
  return state_;
}

TraceRow EpisodeRunner::advance(double requested_action) {
  if (finished_) throw std::logic_error("EpisodeRunner::advance called on a finished episode");
  const int t = state_.minute;
  const int T = horizon();
  const double next_demand = t < T ? demand_[static_cast<std::size_t>(t)] : demand_.back();
  const auto bounds = feasible_action_bounds(state_, battery_);
  const StepResult s = step(state_, requested_action, actions_, battery_, tariff_, next_demand, T);

  TraceRow row;
  row.minute = t;
  row.demand = state_.demand;
  row.requested_action = s.requested_action;
  row.applied_action = s.applied_action;
  row.delta_b = s.delta_b;
  row.masked = s.masked_load;
  row.battery = state_.battery;
  row.battery_next = s.next_state.battery;
  row.price = s.price;
  row.done = s.done;
  row.reward = engine_.score(reward::StepContext{
      .demand = state_.demand,
      .masked = s.masked_load,
      .requested_action = s.requested_action,
      .applied_action = s.applied_action,
      .a_min = bounds.a_min,
      .a_max = bounds.a_max,
      .price = s.price,
      .battery_after = s.next_state.battery,
      .minute = t,
      .horizon = T,
  });
  state_ = s.next_state;
  finished_ = s.done;
  return row;
}

EpisodeTrace run_episode(const Policy& policy, std::span<const double> demand, const ActionSpace& actions,
                         const BatteryConfig& battery, const TariffSchedule& tariff, reward::RewardEngine& engine) {
  EpisodeRunner runner({demand.begin(), demand.end()}, actions, battery, tariff, engine);
  EpisodeTrace trace;
  trace.reserve(demand.size());
  runner.reset();
  while (!runner.finished()) trace.push_back(runner.advance(policy(runner.state())));
  return trace;
}

}  // namespace loadmask::env
