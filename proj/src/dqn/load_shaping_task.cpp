#include "loadmask/dqn/load_shaping_task.hpp"

#include <algorithm>

#include "loadmask/core/error.hpp"

namespace loadmask::dqn {

std::vector<double> observe(const env::EnvState& state, double demand_scale, double b_max) {
  return {state.demand / demand_scale, state.battery / b_max};
}

double demand_scale_for(std::span<const double> demand) {
  const double m = demand.empty() ? 0.0 : *std::ranges::max_element(demand);
  return m > 0.0 ? m : 1.0;
}

LoadShapingTask::LoadShapingTask(std::vector<double> demand, env::ActionSpace actions, env::BatteryConfig battery,
                                 env::TariffSchedule tariff, reward::RewardConfig reward, double demand_scale)
    : engine_(std::make_unique<reward::RewardEngine>(reward, battery)),
      demand_scale_(demand_scale),
      lambda_(reward.lambda) {
  if (!(demand_scale > 0.0)) throw ValidationError("load shaping task: demand_scale must be > 0");
  runner_ = std::make_unique<env::EpisodeRunner>(std::move(demand), std::move(actions), battery, tariff, *engine_);
}

std::vector<double> LoadShapingTask::reset() {
  return observe(runner_->reset(), demand_scale_, runner_->battery().b_max);
}

Task::Outcome LoadShapingTask::step(std::size_t action) {
  last_ = runner_->advance(runner_->actions().level(action));
  return Outcome{observe(runner_->state(), demand_scale_, runner_->battery().b_max), last_.reward.total,
                 last_.reward.raw_total(lambda_), last_.done};
}

}  // namespace loadmask::dqn
