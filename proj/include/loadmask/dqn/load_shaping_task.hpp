#pragma once

#include <memory>
#include <vector>

#include "loadmask/dqn/agent.hpp"
#include "loadmask/env/episode.hpp"

namespace loadmask::dqn {

/// Network input for a household state: (demand / demand_scale, battery / b_max).
std::vector<double> observe(const env::EnvState& state, double demand_scale, double b_max);

/// The household day exposed to the learner. Reward is the composite total of the engine.
class LoadShapingTask final : public Task {
 public:
  LoadShapingTask(std::vector<double> demand, env::ActionSpace actions, env::BatteryConfig battery,
                  env::TariffSchedule tariff, reward::RewardConfig reward, double demand_scale);

  [[nodiscard]] std::size_t observation_dim() const override { return 2; }
  [[nodiscard]] std::size_t action_count() const override { return runner_->actions().size(); }
  std::vector<double> reset() override;
  Outcome step(std::size_t action) override;

  [[nodiscard]] const env::TraceRow& last_row() const { return last_; }
  [[nodiscard]] double demand_scale() const { return demand_scale_; }

 private:
  std::unique_ptr<reward::RewardEngine> engine_;
  std::unique_ptr<env::EpisodeRunner> runner_;
  double demand_scale_;
  double lambda_;
  env::TraceRow last_;
};

/// Largest demand in the series, or 1 for an all-zero series.
double demand_scale_for(std::span<const double> demand);

}  // namespace loadmask::dqn
