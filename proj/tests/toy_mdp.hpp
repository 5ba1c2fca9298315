#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "loadmask/dqn/agent.hpp"

namespace toy {

// Two states, two actions, deterministic. Action 0 stays, action 1 switches state.
//   r(s0, stay) = 0.5   r(s0, switch) = 0
//   r(s1, stay) = 1.0   r(s1, switch) = 0.2
// Episodes are truncated, never terminal, so values are the discounted infinite-horizon ones.
inline constexpr std::array<std::array<double, 2>, 2> kReward = {{{0.5, 0.0}, {1.0, 0.2}}};

inline int next_state(int s, std::size_t a) { return a == 0 ? s : 1 - s; }

class TwoStateTask final : public loadmask::dqn::Task {
 public:
  explicit TwoStateTask(double scale = 1.0) : scale_(scale) {}
  [[nodiscard]] std::size_t observation_dim() const override { return 2; }
  [[nodiscard]] std::size_t action_count() const override { return 2; }
  std::vector<double> reset() override {
    state_ = 0;
    return observe();
  }
  Outcome step(std::size_t action) override {
    const double r = kReward[state_][action];
    state_ = next_state(state_, action);
    return {observe(), r, r, false};
  }
  [[nodiscard]] std::vector<double> observe(int s) const {
    return {s == 0 ? scale_ : 0.0, s == 1 ? scale_ : 0.0};
  }

 private:
  [[nodiscard]] std::vector<double> observe() const { return observe(state_); }
  double scale_;
  int state_ = 0;
};

/// Optimal action per state by value iteration.
inline std::array<std::size_t, 2> value_iteration_policy(double gamma) {
  std::array<double, 2> v{0.0, 0.0};
  for (int it = 0; it < 10'000; ++it) {
    std::array<double, 2> nv{};
    for (int s = 0; s < 2; ++s)
      nv[s] = std::max(kReward[s][0] + gamma * v[next_state(s, 0)], kReward[s][1] + gamma * v[next_state(s, 1)]);
    const double diff = std::abs(nv[0] - v[0]) + std::abs(nv[1] - v[1]);
    v = nv;
    if (diff < 1e-13) break;
  }
  std::array<std::size_t, 2> pi{};
  for (int s = 0; s < 2; ++s) {
    const double q0 = kReward[s][0] + gamma * v[next_state(s, 0)];
    const double q1 = kReward[s][1] + gamma * v[next_state(s, 1)];
    pi[s] = q1 > q0 ? 1 : 0;
  }
  return pi;
}

inline loadmask::dqn::TrainConfig train_config(std::uint64_t seed = 1) {
  loadmask::dqn::TrainConfig c;
  c.learning_rate = 1e-3;
  c.gamma = 0.9;
  c.target_sync_every = 200;
  c.episodes = 60;
  c.steps_per_episode = 50;
  c.eps_decay_fraction = 0.5;
  c.eps_final = 0.05;
  c.batch_size = 32;
  c.learning_starts = 100;
  c.buffer_capacity = 10'000;
  c.hidden = {16};
  c.seed = seed;
  return c;
}

/// Greedy action per state of a trained network.
inline std::array<std::size_t, 2> greedy_policy(const loadmask::dqn::TrainResult& r, const TwoStateTask& task) {
  loadmask::nn::Mlp net(r.layer_sizes);
  net.set_params(r.params);
  std::array<std::size_t, 2> pi{};
  for (int s = 0; s < 2; ++s) pi[s] = loadmask::dqn::greedy_index(net.predict(task.observe(s), 1));
  return pi;
}

}  // namespace toy
