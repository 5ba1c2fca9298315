#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "loadmask/core/random.hpp"
#include "loadmask/dqn/replay_buffer.hpp"
#include "loadmask/nn/adam.hpp"
#include "loadmask/nn/mlp.hpp"

namespace loadmask::dqn {

struct TrainConfig {
  double learning_rate = 1e-4;
  double gamma = 0.99;
  std::size_t target_sync_every = 10'000;
  std::size_t episodes = 1500;
  std::size_t steps_per_episode = 1440;
  double eps_initial = 1.0;
  double eps_final = 0.05;
  double eps_decay_fraction = 0.1;  // share of total steps over which epsilon decays linearly
  std::size_t batch_size = 32;
  std::size_t learning_starts = 1000;  // stored transitions before the first gradient step
  std::size_t buffer_capacity = 1'000'000;
  std::vector<std::size_t> hidden = {64, 64};
  std::uint64_t seed = 0;

  void validate() const;
  [[nodiscard]] std::size_t total_steps() const { return episodes * steps_per_episode; }
};

/// An episodic environment with a discrete action set, as seen by the learner.
class Task {
 public:
  struct Outcome {
    std::vector<double> next_observation;
    double reward = 0.0;
    double raw_reward = 0.0;  // unnormalized counterpart, logged only
    bool done = false;
  };

  virtual ~Task() = default;
  [[nodiscard]] virtual std::size_t observation_dim() const = 0;
  [[nodiscard]] virtual std::size_t action_count() const = 0;
  virtual std::vector<double> reset() = 0;
  virtual Outcome step(std::size_t action) = 0;
};

/// Index of the largest value; ties go to the lowest index.
std::size_t greedy_index(std::span<const double> q_values);

/// With probability epsilon a uniform index, otherwise greedy_index(q_values).
std::size_t select_action(std::span<const double> q_values, double epsilon, Rng& rng);

/// Linear decay from eps_initial to eps_final over the first eps_decay_fraction of all steps.
double epsilon_at(std::size_t global_step, const TrainConfig& cfg);

/// r for terminal transitions, r + gamma * max(next_q_target) otherwise.
double td_target(double reward, bool done, std::span<const double> next_q_target, double gamma);

/// Online network, target network and optimizer for the squared-TD-error objective.
class DqnLearner {
 public:
  DqnLearner(std::size_t obs_dim, std::size_t action_count, const std::vector<std::size_t>& hidden,
             double learning_rate, double gamma, nn::Backend backend = nn::Backend::kParallel);

  void init_weights(Rng& rng);

  /// Mean over the batch of (td_target - Q(s, a))^2 and its gradient w.r.t. the online
  /// parameters. Neither network is modified.
  double loss_and_gradient(const Batch& batch, std::span<double> grad);
  double loss(const Batch& batch);

  /// One optimizer step on the batch; returns the pre-update loss. Throws NumericalError
  /// if the loss is not finite.
  double learn_step(const Batch& batch);

  void sync_target();

  [[nodiscard]] std::vector<double> q_values(std::span<const double> observation) const;
  [[nodiscard]] nn::Mlp& online() { return online_; }
  [[nodiscard]] const nn::Mlp& online() const { return online_; }
  [[nodiscard]] const nn::Mlp& target() const { return target_; }
  [[nodiscard]] double gamma() const { return gamma_; }

 private:
  void compute_targets(const Batch& batch);

  nn::Mlp online_;
  nn::Mlp target_;
  nn::Adam adam_;
  double learning_rate_;
  double gamma_;
  nn::MlpCache cache_;
  nn::MlpCache target_cache_;
  std::vector<double> targets_;
  std::vector<double> d_out_;
  std::vector<double> grad_;
};

struct EpisodeLog {
  std::size_t episode = 0;
  double cumulative_raw_reward = 0.0;
  double cumulative_total_reward = 0.0;
  double epsilon = 0.0;
  double loss_mean = 0.0;  // 0 when no gradient step ran in the episode
};

struct TrainResult {
  std::vector<double> params;
  std::vector<std::size_t> layer_sizes;
  std::vector<EpisodeLog> log;
  std::vector<double> step_losses;  // one entry per gradient step
  std::size_t target_syncs = 0;     // syncs after the initial copy
  std::size_t env_steps = 0;
};

/// Optional per-episode hook, e.g. for progress output.
using EpisodeCallback = std::function<void(const EpisodeLog&)>;

/// Deep Q-learning with experience replay and a periodically synced target network.
TrainResult train(Task& task, const TrainConfig& cfg, const EpisodeCallback& on_episode = {},
                  nn::Backend backend = nn::Backend::kParallel);

}  // namespace loadmask::dqn
