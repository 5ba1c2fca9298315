#include "loadmask/dqn/agent.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "loadmask/core/error.hpp"

namespace loadmask::dqn {
namespace {

std::vector<std::size_t> layer_sizes(std::size_t in, const std::vector<std::size_t>& hidden, std::size_t out) {
  std::vector<std::size_t> sizes{in};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out);
  return sizes;
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ValidationError("train: learning_rate must be > 0");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ValidationError("train: gamma must lie in (0, 1]");
  if (target_sync_every == 0) throw ValidationError("train: target_sync_every must be >= 1");
  if (episodes == 0 || steps_per_episode == 0) throw ValidationError("train: episodes and steps must be >= 1");
  if (!(eps_final >= 0.0 && eps_final <= eps_initial && eps_initial <= 1.0))
    throw ValidationError("train: require 0 <= eps_final <= eps_initial <= 1");
  if (!(eps_decay_fraction >= 0.0 && eps_decay_fraction <= 1.0))
    throw ValidationError("train: eps_decay_fraction must lie in [0, 1]");
  if (batch_size == 0) throw ValidationError("train: batch_size must be >= 1");
  if (buffer_capacity == 0) throw ValidationError("train: buffer_capacity must be >= 1");
  if (std::ranges::any_of(hidden, [](std::size_t h) { return h == 0; }))
    throw ValidationError("train: hidden layer widths must be >= 1");
}

std::size_t greedy_index(std::span<const double> q_values) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < q_values.size(); ++k)
    if (q_values[k] > q_values[best]) best = k;
  return best;
}

std::size_t select_action(std::span<const double> q_values, double epsilon, Rng& rng) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (coin(rng) < epsilon) {
    std::uniform_int_distribution<std::size_t> pick(0, q_values.size() - 1);
    return pick(rng);
  }
  return greedy_index(q_values);
}

double epsilon_at(std::size_t global_step, const TrainConfig& cfg) {
  const double horizon = cfg.eps_decay_fraction * static_cast<double>(cfg.total_steps());
  if (!(horizon > 0.0)) return cfg.eps_final;
  const double frac = std::min(static_cast<double>(global_step) / horizon, 1.0);
  return cfg.eps_initial + frac * (cfg.eps_final - cfg.eps_initial);
}

double td_target(double reward, bool done, std::span<const double> next_q_target, double gamma) {
  if (done) return reward;
  return reward + gamma * *std::ranges::max_element(next_q_target);
}

DqnLearner::DqnLearner(std::size_t obs_dim, std::size_t action_count, const std::vector<std::size_t>& hidden,
                       double learning_rate, double gamma, nn::Backend backend)
    : online_(layer_sizes(obs_dim, hidden, action_count), backend),
      target_(layer_sizes(obs_dim, hidden, action_count), backend),
      adam_(online_.param_count()),
      learning_rate_(learning_rate),
      gamma_(gamma),
      grad_(online_.param_count()) {}

void DqnLearner::init_weights(Rng& rng) {
  online_.init_fan_in_uniform(rng);
  sync_target();
}

void DqnLearner::sync_target() { target_.set_params(online_.params()); }

std::vector<double> DqnLearner::q_values(std::span<const double> observation) const {
  return online_.predict(observation, 1);
}

void DqnLearner::compute_targets(const Batch& batch) {
  target_.forward(batch.next_observations, batch.size, target_cache_);
  const auto next_q = target_cache_.output();
  const std::size_t n_actions = target_.output_dim();
  targets_.resize(batch.size);
  for (std::size_t b = 0; b < batch.size; ++b)
    targets_[b] = td_target(batch.rewards[b], batch.done[b] != 0, next_q.subspan(b * n_actions, n_actions), gamma_);
}

double DqnLearner::loss(const Batch& batch) {
  compute_targets(batch);
  online_.forward(batch.observations, batch.size, cache_);
  const auto q = cache_.output();
  const std::size_t n_actions = online_.output_dim();
  double sum = 0.0;
  for (std::size_t b = 0; b < batch.size; ++b) {
    const double err = q[b * n_actions + batch.actions[b]] - targets_[b];
    sum += err * err;
  }
  return sum / static_cast<double>(batch.size);
}

double DqnLearner::loss_and_gradient(const Batch& batch, std::span<double> grad) {
  const double value = loss(batch);
  const auto q = cache_.output();
  const std::size_t n_actions = online_.output_dim();
  d_out_.assign(batch.size * n_actions, 0.0);
  const double scale = 2.0 / static_cast<double>(batch.size);
  for (std::size_t b = 0; b < batch.size; ++b) {
    const std::size_t k = b * n_actions + batch.actions[b];
    d_out_[k] = scale * (q[k] - targets_[b]);
  }
  online_.backward(cache_, d_out_, grad);
  return value;
}

double DqnLearner::learn_step(const Batch& batch) {
  const double value = loss_and_gradient(batch, grad_);
  if (!std::isfinite(value)) {
    std::ostringstream msg;
    msg << "DQN loss is not finite (" << value << ") after " << adam_.steps_taken() << " optimizer steps";
    throw NumericalError(msg.str());
  }
  adam_.step(online_.params(), grad_, learning_rate_);
  return value;
}

TrainResult train(Task& task, const TrainConfig& cfg, const EpisodeCallback& on_episode, nn::Backend backend) {
  cfg.validate();
  const std::size_t obs_dim = task.observation_dim();
  DqnLearner learner(obs_dim, task.action_count(), cfg.hidden, cfg.learning_rate, cfg.gamma, backend);
  Rng init_rng = make_stream(cfg.seed, streams::kAgentInit);
  Rng explore_rng = make_stream(cfg.seed, streams::kAgentExplore);
  Rng replay_rng = make_stream(cfg.seed, streams::kAgentReplay);
  learner.init_weights(init_rng);

  ReplayBuffer buffer(cfg.buffer_capacity, obs_dim);
  Batch batch;
  TrainResult result;
  std::size_t global_step = 0;

  for (std::size_t episode = 0; episode < cfg.episodes; ++episode) {
    std::vector<double> obs = task.reset();
    EpisodeLog log{.episode = episode};
    double loss_sum = 0.0;
    std::size_t loss_count = 0;
    double epsilon = epsilon_at(global_step, cfg);

    for (std::size_t t = 0; t < cfg.steps_per_episode; ++t) {
      epsilon = epsilon_at(global_step, cfg);
      const std::size_t action = select_action(learner.q_values(obs), epsilon, explore_rng);
      Task::Outcome out = task.step(action);
      log.cumulative_total_reward += out.reward;
      log.cumulative_raw_reward += out.raw_reward;
      buffer.push(obs, action, out.reward, out.next_observation, out.done);

      if (buffer.size() >= std::max<std::size_t>(cfg.learning_starts, 1)) {
        buffer.sample(cfg.batch_size, replay_rng, batch);
        const double l = learner.learn_step(batch);
        result.step_losses.push_back(l);
        loss_sum += l;
        ++loss_count;
      }
      ++global_step;
      if (global_step % cfg.target_sync_every == 0) {
        learner.sync_target();
        ++result.target_syncs;
      }
      obs = std::move(out.next_observation);
      if (out.done) break;
    }
    log.epsilon = epsilon;
    log.loss_mean = loss_count > 0 ? loss_sum / static_cast<double>(loss_count) : 0.0;
    result.log.push_back(log);
    if (on_episode) on_episode(log);
  }

  result.env_steps = global_step;
  result.layer_sizes = learner.online().layer_sizes();
  const auto p = learner.online().params();
  result.params.assign(p.begin(), p.end());
  return result;
}

}  // namespace loadmask::dqn
