#include "loadmask/dqn/replay_buffer.hpp"

#include <algorithm>
#include <stdexcept>

namespace loadmask::dqn {

ReplayBuffer::ReplayBuffer(std::size_t capacity, std::size_t obs_dim) : capacity_(capacity), obs_dim_(obs_dim) {
  if (capacity == 0 || obs_dim == 0) throw std::invalid_argument("ReplayBuffer: capacity and obs_dim must be > 0");
}

void ReplayBuffer::push(std::span<const double> observation, std::size_t action, double reward,
                        std::span<const double> next_observation, bool done) {
  if (observation.size() != obs_dim_ || next_observation.size() != obs_dim_)
    throw std::invalid_argument("ReplayBuffer::push: observation size mismatch");
  if (size_ < capacity_) {
    // Grow lazily so a 10^6-slot buffer costs nothing until it is used.
    observations_.insert(observations_.end(), observation.begin(), observation.end());
    next_observations_.insert(next_observations_.end(), next_observation.begin(), next_observation.end());
    actions_.push_back(action);
    rewards_.push_back(reward);
    done_.push_back(done ? 1 : 0);
    ++size_;
    return;
  }
  const std::size_t s = head_;
  std::ranges::copy(observation, observations_.begin() + static_cast<std::ptrdiff_t>(s * obs_dim_));
  std::ranges::copy(next_observation, next_observations_.begin() + static_cast<std::ptrdiff_t>(s * obs_dim_));
  actions_[s] = action;
  rewards_[s] = reward;
  done_[s] = done ? 1 : 0;
  head_ = (head_ + 1) % capacity_;
}

Transition ReplayBuffer::at(std::size_t i) const {
  if (i >= size_) throw std::out_of_range("ReplayBuffer::at");
  const std::size_t s = slot(i);
  const auto o = observations_.begin() + static_cast<std::ptrdiff_t>(s * obs_dim_);
  const auto n = next_observations_.begin() + static_cast<std::ptrdiff_t>(s * obs_dim_);
  return Transition{{o, o + static_cast<std::ptrdiff_t>(obs_dim_)},
                    actions_[s],
                    rewards_[s],
                    {n, n + static_cast<std::ptrdiff_t>(obs_dim_)},
                    done_[s] != 0};
}

void ReplayBuffer::sample(std::size_t batch_size, Rng& rng, Batch& out) const {
  if (size_ == 0) throw std::logic_error("ReplayBuffer::sample on an empty buffer");
  std::uniform_int_distribution<std::size_t> pick(0, size_ - 1);
  out.size = batch_size;
  out.obs_dim = obs_dim_;
  out.observations.resize(batch_size * obs_dim_);
  out.next_observations.resize(batch_size * obs_dim_);
  out.actions.resize(batch_size);
  out.rewards.resize(batch_size);
  out.done.resize(batch_size);
  for (std::size_t b = 0; b < batch_size; ++b) {
    const std::size_t s = pick(rng);  // physical slot; uniform over stored transitions either way
    std::copy_n(observations_.begin() + static_cast<std::ptrdiff_t>(s * obs_dim_), obs_dim_,
                out.observations.begin() + static_cast<std::ptrdiff_t>(b * obs_dim_));
    std::copy_n(next_observations_.begin() + static_cast<std::ptrdiff_t>(s * obs_dim_), obs_dim_,
                out.next_observations.begin() + static_cast<std::ptrdiff_t>(b * obs_dim_));
    out.actions[b] = actions_[s];
    out.rewards[b] = rewards_[s];
    out.done[b] = done_[s];
  }
}

}  // namespace loadmask::dqn
