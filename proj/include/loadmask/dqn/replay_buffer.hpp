#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "loadmask/core/random.hpp"

namespace loadmask::dqn {

struct Transition {
  std::vector<double> observation;
  std::size_t action = 0;
  double reward = 0.0;
  std::vector<double> next_observation;
  bool done = false;
};

/// Struct-of-arrays minibatch, `size` rows of `obs_dim` features.
struct Batch {
  std::size_t size = 0;
  std::size_t obs_dim = 0;
  std::vector<double> observations;
  std::vector<std::size_t> actions;
  std::vector<double> rewards;
  std::vector<double> next_observations;
  std::vector<std::uint8_t> done;
};

/// Fixed-capacity ring of transitions; once full, each insert evicts the oldest.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, std::size_t obs_dim);

  void push(std::span<const double> observation, std::size_t action, double reward,
            std::span<const double> next_observation, bool done);

  [[nodiscard]] std::size_t size() const { return size_; }
  [[nodiscard]] std::size_t capacity() const { return capacity_; }
  [[nodiscard]] std::size_t obs_dim() const { return obs_dim_; }

  /// i-th stored transition counted from the oldest.
  [[nodiscard]] Transition at(std::size_t i) const;

  /// Uniform sampling with replacement.
  void sample(std::size_t batch_size, Rng& rng, Batch& out) const;

 private:
  [[nodiscard]] std::size_t slot(std::size_t i) const { return (head_ + i) % capacity_; }

  std::size_t capacity_;
  std::size_t obs_dim_;
  std::size_t head_ = 0;  // oldest element once full
  std::size_t size_ = 0;
  std::vector<double> observations_;
  std::vector<double> next_observations_;
  std::vector<std::size_t> actions_;
  std::vector<double> rewards_;
  std::vector<std::uint8_t> done_;
};

}  // namespace loadmask::dqn
