#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "loadmask/dqn/agent.hpp"
#include "loadmask/env/household.hpp"

namespace loadmask::dqn {

/// Everything needed to rebuild the greedy policy of a trained agent.
struct PolicyCheckpoint {
  static constexpr int kFormatVersion = 1;

  std::vector<double> levels;  // kW
  double e_max = 5.0;
  double demand_scale = 1.0;
  double b_max = 1.5;
  std::string coupling = "energy";
  std::vector<std::size_t> layer_sizes;
  std::vector<double> params;
  TrainConfig train;
  double lambda = 1.0;
  std::uint64_t seed = 0;
};

void save_policy(const std::filesystem::path& path, const PolicyCheckpoint& ckpt);

/// Throws ValidationError on an unreadable, foreign or wrong-version file.
PolicyCheckpoint load_policy(const std::filesystem::path& path);

/// Deterministic argmax policy over a frozen Q-network. Read-only after construction.
class GreedyPolicy {
 public:
  explicit GreedyPolicy(const PolicyCheckpoint& ckpt);

  [[nodiscard]] std::size_t choose_index(const env::EnvState& state) const;
  /// The chosen action level in kW.
  double operator()(const env::EnvState& state) const;

  [[nodiscard]] const env::ActionSpace& actions() const { return actions_; }

 private:
  env::ActionSpace actions_;
  nn::Mlp network_;
  double demand_scale_;
  double b_max_;
};

GreedyPolicy extract_policy(const PolicyCheckpoint& ckpt);

}  // namespace loadmask::dqn
