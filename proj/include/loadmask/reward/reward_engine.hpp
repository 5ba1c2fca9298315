#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <string_view>
#include <vector>

#include "loadmask/env/household.hpp"

// Composite reward for the load-shaping agent:
//
//   total = lambda * privacy_norm + (1 - lambda) * cost_norm + system_norm + battery_raw
//
// The privacy term is driven by a sliding window over recent demand whose
// mean + k*std threshold flags load signatures.
namespace loadmask::reward {

struct RewardConfig {
  double lambda = 1.0;
  double noise_threshold = 0.5;  // kW, the floor under the signature threshold
  double sigma_multiplier = 3.0;
  double battery_bonus_scale = 10.0;
  std::size_t window_length = 5;

  void validate() const;
};

/// Fixed-length FIFO of recent demand samples.
class SlidingWindow {
 public:
  SlidingWindow(std::size_t length, double fill);
  explicit SlidingWindow(std::vector<double> values);

  [[nodiscard]] std::size_t length() const { return values_.size(); }
  [[nodiscard]] double mean() const;
  [[nodiscard]] double population_std() const;
  [[nodiscard]] double max() const;
  [[nodiscard]] std::vector<double> values() const { return {values_.begin(), values_.end()}; }

  /// Drops the oldest entry and appends `value`.
  void push(double value);

 private:
  std::deque<double> values_;
};

/// mean + sigma_multiplier * population std.
double threshold(const SlidingWindow& window, double sigma_multiplier);

/// Appends the pre-update window mean if demand exceeds tau, otherwise demand itself.
/// Returns the appended value.
double update_window(SlidingWindow& window, double demand, double tau);

enum class PrivacyCase : int {
  kHidden = 1,      // signature in demand, not visible on the meter
  kLeaked = 2,      // signature in demand and on the meter
  kArtificial = 3,  // no signature in demand, one created on the meter
  kIdle = 4,        // neither
};

std::string_view to_string(PrivacyCase c);

struct PrivacyScore {
  double value;
  PrivacyCase case_id;
  double delta_t;  // max(noise_threshold, tau)
};

PrivacyScore privacy_reward(double demand, double masked, double tau, double noise_threshold);

/// -action * dt * eta * price.
double cost_reward(double action, double dt_hours, double eta, double price);

/// Terminal-only bonus proportional to the battery level the day ends with.
double battery_reward(double battery_after_action, int minute, int horizon, const env::BatteryConfig& cfg,
                      double bonus_scale);

/// Non-positive penalty equal to how far `requested` lies outside [a_min, a_max].
double system_penalty(double requested, double a_min, double a_max);

/// Running min/max scaler: every raw value widens the range before it is mapped to [0,1].
class RunningNormalizer {
 public:
  /// Widens the observed range with `raw` and returns its normalized value.
  double observe_and_normalize(double raw);
  /// Maps with the current range; 0.5 while the range is degenerate.
  [[nodiscard]] double normalize(double raw) const;

  [[nodiscard]] bool empty() const { return count_ == 0; }
  [[nodiscard]] double min() const { return min_; }
  [[nodiscard]] double max() const { return max_; }
  [[nodiscard]] std::size_t count() const { return count_; }

 private:
  double min_ = 0.0;
  double max_ = 0.0;
  std::size_t count_ = 0;
};

struct RewardBreakdown {
  double privacy_raw = 0.0;
  double cost_raw = 0.0;
  double system_raw = 0.0;
  double battery_raw = 0.0;
  double privacy_norm = 0.0;
  double cost_norm = 0.0;
  double system_norm = 0.0;
  double total = 0.0;
  double tau = 0.0;
  double delta_t = 0.0;
  PrivacyCase case_id = PrivacyCase::kIdle;

  /// The same weighting applied to unnormalized terms; logged for diagnostics.
  [[nodiscard]] double raw_total(double lambda) const {
    return lambda * privacy_raw + (1.0 - lambda) * cost_raw + system_raw + battery_raw;
  }
};

/// Everything one environment step contributes to the reward.
struct StepContext {
  double demand;
  double masked;
  double requested_action;
  double applied_action;
  double a_min;
  double a_max;
  double price;
  double battery_after;
  int minute;
  int horizon;
};

/// Holds the per-episode window and the per-run normalizers.
class RewardEngine {
 public:
  RewardEngine(RewardConfig config, env::BatteryConfig battery);

  /// Resets the window, filling every slot with the first demand sample of the episode.
  /// Normalizer state is kept across episodes.
  void begin_episode(double first_demand);

  /// Current signature threshold.
  [[nodiscard]] double tau() const;

  /// Computes every term for `ctx` against threshold `tau`, updating the normalizers.
  RewardBreakdown compose(const StepContext& ctx, double tau);

  /// compose() with the current threshold, then advances the window with ctx.demand.
  RewardBreakdown score(const StepContext& ctx);

  [[nodiscard]] const RewardConfig& config() const { return config_; }
  [[nodiscard]] const SlidingWindow& window() const { return window_; }
  [[nodiscard]] const RunningNormalizer& privacy_normalizer() const { return privacy_; }
  [[nodiscard]] const RunningNormalizer& cost_normalizer() const { return cost_; }
  [[nodiscard]] const RunningNormalizer& system_normalizer() const { return system_; }

 private:
  RewardConfig config_;
  env::BatteryConfig battery_;
  SlidingWindow window_;
  RunningNormalizer privacy_;
  RunningNormalizer cost_;
  RunningNormalizer system_;
};

}  // namespace loadmask::reward
