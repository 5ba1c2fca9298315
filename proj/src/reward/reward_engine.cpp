#include "loadmask/reward/reward_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "loadmask/core/error.hpp"

namespace loadmask::reward {

void RewardConfig::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ValidationError("reward: lambda must lie in [0, 1]");
  if (!(noise_threshold > 0.0) || !std::isfinite(noise_threshold))
    throw ValidationError("reward: noise_threshold must be > 0");
  if (!std::isfinite(sigma_multiplier) || sigma_multiplier < 0.0)
    throw ValidationError("reward: sigma_multiplier must be >= 0");
  if (!std::isfinite(battery_bonus_scale)) throw ValidationError("reward: battery_bonus_scale must be finite");
  if (window_length == 0) throw ValidationError("reward: window_length must be >= 1");
}

SlidingWindow::SlidingWindow(std::size_t length, double fill) : values_(length, fill) {
  if (length == 0) throw ValidationError("sliding window: length must be >= 1");
  if (!(fill >= 0.0) || !std::isfinite(fill)) throw ValidationError("sliding window: entries must be finite and >= 0");
}

SlidingWindow::SlidingWindow(std::vector<double> values) : values_(values.begin(), values.end()) {
  if (values_.empty()) throw ValidationError("sliding window: length must be >= 1");
  for (double v : values_)
    if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("sliding window: entries must be finite and >= 0");
}

double SlidingWindow::mean() const {
  return std::accumulate(values_.begin(), values_.end(), 0.0) / static_cast<double>(values_.size());
}

double SlidingWindow::population_std() const {
  const double mu = mean();
  double ss = 0.0;
  for (double v : values_) ss += (v - mu) * (v - mu);
  return std::sqrt(ss / static_cast<double>(values_.size()));
}

double SlidingWindow::max() const { return *std::ranges::max_element(values_); }

void SlidingWindow::push(double value) {
  values_.pop_front();
  values_.push_back(value);
}

double threshold(const SlidingWindow& window, double sigma_multiplier) {
  return window.mean() + sigma_multiplier * window.population_std();
}

double update_window(SlidingWindow& window, double demand, double tau) {
  const double appended = demand > tau ? window.mean() : demand;
  window.push(appended);
  return appended;
}

std::string_view to_string(PrivacyCase c) {
  switch (c) {
    case PrivacyCase::kHidden: return "hidden";
    case PrivacyCase::kLeaked: return "leaked";
    case PrivacyCase::kArtificial: return "artificial";
    case PrivacyCase::kIdle: return "idle";
  }
  return "?";
}

PrivacyScore privacy_reward(double demand, double masked, double tau, double noise_threshold) {
  const double delta_t = std::max(noise_threshold, tau);
  const bool signature = demand >= delta_t;
  const bool visible = masked >= delta_t;
  if (signature && !visible) return {100.0 + 0.05 * (demand - tau), PrivacyCase::kHidden, delta_t};
  if (signature) return {-50.0 - 0.05 * (masked - tau), PrivacyCase::kLeaked, delta_t};
  if (visible) return {20.0 + 0.05 * (masked - tau), PrivacyCase::kArtificial, delta_t};
  return {-20.0, PrivacyCase::kIdle, delta_t};
}

double cost_reward(double action, double dt_hours, double eta, double price) {
  return -action * dt_hours * eta * price;
}

double battery_reward(double battery_after_action, int minute, int horizon, const env::BatteryConfig& cfg,
                      double bonus_scale) {
  if (minute != horizon) return 0.0;
  return bonus_scale * battery_after_action / (cfg.b_max - cfg.b_min);
}

double system_penalty(double requested, double a_min, double a_max) {
  if (requested > a_max) return -(requested - a_max);
  if (requested < a_min) return -(a_min - requested);
  return 0.0;
}

double RunningNormalizer::observe_and_normalize(double raw) {
  if (count_ == 0) {
    min_ = max_ = raw;
  } else {
    min_ = std::min(min_, raw);
    max_ = std::max(max_, raw);
  }
  ++count_;
  return normalize(raw);
}

double RunningNormalizer::normalize(double raw) const {
  if (!(max_ > min_)) return 0.5;
  return std::clamp((raw - min_) / (max_ - min_), 0.0, 1.0);
}

RewardEngine::RewardEngine(RewardConfig config, env::BatteryConfig battery)
    : config_(config), battery_(battery), window_(config.window_length, 0.0) {
  config_.validate();
}

void RewardEngine::begin_episode(double first_demand) { window_ = SlidingWindow(config_.window_length, first_demand); }

double RewardEngine::tau() const { return threshold(window_, config_.sigma_multiplier); }

RewardBreakdown RewardEngine::compose(const StepContext& ctx, double tau) {
  RewardBreakdown b;
  const auto privacy = privacy_reward(ctx.demand, ctx.masked, tau, config_.noise_threshold);
  b.tau = tau;
  b.delta_t = privacy.delta_t;
  b.case_id = privacy.case_id;
  b.privacy_raw = privacy.value;
  b.cost_raw = cost_reward(ctx.applied_action, battery_.dt_hours, battery_.eta, ctx.price);
  b.system_raw = system_penalty(ctx.requested_action, ctx.a_min, ctx.a_max);
  b.battery_raw = battery_reward(ctx.battery_after, ctx.minute, ctx.horizon, battery_, config_.battery_bonus_scale);
  b.privacy_norm = privacy_.observe_and_normalize(b.privacy_raw);
  b.cost_norm = cost_.observe_and_normalize(b.cost_raw);
  b.system_norm = system_.observe_and_normalize(b.system_raw);
  const double lambda = config_.lambda;
  b.total = lambda * b.privacy_norm + (1.0 - lambda) * b.cost_norm + b.system_norm + b.battery_raw;
  return b;
}

RewardBreakdown RewardEngine::score(const StepContext& ctx) {
  const double t = tau();
  RewardBreakdown b = compose(ctx, t);
  update_window(window_, ctx.demand, t);
  return b;
}

}  // namespace loadmask::reward
