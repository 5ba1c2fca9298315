#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "loadmask/data/synthetic.hpp"
#include "loadmask/dqn/agent.hpp"
#include "loadmask/env/household.hpp"
#include "loadmask/nilm/seq2point.hpp"
#include "loadmask/reward/reward_engine.hpp"

namespace loadmask::experiment {

enum class Profile { kDesk, kPaper };

Profile parse_profile(const std::string& name);
std::string to_string(Profile p);

std::string to_string(env::MeterCoupling c);
env::MeterCoupling parse_coupling(const std::string& name);

/// Everything one pipeline run needs. Loaded as profile defaults, then a config file,
/// then command-line overrides.
struct ExperimentConfig {
  Profile profile = Profile::kDesk;

  std::filesystem::path data_dir = "data";
  std::filesystem::path out_dir = "out";

  env::BatteryConfig battery;
  std::size_t action_levels = 21;
  env::TariffSchedule tariff;
  reward::RewardConfig reward;
  dqn::TrainConfig train;
  nilm::Seq2PointSpec nilm_spec;
  nilm::NilmTrainConfig nilm_train;

  data::SyntheticSpec synthetic;
  int synthetic_days = 11;
  // Day files day_000.csv .. are split in order: the first train_days fit the adversary,
  // the next one is the household day the agent trains and is evaluated on.
  int train_days = 10;

  std::vector<std::string> appliances = {"kettle", "toaster"};
  std::vector<double> lambdas = {0.0, 0.3, 0.7, 1.0};
  std::vector<std::uint64_t> seeds = {1, 2, 3};

  std::uint64_t seed = 1;
  double lambda = 1.0;

  /// Checks every sub-config. With `require_data`, also that the day files exist.
  void validate(bool require_data = false) const;

  [[nodiscard]] env::ActionSpace action_space() const;
  [[nodiscard]] std::filesystem::path day_file(int index) const;
  [[nodiscard]] int eval_day() const { return train_days; }

  /// Canonical JSON of the settings that determine results (paths, seed and lambda excluded).
  [[nodiscard]] std::string canonical_json() const;
  [[nodiscard]] std::string hash() const;
};

ExperimentConfig profile_defaults(Profile profile);

/// Applies a TOML/INI-style key file on top of `cfg`. Unknown keys and unparsable values
/// throw ValidationError naming the key.
void apply_config_file(ExperimentConfig& cfg, const std::filesystem::path& path);

/// Every key the config file accepts, as `section.key`.
std::vector<std::string> known_keys();

}  // namespace loadmask::experiment
