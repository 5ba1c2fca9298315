#include "loadmask/experiment/config.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <functional>
#include <map>

#include "loadmask/core/error.hpp"
#include "loadmask/core/random.hpp"
#include "loadmask/core/text.hpp"

namespace loadmask::experiment {

namespace {

using Inputs = std::vector<std::string>;
using Setter = std::function<void(ExperimentConfig&, const Inputs&)>;

const std::string& single(const std::string& key, const Inputs& in) {
  if (in.size() != 1) throw ValidationError("config key '" + key + "' expects a single value");
  return in.front();
}

double as_double(const std::string& key, const Inputs& in) {
  try {
    return text::parse_double(single(key, in));
  } catch (const ValidationError&) {
    throw ValidationError("config key '" + key + "': not a number: '" + single(key, in) + "'");
  }
}

std::int64_t as_int(const std::string& key, const Inputs& in) {
  try {
    return text::parse_int(single(key, in));
  } catch (const ValidationError&) {
    throw ValidationError("config key '" + key + "': not an integer: '" + single(key, in) + "'");
  }
}

std::size_t as_size(const std::string& key, const Inputs& in) {
  const auto v = as_int(key, in);
  if (v < 0) throw ValidationError("config key '" + key + "' must be non-negative");
  return static_cast<std::size_t>(v);
}

template <class T, class Parse>
std::vector<T> as_list(const std::string& key, const Inputs& in, Parse parse) {
  std::vector<T> out;
  for (const auto& s : in) out.push_back(parse(key, Inputs{s}));
  return out;
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto num = [&t](const std::string& key, auto member) {
      t[key] = [key, member](ExperimentConfig& c, const Inputs& in) { member(c) = as_double(key, in); };
    };
    auto cnt = [&t](const std::string& key, auto member) {
      t[key] = [key, member](ExperimentConfig& c, const Inputs& in) {
        member(c) = static_cast<std::remove_reference_t<decltype(member(c))>>(as_size(key, in));
      };
    };

    t["paths.data_dir"] = [](ExperimentConfig& c, const Inputs& in) { c.data_dir = single("paths.data_dir", in); };
    t["paths.out_dir"] = [](ExperimentConfig& c, const Inputs& in) { c.out_dir = single("paths.out_dir", in); };

    num("battery.b_min", [](ExperimentConfig& c) -> double& { return c.battery.b_min; });
    num("battery.b_max", [](ExperimentConfig& c) -> double& { return c.battery.b_max; });
    num("battery.e_max", [](ExperimentConfig& c) -> double& { return c.battery.e_max; });
    num("battery.eta", [](ExperimentConfig& c) -> double& { return c.battery.eta; });
    num("battery.b_initial", [](ExperimentConfig& c) -> double& { return c.battery.b_initial; });
    num("battery.dt_hours", [](ExperimentConfig& c) -> double& { return c.battery.dt_hours; });
    t["battery.coupling"] = [](ExperimentConfig& c, const Inputs& in) {
      c.battery.coupling = parse_coupling(single("battery.coupling", in));
    };
    cnt("battery.action_levels", [](ExperimentConfig& c) -> std::size_t& { return c.action_levels; });

    num("tariff.peak_price", [](ExperimentConfig& c) -> double& { return c.tariff.peak_price; });
    num("tariff.offpeak_price", [](ExperimentConfig& c) -> double& { return c.tariff.offpeak_price; });
    cnt("tariff.peak_start_minute", [](ExperimentConfig& c) -> int& { return c.tariff.peak_start_minute; });
    cnt("tariff.peak_end_minute", [](ExperimentConfig& c) -> int& { return c.tariff.peak_end_minute; });

    num("reward.noise_threshold", [](ExperimentConfig& c) -> double& { return c.reward.noise_threshold; });
    num("reward.sigma_multiplier", [](ExperimentConfig& c) -> double& { return c.reward.sigma_multiplier; });
    num("reward.battery_bonus_scale", [](ExperimentConfig& c) -> double& { return c.reward.battery_bonus_scale; });
    cnt("reward.window_length", [](ExperimentConfig& c) -> std::size_t& { return c.reward.window_length; });

    num("train.learning_rate", [](ExperimentConfig& c) -> double& { return c.train.learning_rate; });
    num("train.gamma", [](ExperimentConfig& c) -> double& { return c.train.gamma; });
    cnt("train.target_sync_every", [](ExperimentConfig& c) -> std::size_t& { return c.train.target_sync_every; });
    cnt("train.episodes", [](ExperimentConfig& c) -> std::size_t& { return c.train.episodes; });
    num("train.eps_initial", [](ExperimentConfig& c) -> double& { return c.train.eps_initial; });
    num("train.eps_final", [](ExperimentConfig& c) -> double& { return c.train.eps_final; });
    num("train.eps_decay_fraction", [](ExperimentConfig& c) -> double& { return c.train.eps_decay_fraction; });
    cnt("train.batch_size", [](ExperimentConfig& c) -> std::size_t& { return c.train.batch_size; });
    cnt("train.learning_starts", [](ExperimentConfig& c) -> std::size_t& { return c.train.learning_starts; });
    cnt("train.buffer_capacity", [](ExperimentConfig& c) -> std::size_t& { return c.train.buffer_capacity; });
    t["train.hidden"] = [](ExperimentConfig& c, const Inputs& in) {
      c.train.hidden = as_list<std::size_t>("train.hidden", in, as_size);
    };

    cnt("nilm.sequence_length", [](ExperimentConfig& c) -> std::size_t& { return c.nilm_spec.sequence_length; });
    cnt("nilm.conv1_channels", [](ExperimentConfig& c) -> std::size_t& { return c.nilm_spec.conv1_channels; });
    cnt("nilm.conv2_channels", [](ExperimentConfig& c) -> std::size_t& { return c.nilm_spec.conv2_channels; });
    cnt("nilm.kernel", [](ExperimentConfig& c) -> std::size_t& { return c.nilm_spec.kernel; });
    cnt("nilm.padding", [](ExperimentConfig& c) -> std::size_t& { return c.nilm_spec.padding; });
    cnt("nilm.iterations", [](ExperimentConfig& c) -> std::size_t& { return c.nilm_train.iterations; });
    num("nilm.lr_initial", [](ExperimentConfig& c) -> double& { return c.nilm_train.lr_initial; });
    num("nilm.lr_final", [](ExperimentConfig& c) -> double& { return c.nilm_train.lr_final; });
    cnt("nilm.batch_size", [](ExperimentConfig& c) -> std::size_t& { return c.nilm_train.batch_size; });

    cnt("data.train_days", [](ExperimentConfig& c) -> int& { return c.train_days; });

    num("synthetic.base_load_kw", [](ExperimentConfig& c) -> double& { return c.synthetic.base_load_kw; });
    num("synthetic.noise_sigma_kw", [](ExperimentConfig& c) -> double& { return c.synthetic.noise_sigma_kw; });
    cnt("synthetic.days", [](ExperimentConfig& c) -> int& { return c.synthetic_days; });
    t["synthetic.start_timestamp"] = [](ExperimentConfig& c, const Inputs& in) {
      c.synthetic.start_timestamp = as_int("synthetic.start_timestamp", in);
    };

    t["experiment.appliances"] = [](ExperimentConfig& c, const Inputs& in) {
      if (in.empty()) throw ValidationError("config key 'experiment.appliances' is empty");
      c.appliances = in;
    };
    t["experiment.lambdas"] = [](ExperimentConfig& c, const Inputs& in) {
      c.lambdas = as_list<double>("experiment.lambdas", in, as_double);
    };
    t["experiment.seeds"] = [](ExperimentConfig& c, const Inputs& in) {
      std::vector<std::uint64_t> s;
      for (auto v : as_list<std::size_t>("experiment.seeds", in, as_size)) s.push_back(v);
      c.seeds = s;
    };
    t["experiment.seed"] = [](ExperimentConfig& c, const Inputs& in) { c.seed = as_size("experiment.seed", in); };
    num("experiment.lambda", [](ExperimentConfig& c) -> double& { return c.lambda; });
    return t;
  }();
  return table;
}

const std::vector<std::string> kPulseFields = {"power_kw", "duration_minutes", "per_day", "earliest_minute",
                                               "latest_minute"};

data::PulseSpec& pulse_named(ExperimentConfig& c, const std::string& name) {
  for (auto& p : c.synthetic.appliances)
    if (p.name == name) return p;
  data::PulseSpec p;
  p.name = name;
  c.synthetic.appliances.push_back(p);
  return c.synthetic.appliances.back();
}

void set_pulse_field(ExperimentConfig& c, const std::string& appliance, const std::string& field,
                     const Inputs& in) {
  const std::string key = "synthetic." + appliance + "." + field;
  auto& p = pulse_named(c, appliance);
  if (field == "power_kw") p.power_kw = as_double(key, in);
  else if (field == "duration_minutes") p.duration_minutes = static_cast<int>(as_size(key, in));
  else if (field == "per_day") p.per_day = static_cast<int>(as_size(key, in));
  else if (field == "earliest_minute") p.earliest_minute = static_cast<int>(as_size(key, in));
  else if (field == "latest_minute") p.latest_minute = static_cast<int>(as_size(key, in));
  else throw ValidationError("unknown config key '" + key + "'");
}

}  // namespace

Profile parse_profile(const std::string& name) {
  if (name == "desk") return Profile::kDesk;
  if (name == "paper") return Profile::kPaper;
  throw ValidationError("unknown profile '" + name + "' (expected desk or paper)");
}

std::string to_string(Profile p) { return p == Profile::kDesk ? "desk" : "paper"; }

std::string to_string(env::MeterCoupling c) {
  return c == env::MeterCoupling::kPower ? "power" : "energy";
}

env::MeterCoupling parse_coupling(const std::string& name) {
  if (name == "power") return env::MeterCoupling::kPower;
  if (name == "energy") return env::MeterCoupling::kEnergyPerStep;
  throw ValidationError("unknown battery coupling '" + name + "' (expected power or energy)");
}

ExperimentConfig profile_defaults(Profile profile) {
  ExperimentConfig c;
  c.profile = profile;
  c.battery.coupling = env::MeterCoupling::kPower;
  c.synthetic.appliances = {
      {"kettle", 2.5, 3, 2, 360, 1380},
      {"toaster", 1.2, 2, 1, 360, 1380},
  };
  if (profile == Profile::kDesk) {
    c.train.episodes = 200;
    c.nilm_train.iterations = 10'000;
  } else {
    c.train.episodes = 1500;
    c.nilm_train.iterations = 100'000;
  }
  return c;
}

std::vector<std::string> known_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, _] : setters()) keys.push_back(k);
  for (const auto& f : kPulseFields) keys.push_back("synthetic.<appliance>." + f);
  return keys;
}

void apply_config_file(ExperimentConfig& cfg, const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ValidationError("config file not found: " + path.string());
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_file(path.string());
  } catch (const CLI::Error& e) {
    throw ValidationError("config file " + path.string() + ": " + e.what());
  }
  bool pulses_reset = false;
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;  // section markers
    const std::string key = item.fullname();
    if (item.parents.size() == 2 && item.parents[0] == "synthetic") {
      if (!pulses_reset) {
        cfg.synthetic.appliances.clear();  // a file that names appliances replaces the defaults
        pulses_reset = true;
      }
      set_pulse_field(cfg, item.parents[1], item.name, item.inputs);
      continue;
    }
    const auto it = setters().find(key);
    if (it == setters().end()) throw ValidationError("unknown config key '" + key + "'");
    it->second(cfg, item.inputs);
  }
}

env::ActionSpace ExperimentConfig::action_space() const {
  return env::ActionSpace::uniform(action_levels, battery.e_max);
}

std::filesystem::path ExperimentConfig::day_file(int index) const {
  char name[32];
  std::snprintf(name, sizeof name, "day_%03d.csv", index);
  return data_dir / name;
}

void ExperimentConfig::validate(bool require_data) const {
  battery.validate();
  tariff.validate();
  reward.validate();
  train.validate();
  nilm_spec.validate();
  nilm_train.validate();
  synthetic.validate();
  (void)action_space();
  if (synthetic_days < 1) throw ValidationError("synthetic.days must be >= 1");
  if (train_days < 1) throw ValidationError("data.train_days must be >= 1");
  if (appliances.empty()) throw ValidationError("experiment.appliances is empty");
  if (lambda < 0.0 || lambda > 1.0) throw ValidationError("experiment.lambda must lie in [0, 1]");
  for (double l : lambdas)
    if (!(l >= 0.0 && l <= 1.0)) throw ValidationError("experiment.lambdas entries must lie in [0, 1]");
  if (seeds.empty()) throw ValidationError("experiment.seeds is empty");
  if (require_data) {
    for (int d = 0; d <= eval_day(); ++d)
      if (!std::filesystem::exists(day_file(d)))
        throw ValidationError("missing day file " + day_file(d).string());
  }
}

std::string ExperimentConfig::canonical_json() const {
  nlohmann::json pulses = nlohmann::json::array();
  for (const auto& p : synthetic.appliances)
    pulses.push_back({{"name", p.name},
                      {"power_kw", p.power_kw},
                      {"duration_minutes", p.duration_minutes},
                      {"per_day", p.per_day},
                      {"earliest_minute", p.earliest_minute},
                      {"latest_minute", p.latest_minute}});
  const nlohmann::json j = {
      {"battery",
       {{"b_min", battery.b_min},
        {"b_max", battery.b_max},
        {"e_max", battery.e_max},
        {"eta", battery.eta},
        {"b_initial", battery.b_initial},
        {"dt_hours", battery.dt_hours},
        {"coupling", to_string(battery.coupling)},
        {"action_levels", action_levels}}},
      {"tariff",
       {{"peak_price", tariff.peak_price},
        {"offpeak_price", tariff.offpeak_price},
        {"peak_start_minute", tariff.peak_start_minute},
        {"peak_end_minute", tariff.peak_end_minute}}},
      {"reward",
       {{"noise_threshold", reward.noise_threshold},
        {"sigma_multiplier", reward.sigma_multiplier},
        {"battery_bonus_scale", reward.battery_bonus_scale},
        {"window_length", reward.window_length}}},
      {"train",
       {{"learning_rate", train.learning_rate},
        {"gamma", train.gamma},
        {"target_sync_every", train.target_sync_every},
        {"episodes", train.episodes},
        {"steps_per_episode", train.steps_per_episode},
        {"eps_initial", train.eps_initial},
        {"eps_final", train.eps_final},
        {"eps_decay_fraction", train.eps_decay_fraction},
        {"batch_size", train.batch_size},
        {"learning_starts", train.learning_starts},
        {"buffer_capacity", train.buffer_capacity},
        {"hidden", train.hidden}}},
      {"nilm",
       {{"sequence_length", nilm_spec.sequence_length},
        {"conv1_channels", nilm_spec.conv1_channels},
        {"conv2_channels", nilm_spec.conv2_channels},
        {"kernel", nilm_spec.kernel},
        {"padding", nilm_spec.padding},
        {"iterations", nilm_train.iterations},
        {"lr_initial", nilm_train.lr_initial},
        {"lr_final", nilm_train.lr_final},
        {"batch_size", nilm_train.batch_size}}},
      {"synthetic",
       {{"base_load_kw", synthetic.base_load_kw},
        {"noise_sigma_kw", synthetic.noise_sigma_kw},
        {"start_timestamp", synthetic.start_timestamp},
        {"days", synthetic_days},
        {"appliances", pulses}}},
      {"data", {{"train_days", train_days}}},
      {"appliances", appliances},
  };
  return j.dump();
}

std::string ExperimentConfig::hash() const { return text::hex64(fnv1a64(canonical_json())); }

}  // namespace loadmask::experiment
