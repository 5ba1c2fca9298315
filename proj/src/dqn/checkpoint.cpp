#include "loadmask/dqn/checkpoint.hpp"

#include <json.hpp>

#include "loadmask/core/error.hpp"
#include "loadmask/core/text.hpp"
#include "loadmask/dqn/load_shaping_task.hpp"

namespace loadmask::dqn {
namespace {

constexpr const char* kFormat = "loadmask.dqn-policy";

nlohmann::json to_json(const TrainConfig& c) {
  return {{"learning_rate", c.learning_rate},
          {"gamma", c.gamma},
          {"target_sync_every", c.target_sync_every},
          {"episodes", c.episodes},
          {"steps_per_episode", c.steps_per_episode},
          {"eps_initial", c.eps_initial},
          {"eps_final", c.eps_final},
          {"eps_decay_fraction", c.eps_decay_fraction},
          {"batch_size", c.batch_size},
          {"learning_starts", c.learning_starts},
          {"buffer_capacity", c.buffer_capacity},
          {"hidden", c.hidden},
          {"seed", c.seed}};
}

TrainConfig train_from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.learning_rate = j.at("learning_rate").get<double>();
  c.gamma = j.at("gamma").get<double>();
  c.target_sync_every = j.at("target_sync_every").get<std::size_t>();
  c.episodes = j.at("episodes").get<std::size_t>();
  c.steps_per_episode = j.at("steps_per_episode").get<std::size_t>();
  c.eps_initial = j.at("eps_initial").get<double>();
  c.eps_final = j.at("eps_final").get<double>();
  c.eps_decay_fraction = j.at("eps_decay_fraction").get<double>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.learning_starts = j.at("learning_starts").get<std::size_t>();
  c.buffer_capacity = j.at("buffer_capacity").get<std::size_t>();
  c.hidden = j.at("hidden").get<std::vector<std::size_t>>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

}  // namespace

void save_policy(const std::filesystem::path& path, const PolicyCheckpoint& ckpt) {
  const nlohmann::json j = {{"format", kFormat},
                            {"version", PolicyCheckpoint::kFormatVersion},
                            {"levels", ckpt.levels},
                            {"e_max", ckpt.e_max},
                            {"demand_scale", ckpt.demand_scale},
                            {"b_max", ckpt.b_max},
                            {"coupling", ckpt.coupling},
                            {"layer_sizes", ckpt.layer_sizes},
                            {"params", ckpt.params},
                            {"train", to_json(ckpt.train)},
                            {"lambda", ckpt.lambda},
                            {"seed", ckpt.seed}};
  text::write_file_atomic(path, j.dump(1) + "\n");
}

PolicyCheckpoint load_policy(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("policy checkpoint " + path.string() + ": " + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kFormat)
      throw ValidationError("policy checkpoint " + path.string() + ": not a policy checkpoint");
    if (j.at("version").get<int>() != PolicyCheckpoint::kFormatVersion)
      throw ValidationError("policy checkpoint " + path.string() + ": unsupported version");
    PolicyCheckpoint c;
    c.levels = j.at("levels").get<std::vector<double>>();
    c.e_max = j.at("e_max").get<double>();
    c.demand_scale = j.at("demand_scale").get<double>();
    c.b_max = j.at("b_max").get<double>();
    c.coupling = j.at("coupling").get<std::string>();
    c.layer_sizes = j.at("layer_sizes").get<std::vector<std::size_t>>();
    c.params = j.at("params").get<std::vector<double>>();
    c.train = train_from_json(j.at("train"));
    c.lambda = j.at("lambda").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("policy checkpoint " + path.string() + ": " + e.what());
  }
}

GreedyPolicy::GreedyPolicy(const PolicyCheckpoint& ckpt)
    : actions_(ckpt.levels, ckpt.e_max),
      network_(ckpt.layer_sizes, nn::Backend::kSerial),
      demand_scale_(ckpt.demand_scale),
      b_max_(ckpt.b_max) {
  if (network_.output_dim() != actions_.size() || network_.input_dim() != 2)
    throw ValidationError("policy checkpoint: network shape does not match the action space");
  if (ckpt.params.size() != network_.param_count())
    throw ValidationError("policy checkpoint: parameter count does not match the network shape");
  network_.set_params(ckpt.params);
}

std::size_t GreedyPolicy::choose_index(const env::EnvState& state) const {
  return greedy_index(network_.predict(observe(state, demand_scale_, b_max_), 1));
}

double GreedyPolicy::operator()(const env::EnvState& state) const { return actions_.level(choose_index(state)); }

GreedyPolicy extract_policy(const PolicyCheckpoint& ckpt) { return GreedyPolicy(ckpt); }

}  // namespace loadmask::dqn
