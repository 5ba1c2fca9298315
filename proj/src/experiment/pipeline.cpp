#include "loadmask/experiment/pipeline.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <exception>
#include <iostream>
#include <sstream>

#include "loadmask/core/error.hpp"
#include "loadmask/core/text.hpp"
#include "loadmask/data/synthetic.hpp"
#include "loadmask/dqn/checkpoint.hpp"
#include "loadmask/dqn/load_shaping_task.hpp"
#include "loadmask/metrics/trace_io.hpp"
#include "loadmask/nilm/checkpoint.hpp"

namespace loadmask::experiment {

namespace fs = std::filesystem;

namespace {

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void progress(const std::string& line) {
#pragma omp critical(loadmask_log)
  std::clog << line << std::endl;
}

std::string join_csv(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += fields[i];
  }
  return out;
}

fs::path agent_dir(const ExperimentConfig& cfg, double lambda, std::uint64_t seed) {
  return cfg.out_dir / "agent" / cell_name(lambda, seed);
}

}  // namespace

std::string cell_name(double lambda, std::uint64_t seed) {
  return "lambda_" + text::format_double(lambda) + "_seed_" + std::to_string(seed);
}

void record_manifest(const fs::path& dir, const std::string& command, const ExperimentConfig& cfg,
                     const std::vector<fs::path>& artifacts) {
  fs::create_directories(dir);
  const fs::path path = dir / "manifest.json";
  nlohmann::json m = {{"runs", nlohmann::json::array()}};
  if (fs::exists(path)) {
    try {
      m = nlohmann::json::parse(text::read_file(path));
    } catch (const nlohmann::json::exception&) {
      throw ValidationError("corrupt manifest " + path.string());
    }
  }
  std::vector<std::string> rel;
  for (const auto& a : artifacts) rel.push_back(a.lexically_relative(dir).generic_string());
  m["runs"].push_back({{"command", command},
                       {"code_version", kCodeVersion},
                       {"config_hash", cfg.hash()},
                       {"profile", to_string(cfg.profile)},
                       {"seed", cfg.seed},
                       {"lambda", cfg.lambda},
                       {"recorded_at", utc_now()},
                       {"artifacts", rel}});
  text::write_file_atomic(path, m.dump(2) + "\n");
}

std::vector<fs::path> cmd_gen_synthetic(const ExperimentConfig& cfg) {
  cfg.validate();
  auto spec = cfg.synthetic;
  spec.seed = cfg.seed;
  const auto hh = data::generate_synthetic(spec, cfg.synthetic_days);
  fs::create_directories(cfg.data_dir);
  std::vector<fs::path> files;
  for (int d = 0; d < cfg.synthetic_days; ++d) {
    const auto lo = static_cast<std::size_t>(d) * env::kMinutesPerDay;
    const auto hi = lo + env::kMinutesPerDay;
    auto cut = [&](const data::ChannelSeries& s) {
      data::ChannelSeries out{s.name, {}, {}};
      out.timestamps.assign(s.timestamps.begin() + lo, s.timestamps.begin() + hi);
      out.power_kw.assign(s.power_kw.begin() + lo, s.power_kw.begin() + hi);
      return out;
    };
    data::Household day{cut(hh.aggregate), {}};
    for (const auto& [name, s] : hh.appliances) day.appliances[name] = cut(s);
    files.push_back(cfg.day_file(d));
    data::write_wide_csv(files.back(), day);
  }
  record_manifest(cfg.data_dir, "gen-synthetic", cfg, files);
  return files;
}

data::DaySlice load_day(const ExperimentConfig& cfg, int index) {
  const fs::path path = cfg.day_file(index);
  if (!fs::exists(path)) throw ValidationError("missing day file " + path.string());
  const auto hh = data::load_wide_csv(path);
  for (const auto& a : cfg.appliances)
    if (!hh.appliances.contains(a))
      throw ValidationError(path.string() + ": no column for appliance '" + a + "' (expected " + a + "_w)");
  if (hh.aggregate.size() == 0) throw ValidationError(path.string() + ": no rows");
  const std::int64_t t0 = hh.aggregate.timestamps.front();
  return data::make_day(hh, t0 - ((t0 % 86400) + 86400) % 86400);
}

std::vector<fs::path> cmd_train_nilm(const ExperimentConfig& cfg) {
  cfg.validate(true);
  std::vector<double> aggregate;
  std::map<std::string, std::vector<double>> appliance;
  for (int d = 0; d < cfg.train_days; ++d) {
    const auto day = load_day(cfg, d);
    aggregate.insert(aggregate.end(), day.demand.begin(), day.demand.end());
    for (const auto& a : cfg.appliances) {
      const auto& src = day.appliance_kw.at(a);
      appliance[a].insert(appliance[a].end(), src.begin(), src.end());
    }
  }
  const fs::path dir = cfg.out_dir / "nilm";
  fs::create_directories(dir);
  std::vector<fs::path> files;
  for (const auto& a : cfg.appliances) {
    auto tc = cfg.nilm_train;
    tc.seed = cfg.seed;
    progress("train-nilm: " + a + ", " + std::to_string(tc.iterations) + " iterations");
    const auto result = nilm::train_nilm(aggregate, appliance.at(a), cfg.nilm_spec, tc, a);
    files.push_back(dir / (a + ".json"));
    nilm::save_model(files.back(), result.model);
    std::string csv = "iteration,loss\n";
    for (std::size_t i = 0; i < result.losses.size(); ++i)
      csv += std::to_string(i) + "," + text::format_double(result.losses[i]) + "\n";
    files.push_back(dir / ("loss_" + a + ".csv"));
    text::write_file_atomic(files.back(), csv);
  }
  record_manifest(dir, "train-nilm", cfg, files);
  return files;
}

fs::path cmd_train_agent(const ExperimentConfig& cfg) {
  cfg.validate(true);
  const auto day = load_day(cfg, cfg.eval_day());
  auto reward = cfg.reward;
  reward.lambda = cfg.lambda;
  auto tc = cfg.train;
  tc.seed = cfg.seed;
  tc.steps_per_episode = day.demand.size();
  const double scale = dqn::demand_scale_for(day.demand);
  const auto actions = cfg.action_space();
  dqn::LoadShapingTask task(day.demand, actions, cfg.battery, cfg.tariff, reward, scale);

  const std::string cell = cell_name(cfg.lambda, cfg.seed);
  const std::size_t every = std::max<std::size_t>(1, tc.episodes / 10);
  const auto result = dqn::train(task, tc, [&](const dqn::EpisodeLog& e) {
    if ((e.episode + 1) % every == 0 || e.episode + 1 == tc.episodes)
      progress("train-agent " + cell + ": episode " + std::to_string(e.episode + 1) + "/" +
               std::to_string(tc.episodes) + " reward " + text::format_double(e.cumulative_total_reward));
  });

  dqn::PolicyCheckpoint ckpt;
  ckpt.levels = actions.levels();
  ckpt.e_max = cfg.battery.e_max;
  ckpt.demand_scale = scale;
  ckpt.b_max = cfg.battery.b_max;
  ckpt.coupling = to_string(cfg.battery.coupling);
  ckpt.layer_sizes = result.layer_sizes;
  ckpt.params = result.params;
  ckpt.train = tc;
  ckpt.lambda = cfg.lambda;
  ckpt.seed = cfg.seed;

  const fs::path dir = agent_dir(cfg, cfg.lambda, cfg.seed);
  fs::create_directories(dir);
  const fs::path policy = dir / "policy.json";
  dqn::save_policy(policy, ckpt);
  std::string log = "episode,cumulative_raw_reward,cumulative_total_reward,epsilon,loss_mean\n";
  for (const auto& e : result.log)
    log += join_csv({std::to_string(e.episode), text::format_double(e.cumulative_raw_reward),
                     text::format_double(e.cumulative_total_reward), text::format_double(e.epsilon),
                     text::format_double(e.loss_mean)}) +
           "\n";
  text::write_file_atomic(dir / "train_log.csv", log);
  record_manifest(dir, "train-agent", cfg, {policy, dir / "train_log.csv"});
  return policy;
}

metrics::ExperimentResult cmd_evaluate(const ExperimentConfig& cfg, const EvaluateOptions& opts) {
  cfg.validate(true);
  const auto day = load_day(cfg, cfg.eval_day());
  const auto actions = cfg.action_space();

  metrics::ExperimentResult result;
  result.config_hash = cfg.hash();
  env::Policy policy;
  std::optional<dqn::GreedyPolicy> greedy;
  double lambda = cfg.lambda;
  std::string cell = "noop";
  if (opts.policy) {
    const auto ckpt = dqn::load_policy(*opts.policy);
    if (ckpt.levels != actions.levels())
      throw ValidationError("checkpoint/config mismatch: action levels differ (" + opts.policy->string() + ")");
    if (ckpt.coupling != to_string(cfg.battery.coupling) || ckpt.b_max != cfg.battery.b_max ||
        ckpt.e_max != cfg.battery.e_max)
      throw ValidationError("checkpoint/config mismatch: battery settings differ (" + opts.policy->string() + ")");
    greedy.emplace(ckpt);
    policy = [&greedy](const env::EnvState& s) { return (*greedy)(s); };
    lambda = ckpt.lambda;
    result.policy = "pls-dqn";
    result.lambda = ckpt.lambda;
    result.seed = ckpt.seed;
    cell = cell_name(ckpt.lambda, ckpt.seed);
  } else {
    policy = [](const env::EnvState&) { return 0.0; };
    result.policy = "noop";
    result.seed = cfg.seed;
  }

  auto reward = cfg.reward;
  reward.lambda = lambda;
  reward::RewardEngine engine(reward, cfg.battery);
  const auto trace = env::run_episode(policy, day.demand, actions, cfg.battery, cfg.tariff, engine);

  const fs::path nilm_dir = opts.nilm_dir.empty() ? cfg.out_dir / "nilm" : opts.nilm_dir;
  std::map<std::string, nilm::Seq2PointModel> models;
  for (const auto& a : cfg.appliances) {
    const fs::path p = nilm_dir / (a + ".json");
    if (!fs::exists(p)) throw ValidationError("missing adversary checkpoint " + p.string());
    models.emplace(a, nilm::load_model(p));
  }
  const auto leak = metrics::privacy_leak_summary(trace, models, day.truth_on);
  result.appliances = leak.reports;
  if (opts.policy) result.cost = metrics::cost_report(trace, cfg.tariff, cfg.battery);

  const fs::path out = opts.out_dir.empty() ? cfg.out_dir / "eval" / cell : opts.out_dir;
  fs::create_directories(out);
  std::vector<fs::path> files;
  files.push_back(out / "trace.csv");
  metrics::write_trace_csv(files.back(), trace);
  std::map<std::string, metrics::ApplianceAttack> overlay;
  for (const auto& a : cfg.appliances) {
    overlay[a] = {day.appliance_kw.at(a), leak.attacks.at(a)};
    files.push_back(out / ("predictions_" + a + ".csv"));
    metrics::write_predictions_csv(files.back(), leak.attacks.at(a), &day.truth_on.at(a));
  }
  for (auto& f : metrics::export_figures(trace, overlay, out)) files.push_back(std::move(f));
  files.push_back(out / "results.json");
  text::write_file_atomic(files.back(), metrics::to_json_text(result));
  record_manifest(out, "evaluate", cfg, files);
  return result;
}

std::vector<fs::path> cmd_sweep(const ExperimentConfig& cfg) {
  cfg.validate(true);
  struct Cell {
    double lambda;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (double l : cfg.lambdas)
    for (auto s : cfg.seeds) cells.push_back({l, s});

  std::vector<fs::path> results(cells.size() + 1);
  results[0] = cfg.out_dir / "eval" / "noop" / "results.json";
  cmd_evaluate(cfg, {});

  std::vector<std::exception_ptr> errors(cells.size());
  const auto n = static_cast<std::ptrdiff_t>(cells.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      ExperimentConfig c = cfg;
      c.lambda = cells[i].lambda;
      c.seed = cells[i].seed;
      const auto policy = cmd_train_agent(c);
      EvaluateOptions o;
      o.policy = policy;
      cmd_evaluate(c, o);
      results[i + 1] = c.out_dir / "eval" / cell_name(c.lambda, c.seed) / "results.json";
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  record_manifest(cfg.out_dir, "sweep", cfg, results);
  return results;
}

std::string cmd_report(const ExperimentConfig& cfg) {
  const fs::path eval = cfg.out_dir / "eval";
  if (!fs::is_directory(eval)) throw ValidationError("no evaluations under " + eval.string());
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(eval))
    if (fs::exists(e.path() / "results.json")) dirs.push_back(e.path());
  std::ranges::sort(dirs);
  if (dirs.empty()) throw ValidationError("no results.json under " + eval.string());

  std::vector<std::string> header = {"cell", "policy", "lambda", "seed"};
  for (const auto& a : cfg.appliances)
    for (const char* m : {"precision", "recall", "f1"}) header.push_back(a + "_" + m);
  for (const char* c : {"battery_cost", "bill", "remaining_pct", "compensated_cost"}) header.emplace_back(c);

  std::ostringstream table;
  table << join_csv(header) << "\n";
  for (const auto& d : dirs) {
    const auto r = metrics::parse_results_json(text::read_file(d / "results.json"));
    std::vector<std::string> row = {d.filename().string(), r.policy,
                                    r.lambda ? text::format_double(*r.lambda) : "", std::to_string(r.seed)};
    for (const auto& a : cfg.appliances) {
      const auto it = r.appliances.find(a);
      if (it == r.appliances.end()) {
        row.insert(row.end(), 3, "");
        continue;
      }
      for (double v : {it->second.precision, it->second.recall, it->second.f1}) row.push_back(text::format_double(v));
    }
    if (r.cost) {
      for (double v : {r.cost->battery_cost, r.cost->bill, r.cost->remaining_pct, r.cost->compensated_cost})
        row.push_back(text::format_double(v));
    } else {
      row.insert(row.end(), 4, "");
    }
    table << join_csv(row) << "\n";
  }
  const std::string out = table.str();
  text::write_file_atomic(cfg.out_dir / "summary.csv", out);
  record_manifest(cfg.out_dir, "report", cfg, {cfg.out_dir / "summary.csv"});
  return out;
}

}  // namespace loadmask::experiment
