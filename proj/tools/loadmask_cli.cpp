// loadmask: command-line runner for the load-shaping experiments.
//
// Exit codes: 0 success, 2 invalid input or configuration, 3 numerical/runtime failure.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "loadmask/core/error.hpp"
#include "loadmask/experiment/config.hpp"
#include "loadmask/experiment/pipeline.hpp"

namespace ex = loadmask::experiment;

namespace {

struct CommonFlags {
  std::string config;
  std::string profile = "desk";
  std::optional<std::uint64_t> seed;
  std::optional<double> lambda;
  std::string out;
  std::string data;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "Config file (TOML/INI keys)");
  cmd->add_option("--profile", f.profile, "Default set: desk or paper")->check(CLI::IsMember({"desk", "paper"}));
  cmd->add_option("--seed", f.seed, "Master seed");
  cmd->add_option("--lambda", f.lambda, "Privacy/cost trade-off in [0, 1]");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--data", f.data, "Day-file directory");
}

ex::ExperimentConfig resolve(const CommonFlags& f) {
  auto cfg = ex::profile_defaults(ex::parse_profile(f.profile));
  if (!f.config.empty()) ex::apply_config_file(cfg, f.config);
  if (f.seed) cfg.seed = *f.seed;
  if (f.lambda) cfg.lambda = *f.lambda;
  if (!f.out.empty()) cfg.out_dir = f.out;
  if (!f.data.empty()) cfg.data_dir = f.data;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Battery load-shaping defense against NILM: data, training, evaluation"};
  app.require_subcommand(1);
  CommonFlags flags;

  auto* gen = app.add_subcommand("gen-synthetic", "Write seeded synthetic day files");
  auto* nilm = app.add_subcommand("train-nilm", "Train one Seq2Point adversary per appliance");
  auto* agent = app.add_subcommand("train-agent", "Train the DQN load-shaping agent");
  auto* eval = app.add_subcommand("evaluate", "Roll a policy for one day and attack the masked load");
  auto* sweep = app.add_subcommand("sweep", "Train and evaluate every (lambda, seed) cell");
  auto* report = app.add_subcommand("report", "Collect results.json files into summary.csv");
  auto* keys = app.add_subcommand("config-keys", "List accepted config keys");
  for (auto* c : {gen, nilm, agent, eval, sweep, report}) add_common(c, flags);

  std::string policy;
  std::string nilm_dir;
  std::string eval_out;
  bool baseline = false;
  auto* pol = eval->add_option("--policy", policy, "Policy checkpoint");
  auto* base = eval->add_flag("--baseline", baseline, "Evaluate the unprotected load (no-op policy)");
  pol->excludes(base);
  eval->add_option("--nilm-dir", nilm_dir, "Adversary checkpoints (default <out>/nilm)");
  eval->add_option("--eval-out", eval_out, "Directory for this evaluation (default <out>/eval/<cell>)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (keys->parsed()) {
      for (const auto& k : ex::known_keys()) std::cout << k << "\n";
      return 0;
    }
    const auto cfg = resolve(flags);
    if (gen->parsed()) {
      for (const auto& p : ex::cmd_gen_synthetic(cfg)) std::cout << p.string() << "\n";
    } else if (nilm->parsed()) {
      for (const auto& p : ex::cmd_train_nilm(cfg)) std::cout << p.string() << "\n";
    } else if (agent->parsed()) {
      std::cout << ex::cmd_train_agent(cfg).string() << "\n";
    } else if (eval->parsed()) {
      if (policy.empty() && !baseline) throw loadmask::ValidationError("evaluate needs --policy or --baseline");
      ex::EvaluateOptions o;
      if (!policy.empty()) o.policy = policy;
      o.nilm_dir = nilm_dir;
      o.out_dir = eval_out;
      const auto r = ex::cmd_evaluate(cfg, o);
      for (const auto& [name, rep] : r.appliances)
        std::cout << name << ": precision " << rep.precision << " recall " << rep.recall << " f1 " << rep.f1 << "\n";
      if (r.cost)
        std::cout << "cost " << r.cost->battery_cost << " remaining " << r.cost->remaining_pct << "% compensated "
                  << r.cost->compensated_cost << "\n";
    } else if (sweep->parsed()) {
      for (const auto& p : ex::cmd_sweep(cfg)) std::cout << p.string() << "\n";
    } else if (report->parsed()) {
      std::cout << ex::cmd_report(cfg);
    }
    return 0;
  } catch (const loadmask::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const loadmask::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 3;
  }
}
