// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "loadmask/core/text.hpp"
#include "loadmask/dqn/agent.hpp"
#include "loadmask/env/household.hpp"
#include "loadmask/experiment/config.hpp"
#include "loadmask/experiment/pipeline.hpp"
#include "loadmask/metrics/classification.hpp"
#include "loadmask/metrics/cost.hpp"
#include "loadmask/nilm/seq2point.hpp"
#include "loadmask/reward/reward_engine.hpp"
#include "oracles.hpp"
#include "support.hpp"
#include "toy_mdp.hpp"

using namespace loadmask;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Verdict table_arithmetic() {
  struct F1Row { double p, r, f1; };
  // printed precision/recall/F1 triples
  const F1Row rows[] = {{0.500, 0.895, 0.642}};
  double worst = 0.0;
  for (const auto& r : rows) worst = std::max(worst, std::abs(metrics::f1_score(r.p, r.r) - r.f1));
  struct CostRow { double cost, remaining, expect; };
  const CostRow costs[] = {{-0.324, 0.0194, 0.123}, {-0.085, 0.657, 0.071}};
  for (const auto& c : costs)
    worst = std::max(worst, std::abs(metrics::compensated_cost(c.cost, c.remaining * 1.5, 1.5, 0.304) - c.expect));
  return {worst <= 0.001, fmt("max abs deviation %.6f (tol 0.001)", worst)};
}

Verdict reward_oracle() {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  const double delta = 0.5;
  double worst = 0.0;
  int case_mismatch = 0;
  for (int n = 0; n < 10'000; ++n) {
    double demand = u(rng), masked = u(rng), tau = 0.5 * u(rng);
    if (n % 7 == 0) demand = std::max(delta, tau);
    if (n % 11 == 0) masked = std::max(delta, tau);
    int oracle_case = 0;
    const double want = oracles::privacy_reward(demand, masked, tau, delta, &oracle_case);
    const auto got = reward::privacy_reward(demand, masked, tau, delta);
    worst = std::max(worst, std::abs(got.value - want));
    case_mismatch += static_cast<int>(got.case_id) != oracle_case;
  }
  return {worst <= 1e-9 && case_mismatch == 0,
          fmt("10000 triples, max abs error %.3g, case mismatches %d", worst, case_mismatch)};
}

Verdict environment_invariants() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto actions = env::ActionSpace::uniform(21, 5.0);
  std::uniform_int_distribution<std::size_t> pick(0, actions.size() - 1);
  long violations = 0;
  double worst_step = 0.0, worst_total = 0.0;
  long steps = 0;
  for (auto coupling : {env::MeterCoupling::kEnergyPerStep, env::MeterCoupling::kPower}) {
    for (double eta : {1.0, 0.9}) {
      env::BatteryConfig c;
      c.coupling = coupling;
      c.eta = eta;
      for (int run = 0; run < 25; ++run) {
        // random start state, then 1000 chained random actions
        env::EnvState s{u(rng) < 0.1 ? 3.0 * u(rng) : 0.5 * u(rng), c.b_min + u(rng) * (c.b_max - c.b_min),
                        1 + static_cast<int>(u(rng) * 1440)};
        const double start = s.battery;
        double sum = 0.0;
        for (int t = 0; t < 1000; ++t, ++steps) {
          const double next_demand = u(rng) < 0.1 ? 3.0 * u(rng) : 0.5 * u(rng);
          const auto r = env::step(s, actions.level(pick(rng)), actions, c, {}, next_demand, 1'000'000);
          const double b = r.next_state.battery;
          violations += (b < c.b_min || b > c.b_max || r.masked_load < 0.0);
          const double meter = coupling == env::MeterCoupling::kPower ? s.demand + r.delta_b / c.dt_hours
                                                                      : s.demand + r.delta_b;
          worst_step = std::max({worst_step, std::abs(b - s.battery - r.delta_b),
                                 std::abs(r.delta_b - r.applied_action * c.dt_hours * eta),
                                 std::abs(std::max(meter, 0.0) - r.masked_load)});
          sum += r.delta_b;
          s = r.next_state;
        }
        worst_total = std::max(worst_total, std::abs(s.battery - start - sum));
      }
    }
  }
  const bool ok = violations == 0 && worst_step <= 1e-9 && worst_total <= 1e-9;
  return {ok, fmt("%ld steps, %ld bound violations, bookkeeping error step %.3g total %.3g", steps, violations,
                  worst_step, worst_total)};
}

Verdict dqn_correctness() {
  const auto oracle = toy::value_iteration_policy(0.9);
  toy::TwoStateTask task;
  const auto trained = toy::greedy_policy(dqn::train(task, toy::train_config()), task);
  const bool policy_ok = trained == oracle;

  dqn::DqnLearner l(2, 21, {64, 64}, 1e-4, 0.99);
  Rng rng(9);
  l.init_weights(rng);
  dqn::Batch b;
  b.size = 8;
  b.obs_dim = 2;
  b.observations = testing_support::uniform_vector(16, 0, 1, 41);
  b.next_observations = testing_support::uniform_vector(16, 0, 1, 42);
  b.rewards = testing_support::uniform_vector(8, -1, 1, 43);
  for (std::size_t i = 0; i < 8; ++i) {
    b.actions.push_back((i * 7) % 21);
    b.done.push_back(i % 3 == 0);
  }
  std::vector<double> g(l.online().param_count());
  l.loss_and_gradient(b, g);
  const double q_err =
      testing_support::max_fd_relative_error(l.online().params(), g, [&] { return l.loss(b); }, 1e-6, 1e-6);

  nilm::Seq2PointNet net({});
  Rng nrng(21);
  net.init_fan_in_uniform(nrng);
  for (auto& v : net.conv1_bias()) v += 0.3;
  for (auto& v : net.conv2_bias()) v += 0.3;
  const std::size_t batch = 6;
  const auto x = testing_support::uniform_vector(batch * 5, 0, 1, 22);
  const auto y = testing_support::uniform_vector(batch, 0, 1, 23);
  nilm::Seq2PointNet::Cache cache;
  auto loss = [&] {
    net.forward(x, batch, cache);
    double s = 0.0;
    for (std::size_t i = 0; i < batch; ++i) s += (cache.output[i] - y[i]) * (cache.output[i] - y[i]);
    return s / batch;
  };
  loss();
  std::vector<double> d(batch);
  for (std::size_t i = 0; i < batch; ++i) d[i] = 2.0 * (cache.output[i] - y[i]) / batch;
  std::vector<double> gn(net.params().size());
  net.backward(cache, d, gn);
  const double cnn_err = testing_support::max_fd_relative_error(net.params(), gn, loss, 1e-6, 1e-6);

  return {policy_ok && q_err <= 1e-4 && cnn_err <= 1e-4,
          fmt("policy %s oracle, Q-net fd rel err %.3g, CNN fd rel err %.3g (tol 1e-4)",
              policy_ok ? "matches" : "differs from", q_err, cnn_err)};
}

struct Sweep {
  experiment::ExperimentConfig cfg;
  metrics::ExperimentResult baseline;
  std::map<std::pair<double, std::uint64_t>, metrics::ExperimentResult> cells;
};

Sweep run_sweep(const fs::path& root) {
  Sweep s;
  s.cfg = experiment::profile_defaults(experiment::Profile::kDesk);
  s.cfg.data_dir = root / "data";
  s.cfg.out_dir = root / "out";
  s.cfg.lambdas = {0.0, 0.3, 1.0};
  s.cfg.seeds = {1, 2, 3};
  experiment::cmd_gen_synthetic(s.cfg);
  experiment::cmd_train_nilm(s.cfg);
  experiment::cmd_sweep(s.cfg);
  const auto eval = s.cfg.out_dir / "eval";
  s.baseline = metrics::parse_results_json(text::read_file(eval / "noop" / "results.json"));
  for (double l : s.cfg.lambdas)
    for (auto seed : s.cfg.seeds)
      s.cells[{l, seed}] = metrics::parse_results_json(
          text::read_file(eval / experiment::cell_name(l, seed) / "results.json"));
  return s;
}

const char* kPulse = "kettle";

Verdict adversary_sanity(const Sweep& s) {
  const auto& r = s.baseline.appliances.at(kPulse);
  return {r.f1 >= 0.8, fmt("unmasked held-out day: %s precision %.3f recall %.3f F1 %.3f (need >= 0.8)", kPulse,
                           r.precision, r.recall, r.f1)};
}

std::vector<double> across_seeds(const Sweep& s, double lambda, const std::function<double(const metrics::ExperimentResult&)>& f) {
  std::vector<double> v;
  for (auto seed : s.cfg.seeds) v.push_back(f(s.cells.at({lambda, seed})));
  return v;
}

std::string list(const std::vector<double>& v, const char* f = "%.3f") {
  std::string out;
  for (double x : v) out += (out.empty() ? "" : ", ") + fmt(f, x);
  return "[" + out + "]";
}

Verdict defense_effectiveness(const Sweep& s) {
  const double base = s.baseline.appliances.at(kPulse).f1;
  if (base <= 0.0) return {false, "unmasked F1 is 0; ratio undefined"};
  const auto ratios = across_seeds(s, 1.0, [&](const auto& r) { return r.appliances.at(kPulse).f1 / base; });
  const double m = median(ratios);
  return {m <= 0.5, fmt("lambda=1 masked/unmasked F1 per seed %s, median %.3f (need <= 0.5)", list(ratios).c_str(), m)};
}

Verdict battery_consistency(const Sweep& s) {
  const auto pct = across_seeds(s, 0.3, [](const auto& r) { return r.cost->remaining_pct; });
  const double m = median(pct);
  return {m >= 80.0, fmt("lambda=0.3 final battery %% of b_max per seed %s, median %.1f (need >= 80)",
                         list(pct, "%.1f").c_str(), m)};
}

Verdict lambda_monotonicity(const Sweep& s) {
  const auto c0 = across_seeds(s, 0.0, [](const auto& r) { return r.cost->compensated_cost; });
  const auto c1 = across_seeds(s, 1.0, [](const auto& r) { return r.cost->compensated_cost; });
  const double m0 = median(c0), m1 = median(c1);
  // costs are sums of 1440 products; 1e-9 GBP absorbs rounding residue only
  return {m0 <= m1 + 1e-9, fmt("median compensated cost lambda=0 %.3g vs lambda=1 %.3g GBP (per seed %s vs %s)", m0,
                               m1, list(c0, "%.3g").c_str(), list(c1, "%.3g").c_str())};
}

Verdict determinism(const Sweep& s, const fs::path& root) {
  // A second, independent run of the whole pipeline for one cell, serial rather than swept.
  auto cfg = s.cfg;
  cfg.data_dir = root / "data";
  cfg.out_dir = root / "out";
  cfg.seed = 1;
  cfg.lambda = 1.0;
  experiment::cmd_gen_synthetic(cfg);
  experiment::cmd_train_nilm(cfg);
  experiment::EvaluateOptions o;
  o.policy = experiment::cmd_train_agent(cfg);
  experiment::cmd_evaluate(cfg, o);
  const auto cell = experiment::cell_name(1.0, 1);
  const auto a = text::read_file(s.cfg.out_dir / "eval" / cell / "results.json");
  const auto b = text::read_file(cfg.out_dir / "eval" / cell / "results.json");
  const auto ba = text::read_file(s.cfg.out_dir / "eval" / "noop" / "results.json");
  experiment::cmd_evaluate(cfg, {});
  const auto bb = text::read_file(cfg.out_dir / "eval" / "noop" / "results.json");
  const bool ok = a == b && ba == bb;
  return {ok, fmt("%s results.json %zu bytes %s, baseline %s", cell.c_str(), a.size(),
                  a == b ? "identical" : "DIFFERENT", ba == bb ? "identical" : "DIFFERENT")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"loadmask acceptance run"};
  fs::path work = fs::temp_directory_path() / "loadmask_acceptance";
  std::vector<int> only;
  app.add_option("--work", work, "scratch directory (wiped)");
  app.add_option("--only", only, "run only these criteria");
  CLI11_PARSE(app, argc, argv);

  std::error_code ec;
  fs::remove_all(work, ec);
  fs::create_directories(work);
  std::clog.setstate(std::ios::failbit);  // silence pipeline progress

  const std::set<int> pick(only.begin(), only.end());
  auto wanted = [&](int n) { return pick.empty() || pick.contains(n); };
  int failures = 0;
  auto report = [&](int n, const char* name, const std::function<Verdict()>& f) {
    if (!wanted(n)) return;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = f();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << " [" << n << "] " << name << ": " << v.detail
              << fmt(" (%.1f s)", secs) << std::endl;
  };

  report(1, "table arithmetic", table_arithmetic);
  report(2, "reward-case oracle", reward_oracle);
  report(3, "environment invariants", environment_invariants);
  report(4, "DQN correctness", dqn_correctness);

  std::optional<Sweep> sweep;
  std::string sweep_error;
  auto need_sweep = [&]() -> const Sweep& {
    if (!sweep && sweep_error.empty()) {
      try {
        sweep = run_sweep(work / "a");
      } catch (const std::exception& e) {
        sweep_error = e.what();
      }
    }
    if (!sweep) throw std::runtime_error("desk sweep failed: " + sweep_error);
    return *sweep;
  };
  report(5, "adversary sanity", [&] { return adversary_sanity(need_sweep()); });
  report(6, "defense effectiveness", [&] { return defense_effectiveness(need_sweep()); });
  report(7, "battery consistency", [&] { return battery_consistency(need_sweep()); });
  report(8, "lambda monotonicity", [&] { return lambda_monotonicity(need_sweep()); });
  report(9, "determinism", [&] { return determinism(need_sweep(), work / "b"); });

  std::cout << (failures ? fmt("%d criteria failed", failures) : std::string("all criteria passed")) << std::endl;
  return failures ? 1 : 0;
}
