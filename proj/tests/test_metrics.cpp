#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "loadmask/core/error.hpp"
#include "loadmask/metrics/classification.hpp"
#include "loadmask/metrics/cost.hpp"
#include "loadmask/metrics/report.hpp"
#include "loadmask/metrics/trace_io.hpp"
#include "oracles.hpp"

using namespace loadmask;
using namespace loadmask::metrics;
namespace fs = std::filesystem;

namespace {

env::EpisodeTrace random_trace(unsigned seed, double lambda = 0.5) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> demand(1440);
  for (auto& d : demand) d = u(rng) < 0.03 ? 2.5 : 0.3 * u(rng);
  const auto actions = env::ActionSpace::uniform(21, 5.0);
  std::uniform_int_distribution<std::size_t> pick(0, 20);
  env::BatteryConfig b;
  b.coupling = env::MeterCoupling::kPower;
  reward::RewardConfig rc;
  rc.lambda = lambda;
  reward::RewardEngine e(rc, b);
  return env::run_episode([&](const env::EnvState&) { return actions.level(pick(rng)); }, demand, actions, b, {}, e);
}

// Hand-set attacker that predicts the mean of its input window.
nilm::Seq2PointModel passthrough_model(const std::string& name) {
  nilm::Seq2PointModel m;
  m.appliance = name;
  m.net = nilm::Seq2PointNet({5, 1, 1, 5, 2});
  std::ranges::fill(m.net.params(), 0.0);
  m.net.conv1_weight()[2] = 1.0;
  m.net.conv2_weight()[2] = 1.0;
  m.net.fc_weight()[0] = 1.0;  // window mean
  return m;
}

}  // namespace

TEST_CASE("classification report: examples") {
  CHECK(f1_score(0.500, 0.895) == doctest::Approx(0.642).epsilon(0.001 / 0.642));
  CHECK(std::abs(f1_score(0.500, 0.895) - oracles::f1(0.500, 0.895)) < 1e-15);

  const std::vector<bool> truth = {true, false, true, false, true};
  auto r = classification_report(truth, truth);
  CHECK(r.precision == 1.0);
  CHECK(r.recall == 1.0);
  CHECK(r.f1 == 1.0);

  r = classification_report(std::vector<bool>(5, false), truth);
  CHECK(r.precision == 0.0);
  CHECK(r.recall == 0.0);
  CHECK(r.f1 == 0.0);
  CHECK(r.fn == 3);
  CHECK(r.tn == 2);

  CHECK_THROWS_AS(classification_report({true}, {true, false}), ValidationError);
}

TEST_CASE("classification report: harmonic-mean identity on random labels") {
  std::mt19937_64 rng(2);
  std::bernoulli_distribution coin(0.3);
  for (int n = 0; n < 200; ++n) {
    std::vector<bool> p(100), t(100);
    for (int k = 0; k < 100; ++k) {
      p[k] = coin(rng);
      t[k] = coin(rng);
    }
    const auto r = classification_report(p, t);
    CHECK(r.tp + r.fp + r.fn + r.tn == 100);
    CHECK(std::abs(r.f1 - oracles::f1(r.precision, r.recall)) <= 1e-12);
    CHECK(r.f1 <= std::min(2 * r.precision, 2 * r.recall) + 1e-12);
  }
}

TEST_CASE("compensated cost: printed table rows") {
  CHECK(std::abs(compensated_cost(-0.324, 0.0194 * 1.5, 1.5, 0.304) - 0.123) <= 0.001);
  CHECK(std::abs(compensated_cost(-0.085, 0.657 * 1.5, 1.5, 0.304) - 0.071) <= 0.001);
  CHECK(compensated_cost(-0.2, 1.5, 1.5, 0.304) == -0.2);
  CHECK(std::abs(compensated_cost(-0.324, 0.0194 * 1.5, 1.5, 0.304) -
                 oracles::compensated_cost(-0.324, 0.0194, 1.5, 0.304)) < 1e-12);
}

TEST_CASE("cost report identities on a random trace") {
  const auto trace = random_trace(3);
  env::BatteryConfig b;
  b.coupling = env::MeterCoupling::kPower;
  const auto c = cost_report(trace, {}, b);
  double via_action = 0.0;
  for (const auto& row : trace) via_action += row.applied_action * b.dt_hours * b.eta * row.price;
  CHECK(std::abs(c.battery_cost - via_action) <= 1e-9);
  CHECK(c.battery_final == trace.back().battery_next);
  CHECK(c.remaining_pct == doctest::Approx(100.0 * c.battery_final / b.b_max));
  CHECK(std::abs(c.compensated_cost - (c.battery_cost + (b.b_max - c.battery_final) * 0.304)) <= 1e-12);
}

TEST_CASE("privacy leak summary") {
  std::vector<double> demand(1440, 0.2);
  for (int k = 600; k < 603; ++k) demand[k] = 2.7;
  std::vector<bool> truth(1440, false);
  for (int k = 600; k < 603; ++k) truth[k] = true;
  const std::map<std::string, nilm::Seq2PointModel> models = {{"kettle", passthrough_model("kettle")}};
  const std::map<std::string, std::vector<bool>> labels = {{"kettle", truth}};
  const auto actions = env::ActionSpace::uniform(21, 5.0);
  env::BatteryConfig b;
  b.coupling = env::MeterCoupling::kPower;

  SUBCASE("no-op trace equals the attack on the original load") {
    reward::RewardEngine e({}, b);
    const auto trace = env::run_episode([](const env::EnvState&) { return 0.0; }, demand, actions, b, {}, e);
    const auto s = privacy_leak_summary(trace, models, labels);
    const auto direct = classification_report(nilm::attack(models.at("kettle"), demand).predicted_on, truth);
    CHECK(s.reports.at("kettle").f1 == direct.f1);
    CHECK(s.reports.at("kettle").tp == direct.tp);
    CHECK(direct.recall == 1.0);
    const auto again = privacy_leak_summary(trace, models, labels);
    CHECK(again.reports.at("kettle").f1 == s.reports.at("kettle").f1);
  }
  SUBCASE("all-zero meter gives recall 0") {
    env::EpisodeTrace trace(1440);
    for (auto& row : trace) row.masked = 0.0;
    const auto s = privacy_leak_summary(trace, models, labels);
    CHECK(s.reports.at("kettle").recall == 0.0);
  }
  SUBCASE("missing labels are an error") {
    env::EpisodeTrace trace(1440);
    CHECK_THROWS_AS(privacy_leak_summary(trace, models, {}), ValidationError);
  }
}

TEST_CASE("trace and figure CSVs round-trip bit-exactly") {
  const auto trace = random_trace(4);
  const auto dir = fs::temp_directory_path() / "lm_fig";
  fs::create_directories(dir);
  write_trace_csv(dir / "trace.csv", trace);
  const auto back = read_trace_csv(dir / "trace.csv");
  REQUIRE(back.size() == trace.size());
  for (std::size_t k = 0; k < trace.size(); ++k) {
    CHECK(back[k].minute == trace[k].minute);
    CHECK(back[k].demand == trace[k].demand);
    CHECK(back[k].masked == trace[k].masked);
    CHECK(back[k].delta_b == trace[k].delta_b);
    CHECK(back[k].battery_next == trace[k].battery_next);
    CHECK(back[k].reward.total == trace[k].reward.total);
    CHECK(back[k].reward.case_id == trace[k].reward.case_id);
    CHECK(back[k].done == trace[k].done);
  }

  std::vector<double> true_kw(1440, 0.0);
  true_kw[10] = 2.5;
  nilm::AttackOutput att;
  att.predicted_kw.assign(1440, 0.1);
  att.predicted_kw[10] = 2.2;
  att.predicted_on.assign(1440, false);
  att.predicted_on[10] = true;
  const auto files = export_figures(trace, {{"kettle", {true_kw, att}}}, dir);
  CHECK(files.size() == 2);

  std::vector<std::string> header;
  auto curves = read_numeric_csv(dir / "load_curves.csv", &header);
  CHECK(header == std::vector<std::string>{"minute", "demand_kw", "masked_kw"});
  REQUIRE(curves.at("masked_kw").size() == 1440);
  for (std::size_t k = 0; k < 1440; ++k) {
    CHECK(curves.at("demand_kw")[k] == trace[k].demand);
    CHECK(curves.at("masked_kw")[k] == trace[k].masked);
  }
  auto dis = read_numeric_csv(dir / "disagg_kettle.csv", &header);
  CHECK(header == std::vector<std::string>{"minute", "true_kw", "predicted_kw", "predicted_on"});
  CHECK(dis.at("true_kw").size() == 1440);
  CHECK(dis.at("predicted_kw")[10] == 2.2);
  CHECK(dis.at("predicted_on")[10] == 1.0);
  CHECK(dis.at("predicted_on")[11] == 0.0);
  fs::remove_all(dir);
}

TEST_CASE("export_figures reports an unwritable directory") {
  const auto trace = random_trace(5);
  const auto file = fs::temp_directory_path() / "lm_not_a_dir";
  std::ofstream(file) << "x";
  CHECK_THROWS(export_figures(trace, {}, file / "sub"));
  fs::remove(file);
}

TEST_CASE("results.json: canonical, round-trips, validates") {
  ExperimentResult r;
  r.policy = "pls-dqn";
  r.lambda = 0.3;
  r.seed = 2;
  r.config_hash = "abc";
  r.appliances["kettle"] = classification_report({true, false}, {true, true});
  r.cost = CostReport{-0.1, 0.5, 90.0, 1.35, -0.0544};
  const auto text = to_json_text(r);
  CHECK(text == to_json_text(r));
  const auto back = parse_results_json(text);
  CHECK(back.policy == "pls-dqn");
  CHECK(*back.lambda == 0.3);
  CHECK(back.appliances.at("kettle").recall == 0.5);
  CHECK(back.cost->compensated_cost == -0.0544);
  CHECK(to_json_text(back) == text);

  ExperimentResult base;
  base.policy = "noop";
  base.appliances["kettle"] = r.appliances["kettle"];
  const auto bt = to_json_text(base);
  CHECK(bt.find("\"compensated_cost\": null") != std::string::npos);
  CHECK_FALSE(parse_results_json(bt).cost.has_value());
  CHECK_FALSE(parse_results_json(bt).lambda.has_value());

  CHECK_THROWS_AS(parse_results_json("{}"), ValidationError);
  CHECK_THROWS_AS(parse_results_json(R"({"schema":"other"})"), ValidationError);
}
