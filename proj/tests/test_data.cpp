#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include "loadmask/core/error.hpp"
#include "loadmask/data/channel_series.hpp"
#include "loadmask/data/synthetic.hpp"

using namespace loadmask;
using namespace loadmask::data;
namespace fs = std::filesystem;

namespace {

fs::path write_tmp(const std::string& name, const std::string& body) {
  const auto p = fs::temp_directory_path() / name;
  std::ofstream(p) << body;
  return p;
}

ChannelSeries channel(std::string name, std::int64_t t0, std::int64_t step, const std::vector<double>& kw) {
  ChannelSeries c{std::move(name), {}, kw};
  for (std::size_t k = 0; k < kw.size(); ++k) c.timestamps.push_back(t0 + static_cast<std::int64_t>(k) * step);
  return c;
}

constexpr std::int64_t kDay0 = 1368921600;  // 2013-05-19 00:00

}  // namespace

TEST_CASE("load_channel_csv: watts to kW, sorting, duplicate collapse") {
  SUBCASE("unit conversion") {
    const auto c = load_channel_csv(write_tmp("lm_a.csv", "100,2000\n106,0\n"), "kettle");
    CHECK(c.power_kw == std::vector<double>{2.0, 0.0});
    CHECK(c.timestamps == std::vector<std::int64_t>{100, 106});
  }
  SUBCASE("unsorted input, whitespace separated, header") {
    const auto c = load_channel_csv(write_tmp("lm_b.csv", "timestamp power\n112 300\n100 100\n106 200\n"), "x");
    CHECK(c.timestamps == std::vector<std::int64_t>{100, 106, 112});
    CHECK(c.power_kw[2] == doctest::Approx(0.3));
  }
  SUBCASE("duplicate timestamps average") {
    const auto c = load_channel_csv(write_tmp("lm_c.csv", "100,1000\n100,3000\n"), "x");
    REQUIRE(c.size() == 1);
    CHECK(c.power_kw[0] == doctest::Approx(2.0));
  }
  SUBCASE("malformed rows name their line") {
    try {
      load_channel_csv(write_tmp("lm_d.csv", "100,1000\n106,abc\n112,5\n"), "x");
      FAIL("expected an error");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("2") != std::string::npos);
    }
  }
  SUBCASE("empty file") {
    CHECK_THROWS_AS(load_channel_csv(write_tmp("lm_e.csv", ""), "x"), ValidationError);
  }
}

TEST_CASE("resample_1min: examples") {
  SUBCASE("constant within a minute") {
    const auto r = resample_1min(channel("k", kDay0, 6, std::vector<double>(10, 1.2)));
    REQUIRE(r.series.size() == 1);
    CHECK(r.series.power_kw[0] == doctest::Approx(1.2));
  }
  SUBCASE("bucket mean") {
    std::vector<double> v(5, 0.6);
    v.insert(v.end(), 5, 1.8);
    const auto r = resample_1min(channel("k", kDay0, 6, v));
    CHECK(r.series.power_kw[0] == doctest::Approx(1.2));
  }
  SUBCASE("short gap forward-filled, long gap zero-filled with a warning") {
    ChannelSeries c{"k", {kDay0, kDay0 + 4 * 60, kDay0 + 20 * 60}, {1.0, 2.0, 3.0}};
    const auto r = resample_1min(c, 5);
    REQUIRE(r.series.size() == 21);
    CHECK(r.series.power_kw[1] == 1.0);
    CHECK(r.series.power_kw[3] == 1.0);
    CHECK(r.series.power_kw[4] == 2.0);
    CHECK(r.series.power_kw[5] == 0.0);
    CHECK(r.series.power_kw[19] == 0.0);
    CHECK(r.warnings.size() == 1);
  }
}

TEST_CASE("resampling preserves energy without gaps") {
  std::vector<double> v(14400);  // one day at 6 s
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 3);
  for (auto& x : v) x = u(rng);
  const auto raw = channel("a", kDay0, 6, v);
  const auto r = resample_1min(raw);
  const double before = std::accumulate(v.begin(), v.end(), 0.0) * (6.0 / 3600.0);
  const double after = std::accumulate(r.series.power_kw.begin(), r.series.power_kw.end(), 0.0) / 60.0;
  CHECK(std::abs(before - after) <= 0.01 * before);
}

TEST_CASE("make_day: coverage and labels") {
  std::vector<double> agg(2 * 1440, 0.3), kettle(2 * 1440, 0.0);
  kettle[1440 + 100] = 2.5;
  agg[1440 + 100] = 2.8;
  Household hh{channel("aggregate", kDay0 - 600 * 60, 60, agg), {}};
  hh.appliances["kettle"] = channel("kettle", kDay0 - 600 * 60, 60, kettle);
  const auto day = make_day(hh, std::chrono::year_month_day{std::chrono::year{2013}, std::chrono::May, std::chrono::day{19}});
  CHECK(day.demand.size() == 1440);
  CHECK(day.appliance_kw.at("kettle").size() == 1440);
  CHECK(std::count(day.truth_on.at("kettle").begin(), day.truth_on.at("kettle").end(), true) == 1);
  CHECK(on_labels({0.5, 0.51}) == std::vector<bool>{false, true});

  hh.appliances["toaster"] = channel("toaster", kDay0 + 3600, 60, std::vector<double>(100, 0.0));
  try {
    make_day(hh, kDay0);
    FAIL("expected an error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("toaster") != std::string::npos);
  }
}

TEST_CASE("align_household trims channels to their common grid") {
  const auto agg = channel("aggregate", kDay0, 6, std::vector<double>(600, 0.4));
  const auto app = channel("kettle", kDay0 + 120, 6, std::vector<double>(300, 0.1));
  const auto hh = align_household(agg, {app});
  CHECK(hh.aggregate.timestamps.front() == kDay0 + 120);
  CHECK(hh.aggregate.size() == hh.appliances.at("kettle").size());
  hh.validate_alignment();
}

TEST_CASE("generate_synthetic: examples") {
  SUBCASE("no appliances, no noise: aggregate is the base load") {
    SyntheticSpec s;
    s.noise_sigma_kw = 0.0;
    const auto hh = generate_synthetic(s, 2);
    CHECK(hh.aggregate.size() == 2 * 1440);
    for (double v : hh.aggregate.power_kw) CHECK(v == s.base_load_kw);
  }
  SUBCASE("kettle pulses: exactly 6 minutes a day above base + 2 kW") {
    SyntheticSpec s;
    s.noise_sigma_kw = 0.0;
    s.appliances = {{"kettle", 2.5, 3, 2, 0, 1440}};
    const int days = 5;
    const auto hh = generate_synthetic(s, days);
    for (int d = 0; d < days; ++d) {
      int above = 0;
      for (int k = 0; k < 1440; ++k) above += hh.aggregate.power_kw[d * 1440 + k] > s.base_load_kw + 2.0;
      CHECK(above == 6);
    }
  }
  SUBCASE("same seed, same series; different seed, different series") {
    SyntheticSpec s;
    s.appliances = {{"kettle", 2.5, 3, 2, 360, 1380}, {"toaster", 1.2, 2, 1, 360, 1380}};
    s.seed = 5;
    const auto a = generate_synthetic(s, 3), b = generate_synthetic(s, 3);
    CHECK(a.aggregate.power_kw == b.aggregate.power_kw);
    s.seed = 6;
    CHECK(generate_synthetic(s, 3).aggregate.power_kw != a.aggregate.power_kw);
  }
  SUBCASE("infeasible pulses are rejected") {
    SyntheticSpec s;
    s.appliances = {{"kettle", 2.5, 30, 1, 100, 120}};
    CHECK_THROWS_AS(s.validate(), ValidationError);
    s.appliances = {{"kettle", -1.0, 3, 1, 0, 1440}};
    CHECK_THROWS_AS(s.validate(), ValidationError);
    s.appliances = {{"kettle", 1.0, 0, 1, 0, 1440}};
    CHECK_THROWS_AS(s.validate(), ValidationError);
  }
}

TEST_CASE("synthetic residual is base load plus bounded noise") {
  SyntheticSpec s;
  s.appliances = {{"kettle", 2.5, 3, 2, 360, 1380}, {"toaster", 1.2, 2, 1, 360, 1380}};
  const auto hh = generate_synthetic(s, 10);
  std::size_t within = 0;
  for (std::size_t k = 0; k < hh.aggregate.size(); ++k) {
    double resid = hh.aggregate.power_kw[k];
    for (const auto& [_, ch] : hh.appliances) resid -= ch.power_kw[k];
    within += std::abs(resid - s.base_load_kw) <= 4.0 * s.noise_sigma_kw;
  }
  CHECK(static_cast<double>(within) / hh.aggregate.size() >= 0.999);
  CHECK(hh.dominance_fraction() >= 0.99);
}

TEST_CASE("wide CSV round trip") {
  SyntheticSpec s;
  s.appliances = {{"kettle", 2.5, 3, 2, 360, 1380}};
  const auto hh = generate_synthetic(s, 1);
  const auto p = fs::temp_directory_path() / "lm_wide.csv";
  write_wide_csv(p, hh);
  std::ifstream in(p);
  std::string header;
  std::getline(in, header);
  CHECK(header == "timestamp,aggregate_w,kettle_w");
  const auto back = load_wide_csv(p);
  CHECK(back.aggregate.timestamps == hh.aggregate.timestamps);
  for (std::size_t k = 0; k < hh.aggregate.size(); ++k) {
    CHECK(back.aggregate.power_kw[k] == doctest::Approx(hh.aggregate.power_kw[k]).epsilon(1e-12));
    CHECK(back.appliances.at("kettle").power_kw[k] ==
          doctest::Approx(hh.appliances.at("kettle").power_kw[k]).epsilon(1e-12));
  }
  fs::remove(p);
}
