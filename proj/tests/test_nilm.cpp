#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>

#include "loadmask/core/error.hpp"
#include "loadmask/nilm/checkpoint.hpp"
#include "loadmask/nilm/seq2point.hpp"
#include "support.hpp"

using namespace loadmask;
using namespace loadmask::nilm;

namespace {

// Direct restatement of the network: zero-padded cross-correlations, ReLU, mean over
// positions, affine read-out. Weight layout [cout][cin][k], flat params w1 b1 w2 b2 wf bf.
double reference_forward(const Seq2PointSpec& s, std::span<const double> p, std::span<const double> x) {
  const std::size_t m = s.sequence_length, k = s.kernel, pad = s.padding;
  const std::size_t c1 = s.conv1_channels, c2 = s.conv2_channels;
  std::size_t o = 0;
  auto take = [&](std::size_t n) {
    auto sp = p.subspan(o, n);
    o += n;
    return sp;
  };
  const auto w1 = take(c1 * k), b1 = take(c1), w2 = take(c2 * c1 * k), b2 = take(c2), wf = take(c2), bf = take(1);
  auto conv = [&](const std::vector<std::vector<double>>& in, std::span<const double> w, std::span<const double> b,
                  std::size_t cout) {
    const std::size_t cin = in.size(), len = in[0].size(), lout = len + 2 * pad + 1 - k;
    std::vector<std::vector<double>> out(cout, std::vector<double>(lout));
    for (std::size_t co = 0; co < cout; ++co)
      for (std::size_t t = 0; t < lout; ++t) {
        double acc = b[co];
        for (std::size_t ci = 0; ci < cin; ++ci)
          for (std::size_t j = 0; j < k; ++j) {
            const long pos = static_cast<long>(t + j) - static_cast<long>(pad);
            if (pos >= 0 && pos < static_cast<long>(len)) acc += w[(co * cin + ci) * k + j] * in[ci][pos];
          }
        out[co][t] = std::max(acc, 0.0);
      }
    return out;
  };
  std::vector<std::vector<double>> in = {std::vector<double>(x.begin(), x.begin() + m)};
  const auto h1 = conv(in, w1, b1, c1);
  const auto h2 = conv(h1, w2, b2, c2);
  double y = bf[0];
  for (std::size_t c = 0; c < c2; ++c)
    y += wf[c] * std::accumulate(h2[c].begin(), h2[c].end(), 0.0) / static_cast<double>(h2[c].size());
  return y;
}

}  // namespace

TEST_CASE("make_windows: examples") {
  const std::vector<double> s = {1, 2, 3, 4, 5};
  const auto w = make_windows(s, 5);
  CHECK(w.count == 5);
  const auto mid = w.window(2);
  CHECK(std::vector<double>(mid.begin(), mid.end()) == std::vector<double>{1, 2, 3, 4, 5});
  const auto first = w.window(0);
  CHECK(std::vector<double>(first.begin(), first.end()) == std::vector<double>{1, 1, 1, 2, 3});
  const auto last = w.window(4);
  CHECK(std::vector<double>(last.begin(), last.end()) == std::vector<double>{3, 4, 5, 5, 5});
  const auto one = make_windows(s, 1);
  for (std::size_t t = 0; t < 5; ++t) CHECK(one.window(t)[0] == s[t]);
  CHECK_THROWS_AS(make_windows(s, 4), ValidationError);
  CHECK_THROWS_AS(make_windows(std::vector<double>{}, 5), ValidationError);
}

TEST_CASE("make_windows: one window per sample, centred on it") {
  const auto s = testing_support::uniform_vector(300, 0, 3, 5);
  const auto w = make_windows(s, 9);
  CHECK(w.count == s.size());
  for (std::size_t t = 0; t < s.size(); ++t) CHECK(w.window(t)[4] == s[t]);
}

TEST_CASE("predict: zero network outputs zero") {
  Seq2PointModel m;
  for (double x : {0.0, 1.0, 5.0}) CHECK(predict(m, std::vector<double>(5, x)) == 0.0);
  CHECK_THROWS_AS(predict(m, std::vector<double>(4, 0.0)), ValidationError);
}

TEST_CASE("forward agrees with a direct restatement of the architecture") {
  for (auto spec : {Seq2PointSpec{}, Seq2PointSpec{7, 2, 3, 3, 1}, Seq2PointSpec{1, 1, 1, 1, 0}}) {
    Seq2PointNet net(spec);
    Rng rng(12);
    net.init_fan_in_uniform(rng);
    const auto x = testing_support::uniform_vector(spec.sequence_length * 3, 0, 1, 13);
    Seq2PointNet::Cache cache;
    net.forward(x, 3, cache);
    REQUIRE(cache.output.size() == 3);
    for (std::size_t b = 0; b < 3; ++b) {
      const auto xb = std::span<const double>(x).subspan(b * spec.sequence_length, spec.sequence_length);
      CHECK(cache.output[b] == doctest::Approx(reference_forward(spec, net.params(), xb)).epsilon(1e-12));
    }
  }
}

TEST_CASE("forward on a hand-set one-channel network") {
  // conv1: kernel [0,0,1,0,0] (identity), conv2: identity, fc: weight 2, bias 0.5
  Seq2PointNet net(Seq2PointSpec{5, 1, 1, 5, 2});
  std::ranges::fill(net.params(), 0.0);
  net.conv1_weight()[2] = 1.0;
  net.conv2_weight()[2] = 1.0;
  net.fc_weight()[0] = 2.0;
  net.fc_bias()[0] = 0.5;
  Seq2PointNet::Cache cache;
  net.forward(std::vector<double>{1, -2, 3, 4, 0}, 1, cache);
  // relu(x) = [1,0,3,4,0], mean 1.6, output 2*1.6 + 0.5
  CHECK(cache.output[0] == doctest::Approx(3.7));
}

TEST_CASE("CNN gradient matches central differences") {
  for (auto backend : {nn::Backend::kSerial, nn::Backend::kParallel}) {
    Seq2PointNet net({}, backend);
    Rng rng(21);
    net.init_fan_in_uniform(rng);
    // shift biases up so few units sit exactly at the ReLU kink
    for (auto& v : net.conv1_bias()) v += 0.3;
    for (auto& v : net.conv2_bias()) v += 0.3;
    const std::size_t batch = 6;
    const auto x = testing_support::uniform_vector(batch * 5, 0, 1, 22);
    const auto y = testing_support::uniform_vector(batch, 0, 1, 23);
    Seq2PointNet::Cache cache;
    auto loss = [&] {
      net.forward(x, batch, cache);
      double s = 0.0;
      for (std::size_t b = 0; b < batch; ++b) s += (cache.output[b] - y[b]) * (cache.output[b] - y[b]);
      return s / batch;
    };
    loss();
    std::vector<double> d(batch);
    for (std::size_t b = 0; b < batch; ++b) d[b] = 2.0 * (cache.output[b] - y[b]) / batch;
    std::vector<double> g(net.params().size());
    net.backward(cache, d, g);
    CHECK(testing_support::max_fd_relative_error(net.params(), g, loss, 1e-6, 1e-6) <= 1e-4);
  }
}

TEST_CASE("classify is strict") {
  CHECK(classify(0.6));
  CHECK_FALSE(classify(0.5));
  CHECK_FALSE(classify(0.0));
}

TEST_CASE("learning-rate schedule") {
  NilmTrainConfig c;
  c.iterations = 101;
  CHECK(c.learning_rate(0) == doctest::Approx(0.005));
  CHECK(c.learning_rate(50) == doctest::Approx(0.003));
  CHECK(c.learning_rate(100) == doctest::Approx(0.001));
}

TEST_CASE("training: constant target is fitted") {
  const auto agg = testing_support::uniform_vector(2000, 0.2, 3.0, 31);
  const std::vector<double> app(agg.size(), 1.3);
  NilmTrainConfig c;
  c.iterations = 1500;
  c.seed = 2;
  const auto r = train_nilm(agg, app, {}, c, "const");
  for (std::size_t t = 0; t < agg.size(); t += 97) {
    const auto w = make_windows(agg, 5);
    CHECK(std::abs(predict(r.model, w.window(t)) - 1.3) <= 0.05 * 1.3);
  }
}

TEST_CASE("training: identity target is learnable and the loss falls") {
  // a pulse train on a base load; appliance = aggregate
  std::vector<double> s(3000);
  Rng rng(4);
  std::uniform_real_distribution<double> u(0, 1);
  for (std::size_t t = 0; t < s.size(); ++t) s[t] = (t / 7) % 5 == 0 ? 2.0 + u(rng) : 0.3 * u(rng);
  const std::vector<double> train(s.begin(), s.begin() + 2400), test(s.begin() + 2400, s.end());
  NilmTrainConfig c;
  c.iterations = 3000;
  c.seed = 3;
  const auto r = train_nilm(train, train, {}, c, "identity");
  const auto pred = predict_series(r.model, test);
  const double mean = std::accumulate(test.begin(), test.end(), 0.0) / test.size();
  double var = 0.0, mse = 0.0;
  for (std::size_t t = 0; t < test.size(); ++t) {
    var += (test[t] - mean) * (test[t] - mean);
    mse += (pred[t] - test[t]) * (pred[t] - test[t]);
  }
  CHECK(mse / test.size() <= 0.01 * var / test.size());

  const std::size_t n = r.losses.size(), k = n / 20;
  const double first = std::accumulate(r.losses.begin(), r.losses.begin() + k, 0.0) / k;
  const double last = std::accumulate(r.losses.end() - k, r.losses.end(), 0.0) / k;
  CHECK(last < first);
}

TEST_CASE("training is deterministic and rejects bad input") {
  const auto agg = testing_support::uniform_vector(500, 0, 3, 41);
  NilmTrainConfig c;
  c.iterations = 50;
  const auto a = train_nilm(agg, agg, {}, c);
  const auto b = train_nilm(agg, agg, {}, c, {}, nn::Backend::kSerial);
  CHECK(std::equal(a.model.net.params().begin(), a.model.net.params().end(), b.model.net.params().begin()));
  CHECK(a.losses == b.losses);
  CHECK_THROWS_AS(train_nilm(agg, std::vector<double>(10, 0.0), {}, c), ValidationError);
}

TEST_CASE("attack and checkpoint round trip") {
  const auto agg = testing_support::uniform_vector(400, 0, 3, 51);
  NilmTrainConfig c;
  c.iterations = 100;
  const auto r = train_nilm(agg, agg, {}, c, "kettle");
  const auto path = std::filesystem::temp_directory_path() / "loadmask_s2p_test.json";
  save_model(path, r.model);
  const auto back = load_model(path);
  CHECK(back.appliance == "kettle");
  CHECK(back.input_scale == r.model.input_scale);
  CHECK(back.output_scale == r.model.output_scale);
  const auto a1 = attack(r.model, agg);
  const auto a2 = attack(back, agg);
  CHECK(a1.predicted_kw == a2.predicted_kw);
  CHECK(a1.predicted_on == a2.predicted_on);
  for (std::size_t t = 0; t < agg.size(); ++t) CHECK(a1.predicted_on[t] == (a1.predicted_kw[t] > 0.5));
  std::filesystem::remove(path);
}
