#include "loadmask/nilm/seq2point.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>

#include "loadmask/core/error.hpp"
#include "loadmask/kernels/conv1d.hpp"
#include "loadmask/kernels/dense.hpp"
#include "loadmask/nn/adam.hpp"

namespace loadmask::nilm {
namespace {

kernels::Conv1dShape conv1_shape(const Seq2PointSpec& s, std::size_t batch) {
  return {batch, 1, s.conv1_channels, s.sequence_length, s.kernel, s.padding};
}

kernels::Conv1dShape conv2_shape(const Seq2PointSpec& s, std::size_t batch) {
  return {batch, s.conv1_channels, s.conv2_channels, s.conv1_length(), s.kernel, s.padding};
}

}  // namespace

void Seq2PointSpec::validate() const {
  if (sequence_length == 0 || sequence_length % 2 == 0)
    throw ValidationError("seq2point: sequence_length must be odd");
  if (conv1_channels == 0 || conv2_channels == 0 || kernel == 0)
    throw ValidationError("seq2point: channel counts and kernel must be >= 1");
  if (sequence_length + 2 * padding < kernel || conv1_length() + 2 * padding < kernel)
    throw ValidationError("seq2point: kernel larger than padded input");
}

std::size_t Seq2PointSpec::param_count() const {
  return conv1_channels * kernel + conv1_channels + conv2_channels * conv1_channels * kernel + conv2_channels +
         conv2_channels + 1;
}

void NilmTrainConfig::validate() const {
  if (iterations == 0) throw ValidationError("nilm: iterations must be >= 1");
  if (batch_size == 0) throw ValidationError("nilm: batch_size must be >= 1");
  if (!(lr_initial > 0.0) || !(lr_final > 0.0)) throw ValidationError("nilm: learning rates must be > 0");
}

double NilmTrainConfig::learning_rate(std::size_t iteration) const {
  if (iterations <= 1) return lr_initial;
  const double frac = static_cast<double>(iteration) / static_cast<double>(iterations - 1);
  return lr_initial + std::min(frac, 1.0) * (lr_final - lr_initial);
}

WindowSet make_windows(std::span<const double> series, std::size_t m) {
  if (m == 0 || m % 2 == 0) throw ValidationError("make_windows: m must be odd");
  if (series.empty()) throw ValidationError("make_windows: empty series");
  const auto n = static_cast<std::int64_t>(series.size());
  const auto half = static_cast<std::int64_t>(m / 2);
  WindowSet w{m, series.size(), std::vector<double>(series.size() * m)};
  for (std::int64_t t = 0; t < n; ++t)
    for (std::int64_t k = -half; k <= half; ++k)
      w.data[static_cast<std::size_t>(t) * m + static_cast<std::size_t>(k + half)] =
          series[static_cast<std::size_t>(std::clamp<std::int64_t>(t + k, 0, n - 1))];
  return w;
}

Seq2PointNet::Seq2PointNet(Seq2PointSpec spec, nn::Backend backend) : spec_(spec), backend_(backend) {
  spec_.validate();
  const auto& s = spec_;
  off_.w1 = 0;
  off_.b1 = off_.w1 + s.conv1_channels * s.kernel;
  off_.w2 = off_.b1 + s.conv1_channels;
  off_.b2 = off_.w2 + s.conv2_channels * s.conv1_channels * s.kernel;
  off_.wf = off_.b2 + s.conv2_channels;
  off_.bf = off_.wf + s.conv2_channels;
  params_.assign(off_.bf + 1, 0.0);
}

void Seq2PointNet::set_params(std::span<const double> values) {
  if (values.size() != params_.size()) throw ValidationError("seq2point: parameter count mismatch");
  std::ranges::copy(values, params_.begin());
}

std::span<double> Seq2PointNet::conv1_weight() { return std::span(params_).subspan(off_.w1, off_.b1 - off_.w1); }
std::span<double> Seq2PointNet::conv1_bias() { return std::span(params_).subspan(off_.b1, off_.w2 - off_.b1); }
std::span<double> Seq2PointNet::conv2_weight() { return std::span(params_).subspan(off_.w2, off_.b2 - off_.w2); }
std::span<double> Seq2PointNet::conv2_bias() { return std::span(params_).subspan(off_.b2, off_.wf - off_.b2); }
std::span<double> Seq2PointNet::fc_weight() { return std::span(params_).subspan(off_.wf, off_.bf - off_.wf); }
std::span<double> Seq2PointNet::fc_bias() { return std::span(params_).subspan(off_.bf, 1); }

void Seq2PointNet::init_fan_in_uniform(Rng& rng) {
  const auto& s = spec_;
  auto fill = [&](std::span<double> block, std::size_t fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (double& v : block) v = dist(rng);
  };
  fill(conv1_weight(), s.kernel);
  fill(conv1_bias(), s.kernel);
  fill(conv2_weight(), s.conv1_channels * s.kernel);
  fill(conv2_bias(), s.conv1_channels * s.kernel);
  fill(fc_weight(), s.conv2_channels);
  fill(fc_bias(), s.conv2_channels);
}

void Seq2PointNet::forward(std::span<const double> x, std::size_t batch, Cache& cache) const {
  const auto& s = spec_;
  if (x.size() != batch * s.sequence_length) throw ValidationError("seq2point: input size mismatch");
  const std::span<const double> p(params_);
  const auto c1 = conv1_shape(s, batch);
  const auto c2 = conv2_shape(s, batch);
  const std::size_t l2 = c2.out_length();
  cache.batch = batch;
  cache.input.assign(x.begin(), x.end());
  cache.h1.resize(batch * s.conv1_channels * c1.out_length());
  cache.h2.resize(batch * s.conv2_channels * l2);
  cache.pooled.resize(batch * s.conv2_channels);
  cache.output.resize(batch);

  const auto w1 = p.subspan(off_.w1, off_.b1 - off_.w1);
  const auto b1 = p.subspan(off_.b1, s.conv1_channels);
  const auto w2 = p.subspan(off_.w2, off_.b2 - off_.w2);
  const auto b2 = p.subspan(off_.b2, s.conv2_channels);
  if (backend_ == nn::Backend::kSerial) {
    kernels::serial::conv1d_forward(cache.input, w1, b1, cache.h1, c1);
    kernels::relu_inplace(cache.h1);
    kernels::serial::conv1d_forward(cache.h1, w2, b2, cache.h2, c2);
  } else {
    kernels::parallel::conv1d_forward(cache.input, w1, b1, cache.h1, c1);
    kernels::relu_inplace(cache.h1);
    kernels::parallel::conv1d_forward(cache.h1, w2, b2, cache.h2, c2);
  }
  kernels::relu_inplace(cache.h2);

  const double inv_len = 1.0 / static_cast<double>(l2);
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t c = 0; c < s.conv2_channels; ++c) {
      const double* plane = cache.h2.data() + (b * s.conv2_channels + c) * l2;
      double sum = 0.0;
      for (std::size_t t = 0; t < l2; ++t) sum += plane[t];
      cache.pooled[b * s.conv2_channels + c] = sum * inv_len;
    }
  const kernels::DenseShape fc{batch, s.conv2_channels, 1};
  kernels::serial::dense_forward(cache.pooled, p.subspan(off_.wf, s.conv2_channels), p.subspan(off_.bf, 1),
                                 cache.output, fc);
}

void Seq2PointNet::backward(Cache& cache, std::span<const double> d_output, std::span<double> grad) const {
  const auto& s = spec_;
  const std::size_t batch = cache.batch;
  if (d_output.size() != batch) throw ValidationError("seq2point: d_output size mismatch");
  if (grad.size() != params_.size()) throw ValidationError("seq2point: gradient size mismatch");
  const std::span<const double> p(params_);
  const auto c1 = conv1_shape(s, batch);
  const auto c2 = conv2_shape(s, batch);
  const std::size_t l2 = c2.out_length();

  cache.d_pooled.resize(batch * s.conv2_channels);
  const kernels::DenseShape fc{batch, s.conv2_channels, 1};
  kernels::serial::dense_backward(cache.pooled, p.subspan(off_.wf, s.conv2_channels), d_output, cache.d_pooled,
                                  grad.subspan(off_.wf, s.conv2_channels), grad.subspan(off_.bf, 1), fc);

  const double inv_len = 1.0 / static_cast<double>(l2);
  cache.d_h2.resize(cache.h2.size());
  for (std::size_t k = 0; k < cache.d_h2.size(); ++k) cache.d_h2[k] = cache.d_pooled[k / l2] * inv_len;
  kernels::relu_backward_inplace(cache.h2, cache.d_h2);

  cache.d_h1.resize(cache.h1.size());
  const auto w1 = p.subspan(off_.w1, off_.b1 - off_.w1);
  const auto w2 = p.subspan(off_.w2, off_.b2 - off_.w2);
  auto gw1 = grad.subspan(off_.w1, off_.b1 - off_.w1);
  auto gb1 = grad.subspan(off_.b1, s.conv1_channels);
  auto gw2 = grad.subspan(off_.w2, off_.b2 - off_.w2);
  auto gb2 = grad.subspan(off_.b2, s.conv2_channels);
  if (backend_ == nn::Backend::kSerial) {
    kernels::serial::conv1d_backward(cache.h1, w2, cache.d_h2, cache.d_h1, gw2, gb2, c2);
    kernels::relu_backward_inplace(cache.h1, cache.d_h1);
    kernels::serial::conv1d_backward(cache.input, w1, cache.d_h1, {}, gw1, gb1, c1);
  } else {
    kernels::parallel::conv1d_backward(cache.h1, w2, cache.d_h2, cache.d_h1, gw2, gb2, c2);
    kernels::relu_backward_inplace(cache.h1, cache.d_h1);
    kernels::parallel::conv1d_backward(cache.input, w1, cache.d_h1, {}, gw1, gb1, c1);
  }
}

double predict(const Seq2PointModel& model, std::span<const double> window) {
  const std::size_t m = model.net.spec().sequence_length;
  if (window.size() != m)
    throw ValidationError("predict: window length " + std::to_string(window.size()) + " != " + std::to_string(m));
  std::vector<double> x(window.begin(), window.end());
  for (double& v : x) v /= model.input_scale;
  Seq2PointNet::Cache cache;
  model.net.forward(x, 1, cache);
  return cache.output[0] * model.output_scale;
}

std::vector<double> predict_series(const Seq2PointModel& model, std::span<const double> series) {
  WindowSet w = make_windows(series, model.net.spec().sequence_length);
  for (double& v : w.data) v /= model.input_scale;
  // Fixed-size chunks keep memory flat; each chunk is an independent batched forward.
  constexpr std::size_t kChunk = 256;
  std::vector<double> out(w.count);
  const auto chunks = static_cast<std::int64_t>((w.count + kChunk - 1) / kChunk);
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < chunks; ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kChunk;
    const std::size_t n = std::min(kChunk, w.count - begin);
    Seq2PointNet::Cache cache;
    model.net.forward(std::span<const double>(w.data).subspan(begin * w.m, n * w.m), n, cache);
    for (std::size_t k = 0; k < n; ++k) out[begin + k] = cache.output[k] * model.output_scale;
  }
  return out;
}

bool classify(double prediction_kw, double threshold_kw) { return prediction_kw > threshold_kw; }

AttackOutput attack(const Seq2PointModel& model, std::span<const double> series) {
  AttackOutput out;
  out.predicted_kw = predict_series(model, series);
  out.predicted_on.reserve(out.predicted_kw.size());
  for (double p : out.predicted_kw) out.predicted_on.push_back(classify(p, model.threshold));
  return out;
}

NilmTrainResult train_nilm(std::span<const double> aggregate, std::span<const double> appliance,
                           const Seq2PointSpec& spec, const NilmTrainConfig& cfg, std::string appliance_name,
                           nn::Backend backend) {
  spec.validate();
  cfg.validate();
  if (aggregate.size() != appliance.size() || aggregate.empty())
    throw ValidationError("train_nilm: aggregate and appliance series must be non-empty and equal length");

  NilmTrainResult result{Seq2PointModel{std::move(appliance_name), Seq2PointNet(spec, backend)}, {}};
  Seq2PointModel& model = result.model;
  const double agg_max = *std::ranges::max_element(aggregate);
  const double app_max = *std::ranges::max_element(appliance);
  model.input_scale = agg_max > 0.0 ? agg_max : 1.0;
  model.output_scale = app_max > 0.0 ? app_max : 1.0;
  model.seed = cfg.seed;
  model.iterations = cfg.iterations;

  Rng init_rng = make_stream(cfg.seed, streams::kNilmInit);
  Rng batch_rng = make_stream(cfg.seed, streams::kNilmBatch);
  model.net.init_fan_in_uniform(init_rng);

  WindowSet windows = make_windows(aggregate, spec.sequence_length);
  for (double& v : windows.data) v /= model.input_scale;
  std::vector<double> targets(appliance.begin(), appliance.end());
  for (double& v : targets) v /= model.output_scale;

  const std::size_t m = spec.sequence_length;
  const std::size_t bs = cfg.batch_size;
  std::uniform_int_distribution<std::size_t> pick(0, windows.count - 1);
  nn::Adam adam(model.net.params().size());
  Seq2PointNet::Cache cache;
  std::vector<double> x(bs * m), y(bs), d_out(bs), grad(model.net.params().size());
  result.losses.reserve(cfg.iterations);

  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    for (std::size_t b = 0; b < bs; ++b) {
      const std::size_t t = pick(batch_rng);
      std::ranges::copy(windows.window(t), x.begin() + static_cast<std::ptrdiff_t>(b * m));
      y[b] = targets[t];
    }
    model.net.forward(x, bs, cache);
    double loss = 0.0;
    for (std::size_t b = 0; b < bs; ++b) {
      const double err = cache.output[b] - y[b];
      loss += err * err;
      d_out[b] = 2.0 * err / static_cast<double>(bs);
    }
    loss /= static_cast<double>(bs);
    if (!std::isfinite(loss)) {
      std::ostringstream msg;
      msg << "NILM loss is not finite (" << loss << ") at iteration " << it;
      throw NumericalError(msg.str());
    }
    result.losses.push_back(loss);
    model.net.backward(cache, d_out, grad);
    adam.step(model.net.params(), grad, cfg.learning_rate(it));
  }
  return result;
}

}  // namespace loadmask::nilm
