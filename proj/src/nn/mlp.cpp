#include "loadmask/nn/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "loadmask/kernels/dense.hpp"

namespace loadmask::nn {

Mlp::Mlp(std::vector<std::size_t> layer_sizes, Backend backend) : sizes_(std::move(layer_sizes)), backend_(backend) {
  if (sizes_.size() < 2) throw std::invalid_argument("Mlp needs at least input and output sizes");
  if (std::ranges::any_of(sizes_, [](std::size_t n) { return n == 0; }))
    throw std::invalid_argument("Mlp layer sizes must be positive");
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    weight_offsets_.push_back(offset);
    offset += sizes_[l] * sizes_[l + 1];
    bias_offsets_.push_back(offset);
    offset += sizes_[l + 1];
  }
  params_.assign(offset, 0.0);
}

void Mlp::set_params(std::span<const double> values) {
  if (values.size() != params_.size()) throw std::invalid_argument("Mlp::set_params: size mismatch");
  std::ranges::copy(values, params_.begin());
}

void Mlp::init_fan_in_uniform(Rng& rng) {
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(sizes_[l]));
    std::uniform_real_distribution<double> dist(-bound, bound);
    const std::size_t end = bias_offsets_[l] + sizes_[l + 1];
    for (std::size_t k = weight_offsets_[l]; k < end; ++k) params_[k] = dist(rng);
  }
}

void Mlp::forward(std::span<const double> x, std::size_t batch, MlpCache& cache) const {
  if (x.size() != batch * input_dim()) throw std::invalid_argument("Mlp::forward: input size mismatch");
  const std::size_t layers = sizes_.size();
  cache.batch = batch;
  cache.activations.resize(layers);
  cache.activations[0].assign(x.begin(), x.end());
  const std::span<const double> p(params_);
  for (std::size_t l = 0; l + 1 < layers; ++l) {
    const kernels::DenseShape shape{batch, sizes_[l], sizes_[l + 1]};
    auto& out = cache.activations[l + 1];
    out.resize(batch * sizes_[l + 1]);
    const auto w = p.subspan(weight_offsets_[l], shape.in * shape.out);
    const auto b = p.subspan(bias_offsets_[l], shape.out);
    if (backend_ == Backend::kSerial)
      kernels::serial::dense_forward(cache.activations[l], w, b, out, shape);
    else
      kernels::parallel::dense_forward(cache.activations[l], w, b, out, shape);
    if (l + 2 < layers) kernels::relu_inplace(out);
  }
}

std::vector<double> Mlp::predict(std::span<const double> x, std::size_t batch) const {
  MlpCache cache;
  forward(x, batch, cache);
  return std::move(cache.activations.back());
}

void Mlp::backward(MlpCache& cache, std::span<const double> d_output, std::span<double> grad) const {
  const std::size_t layers = sizes_.size();
  const std::size_t batch = cache.batch;
  if (grad.size() != params_.size()) throw std::invalid_argument("Mlp::backward: gradient size mismatch");
  if (d_output.size() != batch * output_dim()) throw std::invalid_argument("Mlp::backward: d_output size mismatch");
  cache.deltas.resize(layers);
  cache.deltas[layers - 1].assign(d_output.begin(), d_output.end());
  const std::span<const double> p(params_);
  for (std::size_t l = layers - 1; l-- > 0;) {
    const kernels::DenseShape shape{batch, sizes_[l], sizes_[l + 1]};
    std::span<double> dx;
    if (l > 0) {
      cache.deltas[l].resize(batch * sizes_[l]);
      dx = cache.deltas[l];
    }
    const auto w = p.subspan(weight_offsets_[l], shape.in * shape.out);
    auto dw = grad.subspan(weight_offsets_[l], shape.in * shape.out);
    auto db = grad.subspan(bias_offsets_[l], shape.out);
    if (backend_ == Backend::kSerial)
      kernels::serial::dense_backward(cache.activations[l], w, cache.deltas[l + 1], dx, dw, db, shape);
    else
      kernels::parallel::dense_backward(cache.activations[l], w, cache.deltas[l + 1], dx, dw, db, shape);
    if (l > 0) kernels::relu_backward_inplace(cache.activations[l], dx);
  }
}

}  // namespace loadmask::nn
