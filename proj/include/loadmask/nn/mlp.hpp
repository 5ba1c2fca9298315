#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "loadmask/core/random.hpp"
#include "loadmask/nn/backend.hpp"

namespace loadmask::nn {

/// Activations kept by a forward pass so the matching backward pass can run.
struct MlpCache {
  std::size_t batch = 0;
  std::vector<std::vector<double>> activations;  // [0] = input, back() = output
  std::vector<std::vector<double>> deltas;

  [[nodiscard]] std::span<const double> output() const { return activations.back(); }
};

/// Multilayer perceptron with ReLU hidden layers and a linear output layer.
/// All parameters live in one flat vector: per layer, weights [in][out] then bias [out].
class Mlp {
 public:
  explicit Mlp(std::vector<std::size_t> layer_sizes, Backend backend = Backend::kParallel);

  [[nodiscard]] std::size_t input_dim() const { return sizes_.front(); }
  [[nodiscard]] std::size_t output_dim() const { return sizes_.back(); }
  [[nodiscard]] const std::vector<std::size_t>& layer_sizes() const { return sizes_; }
  [[nodiscard]] std::size_t param_count() const { return params_.size(); }

  [[nodiscard]] std::span<double> params() { return params_; }
  [[nodiscard]] std::span<const double> params() const { return params_; }
  void set_params(std::span<const double> values);

  void set_backend(Backend backend) { backend_ = backend; }
  [[nodiscard]] Backend backend() const { return backend_; }

  /// U(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases.
  void init_fan_in_uniform(Rng& rng);

  void forward(std::span<const double> x, std::size_t batch, MlpCache& cache) const;

  /// Convenience forward without keeping a cache around.
  [[nodiscard]] std::vector<double> predict(std::span<const double> x, std::size_t batch) const;

  /// Gradient of sum(d_output * output) w.r.t. params, written into `grad` (overwritten).
  void backward(MlpCache& cache, std::span<const double> d_output, std::span<double> grad) const;

 private:
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> weight_offsets_;
  std::vector<std::size_t> bias_offsets_;
  std::vector<double> params_;
  Backend backend_;
};

}  // namespace loadmask::nn
