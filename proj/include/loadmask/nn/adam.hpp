#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace loadmask::nn {

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adaptive moment estimation with bias correction.
class Adam {
 public:
  explicit Adam(std::size_t param_count, AdamOptions options = {});

  void step(std::span<double> params, std::span<const double> grad, double learning_rate);

  [[nodiscard]] std::size_t steps_taken() const { return t_; }

 private:
  AdamOptions opt_;
  std::vector<double> m_;
  std::vector<double> v_;
  std::size_t t_ = 0;
};

}  // namespace loadmask::nn
