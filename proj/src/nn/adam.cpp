#include "loadmask/nn/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace loadmask::nn {

Adam::Adam(std::size_t param_count, AdamOptions options)
    : opt_(options), m_(param_count, 0.0), v_(param_count, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grad, double learning_rate) {
  if (params.size() != m_.size() || grad.size() != m_.size())
    throw std::invalid_argument("Adam::step: size mismatch");
  ++t_;
  const double c1 = 1.0 - std::pow(opt_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(opt_.beta2, static_cast<double>(t_));
  for (std::size_t k = 0; k < params.size(); ++k) {
    m_[k] = opt_.beta1 * m_[k] + (1.0 - opt_.beta1) * grad[k];
    v_[k] = opt_.beta2 * v_[k] + (1.0 - opt_.beta2) * grad[k] * grad[k];
    const double m_hat = m_[k] / c1;
    const double v_hat = v_[k] / c2;
    params[k] -= learning_rate * m_hat / (std::sqrt(v_hat) + opt_.epsilon);
  }
}

}  // namespace loadmask::nn
