#pragma once

#include <cstddef>
#include <span>

// Fully connected layer kernels. Weights are stored input-major: w[i * out + o].
// Activations are row-major [batch][features].
//
// `serial` is the reference implementation. `parallel` splits the same loops across
// OpenMP threads without changing the per-element summation order, so both produce
// bit-identical results.
namespace loadmask::kernels {

struct DenseShape {
  std::size_t batch;
  std::size_t in;
  std::size_t out;
};

namespace serial {

void dense_forward(std::span<const double> x, std::span<const double> w, std::span<const double> bias,
                   std::span<double> y, DenseShape shape);

// Overwrites dw and db. dx may be empty (first layer).
void dense_backward(std::span<const double> x, std::span<const double> w, std::span<const double> dy,
                    std::span<double> dx, std::span<double> dw, std::span<double> db, DenseShape shape);

}  // namespace serial

namespace parallel {

void dense_forward(std::span<const double> x, std::span<const double> w, std::span<const double> bias,
                   std::span<double> y, DenseShape shape);

void dense_backward(std::span<const double> x, std::span<const double> w, std::span<const double> dy,
                    std::span<double> dx, std::span<double> dw, std::span<double> db, DenseShape shape);

}  // namespace parallel

void relu_inplace(std::span<double> v);
// dv *= (activation > 0)
void relu_backward_inplace(std::span<const double> activation, std::span<double> dv);

}  // namespace loadmask::kernels
