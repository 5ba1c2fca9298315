#pragma once

#include <cstddef>
#include <span>

// Stride-1 zero-padded 1-D convolution (cross-correlation, as in common DL frameworks).
//   x: [batch][in_channels][length]
//   w: [out_channels][in_channels][kernel]
//   y: [batch][out_channels][out_length], out_length = length + 2*padding - kernel + 1
namespace loadmask::kernels {

struct Conv1dShape {
  std::size_t batch;
  std::size_t in_channels;
  std::size_t out_channels;
  std::size_t length;
  std::size_t kernel;
  std::size_t padding;

  [[nodiscard]] std::size_t out_length() const { return length + 2 * padding + 1 - kernel; }
};

namespace serial {

void conv1d_forward(std::span<const double> x, std::span<const double> w, std::span<const double> bias,
                    std::span<double> y, Conv1dShape shape);

// Overwrites dw and db; dx may be empty.
void conv1d_backward(std::span<const double> x, std::span<const double> w, std::span<const double> dy,
                     std::span<double> dx, std::span<double> dw, std::span<double> db, Conv1dShape shape);

}  // namespace serial

namespace parallel {

void conv1d_forward(std::span<const double> x, std::span<const double> w, std::span<const double> bias,
                    std::span<double> y, Conv1dShape shape);

void conv1d_backward(std::span<const double> x, std::span<const double> w, std::span<const double> dy,
                     std::span<double> dx, std::span<double> dw, std::span<double> db, Conv1dShape shape);

}  // namespace parallel

}  // namespace loadmask::kernels
