#include "loadmask/kernels/dense.hpp"

#include <cassert>
#include <cstdint>

namespace loadmask::kernels {
namespace {

// Below this many multiply-adds the thread fork costs more than it saves.
constexpr std::size_t kParallelWork = 1u << 15;

inline void forward_row(const double* __restrict x, const double* __restrict w, const double* __restrict bias,
                        double* __restrict y, std::size_t in,
                        std::size_t out) {
  for (std::size_t o = 0; o < out; ++o) y[o] = bias[o];
  for (std::size_t i = 0; i < in; ++i) {
    const double xi = x[i];
    const double* wrow = w + i * out;
    for (std::size_t o = 0; o < out; ++o) y[o] += xi * wrow[o];
  }
}

inline void grad_input_row(const double* __restrict dy, const double* __restrict w, double* __restrict dx, std::size_t in, std::size_t out) {
  for (std::size_t i = 0; i < in; ++i) {
    const double* wrow = w + i * out;
    // Four interleaved partial sums, combined in a fixed order.
    double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
    std::size_t o = 0;
    for (; o + 4 <= out; o += 4) {
      a0 += dy[o] * wrow[o];
      a1 += dy[o + 1] * wrow[o + 1];
      a2 += dy[o + 2] * wrow[o + 2];
      a3 += dy[o + 3] * wrow[o + 3];
    }
    for (; o < out; ++o) a0 += dy[o] * wrow[o];
    dx[i] = (a0 + a1) + (a2 + a3);
  }
}

inline void grad_weight_row(const double* __restrict x, const double* __restrict dy, double* __restrict dw_row, std::size_t i, DenseShape s) {
  for (std::size_t o = 0; o < s.out; ++o) dw_row[o] = 0.0;
  for (std::size_t b = 0; b < s.batch; ++b) {
    const double xi = x[b * s.in + i];
    const double* dyb = dy + b * s.out;
    for (std::size_t o = 0; o < s.out; ++o) dw_row[o] += xi * dyb[o];
  }
}

inline void grad_bias(const double* dy, double* db, DenseShape s) {
  for (std::size_t o = 0; o < s.out; ++o) db[o] = 0.0;
  for (std::size_t b = 0; b < s.batch; ++b)
    for (std::size_t o = 0; o < s.out; ++o) db[o] += dy[b * s.out + o];
}

void check(std::span<const double> x, std::span<const double> w, std::span<const double> y, DenseShape s) {
  assert(x.size() >= s.batch * s.in);
  assert(w.size() >= s.in * s.out);
  assert(y.size() >= s.batch * s.out);
  (void)x, (void)w, (void)y, (void)s;
}

}  // namespace

namespace serial {

void dense_forward(std::span<const double> x, std::span<const double> w, std::span<const double> bias,
                   std::span<double> y, DenseShape s) {
  check(x, w, y, s);
  for (std::size_t b = 0; b < s.batch; ++b)
    forward_row(x.data() + b * s.in, w.data(), bias.data(), y.data() + b * s.out, s.in, s.out);
}

void dense_backward(std::span<const double> x, std::span<const double> w, std::span<const double> dy,
                    std::span<double> dx, std::span<double> dw, std::span<double> db, DenseShape s) {
  check(x, w, dy, s);
  if (!dx.empty())
    for (std::size_t b = 0; b < s.batch; ++b)
      grad_input_row(dy.data() + b * s.out, w.data(), dx.data() + b * s.in, s.in, s.out);
  for (std::size_t i = 0; i < s.in; ++i) grad_weight_row(x.data(), dy.data(), dw.data() + i * s.out, i, s);
  grad_bias(dy.data(), db.data(), s);
}

}  // namespace serial

namespace parallel {

void dense_forward(std::span<const double> x, std::span<const double> w, std::span<const double> bias,
                   std::span<double> y, DenseShape s) {
  check(x, w, y, s);
  const auto n = static_cast<std::int64_t>(s.batch);
#pragma omp parallel for schedule(static) if (s.batch * s.in * s.out >= kParallelWork)
  for (std::int64_t b = 0; b < n; ++b)
    forward_row(x.data() + b * s.in, w.data(), bias.data(), y.data() + b * s.out, s.in, s.out);
}

void dense_backward(std::span<const double> x, std::span<const double> w, std::span<const double> dy,
                    std::span<double> dx, std::span<double> dw, std::span<double> db, DenseShape s) {
  check(x, w, dy, s);
  const bool go = s.batch * s.in * s.out >= kParallelWork;
  const auto nb = static_cast<std::int64_t>(s.batch);
  const auto ni = static_cast<std::int64_t>(s.in);
#pragma omp parallel if (go)
  {
    if (!dx.empty()) {
#pragma omp for schedule(static) nowait
      for (std::int64_t b = 0; b < nb; ++b)
        grad_input_row(dy.data() + b * s.out, w.data(), dx.data() + b * s.in, s.in, s.out);
    }
#pragma omp for schedule(static) nowait
    for (std::int64_t i = 0; i < ni; ++i)
      grad_weight_row(x.data(), dy.data(), dw.data() + i * s.out, static_cast<std::size_t>(i), s);
#pragma omp single nowait
    grad_bias(dy.data(), db.data(), s);
  }
}

}  // namespace parallel

void relu_inplace(std::span<double> v) {
  for (double& x : v) x = x > 0.0 ? x : 0.0;
}

void relu_backward_inplace(std::span<const double> activation, std::span<double> dv) {
  for (std::size_t k = 0; k < dv.size(); ++k)
    if (!(activation[k] > 0.0)) dv[k] = 0.0;
}

}  // namespace loadmask::kernels
