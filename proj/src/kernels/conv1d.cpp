#include "loadmask/kernels/conv1d.hpp"

#include <algorithm>
#include <cstdint>

namespace loadmask::kernels {
namespace {

constexpr std::size_t kParallelWork = 1u << 15;

std::size_t work(const Conv1dShape& s) {
  return s.batch * s.in_channels * s.out_channels * s.out_length() * s.kernel;
}

// Output positions t with 0 <= t + j - padding < length.
struct TapRange {
  std::size_t begin;
  std::size_t end;
};

inline TapRange tap_range(std::size_t j, const Conv1dShape& s) {
  const std::size_t lout = s.out_length();
  const std::size_t begin = j < s.padding ? s.padding - j : 0;
  // t + j - p <= length - 1  =>  t <= length - 1 + p - j
  const std::size_t limit = s.length + s.padding;  // exclusive bound on t + j
  const std::size_t end = limit > j ? std::min(lout, limit - j) : 0;
  return {begin, std::max(begin, end)};
}

inline void forward_plane(const double* x, const double* w, double bias, double* y, const Conv1dShape& s,
                          std::size_t co) {
  const std::size_t lout = s.out_length();
  std::fill(y, y + lout, bias);
  for (std::size_t ci = 0; ci < s.in_channels; ++ci) {
    const double* xc = x + ci * s.length;
    const double* wk = w + (co * s.in_channels + ci) * s.kernel;
    for (std::size_t j = 0; j < s.kernel; ++j) {
      const auto [t0, t1] = tap_range(j, s);
      const double wj = wk[j];
      for (std::size_t t = t0; t < t1; ++t) y[t] += wj * xc[t + j - s.padding];
    }
  }
}

inline void weight_grad_channel(const double* x, const double* dy, double* dw, double* db, const Conv1dShape& s,
                                std::size_t co) {
  const std::size_t lout = s.out_length();
  double* dwc = dw + co * s.in_channels * s.kernel;
  std::fill(dwc, dwc + s.in_channels * s.kernel, 0.0);
  double bsum = 0.0;
  for (std::size_t b = 0; b < s.batch; ++b) {
    const double* dyp = dy + (b * s.out_channels + co) * lout;
    for (std::size_t t = 0; t < lout; ++t) bsum += dyp[t];
    for (std::size_t ci = 0; ci < s.in_channels; ++ci) {
      const double* xc = x + (b * s.in_channels + ci) * s.length;
      for (std::size_t j = 0; j < s.kernel; ++j) {
        const auto [t0, t1] = tap_range(j, s);
        double acc = 0.0;
        for (std::size_t t = t0; t < t1; ++t) acc += dyp[t] * xc[t + j - s.padding];
        dwc[ci * s.kernel + j] += acc;
      }
    }
  }
  db[co] = bsum;
}

inline void input_grad_sample(const double* dy, const double* w, double* dx, const Conv1dShape& s) {
  const std::size_t lout = s.out_length();
  std::fill(dx, dx + s.in_channels * s.length, 0.0);
  for (std::size_t co = 0; co < s.out_channels; ++co) {
    const double* dyp = dy + co * lout;
    for (std::size_t ci = 0; ci < s.in_channels; ++ci) {
      double* dxc = dx + ci * s.length;
      const double* wk = w + (co * s.in_channels + ci) * s.kernel;
      for (std::size_t j = 0; j < s.kernel; ++j) {
        const auto [t0, t1] = tap_range(j, s);
        const double wj = wk[j];
        for (std::size_t t = t0; t < t1; ++t) dxc[t + j - s.padding] += wj * dyp[t];
      }
    }
  }
}

}  // namespace

namespace serial {

void conv1d_forward(std::span<const double> x, std::span<const double> w, std::span<const double> bias,
                    std::span<double> y, Conv1dShape s) {
  const std::size_t lout = s.out_length();
  for (std::size_t b = 0; b < s.batch; ++b)
    for (std::size_t co = 0; co < s.out_channels; ++co)
      forward_plane(x.data() + b * s.in_channels * s.length, w.data(), bias[co],
                    y.data() + (b * s.out_channels + co) * lout, s, co);
}

void conv1d_backward(std::span<const double> x, std::span<const double> w, std::span<const double> dy,
                     std::span<double> dx, std::span<double> dw, std::span<double> db, Conv1dShape s) {
  const std::size_t lout = s.out_length();
  for (std::size_t co = 0; co < s.out_channels; ++co) weight_grad_channel(x.data(), dy.data(), dw.data(), db.data(), s, co);
  if (!dx.empty())
    for (std::size_t b = 0; b < s.batch; ++b)
      input_grad_sample(dy.data() + b * s.out_channels * lout, w.data(), dx.data() + b * s.in_channels * s.length, s);
}

}  // namespace serial

namespace parallel {

void conv1d_forward(std::span<const double> x, std::span<const double> w, std::span<const double> bias,
                    std::span<double> y, Conv1dShape s) {
  const std::size_t lout = s.out_length();
  const auto planes = static_cast<std::int64_t>(s.batch * s.out_channels);
#pragma omp parallel for schedule(static) if (work(s) >= kParallelWork)
  for (std::int64_t p = 0; p < planes; ++p) {
    const std::size_t b = static_cast<std::size_t>(p) / s.out_channels;
    const std::size_t co = static_cast<std::size_t>(p) % s.out_channels;
    forward_plane(x.data() + b * s.in_channels * s.length, w.data(), bias[co], y.data() + p * lout, s, co);
  }
}

void conv1d_backward(std::span<const double> x, std::span<const double> w, std::span<const double> dy,
                     std::span<double> dx, std::span<double> dw, std::span<double> db, Conv1dShape s) {
  const std::size_t lout = s.out_length();
  const auto nco = static_cast<std::int64_t>(s.out_channels);
  const auto nb = static_cast<std::int64_t>(s.batch);
#pragma omp parallel if (work(s) >= kParallelWork)
  {
#pragma omp for schedule(static) nowait
    for (std::int64_t co = 0; co < nco; ++co)
      weight_grad_channel(x.data(), dy.data(), dw.data(), db.data(), s, static_cast<std::size_t>(co));
    if (!dx.empty()) {
#pragma omp for schedule(static) nowait
      for (std::int64_t b = 0; b < nb; ++b)
        input_grad_sample(dy.data() + b * s.out_channels * lout, w.data(), dx.data() + b * s.in_channels * s.length,
                          s);
    }
  }
}

}  // namespace parallel

}  // namespace loadmask::kernels
