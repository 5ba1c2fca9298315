#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace testing_support {

inline std::vector<double> uniform_vector(std::size_t n, double lo, double hi, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

/// Largest relative error between `analytic` and central differences of `f` at `params`.
/// Relative error is |a - n| / max(|a|, |n|, floor).
inline double max_fd_relative_error(std::span<double> params, std::span<const double> analytic,
                                    const std::function<double()>& f, double h = 1e-6, double floor = 1e-7) {
  double worst = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double keep = params[i];
    params[i] = keep + h;
    const double up = f();
    params[i] = keep - h;
    const double down = f();
    params[i] = keep;
    const double numeric = (up - down) / (2.0 * h);
    const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), floor});
    worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
  }
  return worst;
}

}  // namespace testing_support
