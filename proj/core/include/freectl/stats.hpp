#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace freectl {

/// Monte Carlo mean with its standard error.
struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

/// Pairwise (cascade) summation; result depends only on the order of values.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

inline Estimate estimate_mean(std::span<const double> v) {
  Estimate e;
  e.samples = v.size();
  if (v.empty()) return e;
  e.mean = pairwise_sum(v) / static_cast<double>(v.size());
  if (v.size() > 1) {
    std::vector<double> sq(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - e.mean) * (v[i] - e.mean);
    const double var = pairwise_sum(sq) / static_cast<double>(v.size() - 1);
    e.std_error = std::sqrt(var / static_cast<double>(v.size()));
  }
  return e;
}

}  // namespace freectl
