#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace hmcpso {

using Vec = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double squared_norm(std::span<const double> a) { return dot(a, a); }

inline bool all_finite(std::span<const double> a) {
  for (double x : a)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace hmcpso
