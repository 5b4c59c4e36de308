#pragma once

#include <cmath>
#include <span>

namespace lgeo::detail {

// Linear-interpolation quantile (Hyndman-Fan type 7) of ascending data.
inline double quantile_sorted(std::span<const double> ascending, double p) {
  if (ascending.empty()) return 0.0;
  const double pos = p * static_cast<double>(ascending.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = lo + 1 < ascending.size() ? lo + 1 : lo;
  const double frac = pos - static_cast<double>(lo);
  return ascending[lo] + frac * (ascending[hi] - ascending[lo]);
}

}  // namespace lgeo::detail
