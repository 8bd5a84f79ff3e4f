#pragma once

#include <cstddef>
#include <span>

namespace ncps {

// Pairwise (tree) reduction; error grows like log(n) instead of n.
inline double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 32) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace ncps
