#pragma once

#include <cstddef>
#include <span>

namespace robustbo {

/// Index of the first maximal element; ties break to the lowest index.
inline std::ptrdiff_t argmax_first(std::span<const double> values) {
  std::ptrdiff_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[static_cast<std::size_t>(best)]) best = static_cast<std::ptrdiff_t>(i);
  }
  return best;
}

}  // namespace robustbo
