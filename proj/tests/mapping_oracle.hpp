#pragma once

#include <vector>

#include "sentcast/mapping.hpp"

namespace sentcast::testing {

/// Direct double loop over days and lags; the reference for
/// memory_weighted_map.
inline std::vector<double> brute_force_map(const std::vector<double>& w, int memory_days,
                                           KernelMode mode) {
  const auto n = static_cast<long>(w.size());
  std::vector<double> out(w.size(), 0.0);
  double norm = 0.0;
  for (int i = 1; i <= memory_days; ++i)
    norm += mode == KernelMode::Recency ? memory_days - i + 1 : i;
  for (long d = 0; d < n; ++d) {
    double num = 0.0;
    for (int i = 1; i <= memory_days; ++i) {
      const double k = mode == KernelMode::Recency ? memory_days - i + 1 : i;
      if (d - i >= 0) num += k * w[static_cast<std::size_t>(d - i)];
    }
    out[static_cast<std::size_t>(d)] = num / norm;
  }
  return out;
}

}  // namespace sentcast::testing
