#pragma once

#include <cmath>
#include <vector>

namespace sentcast::testing {

/// Hand-computed metric fixtures, values frozen from exact rational arithmetic.
struct MetricFixture {
  std::vector<double> pred, actual;
  double mae, rmse, r2, acc;
};

inline std::vector<MetricFixture> metric_fixtures() {
  return {
      {{1, 2, 3, 4, 5}, {1.5, 2, 2.5, 4.5, 4}, 1.0 / 2.0, std::sqrt(7.0 / 20.0), 99.0 / 134.0, 3.0 / 4.0},
      {{10, 12, 11, 13, 15}, {11, 11, 12, 14, 13}, 6.0 / 5.0, std::sqrt(8.0 / 5.0), -3.0 / 17.0, 1.0 / 4.0},
      {{0, -1, 2, -3, 4}, {1, 1, 1, 2, 2}, 11.0 / 5.0, std::sqrt(7.0), -169.0 / 6.0, 0.0},
  };
}

}  // namespace sentcast::testing
