#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "sentcast/history.hpp"

namespace sentcast {

struct ErrorMetrics {
  double mae = 0.0;
  double rmse = 0.0;
  double r2 = 0.0;
};

double mean_absolute_error(std::span<const double> pred, std::span<const double> actual);
double root_mean_squared_error(std::span<const double> pred, std::span<const double> actual);
/// 1 - SSE/SST around the mean of `actual`; throws ZeroVariance when SST == 0.
double r_squared(std::span<const double> pred, std::span<const double> actual);
/// Same as r_squared but NaN instead of throwing.
double r_squared_or_nan(std::span<const double> pred, std::span<const double> actual);

/// Requires at least two points; throws LengthMismatch / ZeroVariance.
ErrorMetrics compute_metrics(std::span<const double> pred, std::span<const double> actual);

/// Fraction of consecutive pairs whose changes have the same sign (a zero
/// change only matches a zero change).
double directional_accuracy(std::span<const double> pred, std::span<const double> actual);

struct TimeOffset {
  std::size_t lag = 0;
  double accuracy = 0.0;
  double correlation = 0.0;
};

/// Lag in [0, max_lag] maximising the Pearson correlation between
/// pred[k + lag] and actual[k]; ties go to the smaller lag. Accuracy is the
/// directional accuracy on that aligned overlap.
TimeOffset best_time_offset(std::span<const double> pred, std::span<const double> actual,
                            std::size_t max_lag);

/// Validation R^2 at the best epoch.
double validation_score(const TrainingHistory& history);

struct EvalReport {
  double val_score = 0.0;
  double r2 = 0.0;
  double rmse = 0.0;
  double mae = 0.0;
  std::size_t time_offset = 0;
  double acc = 0.0;
  std::size_t n_samples = 0;
  std::string units = "data";  // "data" or "scaled"
};

}  // namespace sentcast
