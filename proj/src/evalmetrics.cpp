#include "sentcast/evalmetrics.hpp"

#include <cmath>
#include <limits>

#include "sentcast/error.hpp"

namespace sentcast {

namespace {

void check_lengths(std::span<const double> pred, std::span<const double> actual,
                   std::size_t min_len) {
  if (pred.size() != actual.size())
    throw Error(ErrorCode::LengthMismatch,
                std::to_string(pred.size()) + " predictions vs " + std::to_string(actual.size()) +
                    " actuals");
  if (pred.size() < min_len)
    throw Error(ErrorCode::LengthMismatch, "need at least " + std::to_string(min_len) + " points");
}

int sign(double x) { return (x > 0) - (x < 0); }

double pearson(std::span<const double> a, std::span<const double> b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    ma += a[k];
    mb += b[k];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    sab += (a[k] - ma) * (b[k] - mb);
    saa += (a[k] - ma) * (a[k] - ma);
    sbb += (b[k] - mb) * (b[k] - mb);
  }
  if (saa == 0 || sbb == 0) return std::numeric_limits<double>::quiet_NaN();
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

double mean_absolute_error(std::span<const double> pred, std::span<const double> actual) {
  check_lengths(pred, actual, 1);
  double s = 0;
  for (std::size_t k = 0; k < pred.size(); ++k) s += std::abs(pred[k] - actual[k]);
  return s / static_cast<double>(pred.size());
}

double root_mean_squared_error(std::span<const double> pred, std::span<const double> actual) {
  check_lengths(pred, actual, 1);
  double s = 0;
  for (std::size_t k = 0; k < pred.size(); ++k) s += (pred[k] - actual[k]) * (pred[k] - actual[k]);
  return std::sqrt(s / static_cast<double>(pred.size()));
}

double r_squared(std::span<const double> pred, std::span<const double> actual) {
  check_lengths(pred, actual, 1);
  double mean = 0;
  for (double a : actual) mean += a;
  mean /= static_cast<double>(actual.size());
  double sse = 0, sst = 0;
  for (std::size_t k = 0; k < pred.size(); ++k) {
    sse += (pred[k] - actual[k]) * (pred[k] - actual[k]);
    sst += (actual[k] - mean) * (actual[k] - mean);
  }
  if (sst == 0) throw Error(ErrorCode::ZeroVariance, "actual series is constant");
  return 1.0 - sse / sst;
}

double r_squared_or_nan(std::span<const double> pred, std::span<const double> actual) {
  try {
    return r_squared(pred, actual);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ZeroVariance) throw;
    return std::numeric_limits<double>::quiet_NaN();
  }
}

ErrorMetrics compute_metrics(std::span<const double> pred, std::span<const double> actual) {
  check_lengths(pred, actual, 2);
  return {mean_absolute_error(pred, actual), root_mean_squared_error(pred, actual),
          r_squared(pred, actual)};
}

double directional_accuracy(std::span<const double> pred, std::span<const double> actual) {
  check_lengths(pred, actual, 2);
  std::size_t hits = 0;
  for (std::size_t k = 0; k + 1 < pred.size(); ++k)
    if (sign(pred[k + 1] - pred[k]) == sign(actual[k + 1] - actual[k])) ++hits;
  return static_cast<double>(hits) / static_cast<double>(pred.size() - 1);
}

TimeOffset best_time_offset(std::span<const double> pred, std::span<const double> actual,
                            std::size_t max_lag) {
  if (pred.size() != actual.size())
    throw Error(ErrorCode::LengthMismatch,
                std::to_string(pred.size()) + " predictions vs " + std::to_string(actual.size()) +
                    " actuals");
  if (pred.size() < max_lag + 2)
    throw Error(ErrorCode::SeriesTooShort, std::to_string(pred.size()) + " points for max_lag " +
                                               std::to_string(max_lag));
  const std::size_t n = pred.size();
  TimeOffset best;
  best.correlation = -std::numeric_limits<double>::infinity();
  bool found = false;
  for (std::size_t lag = 0; lag <= max_lag; ++lag) {
    const double r = pearson(pred.subspan(lag), actual.first(n - lag));
    if (std::isnan(r)) continue;
    if (!found || r > best.correlation) {
      best.lag = lag;
      best.correlation = r;
      found = true;
    }
  }
  if (!found) best.correlation = std::numeric_limits<double>::quiet_NaN();
  best.accuracy = directional_accuracy(pred.subspan(best.lag), actual.first(n - best.lag));
  return best;
}

double validation_score(const TrainingHistory& history) {
  if (history.epochs.empty()) throw Error(ErrorCode::EmptyHistory, "no epochs recorded");
  return history.epochs.at(history.best_epoch).val_r2;
}

}  // namespace sentcast
