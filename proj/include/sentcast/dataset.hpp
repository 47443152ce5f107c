#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sentcast/mapping.hpp"

namespace sentcast {

struct ColumnScaler {
  std::string column;
  double min = 0.0;
  double max = 0.0;

  bool degenerate() const { return max == min; }
  double scale(double x) const { return degenerate() ? 0.0 : (x - min) / (max - min); }
  double unscale(double y) const { return degenerate() ? min : min + y * (max - min); }
};

enum class FitScope { TrainOnly, Full };

std::string_view to_string(FitScope scope);
FitScope parse_fit_scope(std::string_view text);

struct ScalerSet {
  std::vector<ColumnScaler> scalers;
  FitScope fit_scope = FitScope::TrainOnly;

  const ColumnScaler& at(std::string_view column) const;
};

/// Number of training rows for a chronological split: floor(ratio * n).
std::size_t train_row_count(std::size_t n, double ratio);

/// Per-column min/max over the training prefix (TrainOnly) or all rows (Full).
ScalerSet fit_scalers(const MasterDataset& data, double split_ratio,
                      FitScope scope = FitScope::TrainOnly);

/// Min-max scales every column; values outside the fitted range are kept.
MasterDataset transform(const ScalerSet& scalers, const MasterDataset& data);

std::vector<double> inverse_transform(const ScalerSet& scalers, std::string_view column,
                                      const std::vector<double>& scaled);

/// First floor(ratio * n) rows train, the rest test; order preserved.
std::pair<MasterDataset, MasterDataset> chronological_split(const MasterDataset& data,
                                                            double split_ratio);

/// Supervised samples: each input is `lookback` consecutive rows (all
/// columns, in dataset order) and its target is the next row's value.
struct WindowedSet {
  std::vector<Eigen::MatrixXd> inputs;  // lookback x n_features each
  std::vector<double> targets;
  std::vector<std::size_t> target_rows;  // row index of each target
  std::vector<Date> target_dates;
  std::size_t lookback = 0;
  std::size_t n_features = 0;

  std::size_t size() const { return targets.size(); }
  /// Samples [begin, end) as a new set.
  WindowedSet slice(std::size_t begin, std::size_t end) const;
};

WindowedSet make_windows(const MasterDataset& rows, std::size_t lookback,
                         std::string_view target_column);

void write_scalers_csv(const ScalerSet& scalers, const std::string& path);
ScalerSet load_scalers_csv(const std::string& path);

}  // namespace sentcast
