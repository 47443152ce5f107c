#include "sentcast/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "sentcast/csv.hpp"
#include "sentcast/error.hpp"

namespace sentcast {

std::string_view to_string(FitScope scope) {
  return scope == FitScope::TrainOnly ? "train_only" : "full";
}

FitScope parse_fit_scope(std::string_view text) {
  if (text == "train_only") return FitScope::TrainOnly;
  if (text == "full") return FitScope::Full;
  throw Error(ErrorCode::ConfigError, "unknown fit scope '" + std::string(text) + "'");
}

const ColumnScaler& ScalerSet::at(std::string_view column) const {
  for (const auto& s : scalers)
    if (s.column == column) return s;
  throw Error(ErrorCode::UnknownColumn, std::string(column));
}

namespace {

void check_ratio(double ratio) {
  if (!(ratio > 0.0 && ratio < 1.0))
    throw Error(ErrorCode::ConfigError, "split ratio must lie in (0, 1)");
}

}  // namespace

std::size_t train_row_count(std::size_t n, double ratio) {
  check_ratio(ratio);
  return static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n)));
}

ScalerSet fit_scalers(const MasterDataset& data, double split_ratio, FitScope scope) {
  if (data.rows() == 0) throw Error(ErrorCode::DegenerateDataset, "zero rows");
  std::size_t fit_rows = data.rows();
  if (scope == FitScope::TrainOnly)
    fit_rows = std::max<std::size_t>(1, train_row_count(data.rows(), split_ratio));
  else
    check_ratio(split_ratio);

  ScalerSet set;
  set.fit_scope = scope;
  for (const auto& col : data.columns) {
    auto [lo, hi] = std::minmax_element(col.values.begin(), col.values.begin() + fit_rows);
    set.scalers.push_back({col.name, *lo, *hi});
  }
  return set;
}

MasterDataset transform(const ScalerSet& scalers, const MasterDataset& data) {
  MasterDataset out = data;
  for (auto& col : out.columns) {
    const auto& s = scalers.at(col.name);
    for (double& v : col.values) v = s.scale(v);
  }
  return out;
}

std::vector<double> inverse_transform(const ScalerSet& scalers, std::string_view column,
                                      const std::vector<double>& scaled) {
  const auto& s = scalers.at(column);
  std::vector<double> out;
  out.reserve(scaled.size());
  for (double y : scaled) out.push_back(s.unscale(y));
  return out;
}

std::pair<MasterDataset, MasterDataset> chronological_split(const MasterDataset& data,
                                                            double split_ratio) {
  if (data.rows() < 2) throw Error(ErrorCode::DegenerateDataset, "need at least 2 rows to split");
  const auto n_train = train_row_count(data.rows(), split_ratio);
  return {data.slice(0, n_train), data.slice(n_train, data.rows())};
}

WindowedSet WindowedSet::slice(std::size_t begin, std::size_t end) const {
  WindowedSet out;
  out.lookback = lookback;
  out.n_features = n_features;
  end = std::min(end, size());
  begin = std::min(begin, end);
  out.inputs.assign(inputs.begin() + begin, inputs.begin() + end);
  out.targets.assign(targets.begin() + begin, targets.begin() + end);
  out.target_rows.assign(target_rows.begin() + begin, target_rows.begin() + end);
  out.target_dates.assign(target_dates.begin() + begin, target_dates.begin() + end);
  return out;
}

WindowedSet make_windows(const MasterDataset& rows, std::size_t lookback,
                         std::string_view target_column) {
  if (lookback == 0) throw Error(ErrorCode::ConfigError, "lookback must be >= 1");
  const std::size_t n = rows.rows();
  if (n <= lookback)
    throw Error(ErrorCode::InsufficientRows,
                std::to_string(n) + " rows for lookback " + std::to_string(lookback));
  const auto& target = rows.column(target_column).values;
  const std::size_t f = rows.columns.size();

  WindowedSet set;
  set.lookback = lookback;
  set.n_features = f;
  const std::size_t count = n - lookback;
  set.inputs.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Eigen::MatrixXd x(lookback, f);
    for (std::size_t j = 0; j < f; ++j) {
      const auto& v = rows.columns[j].values;
      for (std::size_t t = 0; t < lookback; ++t) x(t, j) = v[k + t];
    }
    set.inputs.push_back(std::move(x));
    set.targets.push_back(target[k + lookback]);
    set.target_rows.push_back(k + lookback);
    set.target_dates.push_back(rows.calendar[k + lookback]);
  }
  return set;
}

void write_scalers_csv(const ScalerSet& scalers, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
  out << "column,min,max,fit_scope\n";
  for (const auto& s : scalers.scalers)
    out << s.column << ',' << csv::format_double(s.min) << ',' << csv::format_double(s.max) << ','
        << to_string(scalers.fit_scope) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path + "'");
}

ScalerSet load_scalers_csv(const std::string& path) {
  auto lines = csv::read_lines(path);
  if (lines.empty() || csv::trim(lines[0]) != "column,min,max,fit_scope")
    throw Error(ErrorCode::UnparseableRow, path + ": expected header column,min,max,fit_scope");
  ScalerSet set;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    if (csv::trim(lines[ln]).empty()) continue;
    auto f = csv::split(lines[ln]);
    ColumnScaler s;
    if (f.size() != 4 || !csv::parse_double(f[1], s.min) || !csv::parse_double(f[2], s.max) ||
        !(s.max >= s.min))
      throw Error(ErrorCode::UnparseableRow, path + ": line " + std::to_string(ln + 1));
    s.column = f[0];
    set.fit_scope = parse_fit_scope(f[3]);
    set.scalers.push_back(std::move(s));
  }
  return set;
}

}  // namespace sentcast
