#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "sentcast/date.hpp"
#include "sentcast/ingest.hpp"
#include "sentcast/sentiment.hpp"

namespace sentcast {

/// Per-class triple in (positive, negative, neutral) order.
using ClassTriple = std::array<double, 3>;

enum SentimentClass : std::size_t { kPositive = 0, kNegative = 1, kNeutral = 2 };

struct DailySentimentSeries {
  std::vector<Date> calendar;
  std::array<std::vector<double>, 3> channels;  // indexed by SentimentClass
};

struct MappedSentiment {
  std::vector<Date> calendar;
  std::array<std::vector<double>, 3> channels;
};

enum class KernelMode {
  Recency,  // weight(i) = M - i + 1: yesterday weighs most
  Literal,  // weight(i) = i
};

std::string_view to_string(KernelMode mode);
KernelMode parse_kernel_mode(std::string_view text);

struct MemoryKernel {
  int memory_days = 30;
  KernelMode mode = KernelMode::Recency;

  /// Weight of the sentiment observed `lag` trading days before (1 <= lag <= M).
  double weight(int lag) const;
};

struct NamedColumn {
  std::string name;
  std::vector<double> values;
};

/// Trading-day table of feature columns; every column spans the calendar.
struct MasterDataset {
  std::vector<Date> calendar;
  std::vector<NamedColumn> columns;
  std::string target_column = "Close";

  std::size_t rows() const { return calendar.size(); }
  const NamedColumn& column(std::string_view name) const;
  bool has_column(std::string_view name) const;
  std::vector<std::string> column_names() const;
  /// Keeps only the named columns, in the given order.
  MasterDataset select(const std::vector<std::string>& names) const;
  /// Row range [begin, end).
  MasterDataset slice(std::size_t begin, std::size_t end) const;
};

inline const std::vector<std::string> kStockColumns = {"Open", "High", "Low", "Close", "Volume"};
inline const std::vector<std::string> kSentimentColumns = {"sent_pos", "sent_neg", "sent_neu"};

/// Labelled class receives its own probability; the other two get zero.
ClassTriple class_contribution(const SentimentScore& score);

/// Mean contribution of the tweets landing on each trading day. Tweets on
/// non-trading days roll forward to the next trading day; tweets outside the
/// calendar span are ignored.
DailySentimentSeries daily_aggregate(const ScoreTable& table, std::string_view variant,
                                     const TweetCorpus& corpus, const std::vector<Date>& calendar);

/// mapped[c][d] = sum_{i=1..M} w(i) * W[c][d-i] / sum_{i=1..M} w(i); lags
/// before the first day contribute zero to the numerator only.
MappedSentiment memory_weighted_map(const DailySentimentSeries& daily, const MemoryKernel& kernel);

/// Stock columns followed by sent_pos, sent_neg, sent_neu; target Close.
MasterDataset join_with_stock(const MappedSentiment& mapped, const StockSeries& series);

/// Stock columns only, for runs without sentiment.
MasterDataset stock_only_dataset(const StockSeries& series);

void write_master_csv(const MasterDataset& data, const std::string& path);
/// Reads `Date,<col>,...`; every non-Date column becomes a feature column.
MasterDataset load_master_csv(const std::string& path);

}  // namespace sentcast
