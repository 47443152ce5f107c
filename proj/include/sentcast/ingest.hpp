#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sentcast/date.hpp"

namespace sentcast {

struct StockBar {
  Date date;
  double open = 0.0;
  double high = 0.0;
  double low = 0.0;
  double close = 0.0;
  double volume = 0.0;
};

/// Daily OHLCV rows, strictly increasing by date.
struct StockSeries {
  std::string symbol;
  std::vector<StockBar> rows;

  std::vector<Date> calendar() const;
};

struct Tweet {
  std::string id;
  Date date;
  std::string raw_text;
  std::string cleaned_text;
  std::optional<std::string> pos_tagged_text;
};

struct TweetCorpus {
  std::string handle;
  std::vector<Tweet> tweets;  // ascending by date
};

/// Reads a `Date,Open,High,Low,Close,Volume` CSV (extra columns ignored).
/// The symbol defaults to the file stem.
StockSeries load_stock_csv(const std::string& path);
void write_stock_csv(const StockSeries& series, const std::string& path);

/// Reads one JSON object per line with keys `date`, `text` and optional
/// `id`, `pos_text`. Records without an id get their 1-based line ordinal.
TweetCorpus load_tweets(const std::string& path);

/// Concatenates corpora (ids must stay unique) and re-sorts by date.
TweetCorpus merge_corpora(std::vector<TweetCorpus> corpora);

/// Lowercases, drops URLs and @mentions, strips '#', keeps only [a-z0-9 ]
/// and collapses whitespace.
std::string clean_tweet(std::string_view raw);

}  // namespace sentcast
