#include "sentcast/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <regex>
#include <set>

#include <json.hpp>

#include "sentcast/csv.hpp"
#include "sentcast/error.hpp"

namespace sentcast {

std::vector<Date> StockSeries::calendar() const {
  std::vector<Date> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.date);
  return out;
}

StockSeries load_stock_csv(const std::string& path) {
  auto lines = csv::read_lines(path);
  std::size_t first = 0;
  while (first < lines.size() && csv::trim(lines[first]).empty()) ++first;
  if (first == lines.size()) throw Error(ErrorCode::EmptySeries, path);

  auto header = csv::split(lines[first]);
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < header.size(); ++i) index.emplace(header[i], i);
  const char* required[] = {"Date", "Open", "High", "Low", "Close", "Volume"};
  std::size_t col[6];
  for (int k = 0; k < 6; ++k) {
    auto it = index.find(required[k]);
    if (it == index.end()) throw Error(ErrorCode::MissingColumn, required[k]);
    col[k] = it->second;
  }

  StockSeries series;
  series.symbol = std::filesystem::path(path).stem().string();
  for (std::size_t ln = first + 1; ln < lines.size(); ++ln) {
    if (csv::trim(lines[ln]).empty()) continue;
    const auto lineno = std::to_string(ln + 1);
    auto fields = csv::split(lines[ln]);
    if (fields.size() < header.size())
      throw Error(ErrorCode::UnparseableRow, "line " + lineno + ": too few fields");
    StockBar bar;
    if (!Date::parse(fields[col[0]], bar.date))
      throw Error(ErrorCode::UnparseableRow, "line " + lineno + ": bad date '" + fields[col[0]] + "'");
    double* targets[] = {&bar.open, &bar.high, &bar.low, &bar.close, &bar.volume};
    for (int k = 0; k < 5; ++k) {
      if (!csv::parse_double(fields[col[k + 1]], *targets[k]) || !std::isfinite(*targets[k]))
        throw Error(ErrorCode::UnparseableRow,
                    "line " + lineno + ": bad " + required[k + 1] + " value");
    }
    if (bar.open <= 0 || bar.high <= 0 || bar.low <= 0 || bar.close <= 0)
      throw Error(ErrorCode::UnparseableRow, "line " + lineno + ": non-positive price");
    if (bar.volume < 0)
      throw Error(ErrorCode::UnparseableRow, "line " + lineno + ": negative volume");
    series.rows.push_back(bar);
  }
  if (series.rows.empty()) throw Error(ErrorCode::EmptySeries, path);

  std::stable_sort(series.rows.begin(), series.rows.end(),
                   [](const StockBar& a, const StockBar& b) { return a.date < b.date; });
  for (std::size_t i = 1; i < series.rows.size(); ++i) {
    if (series.rows[i].date == series.rows[i - 1].date)
      throw Error(ErrorCode::UnparseableRow,
                  "duplicate date " + series.rows[i].date.to_iso());
  }
  return series;
}

void write_stock_csv(const StockSeries& series, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
  out << "Date,Open,High,Low,Close,Volume\n";
  for (const auto& r : series.rows) {
    out << r.date.to_iso() << ',' << csv::format_double(r.open) << ','
        << csv::format_double(r.high) << ',' << csv::format_double(r.low) << ','
        << csv::format_double(r.close) << ',' << csv::format_double(r.volume) << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path + "'");
}

namespace {

bool parse_tweet_date(const std::string& s, Date& out) {
  // Timestamps such as 2023-01-02T10:00:00Z are truncated to the day.
  if (s.size() > 10 && (s[10] == 'T' || s[10] == ' ')) return Date::parse(std::string_view(s).substr(0, 10), out);
  return Date::parse(s, out);
}

}  // namespace

TweetCorpus load_tweets(const std::string& path) {
  auto lines = csv::read_lines(path);
  TweetCorpus corpus;
  corpus.handle = std::filesystem::path(path).stem().string();
  std::size_t ordinal = 0;
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    if (csv::trim(lines[ln]).empty()) continue;
    ++ordinal;
    const auto where = "line " + std::to_string(ln + 1);
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(lines[ln]);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::UnparseableRecord, where + ": " + e.what());
    }
    if (!rec.is_object()) throw Error(ErrorCode::UnparseableRecord, where + ": not an object");
    if (!rec.contains("text") || !rec["text"].is_string())
      throw Error(ErrorCode::UnparseableRecord, where + ": missing \"text\"");
    if (!rec.contains("date") || !rec["date"].is_string())
      throw Error(ErrorCode::UnparseableRecord, where + ": missing \"date\"");

    Tweet t;
    if (!parse_tweet_date(rec["date"].get<std::string>(), t.date))
      throw Error(ErrorCode::UnparseableRecord, where + ": bad date");
    t.raw_text = rec["text"].get<std::string>();
    t.cleaned_text = clean_tweet(t.raw_text);
    if (rec.contains("id") && !rec["id"].is_null()) {
      const auto& id = rec["id"];
      if (id.is_string()) t.id = id.get<std::string>();
      else if (id.is_number_integer()) t.id = std::to_string(id.get<long long>());
      else throw Error(ErrorCode::UnparseableRecord, where + ": id must be string or integer");
    } else {
      t.id = std::to_string(ordinal);
    }
    if (rec.contains("pos_text") && !rec["pos_text"].is_null()) {
      if (!rec["pos_text"].is_string())
        throw Error(ErrorCode::UnparseableRecord, where + ": pos_text must be a string");
      t.pos_tagged_text = rec["pos_text"].get<std::string>();
    }
    corpus.tweets.push_back(std::move(t));
  }
  if (corpus.tweets.empty()) throw Error(ErrorCode::EmptyCorpus, path);

  std::set<std::string> ids;
  for (const auto& t : corpus.tweets)
    if (!ids.insert(t.id).second)
      throw Error(ErrorCode::UnparseableRecord, "duplicate tweet id '" + t.id + "'");
  std::stable_sort(corpus.tweets.begin(), corpus.tweets.end(),
                   [](const Tweet& a, const Tweet& b) { return a.date < b.date; });
  return corpus;
}

TweetCorpus merge_corpora(std::vector<TweetCorpus> corpora) {
  if (corpora.size() == 1) return std::move(corpora.front());
  TweetCorpus merged;
  std::set<std::string> ids;
  for (auto& c : corpora) {
    merged.handle += (merged.handle.empty() ? "" : "+") + c.handle;
    for (auto& t : c.tweets) {
      if (!ids.insert(t.id).second)
        throw Error(ErrorCode::UnparseableRecord, "tweet id '" + t.id + "' appears in two corpora");
      merged.tweets.push_back(std::move(t));
    }
  }
  if (merged.tweets.empty()) throw Error(ErrorCode::EmptyCorpus, merged.handle);
  std::stable_sort(merged.tweets.begin(), merged.tweets.end(),
                   [](const Tweet& a, const Tweet& b) { return a.date < b.date; });
  return merged;
}

std::string clean_tweet(std::string_view raw) {
  static const std::regex url(R"((https?://|www\.)\S*)", std::regex::icase);
  static const std::regex mention(R"(@\w+)");

  std::string s(raw);
  s = std::regex_replace(s, url, " ");
  s = std::regex_replace(s, mention, " ");

  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (unsigned char c : s) {
    if (std::isspace(c) || std::iscntrl(c)) {
      pending_space = true;
    } else if (std::isalnum(c) && c < 0x80) {
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      out.push_back(static_cast<char>(std::tolower(c)));
    }
    // anything else (punctuation, '#', non-ASCII bytes) is dropped in place
  }
  return out;
}

}  // namespace sentcast
