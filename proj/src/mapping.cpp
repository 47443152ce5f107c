#include "sentcast/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "sentcast/csv.hpp"
#include "sentcast/error.hpp"

namespace sentcast {

std::string_view to_string(KernelMode mode) {
  return mode == KernelMode::Recency ? "recency" : "literal";
}

KernelMode parse_kernel_mode(std::string_view text) {
  if (text == "recency") return KernelMode::Recency;
  if (text == "literal") return KernelMode::Literal;
  throw Error(ErrorCode::ConfigError, "unknown kernel mode '" + std::string(text) + "'");
}

double MemoryKernel::weight(int lag) const {
  return mode == KernelMode::Recency ? static_cast<double>(memory_days - lag + 1)
                                     : static_cast<double>(lag);
}

const NamedColumn& MasterDataset::column(std::string_view name) const {
  for (const auto& c : columns)
    if (c.name == name) return c;
  throw Error(ErrorCode::UnknownColumn, std::string(name));
}

bool MasterDataset::has_column(std::string_view name) const {
  return std::any_of(columns.begin(), columns.end(), [&](const auto& c) { return c.name == name; });
}

std::vector<std::string> MasterDataset::column_names() const {
  std::vector<std::string> out;
  for (const auto& c : columns) out.push_back(c.name);
  return out;
}

MasterDataset MasterDataset::select(const std::vector<std::string>& names) const {
  MasterDataset out;
  out.calendar = calendar;
  out.target_column = target_column;
  for (const auto& n : names) out.columns.push_back(column(n));
  return out;
}

MasterDataset MasterDataset::slice(std::size_t begin, std::size_t end) const {
  end = std::min(end, rows());
  begin = std::min(begin, end);
  MasterDataset out;
  out.target_column = target_column;
  out.calendar.assign(calendar.begin() + begin, calendar.begin() + end);
  for (const auto& c : columns)
    out.columns.push_back({c.name, {c.values.begin() + begin, c.values.begin() + end}});
  return out;
}

ClassTriple class_contribution(const SentimentScore& score) {
  switch (score.label) {
    case SentimentLabel::Positive: return {score.p_pos, 0.0, 0.0};
    case SentimentLabel::Negative: return {0.0, score.p_neg, 0.0};
    case SentimentLabel::Neutral: return {0.0, 0.0, score.p_neu};
  }
  return {0.0, 0.0, 0.0};
}

DailySentimentSeries daily_aggregate(const ScoreTable& table, std::string_view variant,
                                     const TweetCorpus& corpus, const std::vector<Date>& calendar) {
  const std::size_t m = calendar.size();
  DailySentimentSeries out;
  out.calendar = calendar;
  for (auto& ch : out.channels) ch.assign(m, 0.0);
  std::vector<std::size_t> counts(m, 0);

  for (const auto& t : corpus.tweets) {
    const auto* score = table.find(t.id, variant);
    if (!score)
      throw Error(ErrorCode::MissingScore, "tweet '" + t.id + "', variant " + std::string(variant));
    if (m == 0 || t.date < calendar.front()) continue;
    auto it = std::lower_bound(calendar.begin(), calendar.end(), t.date);
    if (it == calendar.end()) continue;
    const auto d = static_cast<std::size_t>(it - calendar.begin());
    const auto contrib = class_contribution(*score);
    for (std::size_t c = 0; c < 3; ++c) out.channels[c][d] += contrib[c];
    ++counts[d];
  }
  for (std::size_t d = 0; d < m; ++d) {
    if (counts[d] == 0) continue;
    for (auto& ch : out.channels) ch[d] /= static_cast<double>(counts[d]);
  }
  return out;
}

MappedSentiment memory_weighted_map(const DailySentimentSeries& daily, const MemoryKernel& kernel) {
  const int M = kernel.memory_days;
  if (M < 1) throw Error(ErrorCode::ConfigError, "memory_days must be >= 1");
  const std::size_t n = daily.calendar.size();
  double norm = 0.0;
  for (int i = 1; i <= M; ++i) norm += kernel.weight(i);

  MappedSentiment out;
  out.calendar = daily.calendar;
  for (std::size_t c = 0; c < 3; ++c) {
    const auto& w = daily.channels[c];
    if (w.size() != n) throw Error(ErrorCode::ShapeMismatch, "channel length differs from calendar");
    auto at = [&](std::ptrdiff_t d) { return d >= 0 ? w[static_cast<std::size_t>(d)] : 0.0; };

    // Sliding update: `window` is sum_{i=1..M} W[d-i] and `acc` is the
    // kernel-weighted sum for day d.
    std::vector<double> mapped(n, 0.0);
    double window = 0.0;
    double acc = 0.0;
    for (std::size_t d = 0; d < n; ++d) {
      mapped[d] = acc / norm;
      const auto di = static_cast<std::ptrdiff_t>(d);
      const double enter = w[d];
      const double leave = at(di - M);
      if (kernel.mode == KernelMode::Recency)
        acc = acc - window + M * enter;
      else
        acc = acc + window + enter - (M + 1) * leave;
      window += enter - leave;
      // Recompute exactly every M days so rounding drift stays bounded; the
      // amortised cost is still O(1) per day.
      if ((d + 1) % static_cast<std::size_t>(M) == 0) {
        const auto next = di + 1;
        window = acc = 0.0;
        for (int i = 1; i <= M; ++i) {
          window += at(next - i);
          acc += kernel.weight(i) * at(next - i);
        }
      }
    }
    out.channels[c] = std::move(mapped);
  }
  return out;
}

MasterDataset stock_only_dataset(const StockSeries& series) {
  MasterDataset out;
  out.calendar = series.calendar();
  out.columns = {{"Open", {}}, {"High", {}}, {"Low", {}}, {"Close", {}}, {"Volume", {}}};
  for (const auto& r : series.rows) {
    out.columns[0].values.push_back(r.open);
    out.columns[1].values.push_back(r.high);
    out.columns[2].values.push_back(r.low);
    out.columns[3].values.push_back(r.close);
    out.columns[4].values.push_back(r.volume);
  }
  return out;
}

MasterDataset join_with_stock(const MappedSentiment& mapped, const StockSeries& series) {
  const auto cal = series.calendar();
  const std::size_t n = std::min(cal.size(), mapped.calendar.size());
  for (std::size_t i = 0; i < n; ++i)
    if (cal[i] != mapped.calendar[i])
      throw Error(ErrorCode::CalendarMismatch, cal[i].to_iso());
  if (cal.size() != mapped.calendar.size()) {
    const auto& longer = cal.size() > n ? cal : mapped.calendar;
    throw Error(ErrorCode::CalendarMismatch, longer[n].to_iso());
  }
  MasterDataset out = stock_only_dataset(series);
  for (std::size_t c = 0; c < 3; ++c) out.columns.push_back({kSentimentColumns[c], mapped.channels[c]});
  return out;
}

void write_master_csv(const MasterDataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
  out << "Date";
  for (const auto& c : data.columns) out << ',' << c.name;
  out << '\n';
  for (std::size_t r = 0; r < data.rows(); ++r) {
    out << data.calendar[r].to_iso();
    for (const auto& c : data.columns) out << ',' << csv::format_double(c.values[r]);
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path + "'");
}

MasterDataset load_master_csv(const std::string& path) {
  auto lines = csv::read_lines(path);
  std::size_t first = 0;
  while (first < lines.size() && csv::trim(lines[first]).empty()) ++first;
  if (first == lines.size()) throw Error(ErrorCode::DegenerateDataset, path + ": empty file");
  auto header = csv::split(lines[first]);
  if (header.empty() || header[0] != "Date") throw Error(ErrorCode::MissingColumn, "Date");

  MasterDataset data;
  for (std::size_t i = 1; i < header.size(); ++i) data.columns.push_back({header[i], {}});
  for (std::size_t ln = first + 1; ln < lines.size(); ++ln) {
    if (csv::trim(lines[ln]).empty()) continue;
    const auto where = "line " + std::to_string(ln + 1);
    auto f = csv::split(lines[ln]);
    if (f.size() != header.size()) throw Error(ErrorCode::UnparseableRow, where + ": field count");
    Date d;
    if (!Date::parse(f[0], d)) throw Error(ErrorCode::UnparseableRow, where + ": bad date");
    if (!data.calendar.empty() && !(data.calendar.back() < d))
      throw Error(ErrorCode::UnparseableRow, where + ": dates must be strictly increasing");
    data.calendar.push_back(d);
    for (std::size_t i = 1; i < f.size(); ++i) {
      double v;
      if (!csv::parse_double(f[i], v) || !std::isfinite(v))
        throw Error(ErrorCode::UnparseableRow, where + ": bad value in " + header[i]);
      data.columns[i - 1].values.push_back(v);
    }
  }
  if (!data.has_column(data.target_column)) throw Error(ErrorCode::MissingColumn, data.target_column);
  return data;
}

}  // namespace sentcast
