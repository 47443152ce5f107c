#include "sentcast/date.hpp"

#include <charconv>
#include <cstdio>
#include <stdexcept>

#include "sentcast/error.hpp"

namespace sentcast {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::UnparseableRow: return "UnparseableRow";
    case ErrorCode::EmptySeries: return "EmptySeries";
    case ErrorCode::UnparseableRecord: return "UnparseableRecord";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::ScorerUnavailable: return "ScorerUnavailable";
    case ErrorCode::MissingVariantText: return "MissingVariantText";
    case ErrorCode::UnknownTweetId: return "UnknownTweetId";
    case ErrorCode::UnknownVariant: return "UnknownVariant";
    case ErrorCode::ProbabilityRowInvalid: return "ProbabilityRowInvalid";
    case ErrorCode::MissingScore: return "MissingScore";
    case ErrorCode::CalendarMismatch: return "CalendarMismatch";
    case ErrorCode::DegenerateDataset: return "DegenerateDataset";
    case ErrorCode::UnknownColumn: return "UnknownColumn";
    case ErrorCode::InsufficientRows: return "InsufficientRows";
    case ErrorCode::InvalidShape: return "InvalidShape";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::InvalidModelFile: return "InvalidModelFile";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::EmptyHistory: return "EmptyHistory";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Date::Date(int year, unsigned month, unsigned day)
    : days_(std::chrono::year_month_day{std::chrono::year{year},
                                        std::chrono::month{month},
                                        std::chrono::day{day}}) {}

namespace {

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}

}  // namespace

bool Date::parse(std::string_view text, Date& out) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return false;
  int y = 0, m = 0, d = 0;
  if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), m) ||
      !parse_int(text.substr(8, 2), d))
    return false;
  std::chrono::year_month_day ymd{std::chrono::year{y},
                                  std::chrono::month{static_cast<unsigned>(m)},
                                  std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return false;
  out = Date{std::chrono::sys_days{ymd}};
  return true;
}

Date Date::from_iso(std::string_view text) {
  Date d;
  if (!parse(text, d))
    throw std::invalid_argument("invalid ISO date '" + std::string(text) + "'");
  return d;
}

std::string Date::to_iso() const {
  std::chrono::year_month_day ymd{days_};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

}  // namespace sentcast
