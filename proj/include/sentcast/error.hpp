#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sentcast {

enum class ErrorCode {
  // ingest
  MissingColumn,
  UnparseableRow,
  EmptySeries,
  UnparseableRecord,
  EmptyCorpus,
  // sentiment
  ScorerUnavailable,
  MissingVariantText,
  UnknownTweetId,
  UnknownVariant,
  ProbabilityRowInvalid,
  // mapping
  MissingScore,
  CalendarMismatch,
  // dataset
  DegenerateDataset,
  UnknownColumn,
  InsufficientRows,
  // neuralnet
  InvalidShape,
  ShapeMismatch,
  EmptyTrainingSet,
  NonFiniteLoss,
  InvalidModelFile,
  // evalmetrics
  LengthMismatch,
  ZeroVariance,
  SeriesTooShort,
  EmptyHistory,
  // harness
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above; the
/// message holds the offending detail (column name, line number, date, ...).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail),
        code_(code),
        detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace sentcast
