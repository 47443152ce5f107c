#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sentcast/dataset.hpp"
#include "sentcast/mapping.hpp"
#include "sentcast/neuralnet.hpp"
#include "sentcast/sentiment.hpp"

namespace sentcast {

inline constexpr int kConfigVersion = 1;

/// Built-in lexicon used when the config names no word lists.
ScorerConfig default_lexicon();

/// Everything one grid run needs. Loaded from a `key = value` file; see
/// README for the key list.
struct ExperimentConfig {
  std::string stock_file;
  std::vector<std::string> tweet_files;
  std::string scrip;  // defaults to the stock file stem
  ScorerConfig scorer = default_lexicon();
  std::vector<std::string> variants{kVariantNames.begin(), kVariantNames.end()};
  MemoryKernel kernel;
  double split_ratio = 0.8;
  FitScope fit_scope = FitScope::TrainOnly;
  std::vector<std::size_t> lookbacks = {5, 10, 20, 30, 60, 90};
  ModelConfig model;
  TrainConfig train;
  bool with_sentiment = true;
  std::string output_dir = "results";
  std::uint64_t seed = 42;
  std::size_t max_lag = 14;
  bool metrics_in_data_units = true;
  int threads = 1;

  void validate() const;
  /// Stable key=value rendering. Fingerprints leave out the settings that
  /// cannot change results (output_dir, threads).
  std::string canonical(bool include_runtime = true) const;
  std::string effective_scrip() const;
};

/// Applies one `key=value` assignment; throws ConfigError on unknown keys or
/// malformed values.
void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value);
void apply_override(ExperimentConfig& cfg, std::string_view assignment);

ExperimentConfig parse_experiment_config(std::string_view text);
ExperimentConfig load_experiment_config(const std::string& path);

}  // namespace sentcast
