#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sentcast/error.hpp"
#include "sentcast/evalmetrics.hpp"
#include "sentcast/experiment_config.hpp"
#include "sentcast/ingest.hpp"
#include "sentcast/mapping.hpp"
#include "sentcast/sentiment.hpp"

namespace sentcast {

/// A module error tagged with the pipeline stage it escaped from.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause)
      : Error(cause.code(), stage + ": " + cause.detail()), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

/// File readers used by the pipeline; tests swap them out.
struct DataSource {
  std::function<StockSeries(const std::string&)> load_stock = load_stock_csv;
  std::function<TweetCorpus(const std::string&)> load_tweets = sentcast::load_tweets;
  std::function<std::string(const std::string&)> read_bytes;  // for fingerprints; default reads the file
};

struct ExperimentRecord {
  std::string fingerprint;
  std::string scrip;
  std::string variant;  // "none" for stock-only runs
  std::size_t lookback = 0;
  std::uint64_t seed = 0;
  std::size_t n_features = 0;

  bool ok = false;
  std::string failed_stage;
  std::string error;

  EvalReport report;
  double scaled_rmse = 0.0;
  TrainingHistory history;
  std::vector<Date> dates;  // test target dates
  std::vector<double> actual, predicted;                // data units
  std::vector<double> scaled_actual, scaled_predicted;  // scaler units

  std::string started_at, finished_at;
  std::string loss_curve_path, predictions_path;
};

/// Loaded once per grid and shared read-only by every cell.
struct PipelineInputs {
  StockSeries stock;
  std::optional<TweetCorpus> corpus;
  std::string data_digest;
};

PipelineInputs load_inputs(const ExperimentConfig& cfg, const DataSource& source = {});

/// Scores the corpus for one variant, maps it and joins it with the stock
/// columns. Stock-only when cfg.with_sentiment is false.
MasterDataset build_master(const PipelineInputs& inputs, const ExperimentConfig& cfg,
                           const std::string& variant);

/// Scale -> split -> window -> train -> predict -> inverse-scale -> score.
/// Errors propagate as sentcast::Error with the stage name in the detail.
ExperimentRecord run_on_master(const MasterDataset& master, const ExperimentConfig& cfg,
                               const std::string& variant, std::size_t lookback,
                               std::uint64_t seed);

ExperimentRecord run_pipeline(const ExperimentConfig& cfg, const std::string& variant,
                              std::size_t lookback, const DataSource& source = {});

/// 64-bit FNV-1a, hex encoded.
std::string fingerprint_of(std::string_view text);

/// Drops lookbacks of at least half the test rows.
std::vector<std::size_t> usable_lookbacks(const ExperimentConfig& cfg, std::size_t rows,
                                          std::vector<std::size_t>* skipped = nullptr);

/// Hook that lets callers observe or replace each grid cell; defaults to
/// run_on_master.
using CellRunner = std::function<ExperimentRecord(const MasterDataset&, const ExperimentConfig&,
                                                  const std::string&, std::size_t, std::uint64_t)>;

/// One record per (variant, lookback); cell failures become failed records.
/// Writes the report files into cfg.output_dir.
std::vector<ExperimentRecord> run_grid(const ExperimentConfig& cfg, const DataSource& source = {},
                                       const CellRunner& runner = {});

/// Writes summary_<scrip>.csv plus, per successful record,
/// loss_<scrip>_<variant>_w<lookback>.csv and pred_<...>.csv.
std::vector<std::string> emit_report(std::vector<ExperimentRecord>& records,
                                     const std::string& out_dir);

/// results_<scrip>.csv in the Feature,LookBack,ValidationScore,R2,RMSE layout.
std::vector<std::string> emit_results_table(const std::vector<ExperimentRecord>& records,
                                            const std::string& out_dir);

inline constexpr const char* kSummaryHeader = "scrip,variant,lookback,val_score,r2,rmse,mae,T,acc,units";

}  // namespace sentcast
