// Command-line front end. Each subcommand reads and writes the documented
// CSV/JSONL files so stages can be chained through the filesystem.
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sentcast/csv.hpp"
#include "sentcast/dataset.hpp"
#include "sentcast/error.hpp"
#include "sentcast/evalmetrics.hpp"
#include "sentcast/experiment_config.hpp"
#include "sentcast/harness.hpp"
#include "sentcast/ingest.hpp"
#include "sentcast/mapping.hpp"
#include "sentcast/neuralnet.hpp"
#include "sentcast/sentiment.hpp"

namespace {

using namespace sentcast;

constexpr int kExitOk = 0;
constexpr int kExitCellsFailed = 1;
constexpr int kExitInputError = 2;

struct ConfigOptions {
  std::string path;
  std::vector<std::string> overrides;

  void attach(CLI::App* app) {
    app->add_option("--config", path, "Experiment config file (key = value)");
    app->add_option("--set", overrides, "Override a config key, e.g. --set epochs=50")
        ->allow_extra_args(false);
  }

  ExperimentConfig load() const {
    ExperimentConfig cfg = path.empty() ? ExperimentConfig{} : load_experiment_config(path);
    for (const auto& o : overrides) apply_override(cfg, o);
    return cfg;
  }
};

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
  return out;
}

MasterDataset features_for(const MasterDataset& master, bool with_sentiment) {
  if (with_sentiment) return master;
  std::vector<std::string> keep;
  for (const auto& n : master.column_names())
    if (std::find(kSentimentColumns.begin(), kSentimentColumns.end(), n) == kSentimentColumns.end())
      keep.push_back(n);
  return master.select(keep);
}

int cmd_clean(const std::string& tweets, const std::string& out_path) {
  const auto corpus = load_tweets(tweets);
  auto out = open_out(out_path);
  for (const auto& t : corpus.tweets) {
    nlohmann::json j;
    j["id"] = t.id;
    j["date"] = t.date.to_iso();
    j["text"] = t.raw_text;
    j["cleaned_text"] = t.cleaned_text;
    if (t.pos_tagged_text) j["pos_text"] = *t.pos_tagged_text;
    out << j.dump() << '\n';
  }
  return kExitOk;
}

int cmd_score(const ConfigOptions& co, const std::vector<std::string>& tweet_files,
              const std::string& out_path) {
  auto cfg = co.load();
  std::vector<TweetCorpus> corpora;
  for (const auto& f : tweet_files) corpora.push_back(load_tweets(f));
  const auto corpus = merge_corpora(std::move(corpora));
  write_scores_csv(score_corpus(cfg.scorer, corpus, cfg.variants), out_path);
  return kExitOk;
}

int cmd_map(const ConfigOptions& co, const std::string& stock_path,
            const std::vector<std::string>& tweet_files, const std::string& scores_path,
            const std::string& variant, const std::string& out_path) {
  auto cfg = co.load();
  const auto stock = load_stock_csv(stock_path);
  if (!cfg.with_sentiment) {
    write_master_csv(stock_only_dataset(stock), out_path);
    return kExitOk;
  }
  std::vector<TweetCorpus> corpora;
  for (const auto& f : tweet_files) corpora.push_back(load_tweets(f));
  const auto corpus = merge_corpora(std::move(corpora));
  const auto table = load_precomputed_scores(scores_path, corpus);
  const auto daily = daily_aggregate(table, variant, corpus, stock.calendar());
  write_master_csv(join_with_stock(memory_weighted_map(daily, cfg.kernel), stock), out_path);
  return kExitOk;
}

int cmd_train(const ConfigOptions& co, const std::string& master_path, std::size_t lookback,
              const std::string& model_path, const std::string& scalers_path,
              const std::string& history_path) {
  auto cfg = co.load();
  const auto data = features_for(load_master_csv(master_path), cfg.with_sentiment);
  const auto scalers = fit_scalers(data, cfg.split_ratio, cfg.fit_scope);
  const auto [train_rows, test_rows] = chronological_split(transform(scalers, data), cfg.split_ratio);
  const auto windows = make_windows(train_rows, lookback, data.target_column);

  ModelConfig mc = cfg.model;
  mc.lookback = static_cast<int>(lookback);
  mc.n_features = static_cast<int>(data.columns.size());
  mc.seed = cfg.seed;
  auto model = init_model(mc);
  model.feature_columns = data.column_names();
  const auto history = train(model, windows, cfg.train);

  save_model(model, model_path);
  write_scalers_csv(scalers, scalers_path);
  if (!history_path.empty()) {
    auto out = open_out(history_path);
    out << "epoch,train_loss,val_loss,val_r2,val_mae,val_rmse,best\n";
    for (std::size_t e = 0; e < history.epochs.size(); ++e) {
      const auto& r = history.epochs[e];
      out << e << ',' << csv::format_double(r.train_loss) << ',' << csv::format_double(r.val_loss)
          << ',' << csv::format_double(r.val_r2) << ',' << csv::format_double(r.val_mae) << ','
          << csv::format_double(r.val_rmse) << ',' << (e == history.best_epoch ? 1 : 0) << '\n';
    }
  }
  std::cout << "trained " << history.epochs.size() << " epochs, best epoch " << history.best_epoch
            << (history.stopped_early ? " (early stop)" : "") << '\n';
  return kExitOk;
}

double best_val_r2_from_history(const std::string& path) {
  if (path.empty()) return std::numeric_limits<double>::quiet_NaN();
  auto lines = csv::read_lines(path);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto f = csv::split(lines[i]);
    double v;
    if (f.size() == 7 && f[6] == "1" && csv::parse_double(f[3], v)) return v;
  }
  throw Error(ErrorCode::EmptyHistory, path + ": no best epoch row");
}

int cmd_evaluate(const ConfigOptions& co, const std::string& model_path,
                 const std::string& master_path, const std::string& scalers_path,
                 const std::string& history_path, const std::string& out_path,
                 const std::string& predictions_path, std::string variant) {
  auto cfg = co.load();
  if (cfg.scrip.empty() && cfg.stock_file.empty())
    cfg.scrip = std::filesystem::path(master_path).stem().string();
  const auto model = load_model(model_path);
  const auto master = load_master_csv(master_path);
  const auto data = model.feature_columns.empty() ? features_for(master, cfg.with_sentiment)
                                                  : master.select(model.feature_columns);
  const auto scalers = load_scalers_csv(scalers_path);
  const auto [train_rows, test_rows] = chronological_split(transform(scalers, data), cfg.split_ratio);
  const auto windows =
      make_windows(test_rows, static_cast<std::size_t>(model.config.lookback), data.target_column);
  const auto scaled_pred = predict(model, windows);
  const auto pred = inverse_transform(scalers, data.target_column, scaled_pred);
  const auto actual = inverse_transform(scalers, data.target_column, windows.targets);
  const auto& p = cfg.metrics_in_data_units ? pred : scaled_pred;
  const auto& a = cfg.metrics_in_data_units ? actual : windows.targets;

  const auto m = compute_metrics(p, a);
  const auto offset = best_time_offset(p, a, std::min(cfg.max_lag, p.size() - 2));
  if (variant.empty()) variant = data.has_column(kSentimentColumns[0]) ? "-" : "none";
  auto out = open_out(out_path);
  out << kSummaryHeader << '\n'
      << cfg.effective_scrip() << ',' << variant << ','
      << model.config.lookback << ',' << csv::format_double(best_val_r2_from_history(history_path))
      << ',' << csv::format_double(m.r2) << ',' << csv::format_double(m.rmse) << ','
      << csv::format_double(m.mae) << ',' << offset.lag << ',' << csv::format_double(offset.accuracy)
      << ',' << (cfg.metrics_in_data_units ? "data" : "scaled") << '\n';
  if (!predictions_path.empty()) {
    auto po = open_out(predictions_path);
    po << "date,actual,predicted\n";
    for (std::size_t k = 0; k < pred.size(); ++k)
      po << windows.target_dates[k].to_iso() << ',' << csv::format_double(actual[k]) << ','
         << csv::format_double(pred[k]) << '\n';
  }
  return kExitOk;
}

int cmd_grid(const ConfigOptions& co) {
  const auto cfg = co.load();
  const auto records = run_grid(cfg);
  std::size_t failed = 0;
  for (const auto& r : records) {
    if (r.ok) {
      std::cout << r.variant << " w=" << r.lookback << "  r2=" << r.report.r2
                << " rmse=" << r.report.rmse << " T=" << r.report.time_offset
                << " acc=" << r.report.acc << '\n';
    } else {
      ++failed;
      std::cout << r.variant << " w=" << r.lookback << "  FAILED " << r.error << '\n';
    }
  }
  std::cout << records.size() - failed << " ok, " << failed << " failed; reports in "
            << cfg.output_dir << '\n';
  return failed ? kExitCellsFailed : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sentiment-aware stock forecasting with a bidirectional LSTM"};
  app.require_subcommand(1);

  std::string tweets_in, out_path;
  auto* clean = app.add_subcommand("clean", "Clean tweet text (JSONL in, JSONL out)");
  clean->add_option("--tweets", tweets_in, "Tweet JSONL file")->required();
  clean->add_option("--out", out_path, "Output JSONL")->required();

  ConfigOptions score_cfg;
  std::vector<std::string> score_tweets;
  std::string score_out;
  auto* score = app.add_subcommand("score", "Score tweets into a score CSV");
  score_cfg.attach(score);
  score->add_option("--tweets", score_tweets, "Tweet JSONL file(s)")->required();
  score->add_option("--out", score_out, "Score CSV")->required();

  ConfigOptions map_cfg;
  std::string map_stock, map_scores, map_variant = "cleaned_prosus", map_out;
  std::vector<std::string> map_tweets;
  auto* map = app.add_subcommand("map", "Join scores with a stock series into a master CSV");
  map_cfg.attach(map);
  map->add_option("--stock", map_stock, "Stock CSV")->required();
  map->add_option("--tweets", map_tweets, "Tweet JSONL file(s)");
  map->add_option("--scores", map_scores, "Score CSV");
  map->add_option("--variant", map_variant, "Scoring variant");
  map->add_option("--out", map_out, "Master CSV")->required();

  ConfigOptions train_cfg;
  std::string train_master, train_model, train_scalers, train_history;
  std::size_t train_lookback = 60;
  auto* train_cmd = app.add_subcommand("train", "Train a model on a master CSV");
  train_cfg.attach(train_cmd);
  train_cmd->add_option("--master", train_master, "Master CSV")->required();
  train_cmd->add_option("--lookback", train_lookback, "Lookback window")->check(CLI::PositiveNumber);
  train_cmd->add_option("--model", train_model, "Output model file")->required();
  train_cmd->add_option("--scalers", train_scalers, "Output scaler CSV")->required();
  train_cmd->add_option("--history", train_history, "Output training history CSV");

  ConfigOptions eval_cfg;
  std::string eval_model, eval_master, eval_scalers, eval_history, eval_out, eval_pred, eval_variant;
  auto* evaluate = app.add_subcommand("evaluate", "Evaluate a trained model on the test split");
  eval_cfg.attach(evaluate);
  evaluate->add_option("--model", eval_model, "Model file")->required();
  evaluate->add_option("--master", eval_master, "Master CSV")->required();
  evaluate->add_option("--scalers", eval_scalers, "Scaler CSV")->required();
  evaluate->add_option("--history", eval_history, "History CSV (for val_score)");
  evaluate->add_option("--out", eval_out, "Report CSV")->required();
  evaluate->add_option("--predictions", eval_pred, "Prediction CSV");
  evaluate->add_option("--variant", eval_variant, "Variant label for the report row");

  ConfigOptions grid_cfg;
  auto* grid = app.add_subcommand("grid", "Run the variant x lookback grid");
  grid_cfg.attach(grid);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (*clean) return cmd_clean(tweets_in, out_path);
    if (*score) return cmd_score(score_cfg, score_tweets, score_out);
    if (*map) return cmd_map(map_cfg, map_stock, map_tweets, map_scores, map_variant, map_out);
    if (*train_cmd)
      return cmd_train(train_cfg, train_master, train_lookback, train_model, train_scalers,
                       train_history);
    if (*evaluate)
      return cmd_evaluate(eval_cfg, eval_model, eval_master, eval_scalers, eval_history, eval_out,
                          eval_pred, eval_variant);
    if (*grid) return cmd_grid(grid_cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitOk;
}
