#include "sentcast/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "sentcast/csv.hpp"
#include "sentcast/dataset.hpp"
#include "sentcast/error.hpp"
#include "sentcast/neuralnet.hpp"

namespace sentcast {

namespace fs = std::filesystem;

namespace {

std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

template <class F>
auto in_stage(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e);
  }
}

std::string master_digest(const MasterDataset& m) {
  std::string text;
  for (const auto& d : m.calendar) text += d.to_iso() + ';';
  for (const auto& c : m.columns) {
    text += c.name + ':';
    for (double v : c.values) text += csv::format_double(v) + ',';
  }
  return fingerprint_of(text);
}

std::string cell_fingerprint(const ExperimentConfig& cfg, std::string_view data_digest,
                             const MasterDataset& master, const std::string& variant,
                             std::size_t lookback, std::uint64_t seed) {
  std::ostringstream o;
  o << cfg.canonical(false) << "|data=" << data_digest << "|master=" << master_digest(master)
    << "|variant=" << variant << "|lookback=" << lookback << "|seed=" << seed;
  return fingerprint_of(o.str());
}

std::string safe_name(std::string s) {
  for (char& c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) c = '_';
  return s;
}

std::string cell_stem(const ExperimentRecord& r) {
  return safe_name(r.scrip) + "_" + safe_name(r.variant) + "_w" + std::to_string(r.lookback);
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + p.string() + "'");
  return out;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create '" + dir + "': " + ec.message());
}

std::string fmt(double v) { return csv::format_double(v); }

}  // namespace

std::string fingerprint_of(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

PipelineInputs load_inputs(const ExperimentConfig& cfg, const DataSource& source) {
  auto bytes = source.read_bytes ? source.read_bytes : read_file_bytes;
  PipelineInputs in;
  std::string digest_text;
  in.stock = in_stage("ingest", [&] { return source.load_stock(cfg.stock_file); });
  digest_text += fingerprint_of(bytes(cfg.stock_file));
  if (cfg.with_sentiment) {
    std::vector<TweetCorpus> corpora;
    for (const auto& path : cfg.tweet_files) {
      corpora.push_back(in_stage("ingest", [&] { return source.load_tweets(path); }));
      digest_text += fingerprint_of(bytes(path));
    }
    in.corpus = in_stage("ingest", [&] { return merge_corpora(std::move(corpora)); });
    if (cfg.scorer.kind == ScorerKind::Precomputed)
      digest_text += fingerprint_of(bytes(cfg.scorer.source));
  }
  in.data_digest = fingerprint_of(digest_text);
  return in;
}

MasterDataset build_master(const PipelineInputs& inputs, const ExperimentConfig& cfg,
                           const std::string& variant) {
  if (!cfg.with_sentiment || !inputs.corpus) return stock_only_dataset(inputs.stock);
  const auto& corpus = *inputs.corpus;
  const auto table = in_stage("score", [&] {
    auto scorer = make_scorer(cfg.scorer, corpus);
    return score_corpus(*scorer, corpus, {variant});
  });
  return in_stage("map", [&] {
    const auto daily = daily_aggregate(table, variant, corpus, inputs.stock.calendar());
    return join_with_stock(memory_weighted_map(daily, cfg.kernel), inputs.stock);
  });
}

ExperimentRecord run_on_master(const MasterDataset& master, const ExperimentConfig& cfg,
                               const std::string& variant, std::size_t lookback,
                               std::uint64_t seed) {
  ExperimentRecord rec;
  rec.started_at = utc_now();
  rec.scrip = cfg.effective_scrip();
  rec.variant = variant;
  rec.lookback = lookback;
  rec.seed = seed;

  MasterDataset data = master;
  if (!cfg.with_sentiment) {
    std::vector<std::string> keep;
    for (const auto& name : master.column_names())
      if (std::find(kSentimentColumns.begin(), kSentimentColumns.end(), name) == kSentimentColumns.end())
        keep.push_back(name);
    data = master.select(keep);
  }
  rec.n_features = data.columns.size();
  rec.fingerprint = cell_fingerprint(cfg, "", data, variant, lookback, seed);
  const std::string target = data.target_column;

  auto [scalers, train_rows, test_rows] = in_stage("preprocess", [&] {
    auto s = fit_scalers(data, cfg.split_ratio, cfg.fit_scope);
    auto parts = chronological_split(transform(s, data), cfg.split_ratio);
    return std::make_tuple(std::move(s), std::move(parts.first), std::move(parts.second));
  });
  const auto train_w = in_stage("prepare", [&] { return make_windows(train_rows, lookback, target); });
  const auto test_w = in_stage("prepare", [&] { return make_windows(test_rows, lookback, target); });

  auto model = in_stage("create", [&] {
    ModelConfig mc = cfg.model;
    mc.lookback = static_cast<int>(lookback);
    mc.n_features = static_cast<int>(rec.n_features);
    mc.seed = seed;
    auto m = init_model(mc);
    m.feature_columns = data.column_names();
    return m;
  });
  rec.history = in_stage("fit", [&] { return train(model, train_w, cfg.train); });
  rec.scaled_predicted = in_stage("predict", [&] { return predict(model, test_w); });
  rec.scaled_actual = test_w.targets;
  rec.dates = test_w.target_dates;
  in_stage("inverse-scale", [&] {
    rec.predicted = inverse_transform(scalers, target, rec.scaled_predicted);
    rec.actual = inverse_transform(scalers, target, rec.scaled_actual);
  });

  in_stage("evaluate", [&] {
    const auto& p = cfg.metrics_in_data_units ? rec.predicted : rec.scaled_predicted;
    const auto& a = cfg.metrics_in_data_units ? rec.actual : rec.scaled_actual;
    const auto m = compute_metrics(p, a);
    const auto offset = best_time_offset(p, a, std::min(cfg.max_lag, p.size() - 2));
    rec.report.val_score = validation_score(rec.history);
    rec.report.r2 = m.r2;
    rec.report.rmse = m.rmse;
    rec.report.mae = m.mae;
    rec.report.time_offset = offset.lag;
    rec.report.acc = offset.accuracy;
    rec.report.n_samples = p.size();
    rec.report.units = cfg.metrics_in_data_units ? "data" : "scaled";
    rec.scaled_rmse = root_mean_squared_error(rec.scaled_predicted, rec.scaled_actual);
  });
  rec.ok = true;
  rec.finished_at = utc_now();
  return rec;
}

ExperimentRecord run_pipeline(const ExperimentConfig& cfg, const std::string& variant,
                              std::size_t lookback, const DataSource& source) {
  in_stage("config", [&] { cfg.validate(); });
  const auto inputs = load_inputs(cfg, source);
  const auto master = build_master(inputs, cfg, variant);
  auto rec = run_on_master(master, cfg, variant, lookback, cfg.seed);
  rec.fingerprint = cell_fingerprint(cfg, inputs.data_digest, master, variant, lookback, cfg.seed);
  return rec;
}

std::vector<std::size_t> usable_lookbacks(const ExperimentConfig& cfg, std::size_t rows,
                                          std::vector<std::size_t>* skipped) {
  const std::size_t test_rows = rows - train_row_count(rows, cfg.split_ratio);
  std::vector<std::size_t> out;
  for (auto w : cfg.lookbacks) {
    if (2 * w >= test_rows) {
      if (skipped) skipped->push_back(w);
    } else {
      out.push_back(w);
    }
  }
  return out;
}

std::vector<ExperimentRecord> run_grid(const ExperimentConfig& cfg, const DataSource& source,
                                       const CellRunner& runner) {
  in_stage("config", [&] { cfg.validate(); });
  const auto inputs = load_inputs(cfg, source);

  std::vector<std::size_t> skipped;
  const auto lookbacks = usable_lookbacks(cfg, inputs.stock.rows.size(), &skipped);
  for (auto w : skipped)
    std::cerr << "warning: skipping lookback " << w << ": not below half the test rows\n";
  if (lookbacks.empty())
    throw Error(ErrorCode::ConfigError, "no lookback is usable with " +
                                            std::to_string(inputs.stock.rows.size()) + " rows");

  const std::vector<std::string> variants =
      cfg.with_sentiment ? cfg.variants : std::vector<std::string>{"none"};

  struct Cell {
    std::size_t master;
    std::string variant;
    std::size_t lookback;
  };
  std::vector<Cell> cells;
  std::vector<std::optional<MasterDataset>> masters;
  std::vector<std::optional<StageError>> master_errors;
  for (const auto& v : variants) {
    try {
      masters.emplace_back(build_master(inputs, cfg, v));
      master_errors.emplace_back();
    } catch (const StageError& e) {
      masters.emplace_back();
      master_errors.emplace_back(e);
    }
    for (auto w : lookbacks) cells.push_back({masters.size() - 1, v, w});
  }

  const CellRunner run = runner ? runner : CellRunner(run_on_master);
  std::vector<ExperimentRecord> records(cells.size());
  auto run_cell = [&](std::size_t i) {
    const auto& cell = cells[i];
    const std::uint64_t seed = cfg.seed + i;
    ExperimentRecord rec;
    try {
      if (master_errors[cell.master]) throw *master_errors[cell.master];
      rec = run(*masters[cell.master], cfg, cell.variant, cell.lookback, seed);
      rec.fingerprint = cell_fingerprint(cfg, inputs.data_digest, *masters[cell.master],
                                         cell.variant, cell.lookback, seed);
    } catch (const StageError& e) {
      rec.failed_stage = e.stage();
      rec.error = e.what();
    } catch (const std::exception& e) {
      rec.failed_stage = "unknown";
      rec.error = e.what();
    }
    if (!rec.ok) {
      rec.scrip = cfg.effective_scrip();
      rec.variant = cell.variant;
      rec.lookback = cell.lookback;
      rec.seed = seed;
      if (rec.finished_at.empty()) rec.finished_at = utc_now();
    }
    records[i] = std::move(rec);
  };

  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(cfg.threads), cells.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) run_cell(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) run_cell(i);
      });
    for (auto& th : pool) th.join();
  }

  emit_report(records, cfg.output_dir);
  emit_results_table(records, cfg.output_dir);

  // Full per-cell records, including timestamps and fingerprints.
  std::map<std::string, std::vector<const ExperimentRecord*>> by_scrip;
  for (const auto& r : records) by_scrip[r.scrip].push_back(&r);
  for (const auto& [scrip, recs] : by_scrip) {
    auto out = open_out(fs::path(cfg.output_dir) / ("records_" + safe_name(scrip) + ".jsonl"));
    for (const auto* r : recs) {
      nlohmann::json j;
      j["fingerprint"] = r->fingerprint;
      j["scrip"] = r->scrip;
      j["variant"] = r->variant;
      j["lookback"] = r->lookback;
      j["seed"] = r->seed;
      j["ok"] = r->ok;
      if (!r->ok) {
        j["stage"] = r->failed_stage;
        j["error"] = r->error;
      } else {
        j["val_score"] = r->report.val_score;
        j["r2"] = r->report.r2;
        j["rmse"] = r->report.rmse;
        j["mae"] = r->report.mae;
        j["T"] = r->report.time_offset;
        j["acc"] = r->report.acc;
        j["units"] = r->report.units;
        j["scaled_rmse"] = r->scaled_rmse;
        j["epochs_run"] = r->history.epochs.size();
        j["best_epoch"] = r->history.best_epoch;
        j["stopped_early"] = r->history.stopped_early;
        j["loss_curve"] = r->loss_curve_path;
        j["predictions"] = r->predictions_path;
      }
      j["started_at"] = r->started_at;
      j["finished_at"] = r->finished_at;
      out << j.dump() << '\n';
    }
  }
  return records;
}

std::vector<std::string> emit_report(std::vector<ExperimentRecord>& records,
                                     const std::string& out_dir) {
  if (records.empty()) throw Error(ErrorCode::ConfigError, "no records to report");
  ensure_dir(out_dir);
  std::vector<std::string> files;

  std::map<std::string, std::vector<ExperimentRecord*>> by_scrip;
  for (auto& r : records) by_scrip[r.scrip].push_back(&r);

  for (auto& [scrip, recs] : by_scrip) {
    const auto summary_path = fs::path(out_dir) / ("summary_" + safe_name(scrip) + ".csv");
    auto out = open_out(summary_path);
    out << kSummaryHeader << '\n';
    for (auto* r : recs) {
      out << r->scrip << ',' << r->variant << ',' << r->lookback << ',';
      if (r->ok) {
        const auto& e = r->report;
        out << fmt(e.val_score) << ',' << fmt(e.r2) << ',' << fmt(e.rmse) << ',' << fmt(e.mae)
            << ',' << e.time_offset << ',' << fmt(e.acc) << ',' << e.units << '\n';
      } else {
        out << ",,,,,,failed\n";
      }
    }
    if (!out) throw Error(ErrorCode::IoError, "write failed for '" + summary_path.string() + "'");
    files.push_back(summary_path.string());

    for (auto* r : recs) {
      if (!r->ok) continue;
      const auto loss_path = fs::path(out_dir) / ("loss_" + cell_stem(*r) + ".csv");
      auto loss = open_out(loss_path);
      loss << "epoch,train_loss,val_loss\n";
      for (std::size_t e = 0; e < r->history.epochs.size(); ++e)
        loss << e << ',' << fmt(r->history.epochs[e].train_loss) << ','
             << fmt(r->history.epochs[e].val_loss) << '\n';
      if (!loss) throw Error(ErrorCode::IoError, "write failed for '" + loss_path.string() + "'");
      r->loss_curve_path = loss_path.string();
      files.push_back(r->loss_curve_path);

      const auto pred_path = fs::path(out_dir) / ("pred_" + cell_stem(*r) + ".csv");
      auto pred = open_out(pred_path);
      pred << "date,actual,predicted\n";
      for (std::size_t k = 0; k < r->predicted.size(); ++k)
        pred << r->dates[k].to_iso() << ',' << fmt(r->actual[k]) << ',' << fmt(r->predicted[k]) << '\n';
      if (!pred) throw Error(ErrorCode::IoError, "write failed for '" + pred_path.string() + "'");
      r->predictions_path = pred_path.string();
      files.push_back(r->predictions_path);
    }
  }
  return files;
}

std::vector<std::string> emit_results_table(const std::vector<ExperimentRecord>& records,
                                            const std::string& out_dir) {
  ensure_dir(out_dir);
  std::map<std::string, std::vector<const ExperimentRecord*>> by_scrip;
  for (const auto& r : records) by_scrip[r.scrip].push_back(&r);
  std::vector<std::string> files;
  for (const auto& [scrip, recs] : by_scrip) {
    const auto path = fs::path(out_dir) / ("results_" + safe_name(scrip) + ".csv");
    auto out = open_out(path);
    out << "Feature,LookBack,ValidationScore,R2,RMSE\n";
    for (const auto* r : recs) {
      const int feature = is_known_variant(r->variant) ? variant_feature_index(r->variant) : 0;
      out << feature << ',' << r->lookback << ',';
      if (r->ok)
        out << fmt(r->report.val_score) << ',' << fmt(r->report.r2) << ',' << fmt(r->report.rmse) << '\n';
      else
        out << ",,\n";
    }
    files.push_back(path.string());
  }
  return files;
}

}  // namespace sentcast
