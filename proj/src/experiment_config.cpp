#include "sentcast/experiment_config.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sentcast/csv.hpp"
#include "sentcast/error.hpp"

namespace sentcast {

namespace {

std::vector<std::string> split_list(std::string_view value) {
  std::vector<std::string> out;
  for (auto& item : csv::split(value))
    if (!item.empty()) out.push_back(item);
  return out;
}

template <class T>
T parse_number(std::string_view key, std::string_view value) {
  value = csv::trim(value);
  T out{};
  auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || p != value.data() + value.size())
    throw Error(ErrorCode::ConfigError, std::string(key) + ": cannot parse '" + std::string(value) + "'");
  return out;
}

double parse_real(std::string_view key, std::string_view value) {
  double out;
  if (!csv::parse_double(value, out))
    throw Error(ErrorCode::ConfigError, std::string(key) + ": cannot parse '" + std::string(value) + "'");
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw Error(ErrorCode::ConfigError, std::string(key) + ": expected true/false");
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + items[i];
  return out;
}

template <class Set>
std::string join_set(const Set& items) {
  return join(std::vector<std::string>(items.begin(), items.end()));
}

}  // namespace

ScorerConfig default_lexicon() {
  ScorerConfig c;
  c.kind = ScorerKind::Lexicon;
  c.positive_words = {"gain",   "gains",  "growth", "profit",  "profits", "rise",    "rises",
                      "up",     "strong", "bullish", "record", "beat",    "surge",   "boost",
                      "improve", "improved", "success", "good", "great",  "positive", "rally"};
  c.negative_words = {"loss",  "losses",  "crash", "down",  "fall",    "falls",  "weak",
                      "bearish", "decline", "drop", "miss", "risk",    "crisis", "fear",
                      "bad",   "negative", "slump", "selloff", "recession", "default"};
  return c;
}

void ExperimentConfig::validate() const {
  if (lookbacks.empty()) throw Error(ErrorCode::ConfigError, "lookbacks must not be empty");
  for (auto w : lookbacks)
    if (w < 1) throw Error(ErrorCode::ConfigError, "every lookback must be >= 1");
  if (!(split_ratio > 0.0 && split_ratio < 1.0))
    throw Error(ErrorCode::ConfigError, "split_ratio must lie in (0, 1)");
  if (kernel.memory_days < 1) throw Error(ErrorCode::ConfigError, "memory_days must be >= 1");
  if (threads < 1) throw Error(ErrorCode::ConfigError, "threads must be >= 1");
  if (with_sentiment) {
    if (tweet_files.empty()) throw Error(ErrorCode::ConfigError, "tweet_files required with sentiment");
    if (variants.empty()) throw Error(ErrorCode::ConfigError, "variants must not be empty");
    for (const auto& v : variants)
      if (!is_known_variant(v)) throw Error(ErrorCode::ConfigError, "unknown variant '" + v + "'");
    if (scorer.kind == ScorerKind::Precomputed && scorer.source.empty())
      throw Error(ErrorCode::ConfigError, "scorer = precomputed needs scores_file");
  }
  if (stock_file.empty()) throw Error(ErrorCode::ConfigError, "stock_file is required");
  if (model.hidden_units < 1) throw Error(ErrorCode::ConfigError, "hidden_units must be >= 1");
  train.validate();
}

std::string ExperimentConfig::effective_scrip() const {
  if (!scrip.empty()) return scrip;
  return std::filesystem::path(stock_file).stem().string();
}

std::string ExperimentConfig::canonical(bool include_runtime) const {
  std::ostringstream o;
  std::vector<std::string> lbs;
  for (auto w : lookbacks) lbs.push_back(std::to_string(w));
  o << "config_version = " << kConfigVersion << '\n'
    << "stock_file = " << stock_file << '\n'
    << "tweet_files = " << join(tweet_files) << '\n'
    << "scrip = " << effective_scrip() << '\n'
    << "scorer = " << (scorer.kind == ScorerKind::Lexicon ? "lexicon" : "precomputed") << '\n'
    << "scores_file = " << scorer.source << '\n'
    << "positive_words = " << join_set(scorer.positive_words) << '\n'
    << "negative_words = " << join_set(scorer.negative_words) << '\n'
    << "variants = " << join(variants) << '\n'
    << "memory_days = " << kernel.memory_days << '\n'
    << "kernel_mode = " << to_string(kernel.mode) << '\n'
    << "split_ratio = " << csv::format_double(split_ratio) << '\n'
    << "fit_scope = " << to_string(fit_scope) << '\n'
    << "lookbacks = " << join(lbs) << '\n'
    << "hidden_units = " << model.hidden_units << '\n'
    << "output_head = " << to_string(model.head) << '\n'
    << "bins = " << model.bins << '\n'
    << "epochs = " << train.epochs << '\n'
    << "batch_size = " << train.batch_size << '\n'
    << "validation_split = " << csv::format_double(train.validation_split) << '\n'
    << "patience = " << train.patience << '\n'
    << "learning_rate = " << csv::format_double(train.learning_rate) << '\n'
    << "with_sentiment = " << (with_sentiment ? "true" : "false") << '\n'
    << "seed = " << seed << '\n'
    << "max_lag = " << max_lag << '\n'
    << "metric_units = " << (metrics_in_data_units ? "data" : "scaled") << '\n';
  if (include_runtime) o << "output_dir = " << output_dir << '\n' << "threads = " << threads << '\n';
  return o.str();
}

void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view raw) {
  const std::string value(csv::trim(raw));
  if (key == "config_version") {
    if (parse_number<int>(key, value) != kConfigVersion)
      throw Error(ErrorCode::ConfigError, "unsupported config_version " + value);
  } else if (key == "stock_file") {
    cfg.stock_file = value;
  } else if (key == "tweet_files") {
    cfg.tweet_files = split_list(value);
  } else if (key == "scrip") {
    cfg.scrip = value;
  } else if (key == "scorer") {
    if (value == "lexicon") cfg.scorer.kind = ScorerKind::Lexicon;
    else if (value == "precomputed") cfg.scorer.kind = ScorerKind::Precomputed;
    else throw Error(ErrorCode::ConfigError, "scorer must be lexicon or precomputed");
  } else if (key == "scores_file") {
    cfg.scorer.source = value;
  } else if (key == "positive_words") {
    auto words = split_list(value);
    cfg.scorer.positive_words = {words.begin(), words.end()};
  } else if (key == "negative_words") {
    auto words = split_list(value);
    cfg.scorer.negative_words = {words.begin(), words.end()};
  } else if (key == "variants") {
    cfg.variants = split_list(value);
  } else if (key == "memory_days") {
    cfg.kernel.memory_days = parse_number<int>(key, value);
  } else if (key == "kernel_mode") {
    cfg.kernel.mode = parse_kernel_mode(value);
  } else if (key == "split_ratio") {
    cfg.split_ratio = parse_real(key, value);
  } else if (key == "fit_scope") {
    cfg.fit_scope = parse_fit_scope(value);
  } else if (key == "lookbacks") {
    cfg.lookbacks.clear();
    for (const auto& item : split_list(value))
      cfg.lookbacks.push_back(parse_number<std::size_t>(key, item));
  } else if (key == "hidden_units") {
    cfg.model.hidden_units = parse_number<int>(key, value);
  } else if (key == "output_head") {
    cfg.model.head = parse_output_head(value);
  } else if (key == "bins") {
    cfg.model.bins = parse_number<int>(key, value);
  } else if (key == "epochs") {
    cfg.train.epochs = parse_number<int>(key, value);
  } else if (key == "batch_size") {
    cfg.train.batch_size = parse_number<int>(key, value);
  } else if (key == "validation_split") {
    cfg.train.validation_split = parse_real(key, value);
  } else if (key == "patience") {
    cfg.train.patience = parse_number<int>(key, value);
  } else if (key == "learning_rate") {
    cfg.train.learning_rate = parse_real(key, value);
  } else if (key == "with_sentiment") {
    cfg.with_sentiment = parse_bool(key, value);
  } else if (key == "output_dir") {
    cfg.output_dir = value;
  } else if (key == "seed") {
    cfg.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "max_lag") {
    cfg.max_lag = parse_number<std::size_t>(key, value);
  } else if (key == "metric_units") {
    if (value == "data") cfg.metrics_in_data_units = true;
    else if (value == "scaled") cfg.metrics_in_data_units = false;
    else throw Error(ErrorCode::ConfigError, "metric_units must be data or scaled");
  } else if (key == "threads") {
    cfg.threads = parse_number<int>(key, value);
  } else {
    throw Error(ErrorCode::ConfigError, "unknown key '" + std::string(key) + "'");
  }
}

void apply_override(ExperimentConfig& cfg, std::string_view assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw Error(ErrorCode::ConfigError, "expected key=value, got '" + std::string(assignment) + "'");
  apply_setting(cfg, csv::trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

ExperimentConfig parse_experiment_config(std::string_view text) {
  ExperimentConfig cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto body = csv::trim(line);
    if (body.empty()) continue;
    try {
      apply_override(cfg, body);
    } catch (const Error& e) {
      throw Error(ErrorCode::ConfigError, "line " + std::to_string(lineno) + ": " + e.detail());
    }
  }
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config(ss.str());
}

}  // namespace sentcast
