#include "sentcast/sentiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "sentcast/csv.hpp"
#include "sentcast/error.hpp"

namespace sentcast {

std::string_view to_string(SentimentLabel label) {
  switch (label) {
    case SentimentLabel::Positive: return "positive";
    case SentimentLabel::Negative: return "negative";
    case SentimentLabel::Neutral: return "neutral";
  }
  return "neutral";
}

SentimentScore SentimentScore::from_probabilities(double pos, double neg, double neu) {
  SentimentScore s{pos, neg, neu, SentimentLabel::Neutral};
  if (neu >= pos && neu >= neg) s.label = SentimentLabel::Neutral;
  else if (pos >= neg) s.label = SentimentLabel::Positive;
  else s.label = SentimentLabel::Negative;
  return s;
}

bool is_known_variant(std::string_view variant) {
  return std::find(kVariantNames.begin(), kVariantNames.end(), variant) != kVariantNames.end();
}

bool variant_uses_pos_text(std::string_view variant) { return variant.starts_with("pos_"); }

int variant_feature_index(std::string_view variant) {
  auto it = std::find(kVariantNames.begin(), kVariantNames.end(), variant);
  if (it == kVariantNames.end()) throw Error(ErrorCode::UnknownVariant, std::string(variant));
  return static_cast<int>(it - kVariantNames.begin()) + 1;
}

void ScoreTable::add(const std::string& tweet_id, const std::string& variant,
                     const SentimentScore& score) {
  if (!is_known_variant(variant)) throw Error(ErrorCode::UnknownVariant, variant);
  if (!entries_.emplace(std::make_pair(tweet_id, variant), score).second)
    throw Error(ErrorCode::ProbabilityRowInvalid,
                "duplicate entry for tweet '" + tweet_id + "', variant " + variant);
  if (std::find(variants_.begin(), variants_.end(), variant) == variants_.end()) {
    variants_.push_back(variant);
    std::sort(variants_.begin(), variants_.end(), [](const auto& a, const auto& b) {
      return variant_feature_index(a) < variant_feature_index(b);
    });
  }
}

const SentimentScore* ScoreTable::find(const std::string& tweet_id,
                                       std::string_view variant) const {
  auto it = entries_.find(std::make_pair(tweet_id, std::string(variant)));
  return it == entries_.end() ? nullptr : &it->second;
}

SentimentScore score_tweet(const ScorerConfig& config, std::string_view text) {
  if (config.kind != ScorerKind::Lexicon)
    throw Error(ErrorCode::ScorerUnavailable,
                "precomputed scores are looked up by tweet id, not text");
  std::istringstream in{std::string(text)};
  std::string tok;
  double n = 0, pos = 0, neg = 0;
  while (in >> tok) {
    n += 1;
    if (config.positive_words.count(tok)) pos += 1;
    if (config.negative_words.count(tok)) neg += 1;
  }
  if (n == 0) return SentimentScore::from_probabilities(0, 0, 1);
  const double u = (pos - neg) / std::max(1.0, pos + neg);
  const double s = (pos + neg) / n;
  const double p_pos = s * std::max(u, 0.0);
  const double p_neg = s * std::max(-u, 0.0);
  return SentimentScore::from_probabilities(p_pos, p_neg, 1.0 - p_pos - p_neg);
}

SentimentScore LexiconScorer::score(const Tweet&, std::string_view, std::string_view text) const {
  return score_tweet(config_, text);
}

SentimentScore PrecomputedScorer::score(const Tweet& tweet, std::string_view variant,
                                        std::string_view) const {
  const auto* s = table_.find(tweet.id, variant);
  if (!s)
    throw Error(ErrorCode::ScorerUnavailable,
                "no precomputed score for tweet '" + tweet.id + "', variant " + std::string(variant));
  return *s;
}

std::unique_ptr<Scorer> make_scorer(const ScorerConfig& config, const TweetCorpus& corpus) {
  if (config.kind == ScorerKind::Lexicon) return std::make_unique<LexiconScorer>(config);
  if (config.source.empty())
    throw Error(ErrorCode::ConfigError, "precomputed scorer needs a score file");
  return std::make_unique<PrecomputedScorer>(load_precomputed_scores(config.source, corpus));
}

ScoreTable score_corpus(const Scorer& scorer, const TweetCorpus& corpus,
                        const std::vector<std::string>& variants) {
  for (const auto& v : variants)
    if (!is_known_variant(v)) throw Error(ErrorCode::UnknownVariant, v);
  ScoreTable table;
  for (const auto& t : corpus.tweets) {
    for (const auto& v : variants) {
      std::string_view text = t.cleaned_text;
      if (variant_uses_pos_text(v)) {
        if (!t.pos_tagged_text)
          throw Error(ErrorCode::MissingVariantText, "tweet '" + t.id + "', variant " + v);
        text = *t.pos_tagged_text;
      }
      table.add(t.id, v, scorer.score(t, v, text));
    }
  }
  return table;
}

ScoreTable score_corpus(const ScorerConfig& config, const TweetCorpus& corpus,
                        const std::vector<std::string>& variants) {
  auto scorer = make_scorer(config, corpus);
  return score_corpus(*scorer, corpus, variants);
}

ScoreTable load_precomputed_scores(const std::string& path, const TweetCorpus& corpus) {
  auto lines = csv::read_lines(path);
  std::unordered_set<std::string> ids;
  for (const auto& t : corpus.tweets) ids.insert(t.id);

  ScoreTable table;
  bool header_seen = false;
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    if (csv::trim(lines[ln]).empty()) continue;
    auto f = csv::split(lines[ln]);
    const auto where = "line " + std::to_string(ln + 1);
    if (!header_seen) {
      const std::vector<std::string> want = {"tweet_id", "variant", "p_pos", "p_neg", "p_neu"};
      if (f != want)
        throw Error(ErrorCode::ProbabilityRowInvalid,
                    where + ": expected header tweet_id,variant,p_pos,p_neg,p_neu");
      header_seen = true;
      continue;
    }
    if (f.size() != 5) throw Error(ErrorCode::ProbabilityRowInvalid, where + ": expected 5 fields");
    if (!ids.count(f[0])) throw Error(ErrorCode::UnknownTweetId, where + ": '" + f[0] + "'");
    if (!is_known_variant(f[1])) throw Error(ErrorCode::UnknownVariant, where + ": " + f[1]);
    double p[3];
    for (int k = 0; k < 3; ++k) {
      if (!csv::parse_double(f[2 + k], p[k]) || !std::isfinite(p[k]) || p[k] < 0 || p[k] > 1)
        throw Error(ErrorCode::ProbabilityRowInvalid, where + ": probability out of [0,1]");
    }
    const double sum = p[0] + p[1] + p[2];
    if (std::abs(sum - 1.0) > 1e-3)
      throw Error(ErrorCode::ProbabilityRowInvalid,
                  where + ": probabilities sum to " + csv::format_double(sum));
    if (std::abs(sum - 1.0) > 1e-6)
      for (double& x : p) x /= sum;
    table.add(f[0], f[1], SentimentScore::from_probabilities(p[0], p[1], p[2]));
  }
  return table;
}

void write_scores_csv(const ScoreTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
  out << "tweet_id,variant,p_pos,p_neg,p_neu\n";
  for (const auto& [key, s] : table.entries()) {
    out << key.first << ',' << key.second << ',' << csv::format_double(s.p_pos) << ','
        << csv::format_double(s.p_neg) << ',' << csv::format_double(s.p_neu) << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path + "'");
}

}  // namespace sentcast
