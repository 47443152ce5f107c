#pragma once

#include <array>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sentcast/ingest.hpp"

namespace sentcast {

enum class SentimentLabel { Positive, Negative, Neutral };

std::string_view to_string(SentimentLabel label);

struct SentimentScore {
  double p_pos = 0.0;
  double p_neg = 0.0;
  double p_neu = 1.0;
  SentimentLabel label = SentimentLabel::Neutral;

  /// Label is the argmax; ties resolve neutral > positive > negative.
  static SentimentScore from_probabilities(double pos, double neg, double neu);

  friend bool operator==(const SentimentScore&, const SentimentScore&) = default;
};

/// The four scoring variants, in feature order 1..4.
inline constexpr std::array<std::string_view, 4> kVariantNames = {
    "cleaned_prosus", "cleaned_yiyanghkust", "pos_prosus", "pos_yiyanghkust"};

bool is_known_variant(std::string_view variant);
/// True for the variants that score the POS-tagged text.
bool variant_uses_pos_text(std::string_view variant);
/// 1-based feature index of a variant, as used in result tables.
int variant_feature_index(std::string_view variant);

class ScoreTable {
 public:
  /// Inserts an entry; a second insert for the same (id, variant) throws.
  void add(const std::string& tweet_id, const std::string& variant, const SentimentScore& score);
  const SentimentScore* find(const std::string& tweet_id, std::string_view variant) const;

  std::size_t size() const { return entries_.size(); }
  /// Variants in canonical order, limited to those present.
  const std::vector<std::string>& variants() const { return variants_; }
  const std::map<std::pair<std::string, std::string>, SentimentScore>& entries() const {
    return entries_;
  }

 private:
  std::map<std::pair<std::string, std::string>, SentimentScore> entries_;
  std::vector<std::string> variants_;
};

enum class ScorerKind { Lexicon, Precomputed };

struct ScorerConfig {
  ScorerKind kind = ScorerKind::Lexicon;
  std::string source;  // precomputed score CSV
  std::set<std::string> positive_words;
  std::set<std::string> negative_words;
};

/// Counts lexicon hits among whitespace tokens. With c+ / c- hits out of n
/// tokens: u = (c+ - c-) / max(1, c+ + c-), s = (c+ + c-) / n,
/// p_pos = s*max(u,0), p_neg = s*max(-u,0), p_neu = 1 - p_pos - p_neg.
/// A text with no tokens is fully neutral.
SentimentScore score_tweet(const ScorerConfig& config, std::string_view text);

/// Pluggable per-tweet scorer. Implementations are immutable once built.
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual SentimentScore score(const Tweet& tweet, std::string_view variant,
                               std::string_view text) const = 0;
};

class LexiconScorer final : public Scorer {
 public:
  explicit LexiconScorer(ScorerConfig config) : config_(std::move(config)) {}
  SentimentScore score(const Tweet&, std::string_view, std::string_view text) const override;

 private:
  ScorerConfig config_;
};

/// Serves scores computed offline; lookups miss with ScorerUnavailable.
class PrecomputedScorer final : public Scorer {
 public:
  explicit PrecomputedScorer(ScoreTable table) : table_(std::move(table)) {}
  SentimentScore score(const Tweet& tweet, std::string_view variant,
                       std::string_view text) const override;

 private:
  ScoreTable table_;
};

std::unique_ptr<Scorer> make_scorer(const ScorerConfig& config, const TweetCorpus& corpus);

ScoreTable score_corpus(const Scorer& scorer, const TweetCorpus& corpus,
                        const std::vector<std::string>& variants);
ScoreTable score_corpus(const ScorerConfig& config, const TweetCorpus& corpus,
                        const std::vector<std::string>& variants);

/// Reads `tweet_id,variant,p_pos,p_neg,p_neu`. Rows whose probabilities sum
/// within 1e-3 of one are renormalized; larger deviations are rejected.
ScoreTable load_precomputed_scores(const std::string& path, const TweetCorpus& corpus);
void write_scores_csv(const ScoreTable& table, const std::string& path);

}  // namespace sentcast
