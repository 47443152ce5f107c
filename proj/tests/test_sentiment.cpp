#include <gtest/gtest.h>

#include <random>

#include "sentcast/error.hpp"
#include "sentcast/sentiment.hpp"
#include "test_util.hpp"

using namespace sentcast;
using sentcast::testing::TempDir;
using sentcast::testing::write_file;

namespace {

ScorerConfig growth_crash() {
  ScorerConfig c;
  c.positive_words = {"growth"};
  c.negative_words = {"crash"};
  return c;
}

TweetCorpus corpus_of(std::size_t n, bool with_pos) {
  TweetCorpus c;
  for (std::size_t i = 0; i < n; ++i) {
    Tweet t{std::to_string(i + 1), Date(2023, 1, 2).plus_days(static_cast<int>(i)), "growth",
            "growth", {}};
    if (with_pos) t.pos_tagged_text = "growth/NN";
    c.tweets.push_back(t);
  }
  return c;
}

void expect_valid(const SentimentScore& s) {
  EXPECT_NEAR(s.p_pos + s.p_neg + s.p_neu, 1.0, 1e-6);
  EXPECT_EQ(SentimentScore::from_probabilities(s.p_pos, s.p_neg, s.p_neu).label, s.label);
}

}  // namespace

TEST(SentimentScore, ArgmaxTieBreaking) {
  EXPECT_EQ(SentimentScore::from_probabilities(0.4, 0.2, 0.4).label, SentimentLabel::Neutral);
  EXPECT_EQ(SentimentScore::from_probabilities(0.4, 0.4, 0.2).label, SentimentLabel::Positive);
  EXPECT_EQ(SentimentScore::from_probabilities(0.2, 0.5, 0.3).label, SentimentLabel::Negative);
  EXPECT_EQ(SentimentScore::from_probabilities(1.0 / 3, 1.0 / 3, 1.0 / 3).label,
            SentimentLabel::Neutral);
}

TEST(ScoreTweet, MixedHits) {
  // c+ = 2, c- = 1, n = 3: u = 1/3, s = 1 -> (1/3, 0, 2/3). Neutral wins the
  // argmax even though positive outweighs negative.
  auto s = score_tweet(growth_crash(), "growth growth crash");
  EXPECT_GT(s.p_pos, s.p_neg);
  EXPECT_DOUBLE_EQ(s.p_pos, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(s.p_neg, 0.0);
  EXPECT_DOUBLE_EQ(s.p_neu, 2.0 / 3.0);
  EXPECT_EQ(s.label, SentimentLabel::Neutral);
  expect_valid(s);
}

TEST(ScoreTweet, NoHitsIsNeutral) {
  auto s = score_tweet(growth_crash(), "markets opened today");
  EXPECT_EQ(s.p_pos, 0.0);
  EXPECT_EQ(s.p_neg, 0.0);
  EXPECT_EQ(s.p_neu, 1.0);
  EXPECT_EQ(s.label, SentimentLabel::Neutral);
  EXPECT_EQ(score_tweet(growth_crash(), "").label, SentimentLabel::Neutral);
}

TEST(ScoreTweet, SingleNegative) {
  auto s = score_tweet(growth_crash(), "crash");
  EXPECT_EQ(s.label, SentimentLabel::Negative);
  EXPECT_DOUBLE_EQ(s.p_neg, 1.0);
  EXPECT_EQ(score_tweet(growth_crash(), "growth").label, SentimentLabel::Positive);
}

TEST(ScoreTweet, PrecomputedKindHasNoTextScoring) {
  ScorerConfig c;
  c.kind = ScorerKind::Precomputed;
  EXPECT_THROW(score_tweet(c, "growth"), Error);
}

TEST(ScoreTweet, ValidDeterministicAndMonotone) {
  const auto cfg = growth_crash();
  const std::vector<std::string> words = {"growth", "crash", "flat", "the", "market"};
  std::mt19937 rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    std::string text;
    const int n = 1 + static_cast<int>(rng() % 12);
    for (int i = 0; i < n; ++i) text += words[rng() % words.size()] + " ";
    const auto s = score_tweet(cfg, text);
    expect_valid(s);
    EXPECT_GE(s.p_pos, 0.0);
    EXPECT_GE(s.p_neg, 0.0);
    EXPECT_GE(s.p_neu, -1e-15);
    EXPECT_EQ(score_tweet(cfg, text), s);
    EXPECT_GE(score_tweet(cfg, text + " growth").p_pos, s.p_pos) << text;
  }
}

TEST(ScoreCorpus, Cardinality) {
  auto table = score_corpus(growth_crash(), corpus_of(3, false),
                            {"cleaned_prosus", "cleaned_yiyanghkust"});
  EXPECT_EQ(table.size(), 6u);
  EXPECT_EQ(table.variants(), (std::vector<std::string>{"cleaned_prosus", "cleaned_yiyanghkust"}));
  for (const auto& [key, s] : table.entries()) expect_valid(s);
}

TEST(ScoreCorpus, PosVariantNeedsPosText) {
  try {
    score_corpus(growth_crash(), corpus_of(2, false), {"pos_prosus"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingVariantText);
  }
  EXPECT_EQ(score_corpus(growth_crash(), corpus_of(2, true), {"pos_prosus"}).size(), 2u);
}

TEST(ScoreCorpus, UnknownVariant) {
  EXPECT_THROW(score_corpus(growth_crash(), corpus_of(1, false), {"bert"}), Error);
}

TEST(Precomputed, PassThroughAllVariants) {
  TempDir dir;
  auto corpus = corpus_of(1, true);
  auto path = write_file(dir.file("s.csv"),
                         "tweet_id,variant,p_pos,p_neg,p_neu\n"
                         "1,cleaned_prosus,0.9,0.05,0.05\n"
                         "1,cleaned_yiyanghkust,0.1,0.7,0.2\n"
                         "1,pos_prosus,0.3,0.3,0.4\n"
                         "1,pos_yiyanghkust,0.123456789012345,0.5,0.376543210987655\n");
  ScorerConfig cfg;
  cfg.kind = ScorerKind::Precomputed;
  cfg.source = path;
  auto table = score_corpus(cfg, corpus, {kVariantNames.begin(), kVariantNames.end()});
  ASSERT_EQ(table.size(), 4u);
  const auto* a = table.find("1", "cleaned_prosus");
  ASSERT_TRUE(a);
  EXPECT_EQ(a->p_pos, 0.9);
  EXPECT_EQ(a->p_neg, 0.05);
  EXPECT_EQ(a->label, SentimentLabel::Positive);
  EXPECT_EQ(table.find("1", "cleaned_yiyanghkust")->label, SentimentLabel::Negative);
  EXPECT_EQ(table.find("1", "pos_prosus")->label, SentimentLabel::Neutral);
  EXPECT_EQ(table.find("1", "pos_yiyanghkust")->p_pos, 0.123456789012345);
}

TEST(Precomputed, MissingEntryIsScorerUnavailable) {
  TempDir dir;
  auto corpus = corpus_of(2, false);
  auto path = write_file(dir.file("s.csv"),
                         "tweet_id,variant,p_pos,p_neg,p_neu\n1,cleaned_prosus,0.9,0.05,0.05\n");
  ScorerConfig cfg;
  cfg.kind = ScorerKind::Precomputed;
  cfg.source = path;
  try {
    score_corpus(cfg, corpus, {"cleaned_prosus"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ScorerUnavailable);
  }
}

TEST(Precomputed, RenormalizesSmallDeviation) {
  TempDir dir;
  auto corpus = corpus_of(7, false);
  auto path = write_file(dir.file("s.csv"),
                         "tweet_id,variant,p_pos,p_neg,p_neu\n7,cleaned_prosus,0.9,0.05,0.0505\n");
  auto table = load_precomputed_scores(path, corpus);
  const auto* s = table.find("7", "cleaned_prosus");
  ASSERT_TRUE(s);
  EXPECT_NEAR(s->p_pos + s->p_neg + s->p_neu, 1.0, 1e-12);
  EXPECT_NEAR(s->p_pos, 0.9 / 1.0005, 1e-15);
  EXPECT_EQ(s->label, SentimentLabel::Positive);
}

TEST(Precomputed, Rejections) {
  TempDir dir;
  auto corpus = corpus_of(2, false);
  auto expect_code = [&](const std::string& body, ErrorCode code) {
    auto path = write_file(dir.file("r.csv"), "tweet_id,variant,p_pos,p_neg,p_neu\n" + body);
    try {
      load_precomputed_scores(path, corpus);
      ADD_FAILURE() << body;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), code) << body;
    }
  };
  expect_code("1,cleaned_prosus,0.9,0.2,0.1\n", ErrorCode::ProbabilityRowInvalid);
  expect_code("9,cleaned_prosus,0.9,0.05,0.05\n", ErrorCode::UnknownTweetId);
  expect_code("1,finbert,0.9,0.05,0.05\n", ErrorCode::UnknownVariant);
  expect_code("1,cleaned_prosus,0.9,0.05,0.05\n1,cleaned_prosus,0.9,0.05,0.05\n",
              ErrorCode::ProbabilityRowInvalid);
}

TEST(Precomputed, WriteThenLoadRoundTrips) {
  TempDir dir;
  auto corpus = corpus_of(5, true);
  ScorerConfig lex;
  lex.positive_words = {"growth"};
  auto table = score_corpus(lex, corpus, {kVariantNames.begin(), kVariantNames.end()});
  write_scores_csv(table, dir.file("out.csv"));
  auto back = load_precomputed_scores(dir.file("out.csv"), corpus);
  EXPECT_EQ(back.entries(), table.entries());
}

TEST(Variants, FeatureIndexOrder) {
  EXPECT_EQ(variant_feature_index("cleaned_prosus"), 1);
  EXPECT_EQ(variant_feature_index("cleaned_yiyanghkust"), 2);
  EXPECT_EQ(variant_feature_index("pos_prosus"), 3);
  EXPECT_EQ(variant_feature_index("pos_yiyanghkust"), 4);
  EXPECT_TRUE(variant_uses_pos_text("pos_prosus"));
  EXPECT_FALSE(variant_uses_pos_text("cleaned_prosus"));
}
