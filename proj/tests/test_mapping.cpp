#include <gtest/gtest.h>

#include <random>

#include "mapping_oracle.hpp"
#include "sentcast/error.hpp"
#include "sentcast/mapping.hpp"
#include "test_util.hpp"

using namespace sentcast;
using sentcast::testing::brute_force_map;
using sentcast::testing::TempDir;
using sentcast::testing::weekdays;

namespace {

DailySentimentSeries series_of(const std::vector<double>& pos) {
  DailySentimentSeries d;
  d.calendar = weekdays(Date(2021, 3, 1), pos.size());
  d.channels[kPositive] = pos;
  d.channels[kNegative].assign(pos.size(), 0.0);
  d.channels[kNeutral].assign(pos.size(), 0.0);
  return d;
}

std::vector<double> random_unit(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST(ClassContribution, OneHotTimesProbability) {
  EXPECT_EQ(class_contribution(SentimentScore::from_probabilities(0.7, 0.2, 0.1)),
            (ClassTriple{0.7, 0, 0}));
  EXPECT_EQ(class_contribution(SentimentScore::from_probabilities(0, 0, 1)), (ClassTriple{0, 0, 1}));
  EXPECT_EQ(class_contribution(SentimentScore::from_probabilities(0.2, 0.7, 0.1)),
            (ClassTriple{0, 0.7, 0}));
}

TEST(DailyAggregate, MeanPerDayAndRollForward) {
  // 2021-03-05 is a Friday; 03-06 Saturday; 03-08 Monday.
  const std::vector<Date> cal = {Date(2021, 3, 4), Date(2021, 3, 5), Date(2021, 3, 8)};
  TweetCorpus corpus;
  ScoreTable table;
  auto add = [&](const std::string& id, Date d, double pos) {
    corpus.tweets.push_back({id, d, "", "", {}});
    table.add(id, "cleaned_prosus", SentimentScore::from_probabilities(pos, 0.0, 1.0 - pos));
  };
  add("a", Date(2021, 3, 4), 0.8);
  add("b", Date(2021, 3, 5), 0.6);
  add("c", Date(2021, 3, 5), 1.0);
  add("d", Date(2021, 3, 6), 0.9);  // Saturday -> Monday
  add("e", Date(2021, 3, 1), 0.9);  // before the calendar: ignored
  add("f", Date(2021, 3, 9), 0.9);  // after the calendar: ignored
  auto daily = daily_aggregate(table, "cleaned_prosus", corpus, cal);
  EXPECT_DOUBLE_EQ(daily.channels[kPositive][0], 0.8);
  EXPECT_DOUBLE_EQ(daily.channels[kPositive][1], 0.8);
  EXPECT_DOUBLE_EQ(daily.channels[kPositive][2], 0.9);
  for (std::size_t d = 0; d < 3; ++d) {
    EXPECT_EQ(daily.channels[kNegative][d], 0.0);
    EXPECT_EQ(daily.channels[kNeutral][d], 0.0);
  }
}

TEST(DailyAggregate, EmptyDaysAreZeroAndMissingScoreFails) {
  const auto cal = weekdays(Date(2021, 3, 1), 5);
  TweetCorpus corpus;
  corpus.tweets.push_back({"x", cal[2], "", "", {}});
  ScoreTable table;
  table.add("x", "cleaned_prosus", SentimentScore::from_probabilities(0.8, 0.1, 0.1));
  auto daily = daily_aggregate(table, "cleaned_prosus", corpus, cal);
  for (std::size_t d = 0; d < 5; ++d)
    EXPECT_EQ(daily.channels[kPositive][d], d == 2 ? 0.8 : 0.0);
  try {
    daily_aggregate(table, "pos_prosus", corpus, cal);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingScore);
  }
}

TEST(MemoryWeightedMap, ZeroInZeroOut) {
  auto m = memory_weighted_map(series_of(std::vector<double>(40, 0.0)), {30, KernelMode::Recency});
  for (const auto& ch : m.channels)
    for (double v : ch) EXPECT_EQ(v, 0.0);
}

TEST(MemoryWeightedMap, ConstantAfterWarmup) {
  for (int M : {1, 5, 30})
    for (auto mode : {KernelMode::Recency, KernelMode::Literal}) {
      auto m = memory_weighted_map(series_of(std::vector<double>(80, 0.5)), {M, mode});
      for (std::size_t d = static_cast<std::size_t>(M); d < 80; ++d)
        EXPECT_NEAR(m.channels[kPositive][d], 0.5, 1e-15);
    }
}

TEST(MemoryWeightedMap, HandExample) {
  // M = 2, recency: weights (2, 1); W = [0, 1, 0, 0] -> day index 2 = (2*1 + 1*0)/3.
  auto m = memory_weighted_map(series_of({0, 1, 0, 0}), {2, KernelMode::Recency});
  EXPECT_NEAR(m.channels[kPositive][2], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(m.channels[kPositive][3], 1.0 / 3.0, 1e-15);
  EXPECT_EQ(m.channels[kPositive][0], 0.0);
  EXPECT_EQ(m.channels[kPositive][1], 0.0);
  auto lit = memory_weighted_map(series_of({0, 1, 0, 0}), {2, KernelMode::Literal});
  EXPECT_NEAR(lit.channels[kPositive][2], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(lit.channels[kPositive][3], 2.0 / 3.0, 1e-15);
}

TEST(MemoryWeightedMap, MatchesBruteForce) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + rng() % 300;
    const int M = std::vector<int>{1, 5, 30}[trial % 3];
    const auto mode = trial % 2 ? KernelMode::Literal : KernelMode::Recency;
    auto daily = series_of(random_unit(rng, n));
    daily.channels[kNeutral] = random_unit(rng, n);
    auto m = memory_weighted_map(daily, {M, mode});
    for (std::size_t c = 0; c < 3; ++c) {
      const auto ref = brute_force_map(daily.channels[c], M, mode);
      for (std::size_t d = 0; d < n; ++d) ASSERT_NEAR(m.channels[c][d], ref[d], 1e-12);
    }
  }
}

TEST(MemoryWeightedMap, Properties) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 50 + rng() % 100;
    const int M = 1 + static_cast<int>(rng() % 30);
    const auto mode = trial % 2 ? KernelMode::Literal : KernelMode::Recency;
    const auto w = random_unit(rng, n);
    const auto base = memory_weighted_map(series_of(w), {M, mode}).channels[kPositive];

    // Bounded.
    for (double v : base) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    // Linear.
    auto scaled_w = w;
    for (auto& x : scaled_w) x *= 0.37;
    const auto scaled = memory_weighted_map(series_of(scaled_w), {M, mode}).channels[kPositive];
    for (std::size_t d = 0; d < n; ++d) EXPECT_NEAR(scaled[d], 0.37 * base[d], 1e-12);
    // Shift-equivariant once the full memory is in range.
    std::vector<double> shifted(n, 0.0);
    for (std::size_t d = 1; d < n; ++d) shifted[d] = w[d - 1];
    const auto sm = memory_weighted_map(series_of(shifted), {M, mode}).channels[kPositive];
    for (std::size_t d = static_cast<std::size_t>(M) + 1; d < n; ++d)
      EXPECT_NEAR(sm[d], base[d - 1], 1e-12);
  }
}

TEST(MemoryWeightedMap, SingleDayMemoryIsYesterday) {
  std::mt19937_64 rng(5);
  const auto w = random_unit(rng, 30);
  const auto a = memory_weighted_map(series_of(w), {1, KernelMode::Recency}).channels[kPositive];
  const auto b = memory_weighted_map(series_of(w), {1, KernelMode::Literal}).channels[kPositive];
  EXPECT_EQ(a[0], 0.0);
  for (std::size_t d = 1; d < w.size(); ++d) {
    EXPECT_DOUBLE_EQ(a[d], w[d - 1]);
    EXPECT_DOUBLE_EQ(b[d], w[d - 1]);
  }
}

TEST(MemoryWeightedMap, RejectsZeroMemory) {
  EXPECT_THROW(memory_weighted_map(series_of({0.1}), {0, KernelMode::Recency}), Error);
}

TEST(JoinWithStock, ColumnsAndPassThrough) {
  auto stock = sentcast::testing::make_stock({10, 11, 12, 13, 14});
  MappedSentiment mapped;
  mapped.calendar = stock.calendar();
  for (auto& ch : mapped.channels) ch.assign(5, 0.0);
  auto master = join_with_stock(mapped, stock);
  EXPECT_EQ(master.columns.size(), 8u);
  EXPECT_EQ(master.rows(), 5u);
  EXPECT_EQ(master.column_names(), (std::vector<std::string>{"Open", "High", "Low", "Close",
                                                             "Volume", "sent_pos", "sent_neg",
                                                             "sent_neu"}));
  EXPECT_EQ(master.target_column, "Close");
  EXPECT_EQ(master.column("Close").values, (std::vector<double>{10, 11, 12, 13, 14}));
  for (const auto& name : kSentimentColumns)
    for (double v : master.column(name).values) EXPECT_EQ(v, 0.0);
}

TEST(JoinWithStock, CalendarMismatchNamesFirstDifferingDate) {
  auto stock = sentcast::testing::make_stock({10, 11, 12, 13, 14});
  MappedSentiment mapped;
  mapped.calendar = stock.calendar();
  mapped.calendar[2] = mapped.calendar[2].plus_days(-1);
  for (auto& ch : mapped.channels) ch.assign(5, 0.0);
  try {
    join_with_stock(mapped, stock);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CalendarMismatch);
    EXPECT_EQ(e.detail(), stock.rows[2].date.to_iso());
  }
}

TEST(MasterCsv, WriteThenLoad) {
  TempDir dir;
  auto stock = sentcast::testing::make_stock({10.5, 11.25, 12, 13, 14});
  MappedSentiment mapped;
  mapped.calendar = stock.calendar();
  for (auto& ch : mapped.channels) ch = {0.1, 0.2, 0.3, 1.0 / 3.0, 0.0};
  auto master = join_with_stock(mapped, stock);
  write_master_csv(master, dir.file("m.csv"));
  auto back = load_master_csv(dir.file("m.csv"));
  EXPECT_EQ(back.calendar, master.calendar);
  ASSERT_EQ(back.columns.size(), master.columns.size());
  for (std::size_t c = 0; c < master.columns.size(); ++c) {
    EXPECT_EQ(back.columns[c].name, master.columns[c].name);
    EXPECT_EQ(back.columns[c].values, master.columns[c].values);
  }
  EXPECT_EQ(sentcast::testing::read_file(dir.file("m.csv")).substr(0, 52),
            "Date,Open,High,Low,Close,Volume,sent_pos,sent_neg,se");
}
