// Acceptance gate: one line per criterion, non-zero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gradcheck.hpp"
#include "mapping_oracle.hpp"
#include "metric_fixtures.hpp"
#include "sentcast/dataset.hpp"
#include "sentcast/evalmetrics.hpp"
#include "sentcast/harness.hpp"
#include "sentcast/mapping.hpp"
#include "sentcast/neuralnet.hpp"
#include "synthetic.hpp"
#include "test_util.hpp"

using namespace sentcast;
namespace st = sentcast::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double time_limit_s;
  std::function<Outcome()> run;
};

std::string num(double v, int precision = 4) {
  std::ostringstream o;
  o.precision(precision);
  o << v;
  return o.str();
}

Outcome gradient_correctness() {
  double worst = 0.0;
  std::string where;
  std::size_t checked = 0, tiny = 0;
  double tiny_abs = 0.0;
  for (int k = 0; k < 20; ++k) {
    const int hidden = (k & 1) ? 4 : 2;
    const int lookback = (k & 2) ? 5 : 3;
    const int features = (k & 4) ? 3 : 1;
    const auto head = k >= 16 ? OutputHead::SoftmaxBins : OutputHead::Linear;
    auto c = st::random_case(1000 + static_cast<std::uint64_t>(k), hidden, lookback, features, 4, head);
    auto r = st::check_gradients(c, 1e-5);
    checked += r.checked;
    tiny += r.below_floor;
    tiny_abs = std::max(tiny_abs, r.worst_abs_below_floor);
    if (r.worst_relative > worst) {
      worst = r.worst_relative;
      where = "instance " + std::to_string(k) + " " + r.worst_tensor;
    }
  }
  return {worst <= 1e-4, std::to_string(checked) + " entries, worst relative error " + num(worst) +
                             (where.empty() ? "" : " at " + where) + ", tolerance 1e-4; " +
                             std::to_string(tiny) + " entries under the " + num(st::kGradFloor) +
                             " floor, max abs diff " + num(tiny_abs)};
}

Outcome mapping_oracle() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  const int modes[] = {1, 5, 30};
  for (int s = 0; s < 100; ++s) {
    const std::size_t n = 1 + rng() % 300;
    const int M = modes[s % 3];
    const auto mode = (s / 3) % 2 ? KernelMode::Literal : KernelMode::Recency;
    DailySentimentSeries daily;
    daily.calendar = st::weekdays(Date(2020, 1, 1), n);
    for (auto& ch : daily.channels) {
      ch.resize(n);
      for (auto& x : ch) x = u(rng);
    }
    const auto mapped = memory_weighted_map(daily, {M, mode});
    for (std::size_t c = 0; c < 3; ++c) {
      const auto ref = st::brute_force_map(daily.channels[c], M, mode);
      for (std::size_t d = 0; d < n; ++d) worst = std::max(worst, std::abs(mapped.channels[c][d] - ref[d]));
    }
  }
  return {worst <= 1e-12, "100 series, max abs diff " + num(worst) + ", tolerance 1e-12"};
}

Outcome scaling_round_trip() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1000.0, 1000.0);
  double worst = 0.0;
  int degenerate = 0;
  bool degenerate_ok = true;
  for (int col = 0; col < 1000; ++col) {
    const std::size_t n = 2 + rng() % 100;
    std::vector<double> v(n);
    if (col % 10 == 0) {
      std::fill(v.begin(), v.end(), u(rng));
    } else {
      for (auto& x : v) x = u(rng);
    }
    MasterDataset m;
    m.calendar = st::weekdays(Date(2020, 1, 1), n);
    m.columns = {{"Close", v}};
    const auto scope = col % 2 ? FitScope::Full : FitScope::TrainOnly;
    const auto s = fit_scalers(m, 0.8, scope);
    const auto back = inverse_transform(s, "Close", transform(s, m).column("Close").values);
    if (s.at("Close").degenerate()) {
      ++degenerate;
      for (double b : back) degenerate_ok = degenerate_ok && b == s.at("Close").min;
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(back[i] - v[i]));
  }
  return {worst <= 1e-9 && degenerate_ok && degenerate >= 100,
          "1000 columns (" + std::to_string(degenerate) + " degenerate" +
              (degenerate_ok ? ", all returned min" : ", NOT all returned min") +
              "), max abs error " + num(worst) + ", tolerance 1e-9"};
}

Outcome windowing_exactness() {
  std::size_t pairs = 0, bad = 0;
  for (std::size_t n = 2; n <= 50; ++n)
    for (std::size_t w = 1; w < n; ++w) {
      ++pairs;
      MasterDataset m;
      m.calendar = st::weekdays(Date(2020, 1, 1), n);
      std::vector<double> idx(n);
      for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<double>(i);
      m.columns = {{"Close", idx}};
      const auto set = make_windows(m, w, "Close");
      bool ok = set.size() == n - w;
      for (std::size_t k = 0; ok && k < set.size(); ++k) {
        const auto last_row = static_cast<std::size_t>(set.inputs[k](static_cast<long>(w) - 1, 0));
        ok = set.target_rows[k] == last_row + 1 && set.targets[k] == idx[last_row + 1] &&
             set.inputs[k](0, 0) == static_cast<double>(k);
      }
      bad += !ok;
    }
  return {bad == 0, std::to_string(pairs) + " (N, w) pairs, " + std::to_string(bad) + " mismatches"};
}

MasterDataset stock_master(const std::vector<double>& close) {
  auto stock = st::make_stock(close, "SINE");
  for (auto& r : stock.rows) r.volume = 1000.0;
  return stock_only_dataset(stock);
}

Outcome overfit_sanity() {
  MasterDataset master = stock_master(st::sine_series(200));
  ExperimentConfig cfg;
  cfg.with_sentiment = false;
  cfg.model.hidden_units = 16;
  cfg.train.epochs = 500;
  auto rec = run_on_master(master, cfg, "none", 10, 42);
  return {rec.scaled_rmse < 0.05, "scaled test RMSE " + num(rec.scaled_rmse) + " after " +
                                      std::to_string(rec.history.epochs.size()) +
                                      " epochs, threshold 0.05"};
}

/// Close follows a mean-reverting walk whose next-day scaled step is
/// 0.8 * (sent_pos - sent_neg) of the current day plus N(0, 0.02) noise.
MasterDataset planted_master(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  std::normal_distribution<double> noise(0.0, 0.02);
  std::vector<double> price(n), pos(n), neg(n);
  double p = 0.5;
  for (std::size_t t = 0; t < n; ++t) {
    price[t] = p;
    const double d = u(rng) - 0.1 * (p - 0.5);
    pos[t] = 0.5 + d / 2.0;
    neg[t] = 0.5 - d / 2.0;
    p += 0.8 * d + noise(rng);
  }
  // Price range of 1 keeps scaled returns equal to raw returns.
  const auto [lo, hi] = std::minmax_element(price.begin(), price.end());
  const double shift = *lo, span = *hi - *lo;
  MasterDataset m;
  m.calendar = st::weekdays(Date(2019, 1, 1), n);
  std::vector<double> close(n), flat(n, 1000.0), zero(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) close[t] = 1.0 + (price[t] - shift) / span;
  // Rescale the sentiment difference by the same factor so the planted
  // relationship survives the price normalisation.
  for (std::size_t t = 0; t < n; ++t) {
    pos[t] = 0.5 + (pos[t] - 0.5) / span;
    neg[t] = 0.5 + (neg[t] - 0.5) / span;
  }
  m.columns = {{"Open", close},    {"High", close},     {"Low", close},
               {"Close", close},   {"Volume", flat},    {"sent_pos", pos},
               {"sent_neg", neg},  {"sent_neu", zero}};
  return m;
}

Outcome planted_signal() {
  std::vector<double> ratios;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto master = planted_master(seed, 400);
    ExperimentConfig cfg;
    cfg.model.hidden_units = 16;
    cfg.train.epochs = 300;
    cfg.train.patience = 20;
    cfg.with_sentiment = true;
    const auto with = run_on_master(master, cfg, "planted", 5, seed);
    cfg.with_sentiment = false;
    const auto without = run_on_master(master, cfg, "none", 5, seed);
    ratios.push_back(with.scaled_rmse / without.scaled_rmse);
    detail += (detail.empty() ? "" : " ") + num(with.scaled_rmse, 3) + "/" + num(without.scaled_rmse, 3);
  }
  auto sorted = ratios;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[2];
  return {median <= 0.8, "median RMSE ratio " + num(median) + " (with/without: " + detail +
                             "), threshold 0.8"};
}

Outcome offset_recovery() {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> base(200);
  double level = 0.0;
  for (auto& x : base) x = level += g(rng);
  std::string found;
  bool ok = true;
  for (std::size_t k = 0; k <= 9; ++k) {
    std::vector<double> pred(base.size());
    for (std::size_t t = 0; t < base.size(); ++t) pred[t] = base[t >= k ? t - k : 0];
    const auto r = best_time_offset(pred, base, 14);
    ok = ok && r.lag == k;
    found += (k ? "," : "") + std::to_string(r.lag);
  }
  return {ok, "planted 0..9, recovered " + found};
}

Outcome metric_cross_check() {
  double worst = 0.0;
  for (const auto& f : st::metric_fixtures()) {
    worst = std::max(worst, std::abs(mean_absolute_error(f.pred, f.actual) - f.mae));
    worst = std::max(worst, std::abs(root_mean_squared_error(f.pred, f.actual) - f.rmse));
    worst = std::max(worst, std::abs(r_squared(f.pred, f.actual) - f.r2));
    worst = std::max(worst, std::abs(directional_accuracy(f.pred, f.actual) - f.acc));
  }
  std::mt19937_64 rng(4242);
  std::normal_distribution<double> g(0.0, 10.0);
  int violations = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t n = 1 + rng() % 50;
    std::vector<double> p(n), a(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = g(rng);
      a[i] = g(rng);
    }
    violations += root_mean_squared_error(p, a) < mean_absolute_error(p, a);
  }
  return {worst <= 1e-12 && violations == 0,
          "fixture max error " + num(worst) + " (tolerance 1e-12), RMSE < MAE in " +
              std::to_string(violations) + " of 10000 random pairs"};
}

Outcome grid_determinism() {
  st::TempDir a, b;
  auto ca = st::write_small_experiment(a);
  auto cb = st::write_small_experiment(b);
  ca.train.epochs = cb.train.epochs = 5;
  // Same inputs, different locations: copy the first run's files so the
  // data bytes are identical.
  cb.stock_file = ca.stock_file;
  cb.tweet_files = ca.tweet_files;
  run_grid(ca);
  run_grid(cb);
  const auto sa = st::read_file(a.file("out/summary_SYN.csv"));
  const auto sb = st::read_file(b.file("out/summary_SYN.csv"));
  const bool ok = !sa.empty() && sa == sb && sa.find("failed") == std::string::npos;
  return {ok, "two grid runs, summary " + std::to_string(sa.size()) + " bytes, " +
                  (sa == sb ? "identical" : "DIFFERENT")};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "gradient correctness", 30, gradient_correctness},
      {2, "mapping oracle equivalence", 5, mapping_oracle},
      {3, "scaling round-trip", 1, scaling_round_trip},
      {4, "windowing exactness", 1, windowing_exactness},
      {5, "overfit sanity", 60, overfit_sanity},
      {6, "planted-signal benefit", 300, planted_signal},
      {7, "time-offset recovery", 1, offset_recovery},
      {8, "metric cross-check", 1e9, metric_cross_check},
      {9, "determinism", 1e9, grid_determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string timing = num(secs, 3) + " s";
    if (c.time_limit_s < 1e9) {
      timing += " of " + num(c.time_limit_s) + " s";
      if (secs > c.time_limit_s) out.pass = false;
    }
    failures += !out.pass;
    std::printf("[%s] criterion %d: %s: %s (%s)\n", out.pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                out.detail.c_str(), timing.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
