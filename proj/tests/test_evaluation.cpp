#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "sfcf/evaluation.hpp"

using namespace sfcf;

TEST(Logistic, SeparablePointsAreFitExactly) {
  Dataset ds;
  ds.columns = {continuous("x", {-1.0, 1.0})};
  ds.label = categorical("y", {0, 1});
  ds.protected_attr = categorical("s", {0, 1});
  LogisticOptions opt;
  opt.l2 = 0.01;
  const auto rows = detail::all_rows(2);
  const auto m = train_logistic(ds, rows, {"x"}, opt);
  EXPECT_EQ(m.weights.size(), 2);
  const auto pred = predict(m, ds, rows);
  EXPECT_EQ(accuracy(pred, {0, 1}), 1.0);
}

TEST(Logistic, EmptySelectionPredictsTheMajorityClass) {
  Dataset ds;
  ds.label = categorical("y", {1, 1, 1, 0, 0, 1, 0, 1, 0, 1});
  ds.protected_attr = categorical("s", std::vector<double>(10, 0.0));
  const auto rows = detail::all_rows(10);
  const auto m = train_logistic(ds, rows, {}, {});
  EXPECT_EQ(m.weights.size(), 1);
  const auto pred = predict(m, ds, rows);
  for (int p : pred) EXPECT_EQ(p, 1);
  EXPECT_DOUBLE_EQ(accuracy(pred, detail::as_ints(ds.label, rows)), 0.6);
}

TEST(Logistic, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  const int n = 40, k = 3;
  Eigen::MatrixXd x(n, k + 1);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < k; ++j) x(i, j) = g(rng);
    x(i, k) = 1.0;
    y(i) = g(rng) > 0 ? 1.0 : 0.0;
  }
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd w(k + 1);
    for (int j = 0; j <= k; ++j) w(j) = 2.0 * g(rng);
    const Eigen::VectorXd grad = logistic_gradient(x, y, w, 0.05);
    for (int j = 0; j <= k; ++j) {
      const double h = 1e-6;
      Eigen::VectorXd up = w, down = w;
      up(j) += h;
      down(j) -= h;
      const double fd = (logistic_loss(x, y, up, 0.05) - logistic_loss(x, y, down, 0.05)) / (2 * h);
      EXPECT_NEAR(grad(j), fd, 1e-6);
    }
  }
}

TEST(Logistic, SameSeedSameModel) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  Dataset ds;
  std::vector<double> a(200), y(200);
  for (int i = 0; i < 200; ++i) {
    a[i] = g(rng);
    y[i] = a[i] + g(rng) > 0 ? 1.0 : 0.0;
  }
  ds.columns = {continuous("a", a)};
  ds.label = categorical("y", y);
  ds.protected_attr = categorical("s", std::vector<double>(200, 1.0));
  LogisticOptions opt;
  opt.seed = 9;
  const auto rows = detail::all_rows(200);
  const auto m1 = train_logistic(ds, rows, {"a"}, opt);
  const auto m2 = train_logistic(ds, rows, {"a"}, opt);
  EXPECT_EQ(m1.weights, m2.weights);
  EXPECT_GT(m1.weights(0), 0.0);
}

TEST(Logistic, DivergenceIsReported) {
  Eigen::MatrixXd x(2, 2);
  x << 1e200, 1, -1e200, 1;
  Eigen::VectorXd y(2);
  y << 1, 0;
  LogisticOptions opt;
  opt.lr = 1e10;
  EXPECT_THROW(fit_logistic(x, y, opt), Error);
}

TEST(EqualizedOdds, HandBuiltCases) {
  // identical predictions per stratum in both groups
  EXPECT_EQ(equalized_odds({1, 0, 1, 0}, {1, 0, 1, 0}, {0, 0, 1, 1}), 0.0);
  // perfect classifier
  EXPECT_EQ(equalized_odds({1, 1, 0, 0, 1, 0}, {1, 1, 0, 0, 1, 0}, {0, 1, 0, 1, 1, 0}), 0.0);

  // Eight instances: TPR 1 vs 0.5, FPR 0.25 vs 0.
  const std::vector<int> s{0, 1, 1, 0, 0, 0, 0, 1};
  const std::vector<int> y{1, 1, 1, 0, 0, 0, 0, 0};
  const std::vector<int> p{1, 1, 0, 1, 0, 0, 0, 0};
  double tpr[2] = {0, 0}, fpr[2] = {0, 0}, npos[2] = {0, 0}, nneg[2] = {0, 0};
  for (std::size_t i = 0; i < s.size(); ++i) {
    (y[i] ? tpr : fpr)[s[i]] += p[i];
    (y[i] ? npos : nneg)[s[i]] += 1;
  }
  const double tgap = std::abs(tpr[0] / npos[0] - tpr[1] / npos[1]);
  const double fgap = std::abs(fpr[0] / nneg[0] - fpr[1] / nneg[1]);
  EXPECT_DOUBLE_EQ(tgap, 0.5);
  EXPECT_DOUBLE_EQ(fgap, 0.25);
  EXPECT_DOUBLE_EQ(equalized_odds(p, y, s), 0.5);
}

TEST(EqualizedOdds, EmptyStratumIsFlagged) {
  const auto gap = equalized_odds_detail({1, 0, 1}, {1, 0, 1}, {0, 0, 1});
  EXPECT_TRUE(gap.empty_stratum);
  EXPECT_FALSE(equalized_odds_detail({1, 0, 1, 0}, {1, 0, 1, 0}, {0, 0, 1, 1}).empty_stratum);
}

TEST(DemographicParity, HandBuiltCases) {
  EXPECT_EQ(demographic_parity({1, 0, 1, 0}, {0, 0, 1, 1}), 0.0);
  EXPECT_EQ(demographic_parity({0, 0, 0, 0}, {0, 1, 0, 1}), 0.0);
  // group 0: 4 of 5 positive, group 1: 3 of 10
  std::vector<int> p, s;
  for (int i = 0; i < 5; ++i) {
    p.push_back(i < 4);
    s.push_back(0);
  }
  for (int i = 0; i < 10; ++i) {
    p.push_back(i < 3);
    s.push_back(1);
  }
  EXPECT_DOUBLE_EQ(demographic_parity(p, s), 0.5);
}

TEST(FairnessMetrics, SymmetriesOnRandomPredictions) {
  std::mt19937_64 rng(8);
  std::bernoulli_distribution coin(0.5);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> p(60), y(60), s(60), s_swapped(60), p_flip(60), y_flip(60);
    for (int i = 0; i < 60; ++i) {
      p[i] = coin(rng);
      y[i] = coin(rng);
      s[i] = coin(rng);
      s_swapped[i] = 1 - s[i];
      p_flip[i] = 1 - p[i];
      y_flip[i] = 1 - y[i];
    }
    EXPECT_NEAR(equalized_odds(p, y, s), equalized_odds(p, y, s_swapped), 1e-15);
    EXPECT_NEAR(demographic_parity(p, s), demographic_parity(p, s_swapped), 1e-15);
    EXPECT_NEAR(equalized_odds(p, y, s), equalized_odds(p_flip, y_flip, s), 1e-15);
    const double acc = accuracy(p, y);
    std::size_t wrong = 0;
    for (int i = 0; i < 60; ++i) wrong += p[i] != y[i];
    EXPECT_NEAR(acc + static_cast<double>(wrong) / 60.0, 1.0, 1e-12);
  }
}

TEST(Stat, PopulationStandardDeviation) {
  const auto one = Stat::of({0.7});
  EXPECT_EQ(one.mean, 0.7);
  EXPECT_EQ(one.std, 0.0);
  const auto two = Stat::of({1.0, 3.0});
  EXPECT_EQ(two.mean, 2.0);
  EXPECT_EQ(two.std, 1.0);
}

namespace {

Dataset small_sem(std::uint64_t seed) {
  SyntheticSpec spec;
  spec.p = 8;
  spec.n = 1500;
  spec.seed = seed;
  spec.proxy_paths = 2;
  return generate_sem(spec).dataset;
}

}  // namespace

TEST(Benchmark, BaselineUsesEveryFeatureAndSingleRunHasZeroStd) {
  const Dataset ds = small_sem(2);
  BenchmarkConfig cfg;
  cfg.runs = 1;
  const auto res = benchmark(ds, cfg);
  ASSERT_FALSE(res.any_failed());
  EXPECT_EQ(res.find(Variant::kBaseline)->report.rsf, 1.0);
  for (const auto& vr : res.variants) {
    EXPECT_EQ(vr.report.accuracy.std, 0.0);
    EXPECT_EQ(vr.report.eo.std, 0.0);
    EXPECT_EQ(vr.report.dp.std, 0.0);
    EXPECT_LE(vr.report.nsf, static_cast<double>(res.features));
    EXPECT_GE(vr.report.accuracy.mean, 0.0);
    EXPECT_LE(vr.report.accuracy.mean, 1.0);
  }
}

TEST(Benchmark, RepeatedConfigGivesIdenticalReports) {
  const Dataset ds = small_sem(3);
  BenchmarkConfig cfg;
  cfg.runs = 2;
  EXPECT_EQ(report_json(benchmark(ds, cfg), cfg).dump(), report_json(benchmark(ds, cfg), cfg).dump());
}

TEST(Benchmark, StreamedProtectedAttributeOnlyReachesBaselineAndOsfs) {
  const Dataset ds = small_sem(4);
  BenchmarkConfig cfg;
  cfg.runs = 1;
  cfg.stream_protected = true;
  const auto res = benchmark(ds, cfg);
  EXPECT_EQ(res.features, ds.feature_count() + 1);
  EXPECT_EQ(res.find(Variant::kBaseline)->report.nsf, static_cast<double>(res.features));
  EXPECT_EQ(res.find(Variant::kRemoveS)->report.nsf, static_cast<double>(res.features - 1));
  for (Variant v : {Variant::kRemoveS, Variant::kRi, Variant::kAd1, Variant::kAd2}) {
    for (const auto& name : res.find(v)->runs.at(0).selected) EXPECT_NE(name, "S") << to_string(v);
  }
}

TEST(Benchmark, InvalidConfigIsRejected) {
  const Dataset ds = small_sem(5);
  BenchmarkConfig cfg;
  cfg.runs = 0;
  EXPECT_THROW(benchmark(ds, cfg), Error);
  cfg.runs = 1;
  cfg.test_fraction = 1.0;
  EXPECT_THROW(benchmark(ds, cfg), Error);
}
