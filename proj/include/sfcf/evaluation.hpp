#pragma once

// Logistic-regression evaluation of selected feature sets: accuracy,
// equalized odds, demographic parity, sparsity and selection runtime over
// repeated seeded train/test splits.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "sfcf/dataflow.hpp"
#include "sfcf/engine.hpp"
#include "sfcf/error.hpp"
#include "sfcf/selector.hpp"

namespace sfcf {

struct LogisticOptions {
  double lr = 0.1;
  double l2 = 1e-3;
  int epochs = 2000;
  double tol = 1e-8;
  std::uint64_t seed = 0;
};

struct TrainedModel {
  std::vector<std::string> features;
  // Per-feature centering and scaling applied before the linear map.
  std::vector<double> center;
  std::vector<double> scale;
  // One weight per feature followed by the intercept.
  Eigen::VectorXd weights;
  double threshold = 0.5;
  int epochs_run = 0;
};

namespace detail {

inline double sigmoid(double t) {
  return t >= 0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
}

// log(1 + exp(t)) without overflow.
inline double softplus(double t) { return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

}  // namespace detail

// Mean log-loss plus (l2/2)·||w||², the intercept (last entry) unpenalized.
// `x` carries a trailing column of ones.
inline double logistic_loss(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                            const Eigen::VectorXd& w, double l2) {
  const Eigen::VectorXd t = x * w;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < t.size(); ++i) loss += detail::softplus(t(i)) - y(i) * t(i);
  loss /= static_cast<double>(t.size());
  const Eigen::Index k = w.size() - 1;
  return loss + 0.5 * l2 * w.head(k).squaredNorm();
}

inline Eigen::VectorXd logistic_gradient(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                         const Eigen::VectorXd& w, double l2) {
  Eigen::VectorXd t = x * w;
  for (Eigen::Index i = 0; i < t.size(); ++i) t(i) = detail::sigmoid(t(i)) - y(i);
  Eigen::VectorXd g = x.transpose() * t / static_cast<double>(t.size());
  const Eigen::Index k = w.size() - 1;
  g.head(k) += l2 * w.head(k);
  return g;
}

// Full-batch gradient descent with a fixed step from a small seeded start.
// `x` carries a trailing column of ones.
inline Eigen::VectorXd fit_logistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                    const LogisticOptions& opt, int* epochs_run = nullptr) {
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> init(-1e-3, 1e-3);
  Eigen::VectorXd w(x.cols());
  for (Eigen::Index j = 0; j < w.size(); ++j) w(j) = init(rng);
  double prev = logistic_loss(x, y, w, opt.l2);
  int epoch = 0;
  for (; epoch < opt.epochs; ++epoch) {
    w -= opt.lr * logistic_gradient(x, y, w, opt.l2);
    const double loss = logistic_loss(x, y, w, opt.l2);
    if (!std::isfinite(loss)) {
      throw Error(Errc::kNonFiniteLoss, "loss diverged at epoch " + std::to_string(epoch));
    }
    if (std::abs(prev - loss) < opt.tol) {
      ++epoch;
      break;
    }
    prev = loss;
  }
  if (epochs_run) *epochs_run = epoch;
  return w;
}

namespace detail {

inline Eigen::MatrixXd design_matrix(const Dataset& ds, const TrainedModel& m,
                                     const std::vector<std::size_t>& rows) {
  const auto k = static_cast<Eigen::Index>(m.features.size());
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), k + 1);
  for (Eigen::Index j = 0; j < k; ++j) {
    const FeatureColumn* col = ds.find(m.features[j]);
    if (col == nullptr) throw Error(Errc::kMissingColumn, "feature '" + m.features[j] + "' not in dataset");
    for (std::size_t r = 0; r < rows.size(); ++r) {
      x(static_cast<Eigen::Index>(r), j) = (col->values[rows[r]] - m.center[j]) / m.scale[j];
    }
  }
  x.col(k).setOnes();
  return x;
}

inline std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = i;
  return rows;
}

}  // namespace detail

// Trains on `rows` of `ds` using the named feature columns. Each column is
// standardized with its training-row moments.
inline TrainedModel train_logistic(const Dataset& ds, const std::vector<std::size_t>& rows,
                                   const std::vector<std::string>& selected,
                                   const LogisticOptions& opt = {}) {
  TrainedModel m;
  m.features = selected;
  for (const auto& name : selected) {
    const FeatureColumn* col = ds.find(name);
    if (col == nullptr) throw Error(Errc::kMissingColumn, "feature '" + name + "' not in dataset");
    std::vector<double> v;
    v.reserve(rows.size());
    for (std::size_t r : rows) v.push_back(col->values[r]);
    const auto mom = detail::moments(v);
    m.center.push_back(mom.mean);
    m.scale.push_back(detail::zero_variance(mom) ? 1.0 : mom.sd);
  }
  const Eigen::MatrixXd x = detail::design_matrix(ds, m, rows);
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) y(static_cast<Eigen::Index>(r)) = ds.label.values[rows[r]];
  m.weights = fit_logistic(x, y, opt, &m.epochs_run);
  return m;
}

inline std::vector<int> predict(const TrainedModel& m, const Dataset& ds,
                                const std::vector<std::size_t>& rows) {
  const Eigen::VectorXd t = detail::design_matrix(ds, m, rows) * m.weights;
  std::vector<int> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out[i] = detail::sigmoid(t(static_cast<Eigen::Index>(i))) >= m.threshold ? 1 : 0;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Metrics

inline double accuracy(const std::vector<int>& pred, const std::vector<int>& y) {
  if (pred.size() != y.size()) throw Error(Errc::kInvalidArgument, "length mismatch");
  if (pred.empty()) return 0.0;
  std::size_t hit = 0;
  for (std::size_t i = 0; i < y.size(); ++i) hit += pred[i] == y[i];
  return static_cast<double>(hit) / static_cast<double>(y.size());
}

struct FairnessGap {
  double value = 0.0;
  // A (group, label) or group stratum had no members; its rate counted as 0.
  bool empty_stratum = false;
};

// max over y of |P(pred=1 | s=0, Y=y) - P(pred=1 | s=1, Y=y)|.
inline FairnessGap equalized_odds_detail(const std::vector<int>& pred, const std::vector<int>& y,
                                         const std::vector<int>& s) {
  if (pred.size() != y.size() || y.size() != s.size()) {
    throw Error(Errc::kInvalidArgument, "length mismatch");
  }
  double pos[2][2] = {{0, 0}, {0, 0}};
  double cnt[2][2] = {{0, 0}, {0, 0}};
  for (std::size_t i = 0; i < y.size(); ++i) {
    cnt[s[i]][y[i]] += 1;
    pos[s[i]][y[i]] += pred[i];
  }
  FairnessGap gap;
  for (int label = 0; label < 2; ++label) {
    double rate[2];
    for (int g = 0; g < 2; ++g) {
      if (cnt[g][label] == 0) {
        gap.empty_stratum = true;
        rate[g] = 0.0;
      } else {
        rate[g] = pos[g][label] / cnt[g][label];
      }
    }
    gap.value = std::max(gap.value, std::abs(rate[0] - rate[1]));
  }
  return gap;
}

inline double equalized_odds(const std::vector<int>& pred, const std::vector<int>& y,
                             const std::vector<int>& s) {
  return equalized_odds_detail(pred, y, s).value;
}

inline FairnessGap demographic_parity_detail(const std::vector<int>& pred, const std::vector<int>& s) {
  if (pred.size() != s.size()) throw Error(Errc::kInvalidArgument, "length mismatch");
  double pos[2] = {0, 0}, cnt[2] = {0, 0};
  for (std::size_t i = 0; i < s.size(); ++i) {
    cnt[s[i]] += 1;
    pos[s[i]] += pred[i];
  }
  FairnessGap gap;
  double rate[2];
  for (int g = 0; g < 2; ++g) {
    gap.empty_stratum = gap.empty_stratum || cnt[g] == 0;
    rate[g] = cnt[g] == 0 ? 0.0 : pos[g] / cnt[g];
  }
  gap.value = std::abs(rate[0] - rate[1]);
  return gap;
}

inline double demographic_parity(const std::vector<int>& pred, const std::vector<int>& s) {
  return demographic_parity_detail(pred, s).value;
}

// ---------------------------------------------------------------------------
// Benchmark

struct Stat {
  double mean = 0.0;
  double std = 0.0;

  // Population standard deviation, so a single run has std 0.
  static Stat of(const std::vector<double>& v) {
    Stat s;
    if (v.empty()) return s;
    for (double x : v) s.mean += x;
    s.mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(v.size()));
    return s;
  }
};

struct RunRecord {
  int run = 0;
  std::vector<std::string> selected;
  double accuracy = 0.0;
  double eo = 0.0;
  double dp = 0.0;
  bool empty_stratum = false;
  double selection_seconds = 0.0;
  SelectionSnapshot snapshot;
  nlohmann::json graphs;
};

struct FairnessReport {
  Stat accuracy;
  Stat eo;
  Stat dp;
  double nsf = 0.0;
  double rsf = 0.0;
  double wall_time_s = 0.0;
  int runs = 0;
  bool empty_stratum = false;
};

struct VariantResult {
  Variant variant = Variant::kRi;
  FairnessReport report;
  std::vector<RunRecord> runs;
  std::optional<std::string> error;
};

enum class OrderKind { kNatural, kShuffled };

struct BenchmarkConfig {
  std::vector<Variant> variants{std::begin(kAllVariants), std::end(kAllVariants)};
  int runs = 5;
  double test_fraction = 0.3;
  SignificanceConfig sig;
  CiKind ci = CiKind::kFisherZ;
  int bins = 5;
  OrderKind order = OrderKind::kNatural;
  std::uint64_t order_seed = 0;
  bool revalidate = false;
  // Stream the protected attribute as a feature (Baseline then uses it and
  // Remove-S drops it).
  bool stream_protected = false;
  // Run r splits rows with seed + r.
  std::uint64_t seed = 0;
  LogisticOptions logistic;
};

struct BenchmarkResult {
  std::size_t n = 0;
  std::size_t features = 0;
  std::vector<VariantResult> variants;

  bool any_failed() const {
    for (const auto& v : variants) {
      if (v.error) return true;
    }
    return false;
  }

  const VariantResult* find(Variant v) const {
    for (const auto& r : variants) {
      if (r.variant == v) return &r;
    }
    return nullptr;
  }
};

namespace detail {

inline std::vector<int> as_ints(const FeatureColumn& c, const std::vector<std::size_t>& rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(c.values[r] != 0.0 ? 1 : 0);
  return out;
}

inline RunRecord run_once(const Dataset& full, Variant variant, int run, const BenchmarkConfig& cfg) {
  const std::uint64_t run_seed = cfg.seed + static_cast<std::uint64_t>(run);
  const auto split = split_rows(full.n(), cfg.test_fraction, run_seed);
  const Dataset train = ci_view(full.subset(split.train), cfg.ci, cfg.bins);
  const StreamOrder order = cfg.order == OrderKind::kNatural
                                ? StreamOrder::natural(train.feature_count())
                                : StreamOrder::shuffled(train.feature_count(), cfg.order_seed);

  RunRecord rec;
  rec.run = run;
  const auto start = std::chrono::steady_clock::now();
  StreamingSelector selector(train.label, train.protected_attr, cfg.ci, cfg.sig, graphs_for(variant));
  for (auto& col : stream(train, order)) selector.push(std::move(col));
  SelectOptions opt;
  if (cfg.stream_protected) opt.protected_name = full.protected_attr.name;
  opt.revalidate = cfg.revalidate;
  rec.snapshot = selector.snapshot(variant, opt);
  rec.selection_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  rec.graphs = {{"label", to_json(selector.label_graph())},
                {"protected", to_json(selector.protected_graph())}};

  // Selected names in stream order, so the model's column order is stable.
  for (const auto& f : rec.snapshot.selected) rec.selected.push_back(f.name);

  LogisticOptions lo = cfg.logistic;
  lo.seed = run_seed;
  const TrainedModel model = train_logistic(full, split.train, rec.selected, lo);
  const auto pred = predict(model, full, split.test);
  const auto y = as_ints(full.label, split.test);
  const auto s = as_ints(full.protected_attr, split.test);
  rec.accuracy = accuracy(pred, y);
  const auto eo = equalized_odds_detail(pred, y, s);
  const auto dp = demographic_parity_detail(pred, s);
  rec.eo = eo.value;
  rec.dp = dp.value;
  rec.empty_stratum = eo.empty_stratum || dp.empty_stratum;
  return rec;
}

}  // namespace detail

inline BenchmarkResult benchmark(const Dataset& dataset, const BenchmarkConfig& cfg) {
  if (cfg.runs < 1) throw Error(Errc::kInvalidArgument, "runs must be >= 1");
  if (!(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0)) {
    throw Error(Errc::kInvalidArgument, "test fraction must lie in (0,1)");
  }
  cfg.sig.validate();
  dataset.validate();
  const Dataset full = cfg.stream_protected ? dataset.with_protected_as_feature() : dataset;

  BenchmarkResult out;
  out.n = full.n();
  out.features = full.feature_count();
  for (Variant v : cfg.variants) {
    VariantResult vr;
    vr.variant = v;
    try {
      for (int r = 0; r < cfg.runs; ++r) vr.runs.push_back(detail::run_once(full, v, r, cfg));
      std::vector<double> acc, eo, dp;
      double nsf = 0.0, secs = 0.0;
      for (const auto& rec : vr.runs) {
        acc.push_back(rec.accuracy);
        eo.push_back(rec.eo);
        dp.push_back(rec.dp);
        nsf += static_cast<double>(rec.selected.size());
        secs += rec.selection_seconds;
        vr.report.empty_stratum = vr.report.empty_stratum || rec.empty_stratum;
      }
      const auto runs = static_cast<double>(vr.runs.size());
      vr.report.accuracy = Stat::of(acc);
      vr.report.eo = Stat::of(eo);
      vr.report.dp = Stat::of(dp);
      vr.report.nsf = nsf / runs;
      vr.report.rsf = out.features == 0 ? 0.0 : vr.report.nsf / static_cast<double>(out.features);
      vr.report.wall_time_s = secs / runs;
      vr.report.runs = static_cast<int>(vr.runs.size());
    } catch (const Error& e) {
      vr.error = e.what();
      vr.runs.clear();
    }
    out.variants.push_back(std::move(vr));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reports

inline nlohmann::json to_json(const Stat& s) { return {{"mean", s.mean}, {"std", s.std}}; }

// Deterministic report: selection runtime is left out (see timing_json).
inline nlohmann::json report_json(const BenchmarkResult& res, const BenchmarkConfig& cfg) {
  nlohmann::json variants = nlohmann::json::object();
  for (const auto& vr : res.variants) {
    nlohmann::json j;
    if (vr.error) {
      j["error"] = *vr.error;
    } else {
      const auto& r = vr.report;
      j["accuracy"] = to_json(r.accuracy);
      j["eo"] = to_json(r.eo);
      j["dp"] = to_json(r.dp);
      j["nsf"] = r.nsf;
      j["rsf"] = r.rsf;
      j["runs"] = r.runs;
      j["empty_stratum"] = r.empty_stratum;
      nlohmann::json per_run = nlohmann::json::array();
      for (const auto& rec : vr.runs) {
        per_run.push_back({{"run", rec.run},
                           {"selected", rec.selected},
                           {"accuracy", rec.accuracy},
                           {"eo", rec.eo},
                           {"dp", rec.dp}});
      }
      j["per_run"] = std::move(per_run);
    }
    variants[std::string(to_string(vr.variant))] = std::move(j);
  }
  return {
      {"dataset", {{"n", res.n}, {"features", res.features}}},
      {"config",
       {{"alpha", cfg.sig.alpha},
        {"max_cond_size", cfg.sig.max_cond_size},
        {"ci_test", to_string(cfg.ci)},
        {"runs", cfg.runs},
        {"seed", cfg.seed},
        {"test_fraction", cfg.test_fraction},
        {"order", cfg.order == OrderKind::kNatural ? "natural"
                                                   : "shuffled:" + std::to_string(cfg.order_seed)},
        {"revalidate", cfg.revalidate},
        {"stream_protected", cfg.stream_protected},
        {"logistic",
         {{"lr", cfg.logistic.lr}, {"l2", cfg.logistic.l2}, {"epochs", cfg.logistic.epochs}}}}},
      {"variants", std::move(variants)},
  };
}

inline nlohmann::json timing_json(const BenchmarkResult& res) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& vr : res.variants) {
    if (!vr.error) j[std::string(to_string(vr.variant))] = vr.report.wall_time_s;
  }
  return {{"mean_selection_seconds", std::move(j)}};
}

// Metric-by-variant table.
inline std::string report_table(const BenchmarkResult& res) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3);
  constexpr int kWidth = 14;
  os << std::left << std::setw(6) << "Met";
  for (const auto& vr : res.variants) os << std::right << std::setw(kWidth) << to_string(vr.variant);
  os << '\n';
  auto row = [&](const char* label, auto&& cell) {
    os << std::left << std::setw(6) << label;
    for (const auto& vr : res.variants) {
      std::ostringstream c;
      c << std::fixed << std::setprecision(3);
      if (vr.error) {
        c << "error";
      } else {
        cell(c, vr.report);
      }
      os << std::right << std::setw(kWidth) << c.str();
    }
    os << '\n';
  };
  row("ACC", [](std::ostream& c, const FairnessReport& r) { c << r.accuracy.mean << "±" << r.accuracy.std; });
  row("EO", [](std::ostream& c, const FairnessReport& r) { c << r.eo.mean << "±" << r.eo.std; });
  row("DP", [](std::ostream& c, const FairnessReport& r) { c << r.dp.mean << "±" << r.dp.std; });
  row("NSF", [](std::ostream& c, const FairnessReport& r) { c << std::setprecision(1) << r.nsf; });
  row("RSF", [](std::ostream& c, const FairnessReport& r) { c << r.rsf; });
  row("TIME", [](std::ostream& c, const FairnessReport& r) { c << r.wall_time_s; });
  for (const auto& vr : res.variants) {
    if (vr.error) os << to_string(vr.variant) << ": " << *vr.error << '\n';
  }
  return os.str();
}

}  // namespace sfcf
