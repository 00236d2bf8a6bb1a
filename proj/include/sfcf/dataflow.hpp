#pragma once

// Dataset ingestion and preparation, feature-stream ordering, synthetic
// linear-Gaussian SEMs with known Markov blankets, and the exhaustive
// (non-streaming) Markov-blanket oracle.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "sfcf/ci_tests.hpp"
#include "sfcf/column.hpp"
#include "sfcf/csv.hpp"
#include "sfcf/ego_graph.hpp"
#include "sfcf/error.hpp"
#include "sfcf/stream_data.hpp"

namespace sfcf {

struct Dataset {
  std::vector<FeatureColumn> columns;
  FeatureColumn label;
  FeatureColumn protected_attr;
  std::size_t dropped_rows = 0;

  std::size_t n() const { return label.size(); }
  std::size_t feature_count() const { return columns.size(); }

  void validate() const {
    std::set<std::string> names;
    for (const auto& c : columns) {
      if (c.size() != n()) throw Error(Errc::kInvalidArgument, "column '" + c.name + "' has wrong length");
      if (!names.insert(c.name).second) {
        throw Error(Errc::kDuplicateFeature, "feature name '" + c.name + "' repeats");
      }
    }
    if (protected_attr.size() != n()) throw Error(Errc::kInvalidArgument, "protected column has wrong length");
    for (const auto* c : {&label, &protected_attr}) {
      for (double v : c->values) {
        if (v != 0.0 && v != 1.0) {
          throw Error(Errc::kNonBinaryLabel, "column '" + c->name + "' is not 0/1");
        }
      }
    }
  }

  Dataset subset(const std::vector<std::size_t>& rows) const {
    Dataset out;
    out.columns.reserve(columns.size());
    for (const auto& c : columns) out.columns.push_back(take_rows(c, rows));
    out.label = take_rows(label, rows);
    out.protected_attr = take_rows(protected_attr, rows);
    return out;
  }

  // Copy whose feature stream also carries the protected attribute, as the
  // last column.
  Dataset with_protected_as_feature() const {
    Dataset out = *this;
    FeatureColumn s = protected_attr;
    s.kind = ColumnKind::kCategorical;
    out.columns.push_back(std::move(s));
    return out;
  }

  const FeatureColumn* find(const std::string& name) const {
    for (const auto& c : columns) {
      if (c.name == name) return &c;
    }
    return nullptr;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

inline bool is_missing(const std::string& v) { return v.empty() || v == "?" || v == "NA" || v == "NaN"; }

inline std::optional<double> parse_double(const std::string& s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline void standardize(std::vector<double>& v) {
  const auto m = moments(v);
  if (zero_variance(m)) {
    std::fill(v.begin(), v.end(), 0.0);
    return;
  }
  for (double& x : v) x = (x - m.mean) / m.sd;
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Maps a two-valued column to {0,1}. Numeric 0/1 columns keep their values;
// any other pair of values maps in sorted order. With `median_fallback`, a
// numeric column with more values is split at its median.
inline std::vector<double> binarize(const std::string& name, const std::vector<std::string>& raw,
                                    bool median_fallback) {
  std::set<std::string> distinct(raw.begin(), raw.end());
  std::vector<double> nums;
  bool numeric = true;
  for (const auto& v : raw) {
    auto d = parse_double(v);
    if (!d) {
      numeric = false;
      break;
    }
    nums.push_back(*d);
  }
  if (numeric) {
    std::set<double> levels(nums.begin(), nums.end());
    if (levels.size() <= 2 && std::all_of(levels.begin(), levels.end(),
                                          [](double x) { return x == 0.0 || x == 1.0; })) {
      return nums;
    }
    if (levels.size() > 2) {
      if (!median_fallback) {
        throw Error(Errc::kNonBinaryLabel, "column '" + name + "' has " +
                                               std::to_string(levels.size()) + " distinct values");
      }
      const double med = median(nums);
      std::vector<double> out;
      out.reserve(nums.size());
      for (double x : nums) out.push_back(x > med ? 1.0 : 0.0);
      return out;
    }
    const double hi = *levels.rbegin();
    std::vector<double> out;
    for (double x : nums) out.push_back(x == hi && levels.size() == 2 ? 1.0 : 0.0);
    return out;
  }
  if (distinct.size() > 2) {
    throw Error(Errc::kNonBinaryLabel,
                "column '" + name + "' has " + std::to_string(distinct.size()) + " distinct values");
  }
  const std::string hi = *distinct.rbegin();
  std::vector<double> out;
  out.reserve(raw.size());
  for (const auto& v : raw) out.push_back(distinct.size() == 2 && v == hi ? 1.0 : 0.0);
  return out;
}

}  // namespace detail

using TypeMap = std::map<std::string, ColumnKind>;

// Reads a header-first CSV. Rows with a missing value ("", "?", "NA", "NaN")
// or the wrong field count are dropped and counted. Continuous columns are
// standardized to mean 0 / variance 1; categorical columns get integer codes
// in sorted level order. Columns absent from `types` are continuous when
// every value parses as a number.
inline Dataset load_csv(const std::string& path, const std::string& label_col,
                        const std::string& protected_col, const TypeMap& types = {}) {
  const auto rows = csv::read_file(path);
  if (rows.empty()) throw Error(Errc::kEmptyAfterCleaning, "'" + path + "' has no header");
  csv::Row header;
  for (const auto& h : rows[0]) header.push_back(detail::trim(h));
  auto index_of = [&](const std::string& name) -> std::size_t {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw Error(Errc::kMissingColumn, "column '" + name + "' not in header");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t li = index_of(label_col);
  const std::size_t pi = index_of(protected_col);
  for (const auto& [name, kind] : types) index_of(name);

  std::vector<std::vector<std::string>> cells(header.size());
  std::size_t dropped = 0;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    bool ok = row.size() == header.size();
    for (std::size_t c = 0; ok && c < row.size(); ++c) ok = !detail::is_missing(detail::trim(row[c]));
    if (!ok) {
      ++dropped;
      continue;
    }
    for (std::size_t c = 0; c < row.size(); ++c) cells[c].push_back(detail::trim(row[c]));
  }
  if (cells[li].empty()) {
    throw Error(Errc::kEmptyAfterCleaning, "'" + path + "' has no complete data rows");
  }

  Dataset ds;
  ds.dropped_rows = dropped;
  ds.label = {label_col, ColumnKind::kCategorical, detail::binarize(label_col, cells[li], false)};
  ds.protected_attr = {protected_col, ColumnKind::kCategorical,
                       detail::binarize(protected_col, cells[pi], true)};
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c == li || c == pi) continue;
    const auto& raw = cells[c];
    std::optional<ColumnKind> kind;
    if (auto it = types.find(header[c]); it != types.end()) kind = it->second;
    std::vector<double> nums;
    bool numeric = true;
    for (const auto& v : raw) {
      auto d = detail::parse_double(v);
      if (!d) {
        numeric = false;
        break;
      }
      nums.push_back(*d);
    }
    if (!kind) kind = numeric ? ColumnKind::kContinuous : ColumnKind::kCategorical;
    if (*kind == ColumnKind::kContinuous) {
      if (!numeric) {
        throw Error(Errc::kInvalidArgument, "column '" + header[c] + "' is not numeric");
      }
      detail::standardize(nums);
      ds.columns.push_back(continuous(header[c], std::move(nums)));
    } else {
      std::vector<std::string> levels(raw.begin(), raw.end());
      std::sort(levels.begin(), levels.end());
      levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
      std::vector<double> codes;
      codes.reserve(raw.size());
      for (const auto& v : raw) {
        codes.push_back(static_cast<double>(std::lower_bound(levels.begin(), levels.end(), v) -
                                            levels.begin()));
      }
      ds.columns.push_back(categorical(header[c], std::move(codes)));
    }
  }
  ds.validate();
  return ds;
}

// Writes features, then label and protected columns, with shortest
// round-trip number formatting.
inline void write_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::kIo, "cannot write '" + path + "'");
  csv::Row header;
  for (const auto& c : ds.columns) header.push_back(c.name);
  header.push_back(ds.label.name);
  header.push_back(ds.protected_attr.name);
  csv::write_row(out, header);
  auto fmt = [](double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
  };
  for (std::size_t r = 0; r < ds.n(); ++r) {
    csv::Row row;
    for (const auto& c : ds.columns) row.push_back(fmt(c.values[r]));
    row.push_back(fmt(ds.label.values[r]));
    row.push_back(fmt(ds.protected_attr.values[r]));
    csv::write_row(out, row);
  }
}

// Copy of `ds` with every column tagged for the requested CI test. The
// Fisher-z view treats integer codes as numbers; the G^2 view cuts each
// continuous column into `bins` equal-frequency bins.
inline Dataset ci_view(const Dataset& ds, CiKind kind, int bins = 5) {
  Dataset out = ds;
  const ColumnKind tag = kind == CiKind::kFisherZ ? ColumnKind::kContinuous : ColumnKind::kCategorical;
  for (auto& c : out.columns) {
    if (kind == CiKind::kG2 && c.kind == ColumnKind::kContinuous) {
      std::vector<double> sorted = c.values;
      std::sort(sorted.begin(), sorted.end());
      std::vector<double> cuts;
      for (int b = 1; b < bins; ++b) {
        cuts.push_back(sorted[std::min(sorted.size() - 1, sorted.size() * b / bins)]);
      }
      cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
      for (double& v : c.values) {
        v = static_cast<double>(std::upper_bound(cuts.begin(), cuts.end(), v) - cuts.begin());
      }
    }
    c.kind = tag;
  }
  out.label.kind = tag;
  out.protected_attr.kind = tag;
  return out;
}

struct StreamOrder {
  std::vector<std::size_t> permutation;
  std::optional<std::uint64_t> seed;

  static StreamOrder natural(std::size_t d) {
    StreamOrder o;
    o.permutation.resize(d);
    std::iota(o.permutation.begin(), o.permutation.end(), std::size_t{0});
    return o;
  }

  static StreamOrder shuffled(std::size_t d, std::uint64_t seed) {
    StreamOrder o = natural(d);
    o.seed = seed;
    std::mt19937_64 rng(seed);
    std::shuffle(o.permutation.begin(), o.permutation.end(), rng);
    return o;
  }
};

// Feature columns in arrival order. Label and protected columns live
// outside `columns`, so they never appear here.
inline std::vector<FeatureColumn> stream(const Dataset& ds, const StreamOrder& order) {
  std::vector<bool> seen(ds.columns.size(), false);
  std::vector<FeatureColumn> out;
  out.reserve(order.permutation.size());
  for (std::size_t i : order.permutation) {
    if (i >= ds.columns.size() || seen[i]) {
      throw Error(Errc::kInvalidArgument, "stream order is not a permutation");
    }
    seen[i] = true;
    out.push_back(ds.columns[i]);
  }
  if (out.size() != ds.columns.size()) {
    throw Error(Errc::kInvalidArgument, "stream order is not a permutation");
  }
  return out;
}

struct TrainTestSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Random split with `test_fraction` of the rows held out; both index lists
// are sorted.
inline TrainTestSplit split_rows(std::size_t n, double test_fraction, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
  TrainTestSplit s;
  s.test.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_test));
  s.train.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_test), idx.end());
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

// ---------------------------------------------------------------------------
// Synthetic structural equation models

struct SyntheticSpec {
  int p = 8;  // nodes, including S and Y
  std::size_t n = 5000;
  double edge_prob = 0.3;
  double noise = 1.0;
  std::uint64_t seed = 0;
  // Positions in topological order; y_node < 0 means the last node.
  int s_node = 0;
  int y_node = -1;
  // Minimum number of S -> X -> Y proxy paths forced into the graph.
  int proxy_paths = 0;
  bool allow_direct_sy = false;

  int y_position() const { return y_node < 0 ? p - 1 : y_node; }

  void validate() const {
    if (p < 3) throw Error(Errc::kInvalidArgument, "p must be >= 3, got " + std::to_string(p));
    if (n < 8) throw Error(Errc::kInvalidArgument, "n must be >= 8");
    if (!(edge_prob >= 0.0 && edge_prob <= 1.0)) {
      throw Error(Errc::kInvalidArgument, "edge probability must lie in [0,1]");
    }
    if (!(noise > 0.0)) throw Error(Errc::kInvalidArgument, "noise scale must be positive");
    const int y = y_position();
    if (s_node < 0 || s_node >= p || y < 0 || y >= p || s_node == y) {
      throw Error(Errc::kInvalidArgument, "S and Y must be distinct nodes in [0,p)");
    }
    if (proxy_paths < 0 || proxy_paths > p - 2) {
      throw Error(Errc::kInvalidArgument, "proxy_paths must lie in [0, p-2]");
    }
  }
};

struct Edge {
  std::string from;
  std::string to;
  double weight = 0.0;
};

struct SyntheticTruth {
  std::vector<std::string> features;
  std::vector<Edge> edges;
  std::set<std::string> mb_label;
  std::set<std::string> mb_protected;
};

struct SyntheticData {
  Dataset dataset;
  SyntheticTruth truth;
};

namespace detail {

// Kahn's algorithm; true when every node can be ordered.
inline bool is_acyclic(int p, const std::vector<std::pair<int, int>>& edges) {
  std::vector<int> indeg(p, 0);
  std::vector<std::vector<int>> out(p);
  for (auto [a, b] : edges) {
    out[a].push_back(b);
    ++indeg[b];
  }
  std::vector<int> ready;
  for (int v = 0; v < p; ++v) {
    if (indeg[v] == 0) ready.push_back(v);
  }
  int seen = 0;
  while (!ready.empty()) {
    const int v = ready.back();
    ready.pop_back();
    ++seen;
    for (int w : out[v]) {
      if (--indeg[w] == 0) ready.push_back(w);
    }
  }
  return seen == p;
}

// Parents, children and co-parents of `node`.
inline std::set<int> dag_markov_blanket(int p, const std::vector<std::vector<double>>& w, int node) {
  std::set<int> mb;
  for (int v = 0; v < p; ++v) {
    if (w[v][node] != 0.0) mb.insert(v);
    if (w[node][v] != 0.0) {
      mb.insert(v);
      for (int u = 0; u < p; ++u) {
        if (u != node && w[u][v] != 0.0) mb.insert(u);
      }
    }
  }
  mb.erase(node);
  return mb;
}

}  // namespace detail

// Random DAG over nodes in topological order 0..p-1 with positive weights in
// [0.2, 1]. Each node's structural value is the weighted sum of its parents'
// standardized values plus Gaussian noise, then standardized itself. S and Y
// are emitted as 1[value > median]; their descendants see the continuous
// structural values.
inline SyntheticData generate_sem(const SyntheticSpec& spec) {
  spec.validate();
  const int p = spec.p;
  const int s = spec.s_node;
  const int y = spec.y_position();
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> weight(0.2, 1.0);

  std::vector<std::vector<double>> w(p, std::vector<double>(p, 0.0));
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      if (unit(rng) < spec.edge_prob) w[i][j] = weight(rng);
    }
  }
  if (!spec.allow_direct_sy) w[std::min(s, y)][std::max(s, y)] = 0.0;

  std::vector<int> feature_nodes;
  for (int v = 0; v < p; ++v) {
    if (v != s && v != y) feature_nodes.push_back(v);
  }
  auto random_pick = [&](const std::vector<int>& from) {
    return from[static_cast<std::size_t>(unit(rng) * static_cast<double>(from.size())) % from.size()];
  };

  // Proxy paths S -> X -> Y through features lying between them.
  if (spec.proxy_paths > 0 && s < y) {
    std::vector<int> between;
    for (int v : feature_nodes) {
      if (v > s && v < y) between.push_back(v);
    }
    std::shuffle(between.begin(), between.end(), rng);
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(spec.proxy_paths), between.size());
    for (std::size_t i = 0; i < k; ++i) {
      if (w[s][between[i]] == 0.0) w[s][between[i]] = weight(rng);
      if (w[between[i]][y] == 0.0) w[between[i]][y] = weight(rng);
    }
  }
  // Y needs a feature parent and S a feature child whenever the order allows.
  {
    std::vector<int> before_y, after_s;
    bool y_has = false, s_has = false;
    for (int v : feature_nodes) {
      if (v < y) before_y.push_back(v);
      if (v > s) after_s.push_back(v);
      y_has = y_has || w[v][y] != 0.0;
      s_has = s_has || w[s][v] != 0.0;
    }
    if (!y_has && !before_y.empty()) w[random_pick(before_y)][y] = weight(rng);
    if (!s_has && !after_s.empty()) w[s][random_pick(after_s)] = weight(rng);
  }

  std::vector<std::pair<int, int>> edge_list;
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      if (w[i][j] != 0.0) edge_list.emplace_back(i, j);
    }
  }
  if (!detail::is_acyclic(p, edge_list)) {
    throw Error(Errc::kInvalidArgument, "generated graph has a cycle");
  }

  std::vector<std::string> names(p);
  {
    int k = 0;
    for (int v = 0; v < p; ++v) {
      names[v] = v == s ? "S" : v == y ? "Y" : "X" + std::to_string(++k);
    }
  }

  const std::size_t n = spec.n;
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<std::vector<double>> value(p, std::vector<double>(n, 0.0));
  for (int v = 0; v < p; ++v) {
    auto& col = value[v];
    for (std::size_t r = 0; r < n; ++r) col[r] = spec.noise * gauss(rng);
    for (int u = 0; u < v; ++u) {
      if (w[u][v] == 0.0) continue;
      for (std::size_t r = 0; r < n; ++r) col[r] += w[u][v] * value[u][r];
    }
    detail::standardize(col);
  }

  SyntheticData out;
  auto binarized = [&](int v) {
    const double med = detail::median(value[v]);
    std::vector<double> b(n);
    for (std::size_t r = 0; r < n; ++r) b[r] = value[v][r] > med ? 1.0 : 0.0;
    return b;
  };
  out.dataset.label = categorical("Y", binarized(y));
  out.dataset.protected_attr = categorical("S", binarized(s));
  for (int v : feature_nodes) {
    out.dataset.columns.push_back(continuous(names[v], value[v]));
    out.truth.features.push_back(names[v]);
  }
  for (auto [a, b] : edge_list) out.truth.edges.push_back({names[a], names[b], w[a][b]});
  for (int v : detail::dag_markov_blanket(p, w, y)) {
    if (v != s) out.truth.mb_label.insert(names[v]);
  }
  for (int v : detail::dag_markov_blanket(p, w, s)) {
    if (v != y) out.truth.mb_protected.insert(names[v]);
  }
  return out;
}

inline nlohmann::json to_json(const SyntheticTruth& t) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : t.edges) edges.push_back({{"from", e.from}, {"to", e.to}, {"weight", e.weight}});
  return {
      {"features", t.features},
      {"edges", std::move(edges)},
      {"mb_label", t.mb_label},
      {"mb_protected", t.mb_protected},
  };
}

inline SyntheticTruth truth_from_json(const nlohmann::json& j) {
  SyntheticTruth t;
  t.features = j.at("features").get<std::vector<std::string>>();
  for (const auto& e : j.at("edges")) {
    t.edges.push_back({e.at("from").get<std::string>(), e.at("to").get<std::string>(),
                       e.at("weight").get<double>()});
  }
  t.mb_label = j.at("mb_label").get<std::set<std::string>>();
  t.mb_protected = j.at("mb_protected").get<std::set<std::string>>();
  return t;
}

// ---------------------------------------------------------------------------
// Exhaustive Markov-blanket oracle

inline constexpr std::size_t kBruteForceMaxFeatures = 12;

namespace detail {

// Whether b carries exactly the information of a: perfectly correlated for
// continuous columns, a relabelling of the same partition for categorical.
inline bool same_information(const FeatureColumn& a, const FeatureColumn& b) {
  if (a.kind == ColumnKind::kCategorical) {
    std::map<double, double> fwd, back;
    for (std::size_t i = 0; i < a.size(); ++i) {
      auto [f, fi] = fwd.try_emplace(a.values[i], b.values[i]);
      auto [r, ri] = back.try_emplace(b.values[i], a.values[i]);
      if (f->second != b.values[i] || r->second != a.values[i]) return false;
    }
    return true;
  }
  const auto ma = moments(a.values);
  const auto mb = moments(b.values);
  if (zero_variance(ma) || zero_variance(mb)) return false;
  return std::abs(pearson(a.values, b.values, ma.mean, ma.sd, mb.mean, mb.sd)) >= 1.0 - 1e-10;
}

}  // namespace detail

// Features X such that no conditioning set of size <= cfg.max_cond_size drawn
// from the other features makes the target independent of X, evaluated over
// the whole feature set at once. A feature carrying the same information as
// a lower-indexed one is dropped first, so duplicates resolve to the lowest
// index. Returned ids use column positions as arrival indices.
inline FeatureSet brute_force_mb(const Dataset& ds, Target target, const SignificanceConfig& cfg,
                                 CiKind kind) {
  if (ds.columns.size() > kBruteForceMaxFeatures) {
    throw Error(Errc::kTooManyFeatures, std::to_string(ds.columns.size()) + " features exceed " +
                                            std::to_string(kBruteForceMaxFeatures));
  }
  StreamData data(ds.label, ds.protected_attr, kind);
  std::vector<FeatureId> ids;
  for (const auto& c : ds.columns) ids.push_back(data.append(c));

  std::vector<FeatureId> pool;
  for (std::size_t i = 0; i < ds.columns.size(); ++i) {
    bool dup = false;
    for (const auto& kept : pool) {
      dup = dup || detail::same_information(ds.columns[kept.index], ds.columns[i]);
    }
    if (!dup) pool.push_back(ids[i]);
  }

  FeatureSet mb;
  for (const auto& x : pool) {
    if (data.has_zero_variance(x)) continue;
    std::vector<FeatureId> others;
    for (const auto& f : pool) {
      if (!(f == x)) others.push_back(f);
    }
    bool separated = false;
    const std::size_t max_k = std::min<std::size_t>(cfg.max_cond_size, others.size());
    for (std::size_t k = 0; k <= max_k && !separated; ++k) {
      detail::for_each_combination(others, k, [&](std::span<const FeatureId> z) {
        try {
          separated = data.test(x, target, z, cfg).independent;
        } catch (const Error& e) {
          if (e.code() != Errc::kSingularMatrix) throw;
        }
        return separated;
      });
    }
    if (!separated) mb.insert(x);
  }
  return mb;
}

}  // namespace sfcf
