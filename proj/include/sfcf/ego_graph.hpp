#pragma once

// Streaming partition of arrived features around one target (label or
// protected attribute) into strongly relevant, redundant and irrelevant
// sets, plus the map from each separating set to the features it made
// redundant.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "sfcf/ci_tests.hpp"
#include "sfcf/error.hpp"
#include "sfcf/stream_data.hpp"

namespace sfcf {

struct EgoGraphState {
  Target target = Target::kLabel;
  // Candidate set in arrival order; equals the Markov blanket after a scan.
  std::vector<FeatureId> cfs;
  FeatureSet redundant;
  FeatureSet irrelevant;
  // Separating set -> features it rendered redundant.
  std::map<FeatureSet, FeatureSet> cor;

  explicit EgoGraphState(Target t = Target::kLabel) : target(t) {}

  bool in_cfs(const FeatureId& id) const {
    return std::find(cfs.begin(), cfs.end(), id) != cfs.end();
  }

  bool processed(const FeatureId& id) const {
    return in_cfs(id) || redundant.contains(id) || irrelevant.contains(id);
  }

  FeatureSet all_processed() const {
    FeatureSet out(cfs.begin(), cfs.end());
    out.insert(redundant.begin(), redundant.end());
    out.insert(irrelevant.begin(), irrelevant.end());
    return out;
  }

  friend bool operator==(const EgoGraphState&, const EgoGraphState&) = default;
};

namespace detail {

// Calls fn(subset) for every k-subset of `pool` in lexicographic order of
// positions; stops early when fn returns true. Returns whether it stopped.
template <typename Fn>
bool for_each_combination(std::span<const FeatureId> pool, std::size_t k, Fn&& fn) {
  if (k > pool.size()) return false;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  std::vector<FeatureId> subset(k);
  while (true) {
    for (std::size_t i = 0; i < k; ++i) subset[i] = pool[idx[i]];
    if (fn(std::span<const FeatureId>(subset))) return true;
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == pool.size() - k + i - 1) --i;
    if (i == 0) return false;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

// Searches for the first separating set of `member` drawn from `pool`,
// smallest cardinality first, lexicographic by arrival within a size. When
// `required` is set only subsets containing it are tried; it must have the
// largest arrival index in the pool so the visiting order is unchanged.
inline std::optional<std::vector<FeatureId>> find_separating_set(
    const FeatureId& member, std::span<const FeatureId> pool, const std::optional<FeatureId>& required,
    Target target, const StreamData& data, const SignificanceConfig& cfg) {
  std::vector<FeatureId> others;
  for (const auto& f : pool) {
    if (!(required && f == *required)) others.push_back(f);
  }
  const std::size_t max_k = std::min<std::size_t>(cfg.max_cond_size, pool.size());
  std::optional<std::vector<FeatureId>> found;
  for (std::size_t k = 0; k <= max_k && !found; ++k) {
    if (required && k == 0) continue;
    const std::size_t free_k = required ? k - 1 : k;
    for_each_combination(others, free_k, [&](std::span<const FeatureId> subset) {
      std::vector<FeatureId> z(subset.begin(), subset.end());
      if (required) z.push_back(*required);
      try {
        if (data.test(member, target, z, cfg).independent) {
          found = std::move(z);
          return true;
        }
      } catch (const Error& e) {
        if (e.code() != Errc::kSingularMatrix) throw;
      }
      return false;
    });
  }
  return found;
}

// One pass over cfs: the newest entrant (last in cfs) first, then the other
// members in arrival order. Features moved out leave the conditioning pool at
// once. In incremental mode the older members only try separating sets that
// contain the newest entrant; every other set drawn from the current pool was
// already tried on the same data when they were last scanned.
inline void scan(EgoGraphState& state, const StreamData& data, const SignificanceConfig& cfg,
                 bool incremental) {
  if (state.cfs.empty()) return;
  const FeatureId newest = state.cfs.back();
  std::vector<FeatureId> order{newest};
  order.insert(order.end(), state.cfs.begin(), state.cfs.end() - 1);
  for (const auto& member : order) {
    if (!state.in_cfs(member)) continue;
    std::optional<FeatureId> required;
    if (incremental && !(member == newest)) {
      if (!state.in_cfs(newest)) break;
      required = newest;
    }
    std::vector<FeatureId> pool;
    for (const auto& f : state.cfs) {
      if (!(f == member)) pool.push_back(f);
    }
    auto sep = find_separating_set(member, pool, required, state.target, data, cfg);
    if (!sep) continue;
    state.cfs.erase(std::find(state.cfs.begin(), state.cfs.end(), member));
    state.redundant.insert(member);
    state.cor[FeatureSet(sep->begin(), sep->end())].insert(member);
  }
}

}  // namespace detail

// Full redundancy pass: every member of cfs is checked against every
// conditioning set of size <= cfg.max_cond_size drawn from the rest of cfs,
// starting with the most recent entrant.
inline EgoGraphState redundancy_scan(EgoGraphState state, const StreamData& data,
                                     const SignificanceConfig& cfg) {
  detail::scan(state, data, cfg, false);
  return state;
}

// Relevance check of a newly arrived feature followed, when it is relevant,
// by the redundancy pass.
inline EgoGraphState admit_feature(EgoGraphState state, const FeatureId& x, const StreamData& data,
                                   const SignificanceConfig& cfg) {
  if (state.processed(x)) {
    throw Error(Errc::kDuplicateFeature, "feature '" + x.name + "' already processed");
  }
  if (data.has_zero_variance(x)) {
    state.irrelevant.insert(x);
    return state;
  }
  if (data.test(x, state.target, {}, cfg).independent) {
    state.irrelevant.insert(x);
    return state;
  }
  // The incremental pass relies on x carrying the largest arrival index.
  const bool in_order = std::all_of(state.cfs.begin(), state.cfs.end(),
                                    [&](const FeatureId& f) { return f.index < x.index; });
  state.cfs.push_back(x);
  detail::scan(state, data, cfg, in_order);
  return state;
}

inline FeatureSet markov_blanket(const EgoGraphState& state) {
  return FeatureSet(state.cfs.begin(), state.cfs.end());
}

// Union of the redundant features whose separating set meets `query`.
inline FeatureSet corresponding_redundant(const EgoGraphState& state, const FeatureSet& query) {
  FeatureSet out;
  for (const auto& [key, values] : state.cor) {
    const bool hit = std::any_of(key.begin(), key.end(),
                                 [&](const FeatureId& f) { return query.contains(f); });
    if (hit) out.insert(values.begin(), values.end());
  }
  return out;
}

inline nlohmann::json names_json(const FeatureSet& set) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& f : set) arr.push_back(f.name);
  return arr;
}

inline nlohmann::json to_json(const EgoGraphState& state) {
  nlohmann::json cor = nlohmann::json::array();
  for (const auto& [key, values] : state.cor) {
    cor.push_back(nlohmann::json::array({names_json(key), names_json(values)}));
  }
  return {
      {"target", to_string(state.target)},
      {"strong_relevant", names_json(markov_blanket(state))},
      {"redundant", names_json(state.redundant)},
      {"irrelevant", names_json(state.irrelevant)},
      {"cor", std::move(cor)},
  };
}

}  // namespace sfcf
