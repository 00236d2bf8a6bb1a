#pragma once

// Glue between a prepared dataset and the streaming selector, plus
// Markov-blanket recovery scoring against known ground truth.

#include <set>
#include <string>

#include "sfcf/dataflow.hpp"
#include "sfcf/engine.hpp"

namespace sfcf {

// Streams every feature of `ds` (already tagged for `kind`, see ci_view) in
// `order` through a fresh selector.
inline StreamingSelector run_stream(const Dataset& ds, CiKind kind, const SignificanceConfig& cfg,
                                    const StreamOrder& order, GraphSet graphs = GraphSet::kBoth) {
  StreamingSelector selector(ds.label, ds.protected_attr, kind, cfg, graphs);
  for (auto& col : stream(ds, order)) selector.push(std::move(col));
  return selector;
}

inline std::set<std::string> names_of(const FeatureSet& set) {
  std::set<std::string> out;
  for (const auto& f : set) out.insert(f.name);
  return out;
}

struct Recovery {
  double precision = 1.0;
  double recall = 1.0;
  double f1 = 1.0;
};

// Set-overlap scores; an empty side scores 1 only when the other side is
// empty too.
inline Recovery score_recovery(const std::set<std::string>& found, const std::set<std::string>& truth) {
  std::size_t tp = 0;
  for (const auto& f : found) tp += truth.contains(f);
  Recovery r;
  const auto nf = static_cast<double>(found.size());
  const auto nt = static_cast<double>(truth.size());
  r.precision = found.empty() ? (truth.empty() ? 1.0 : 0.0) : static_cast<double>(tp) / nf;
  r.recall = truth.empty() ? (found.empty() ? 1.0 : 0.0) : static_cast<double>(tp) / nt;
  r.f1 = (found.empty() && truth.empty()) ? 1.0 : 2.0 * static_cast<double>(tp) / (nf + nt);
  return r;
}

}  // namespace sfcf
