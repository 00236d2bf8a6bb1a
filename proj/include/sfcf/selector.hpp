#pragma once

// Set algebra over the label graph and the protected graph: inadmissible
// and admissible sets, the overlap MI, the reduced set RI, replacement pools
// AD1/AD2, and the selected set for each variant.

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sfcf/ego_graph.hpp"
#include "sfcf/error.hpp"
#include "sfcf/stream_data.hpp"

namespace sfcf {

enum class Variant { kBaseline, kRemoveS, kOsfs, kRi, kAd1, kAd2 };

inline constexpr Variant kAllVariants[] = {Variant::kBaseline, Variant::kRemoveS, Variant::kOsfs,
                                           Variant::kRi,       Variant::kAd1,     Variant::kAd2};

inline std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::kBaseline: return "baseline";
    case Variant::kRemoveS: return "remove-s";
    case Variant::kOsfs: return "osfs";
    case Variant::kRi: return "sfcf-ri";
    case Variant::kAd1: return "sfcf-ad1";
    case Variant::kAd2: return "sfcf-ad2";
  }
  return "unknown";
}

inline std::optional<Variant> parse_variant(std::string_view name) {
  for (Variant v : kAllVariants) {
    if (to_string(v) == name) return v;
  }
  return std::nullopt;
}

// Variants that need the protected-attribute graph.
inline bool uses_protected_graph(Variant v) {
  return v == Variant::kRi || v == Variant::kAd1 || v == Variant::kAd2;
}

inline bool uses_label_graph(Variant v) { return v != Variant::kBaseline && v != Variant::kRemoveS; }

struct SelectionSnapshot {
  std::size_t round = 0;
  Variant variant = Variant::kRi;
  FeatureSet inadmissible;
  FeatureSet admissible;
  FeatureSet mi;
  FeatureSet ri;
  FeatureSet icrf;
  FeatureSet ad1;
  FeatureSet ad2;
  FeatureSet selected;
};

struct SelectOptions {
  // Name of the protected attribute when it is also streamed as a feature;
  // it is removed from every selected set.
  std::optional<std::string> protected_name;
  // Re-test each replacement candidate against the label given RI and drop
  // the ones found independent. Needs `data`.
  bool revalidate = false;
  const StreamData* data = nullptr;
  SignificanceConfig cfg;
};

namespace sets {

inline FeatureSet unite(const FeatureSet& a, const FeatureSet& b) {
  FeatureSet out = a;
  out.insert(b.begin(), b.end());
  return out;
}

inline FeatureSet intersect(const FeatureSet& a, const FeatureSet& b) {
  FeatureSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

inline FeatureSet subtract(const FeatureSet& a, const FeatureSet& b) {
  FeatureSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

inline bool subset_of(const FeatureSet& a, const FeatureSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace sets

inline void require_target(const EgoGraphState& g, Target t) {
  if (g.target != t) {
    throw Error(Errc::kInvalidArgument,
                std::string("expected the ") + to_string(t) + " graph, got the " +
                    to_string(g.target) + " graph");
  }
}

// IA = MB(S) ∪ Redundant(S).
inline FeatureSet inadmissible_set(const EgoGraphState& g_protected) {
  require_target(g_protected, Target::kProtected);
  return sets::unite(markov_blanket(g_protected), g_protected.redundant);
}

// A = (MB(Y) ∪ Redundant(Y)) \ IA.
inline FeatureSet admissible_set(const EgoGraphState& g_label, const FeatureSet& ia) {
  require_target(g_label, Target::kLabel);
  return sets::subtract(sets::unite(markov_blanket(g_label), g_label.redundant), ia);
}

// MI = MB(Y) ∩ IA.
inline FeatureSet mi_set(const EgoGraphState& g_label, const FeatureSet& ia) {
  require_target(g_label, Target::kLabel);
  return sets::intersect(markov_blanket(g_label), ia);
}

// RI = MB(Y) \ MI.
inline FeatureSet ri_set(const EgoGraphState& g_label, const FeatureSet& mi) {
  return sets::subtract(markov_blanket(g_label), mi);
}

namespace detail {

inline FeatureSet revalidated(const FeatureSet& candidates, const FeatureSet& ri,
                              const SelectOptions& opt) {
  if (!opt.revalidate) return candidates;
  if (opt.data == nullptr) {
    throw Error(Errc::kInvalidArgument, "revalidation needs the stream data");
  }
  std::vector<FeatureId> z(ri.begin(), ri.end());
  FeatureSet kept;
  for (const auto& c : candidates) {
    try {
      if (!opt.data->test(c, Target::kLabel, z, opt.cfg).independent) kept.insert(c);
    } catch (const Error& e) {
      if (e.code() != Errc::kSingularMatrix) throw;
    }
  }
  return kept;
}

}  // namespace detail

inline SelectionSnapshot select(const EgoGraphState& g_label, const EgoGraphState& g_protected,
                                Variant variant, const SelectOptions& opt = {}) {
  require_target(g_label, Target::kLabel);
  require_target(g_protected, Target::kProtected);
  const FeatureSet arrived = g_label.all_processed();
  if (arrived != g_protected.all_processed()) {
    throw Error(Errc::kGraphMismatch, "label and protected graphs cover different features");
  }

  SelectionSnapshot snap;
  snap.variant = variant;
  snap.round = arrived.size();
  snap.inadmissible = inadmissible_set(g_protected);
  snap.admissible = admissible_set(g_label, snap.inadmissible);
  snap.mi = mi_set(g_label, snap.inadmissible);
  snap.ri = ri_set(g_label, snap.mi);
  snap.icrf = corresponding_redundant(g_label, snap.mi);
  snap.ad1 = detail::revalidated(sets::intersect(snap.icrf, snap.admissible), snap.ri, opt);
  snap.ad2 = detail::revalidated(sets::intersect(snap.icrf, g_protected.redundant), snap.ri, opt);

  switch (variant) {
    case Variant::kRi: snap.selected = snap.ri; break;
    case Variant::kAd1: snap.selected = sets::unite(snap.ri, snap.ad1); break;
    case Variant::kAd2: snap.selected = sets::unite(snap.ri, snap.ad2); break;
    case Variant::kOsfs: snap.selected = markov_blanket(g_label); break;
    case Variant::kBaseline: snap.selected = arrived; break;
    case Variant::kRemoveS: snap.selected = arrived; break;
  }
  if (opt.protected_name) {
    const bool keep_protected = variant == Variant::kBaseline || variant == Variant::kOsfs;
    if (!keep_protected) {
      std::erase_if(snap.selected, [&](const FeatureId& f) { return f.name == *opt.protected_name; });
    }
  }
  return snap;
}

inline nlohmann::json to_json(const SelectionSnapshot& s) {
  return {
      {"round", s.round},
      {"variant", std::string(to_string(s.variant))},
      {"inadmissible", names_json(s.inadmissible)},
      {"admissible", names_json(s.admissible)},
      {"mi", names_json(s.mi)},
      {"ri", names_json(s.ri)},
      {"icrf", names_json(s.icrf)},
      {"ad1", names_json(s.ad1)},
      {"ad2", names_json(s.ad2)},
      {"selected", names_json(s.selected)},
  };
}

}  // namespace sfcf
