#include <random>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sfcf/selector.hpp"

using namespace sfcf;
using sets::intersect;
using sets::subset_of;
using sets::unite;

namespace {

// X11 sits in both blankets; X10 is an admissible stand-in for it and X7 an
// inadmissible one.
struct SharedBlanket {
  FeatureId x1{0, "X1"}, x2{1, "X2"}, x7{2, "X7"}, x10{3, "X10"}, x11{4, "X11"}, x12{5, "X12"},
      x13{6, "X13"};
  EgoGraphState gy{Target::kLabel};
  EgoGraphState gs{Target::kProtected};

  SharedBlanket() {
    gy.cfs = {x1, x2, x11};
    gy.redundant = {x7, x10};
    gy.irrelevant = {x12, x13};
    gy.cor[{x11}] = {x7, x10};
    gs.cfs = {x11, x12};
    gs.redundant = {x7, x13};
    gs.irrelevant = {x1, x2, x10};
    gs.cor[{x12}] = {x7, x13};
  }
};

void expect_invariants(const SelectionSnapshot& s, const EgoGraphState& gy, const EgoGraphState& gs) {
  const FeatureSet mby = markov_blanket(gy), mbs = markov_blanket(gs);
  EXPECT_TRUE(subset_of(s.mi, s.inadmissible));
  EXPECT_TRUE(subset_of(s.mi, mby));
  EXPECT_EQ(s.ri, sets::subtract(mby, s.mi));
  EXPECT_TRUE(intersect(s.ri, s.inadmissible).empty());
  EXPECT_TRUE(subset_of(s.ad1, s.admissible));
  EXPECT_TRUE(intersect(s.ad2, mbs).empty());
  EXPECT_TRUE(subset_of(s.ad2, gs.redundant));
  const FeatureSet red_area = unite(mbs, gs.redundant);
  switch (s.variant) {
    case Variant::kRi:
    case Variant::kAd1: EXPECT_TRUE(intersect(s.selected, red_area).empty()); break;
    case Variant::kAd2: EXPECT_TRUE(intersect(s.selected, mbs).empty()); break;
    default: break;
  }
}

}  // namespace

TEST(SetAlgebra, SharedBlanketFeatureWithStandIns) {
  const SharedBlanket f;
  EXPECT_EQ(inadmissible_set(f.gs), (FeatureSet{f.x7, f.x11, f.x12, f.x13}));
  const auto ia = inadmissible_set(f.gs);
  EXPECT_EQ(admissible_set(f.gy, ia), (FeatureSet{f.x1, f.x2, f.x10}));
  EXPECT_EQ(mi_set(f.gy, ia), FeatureSet{f.x11});
  EXPECT_EQ(ri_set(f.gy, mi_set(f.gy, ia)), (FeatureSet{f.x1, f.x2}));

  const auto ri = select(f.gy, f.gs, Variant::kRi);
  EXPECT_EQ(ri.icrf, (FeatureSet{f.x7, f.x10}));
  EXPECT_EQ(ri.ad1, FeatureSet{f.x10});
  EXPECT_EQ(ri.ad2, FeatureSet{f.x7});
  EXPECT_EQ(ri.selected, (FeatureSet{f.x1, f.x2}));
  EXPECT_EQ(select(f.gy, f.gs, Variant::kAd1).selected, (FeatureSet{f.x1, f.x2, f.x10}));
  EXPECT_EQ(select(f.gy, f.gs, Variant::kAd2).selected, (FeatureSet{f.x1, f.x2, f.x7}));
  EXPECT_EQ(select(f.gy, f.gs, Variant::kOsfs).selected, (FeatureSet{f.x1, f.x2, f.x11}));
  EXPECT_EQ(select(f.gy, f.gs, Variant::kBaseline).selected.size(), 7u);
  EXPECT_EQ(ri.round, 7u);
  for (Variant v : kAllVariants) expect_invariants(select(f.gy, f.gs, v), f.gy, f.gs);
}

TEST(SetAlgebra, EmptyAndEdgeCases) {
  const EgoGraphState gy(Target::kLabel), gs(Target::kProtected);
  EXPECT_TRUE(inadmissible_set(gs).empty());

  const SharedBlanket f;
  EXPECT_EQ(admissible_set(f.gy, {}), (FeatureSet{f.x1, f.x2, f.x11, f.x7, f.x10}));
  EXPECT_TRUE(mi_set(f.gy, FeatureSet{f.x12, f.x13}).empty());
  EXPECT_EQ(ri_set(f.gy, {}), markov_blanket(f.gy));
  EXPECT_TRUE(ri_set(f.gy, markov_blanket(f.gy)).empty());
}

TEST(Select, NoSharedBlanketMeansEveryFairVariantPicksTheLabelBlanket) {
  SharedBlanket f;
  f.gs.cfs = {f.x12};
  f.gs.irrelevant.insert(f.x11);
  for (Variant v : {Variant::kRi, Variant::kAd1, Variant::kAd2}) {
    EXPECT_EQ(select(f.gy, f.gs, v).selected, markov_blanket(f.gy)) << to_string(v);
  }
}

TEST(Select, RejectsGraphsOverDifferentFeatures) {
  SharedBlanket f;
  f.gs.irrelevant.erase(f.x10);
  try {
    select(f.gy, f.gs, Variant::kRi);
    FAIL() << "mismatched graphs accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kGraphMismatch);
  }
  EXPECT_THROW(select(f.gs, f.gy, Variant::kRi), Error);
}

TEST(Select, StreamedProtectedAttributeIsDroppedExceptForBaselineAndOsfs) {
  SharedBlanket f;
  const FeatureId s{7, "S"};
  f.gy.cfs.push_back(s);
  f.gs.irrelevant.insert(s);
  SelectOptions opt;
  opt.protected_name = "S";
  EXPECT_TRUE(select(f.gy, f.gs, Variant::kBaseline, opt).selected.contains(s));
  EXPECT_TRUE(select(f.gy, f.gs, Variant::kOsfs, opt).selected.contains(s));
  for (Variant v : {Variant::kRemoveS, Variant::kRi, Variant::kAd1, Variant::kAd2}) {
    EXPECT_FALSE(select(f.gy, f.gs, v, opt).selected.contains(s)) << to_string(v);
  }
  EXPECT_EQ(select(f.gy, f.gs, Variant::kRemoveS, opt).selected.size(), 7u);
}

TEST(Select, InvariantsHoldAtEveryRoundOnRandomSems) {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    SyntheticSpec spec;
    spec.p = 10;
    spec.n = 2000;
    spec.seed = seed;
    spec.proxy_paths = 2;
    const Dataset ds = ci_view(generate_sem(spec).dataset, CiKind::kFisherZ);
    StreamingSelector sel(ds.label, ds.protected_attr, CiKind::kFisherZ, {});
    for (auto& col : stream(ds, StreamOrder::shuffled(ds.feature_count(), seed))) {
      sel.push(std::move(col));
      for (Variant v : kAllVariants) {
        const auto snap = sel.snapshot(v);
        expect_invariants(snap, sel.label_graph(), sel.protected_graph());
      }
      const auto ri = sel.snapshot(Variant::kRi).selected;
      EXPECT_TRUE(subset_of(ri, sel.snapshot(Variant::kAd1).selected));
      EXPECT_TRUE(subset_of(ri, sel.snapshot(Variant::kAd2).selected));
    }
  }
}

TEST(Select, RevalidationOnlyRemovesCandidates) {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    SyntheticSpec spec;
    spec.p = 10;
    spec.n = 2000;
    spec.seed = seed;
    spec.proxy_paths = 2;
    const Dataset ds = ci_view(generate_sem(spec).dataset, CiKind::kFisherZ);
    StreamingSelector sel(ds.label, ds.protected_attr, CiKind::kFisherZ, {});
    for (auto& col : stream(ds, StreamOrder::natural(ds.feature_count()))) sel.push(std::move(col));
    SelectOptions opt;
    opt.revalidate = true;
    for (Variant v : {Variant::kAd1, Variant::kAd2}) {
      const auto plain = sel.snapshot(v);
      const auto checked = sel.snapshot(v, opt);
      EXPECT_TRUE(subset_of(checked.selected, plain.selected));
      EXPECT_TRUE(subset_of(plain.ri, checked.selected));
    }
  }
}

TEST(Variants, NamesRoundTrip) {
  for (Variant v : kAllVariants) EXPECT_EQ(parse_variant(to_string(v)), v);
  EXPECT_FALSE(parse_variant("sfcf").has_value());
}

TEST(Variants, SnapshotJsonListsNames) {
  const SharedBlanket f;
  const auto j = to_json(select(f.gy, f.gs, Variant::kAd1));
  EXPECT_EQ(j.at("variant"), "sfcf-ad1");
  EXPECT_EQ(j.at("selected"), nlohmann::json::array({"X1", "X2", "X10"}));
  EXPECT_EQ(j.at("mi"), nlohmann::json::array({"X11"}));
}

TEST(SetAlgebra, CommonParentOfLabelAndProtectedIsTheSharedFeature) {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> g;
  const std::size_t n = 4000;
  std::vector<double> z(n), s(n), y(n), other(n), noise(n);
  for (std::size_t i = 0; i < n; ++i) {
    z[i] = g(rng);
    other[i] = g(rng);
    noise[i] = g(rng);
    s[i] = z[i] + g(rng) > 0 ? 1.0 : 0.0;
    y[i] = z[i] + other[i] + g(rng) > 0 ? 1.0 : 0.0;
  }
  StreamingSelector sel(continuous("Y", y), continuous("S", s), CiKind::kFisherZ, {});
  const FeatureId zid = sel.push(continuous("Z", z));
  const FeatureId oid = sel.push(continuous("O", other));
  sel.push(continuous("N", noise));
  const auto snap = sel.snapshot(Variant::kRi);
  EXPECT_EQ(snap.mi, FeatureSet{zid});
  EXPECT_EQ(snap.selected, FeatureSet{oid});
}

TEST(StreamingSelector, StreamedBlanketMatchesExhaustiveSearch) {
  int agree = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    SyntheticSpec spec;
    spec.p = 5 + static_cast<int>(seed % 4);
    spec.n = 5000;
    spec.seed = 1000 + seed;
    const Dataset ds = ci_view(generate_sem(spec).dataset, CiKind::kFisherZ);
    StreamingSelector sel(ds.label, ds.protected_attr, CiKind::kFisherZ, {});
    for (auto& col : stream(ds, StreamOrder::shuffled(ds.feature_count(), seed))) sel.push(std::move(col));
    std::set<std::string> streamed, exhaustive;
    for (const auto& f : markov_blanket(sel.label_graph())) streamed.insert(f.name);
    for (const auto& f : brute_force_mb(ds, Target::kLabel, {}, CiKind::kFisherZ)) exhaustive.insert(f.name);
    agree += streamed == exhaustive;
  }
  EXPECT_GE(agree, 95);
}

TEST(StreamingSelector, CopiesOfTheLabelCollapseToOneBlanketMember) {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> g;
  std::vector<double> y(500), s(500);
  for (std::size_t i = 0; i < 500; ++i) {
    y[i] = g(rng);
    s[i] = g(rng);
  }
  StreamingSelector sel(continuous("Y", y), continuous("S", s), CiKind::kFisherZ, {});
  for (int k = 0; k < 4; ++k) sel.push(continuous("copy" + std::to_string(k), y));
  EXPECT_EQ(markov_blanket(sel.label_graph()).size(), 1u);
}

// R -> P <- S, P -> Y, Q -> Y: dropping P leaves R as an admissible stand-in.
TEST(StreamingSelector, AdmissibleStandInForSharedParent) {
  std::mt19937_64 rng(29);
  std::normal_distribution<double> g;
  const std::size_t n = 5000;
  std::vector<double> r(n), s(n), p(n), q(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = g(rng);
    s[i] = g(rng) > 0 ? 1.0 : 0.0;
    q[i] = g(rng);
    p[i] = 0.8 * r[i] + 1.6 * s[i] + g(rng);
    y[i] = 0.9 * p[i] + 0.9 * q[i] + g(rng) > 0.8 ? 1.0 : 0.0;
  }
  StreamingSelector sel(continuous("Y", y), continuous("S", s), CiKind::kFisherZ, {});
  for (const auto& [name, v] : {std::pair{"R", r}, {"P", p}, {"Q", q}}) sel.push(continuous(name, v));
  auto names = [](const FeatureSet& fs) {
    std::set<std::string> out;
    for (const auto& f : fs) out.insert(f.name);
    return out;
  };
  const auto ri = sel.snapshot(Variant::kRi), ad1 = sel.snapshot(Variant::kAd1);
  EXPECT_EQ(names(ri.mi), std::set<std::string>{"P"});
  EXPECT_EQ(names(ri.selected), std::set<std::string>{"Q"});
  EXPECT_EQ(names(ad1.selected), (std::set<std::string>{"Q", "R"}));
  EXPECT_EQ(ad1.selected.size(), ri.selected.size() + 1);
}
