#pragma once

// Columns that have arrived so far, plus the label and protected columns,
// with the per-column statistics the CI tests reuse across calls.

#include <compare>
#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sfcf/ci_tests.hpp"
#include "sfcf/column.hpp"
#include "sfcf/error.hpp"

namespace sfcf {

// A streamed feature: `index` is its arrival round, starting at 0.
struct FeatureId {
  std::size_t index = 0;
  std::string name;

  friend bool operator==(const FeatureId& a, const FeatureId& b) { return a.index == b.index; }
  friend std::strong_ordering operator<=>(const FeatureId& a, const FeatureId& b) {
    return a.index <=> b.index;
  }
};

// Ordered by arrival round.
using FeatureSet = std::set<FeatureId>;

enum class Target { kLabel, kProtected };

inline const char* to_string(Target t) { return t == Target::kLabel ? "label" : "protected"; }

class StreamData {
 public:
  StreamData(FeatureColumn label, FeatureColumn protected_attr, CiKind kind)
      : kind_(kind) {
    if (label.size() != protected_attr.size()) {
      throw Error(Errc::kInvalidArgument, "label and protected columns differ in length");
    }
    n_ = label.size();
    add_column(std::move(label));
    add_column(std::move(protected_attr));
  }

  CiKind kind() const { return kind_; }
  std::size_t rows() const { return n_; }
  std::size_t feature_count() const { return columns_.size() - kFirstFeature; }

  // Registers the next arriving feature and returns its id.
  FeatureId append(FeatureColumn col) {
    if (col.size() != n_) {
      throw Error(Errc::kInvalidArgument, "feature '" + col.name + "' has " +
                                              std::to_string(col.size()) + " rows, expected " +
                                              std::to_string(n_));
    }
    if (!names_.insert(col.name).second) {
      throw Error(Errc::kDuplicateFeature, "feature '" + col.name + "' already arrived");
    }
    FeatureId id{feature_count(), col.name};
    add_column(std::move(col));
    return id;
  }

  const FeatureColumn& feature(const FeatureId& id) const { return columns_.at(slot(id)).column; }
  const FeatureColumn& target(Target t) const { return columns_[slot(t)].column; }

  bool has_zero_variance(const FeatureId& id) const { return columns_.at(slot(id)).constant; }

  // Tests target ⊥ x | z on the cached statistics.
  CiResult test(const FeatureId& x, Target t, std::span<const FeatureId> z,
                const SignificanceConfig& cfg) const {
    std::vector<std::size_t> slots{slot(x), slot(t)};
    for (const auto& id : z) slots.push_back(slot(id));
    return test_slots(slots, cfg);
  }

  // Tests x ⊥ y | z between two streamed features.
  CiResult test(const FeatureId& x, const FeatureId& y, std::span<const FeatureId> z,
                const SignificanceConfig& cfg) const {
    std::vector<std::size_t> slots{slot(x), slot(y)};
    for (const auto& id : z) slots.push_back(slot(id));
    return test_slots(slots, cfg);
  }

 private:
  static constexpr std::size_t kFirstFeature = 2;

  struct Entry {
    FeatureColumn column;
    detail::Moments moments;
    bool constant = false;
    detail::LevelCodes codes;
    // Correlations with every earlier slot.
    std::vector<double> corr;
  };

  static std::size_t slot(Target t) { return t == Target::kLabel ? 0 : 1; }

  std::size_t slot(const FeatureId& id) const {
    const std::size_t s = id.index + kFirstFeature;
    if (s >= columns_.size()) {
      throw Error(Errc::kInvalidArgument, "feature '" + id.name + "' has not arrived");
    }
    return s;
  }

  void add_column(FeatureColumn col) {
    const ColumnKind want =
        kind_ == CiKind::kFisherZ ? ColumnKind::kContinuous : ColumnKind::kCategorical;
    if (col.kind != want) {
      throw Error(Errc::kMixedTypes, "column '" + col.name + "' is " + to_string(col.kind) +
                                         " but the stream uses the " + to_string(kind_) + " test");
    }
    Entry e;
    e.moments = detail::moments(col.values);
    e.constant = detail::zero_variance(e.moments);
    if (kind_ == CiKind::kFisherZ) {
      e.corr.reserve(columns_.size());
      for (const auto& prev : columns_) {
        if (e.constant || prev.constant) {
          e.corr.push_back(0.0);
          continue;
        }
        e.corr.push_back(detail::pearson(col.values, prev.column.values, e.moments.mean,
                                         e.moments.sd, prev.moments.mean, prev.moments.sd));
      }
    } else {
      e.codes = detail::encode_levels(col.values);
      if (e.codes.levels <= 1) e.constant = true;
    }
    e.column = std::move(col);
    columns_.push_back(std::move(e));
  }

  double corr(std::size_t a, std::size_t b) const {
    if (a == b) return 1.0;
    if (a < b) std::swap(a, b);
    return columns_[a].corr[b];
  }

  CiResult test_slots(const std::vector<std::size_t>& slots, const SignificanceConfig& cfg) const {
    const std::size_t nz = slots.size() - 2;
    if (kind_ == CiKind::kG2) {
      std::vector<const detail::LevelCodes*> zc;
      for (std::size_t i = 2; i < slots.size(); ++i) zc.push_back(&columns_[slots[i]].codes);
      return detail::g2_from_codes(columns_[slots[0]].codes, columns_[slots[1]].codes, zc, cfg);
    }
    for (std::size_t s : slots) {
      if (columns_[s].constant) {
        throw Error(Errc::kZeroVariance, "column '" + columns_[s].column.name + "' is constant");
      }
    }
    if (n_ <= nz + 3) {
      throw Error(Errc::kInsufficientSamples, "need n > |z| + 3");
    }
    const auto k = static_cast<Eigen::Index>(slots.size());
    Eigen::MatrixXd r(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index j = 0; j < k; ++j) r(i, j) = corr(slots[i], slots[j]);
    }
    return detail::fisher_from_partial(detail::partial_from_correlation(r), n_, nz, cfg);
  }

  CiKind kind_;
  std::size_t n_ = 0;
  std::vector<Entry> columns_;
  std::unordered_set<std::string> names_;
};

}  // namespace sfcf
