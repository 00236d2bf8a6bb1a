#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace sfcf {

enum class ColumnKind { kContinuous, kCategorical };

inline const char* to_string(ColumnKind kind) {
  return kind == ColumnKind::kContinuous ? "continuous" : "categorical";
}

// One variable observed over N instances. Categorical values are integer
// level codes stored as doubles so both kinds share one storage type.
struct FeatureColumn {
  std::string name;
  ColumnKind kind = ColumnKind::kContinuous;
  std::vector<double> values;

  FeatureColumn() = default;
  FeatureColumn(std::string n, ColumnKind k, std::vector<double> v)
      : name(std::move(n)), kind(k), values(std::move(v)) {}

  std::size_t size() const { return values.size(); }
  bool is_categorical() const { return kind == ColumnKind::kCategorical; }
};

inline FeatureColumn continuous(std::string name, std::vector<double> values) {
  return {std::move(name), ColumnKind::kContinuous, std::move(values)};
}

inline FeatureColumn categorical(std::string name, std::vector<double> values) {
  return {std::move(name), ColumnKind::kCategorical, std::move(values)};
}

// Rows of `col` picked by `rows`, keeping name and kind.
inline FeatureColumn take_rows(const FeatureColumn& col, const std::vector<std::size_t>& rows) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(col.values[r]);
  return {col.name, col.kind, std::move(out)};
}

}  // namespace sfcf
