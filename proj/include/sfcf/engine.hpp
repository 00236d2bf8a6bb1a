#pragma once

#include <utility>

#include "sfcf/ci_tests.hpp"
#include "sfcf/ego_graph.hpp"
#include "sfcf/selector.hpp"
#include "sfcf/stream_data.hpp"

namespace sfcf {

// Which egocentric graphs a selector maintains. Unmaintained graphs still
// record every arrival as irrelevant so snapshots stay well formed.
enum class GraphSet { kNone, kLabel, kBoth };

inline GraphSet graphs_for(Variant v) {
  if (uses_protected_graph(v)) return GraphSet::kBoth;
  return uses_label_graph(v) ? GraphSet::kLabel : GraphSet::kNone;
}

// Online selector: features are pushed one at a time and a selection can be
// taken after any arrival.
class StreamingSelector {
 public:
  StreamingSelector(FeatureColumn label, FeatureColumn protected_attr, CiKind kind,
                    SignificanceConfig cfg, GraphSet graphs = GraphSet::kBoth)
      : data_(std::move(label), std::move(protected_attr), kind),
        cfg_(cfg),
        graphs_(graphs),
        label_graph_(Target::kLabel),
        protected_graph_(Target::kProtected) {
    cfg_.validate();
  }

  FeatureId push(FeatureColumn col) {
    const FeatureId id = data_.append(std::move(col));
    if (graphs_ == GraphSet::kNone) {
      label_graph_.irrelevant.insert(id);
    } else {
      label_graph_ = admit_feature(std::move(label_graph_), id, data_, cfg_);
    }
    if (graphs_ == GraphSet::kBoth) {
      protected_graph_ = admit_feature(std::move(protected_graph_), id, data_, cfg_);
    } else {
      protected_graph_.irrelevant.insert(id);
    }
    return id;
  }

  SelectionSnapshot snapshot(Variant v, SelectOptions opt = {}) const {
    if (uses_protected_graph(v) && graphs_ != GraphSet::kBoth) {
      throw Error(Errc::kInvalidArgument, std::string(to_string(v)) + " needs both graphs");
    }
    if (uses_label_graph(v) && graphs_ == GraphSet::kNone) {
      throw Error(Errc::kInvalidArgument, std::string(to_string(v)) + " needs the label graph");
    }
    opt.data = &data_;
    opt.cfg = cfg_;
    return select(label_graph_, protected_graph_, v, opt);
  }

  const EgoGraphState& label_graph() const { return label_graph_; }
  const EgoGraphState& protected_graph() const { return protected_graph_; }
  const StreamData& data() const { return data_; }
  const SignificanceConfig& config() const { return cfg_; }

 private:
  StreamData data_;
  SignificanceConfig cfg_;
  GraphSet graphs_;
  EgoGraphState label_graph_;
  EgoGraphState protected_graph_;
};

}  // namespace sfcf
