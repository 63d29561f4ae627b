#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace cim {

using NodeId = std::int32_t;

// One adjacency entry: the other endpoint of a directed edge plus its weight.
// In out-lists `node` is the edge target, in in-lists it is the source.
struct Arc {
  NodeId node;
  double weight;
};

struct WeightedEdge {
  NodeId from;
  NodeId to;
  double weight;
};

// Immutable weighted directed graph with dense node ids 0..n-1 and adjacency
// kept in both directions (out-lists drive cascade propagation, in-lists hold
// the weights entering a node). Original input labels are retained so results
// can be reported in the caller's id space.
class DirectedGraph {
 public:
  // Edges must be self-loop free and duplicate free; both are rejected here
  // (the loader drops and counts them before construction). Weights must lie
  // in [0, 1]. When `original_labels` is empty, labels default to 0..n-1.
  DirectedGraph(int node_count, std::vector<WeightedEdge> edges,
                std::vector<std::int64_t> original_labels = {});

  int node_count() const { return node_count_; }
  std::int64_t edge_count() const { return static_cast<std::int64_t>(out_arcs_.size()); }

  std::span<const Arc> out_edges(NodeId v) const {
    return {out_arcs_.data() + out_offsets_[v], out_arcs_.data() + out_offsets_[v + 1]};
  }
  std::span<const Arc> in_edges(NodeId v) const {
    return {in_arcs_.data() + in_offsets_[v], in_arcs_.data() + in_offsets_[v + 1]};
  }
  int out_degree(NodeId v) const {
    return static_cast<int>(out_offsets_[v + 1] - out_offsets_[v]);
  }
  int in_degree(NodeId v) const {
    return static_cast<int>(in_offsets_[v + 1] - in_offsets_[v]);
  }

  std::int64_t original_label(NodeId v) const { return original_labels_[v]; }
  const std::vector<std::int64_t>& original_labels() const { return original_labels_; }

  // Edges in canonical (from, to) order; weights parallel to that order.
  std::vector<WeightedEdge> edges() const;

  double max_in_weight_sum() const;

  // Loader diagnostics.
  int self_loops_dropped() const { return self_loops_dropped_; }
  int duplicate_edges_dropped() const { return duplicate_edges_dropped_; }

  // True when in- and out-adjacency describe the same edge multiset.
  bool cross_consistent() const;

  void throw_if_invalid_node(NodeId v, const char* what) const;

 private:
  friend DirectedGraph load_edge_list(std::istream&, bool);

  int node_count_ = 0;
  std::vector<std::size_t> out_offsets_, in_offsets_;
  std::vector<Arc> out_arcs_, in_arcs_;
  std::vector<std::int64_t> original_labels_;
  int self_loops_dropped_ = 0;
  int duplicate_edges_dropped_ = 0;
};

enum class WeightModel { kWeightedCascade, kTrivalency };

struct EdgeWeightModel {
  WeightModel model = WeightModel::kWeightedCascade;
  // Trivalency constants; each must lie in (0, 1].
  std::vector<double> trivalency_constants{0.1, 0.01, 0.001};

  static EdgeWeightModel weighted_cascade() { return {WeightModel::kWeightedCascade, {}}; }
  static EdgeWeightModel trivalency(std::vector<double> constants = {0.1, 0.01, 0.001}) {
    return {WeightModel::kTrivalency, std::move(constants)};
  }
};

// Reads a SNAP-style plain text edge list: one "u v" pair per line, arbitrary
// whitespace, '#' comment lines, integer labels of arbitrary magnitude.
// Labels are densely relabelled (ascending label order). With directed=false
// each undirected input edge {u,v} yields both u->v and v->u. Self-loops are
// dropped and counted; duplicate directed edges are deduplicated and counted.
// All weights start at 0 until assign_weights is called.
// Throws std::runtime_error with the line number on malformed input and on an
// empty graph.
DirectedGraph load_edge_list(std::istream& in, bool directed);
DirectedGraph load_edge_list_file(const std::string& path, bool directed);

// Returns a copy of the graph with edge weights assigned by the model:
// weighted cascade sets every edge u->v to 1/in-degree(v); trivalency draws
// each edge weight i.i.d. from the constant set, deterministically in the
// seeded stream (edges visited in canonical order).
DirectedGraph assign_weights(const DirectedGraph& graph, const EdgeWeightModel& model,
                             std::uint64_t rng_seed);

struct InducedSubgraph {
  DirectedGraph graph;
  std::vector<NodeId> to_parent;  // subgraph id -> parent id
};

// Subgraph on `nodes` keeping exactly the edges with both endpoints inside;
// weights are inherited verbatim, never recomputed. Throws on an empty node
// set or out-of-range ids.
InducedSubgraph induced_subgraph(const DirectedGraph& graph, std::span<const NodeId> nodes);

}  // namespace cim
