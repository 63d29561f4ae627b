#include "cim/graph.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "cim/rng.hpp"

namespace cim {

DirectedGraph::DirectedGraph(int node_count, std::vector<WeightedEdge> edges,
                             std::vector<std::int64_t> original_labels)
    : node_count_(node_count) {
  if (node_count <= 0) throw std::runtime_error("graph must have at least one node");
  std::sort(edges.begin(), edges.end(), [](const WeightedEdge& a, const WeightedEdge& b) {
    return std::tie(a.from, a.to) < std::tie(b.from, b.to);
  });
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const WeightedEdge& e = edges[i];
    if (e.from < 0 || e.from >= node_count || e.to < 0 || e.to >= node_count)
      throw std::runtime_error("edge endpoint out of range");
    if (e.from == e.to) throw std::runtime_error("self-loops are not representable");
    if (i > 0 && edges[i - 1].from == e.from && edges[i - 1].to == e.to)
      throw std::runtime_error("duplicate directed edge");
    if (!(e.weight >= 0.0 && e.weight <= 1.0))
      throw std::runtime_error("edge weight outside [0, 1]");
  }

  out_offsets_.assign(node_count + 1, 0);
  in_offsets_.assign(node_count + 1, 0);
  for (const WeightedEdge& e : edges) {
    ++out_offsets_[e.from + 1];
    ++in_offsets_[e.to + 1];
  }
  for (int v = 0; v < node_count; ++v) {
    out_offsets_[v + 1] += out_offsets_[v];
    in_offsets_[v + 1] += in_offsets_[v];
  }
  out_arcs_.resize(edges.size());
  in_arcs_.resize(edges.size());
  std::vector<std::size_t> out_pos(out_offsets_.begin(), out_offsets_.end() - 1);
  std::vector<std::size_t> in_pos(in_offsets_.begin(), in_offsets_.end() - 1);
  for (const WeightedEdge& e : edges) {
    out_arcs_[out_pos[e.from]++] = {e.to, e.weight};
    in_arcs_[in_pos[e.to]++] = {e.from, e.weight};
  }
  // Out-lists are target-sorted by construction; in-lists need a sort pass.
  for (int v = 0; v < node_count; ++v) {
    std::sort(in_arcs_.begin() + in_offsets_[v], in_arcs_.begin() + in_offsets_[v + 1],
              [](const Arc& a, const Arc& b) { return a.node < b.node; });
  }

  if (original_labels.empty()) {
    original_labels_.resize(node_count);
    for (int v = 0; v < node_count; ++v) original_labels_[v] = v;
  } else {
    if (static_cast<int>(original_labels.size()) != node_count)
      throw std::runtime_error("label table size must match node count");
    original_labels_ = std::move(original_labels);
  }
}

std::vector<WeightedEdge> DirectedGraph::edges() const {
  std::vector<WeightedEdge> result;
  result.reserve(out_arcs_.size());
  for (NodeId v = 0; v < node_count_; ++v)
    for (const Arc& a : out_edges(v)) result.push_back({v, a.node, a.weight});
  return result;
}

double DirectedGraph::max_in_weight_sum() const {
  double best = 0.0;
  for (NodeId v = 0; v < node_count_; ++v) {
    double sum = 0.0;
    for (const Arc& a : in_edges(v)) sum += a.weight;
    best = std::max(best, sum);
  }
  return best;
}

bool DirectedGraph::cross_consistent() const {
  std::vector<WeightedEdge> from_in;
  from_in.reserve(in_arcs_.size());
  for (NodeId v = 0; v < node_count_; ++v)
    for (const Arc& a : in_edges(v)) from_in.push_back({a.node, v, a.weight});
  std::sort(from_in.begin(), from_in.end(), [](const WeightedEdge& a, const WeightedEdge& b) {
    return std::tie(a.from, a.to) < std::tie(b.from, b.to);
  });
  const std::vector<WeightedEdge> from_out = edges();
  if (from_in.size() != from_out.size()) return false;
  for (std::size_t i = 0; i < from_in.size(); ++i) {
    if (from_in[i].from != from_out[i].from || from_in[i].to != from_out[i].to ||
        from_in[i].weight != from_out[i].weight)
      return false;
  }
  return true;
}

void DirectedGraph::throw_if_invalid_node(NodeId v, const char* what) const {
  if (v < 0 || v >= node_count_)
    throw std::out_of_range(std::string(what) + ": node id " + std::to_string(v) +
                            " outside [0, " + std::to_string(node_count_) + ")");
}

DirectedGraph load_edge_list(std::istream& in, bool directed) {
  std::vector<std::pair<std::int64_t, std::int64_t>> raw_edges;
  int self_loops = 0;
  std::string line;
  std::int64_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    std::size_t first = line.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) continue;
    if (line[first] == '#') continue;
    std::istringstream tokens(line);
    std::int64_t u, v;
    if (!(tokens >> u >> v)) {
      throw std::runtime_error("parse error at line " + std::to_string(line_number) +
                               ": expected two integer node ids, got \"" + line + "\"");
    }
    std::string extra;
    if (tokens >> extra) {
      throw std::runtime_error("parse error at line " + std::to_string(line_number) +
                               ": trailing token \"" + extra + "\"");
    }
    if (u == v) {
      ++self_loops;
      continue;
    }
    raw_edges.emplace_back(u, v);
    if (!directed) raw_edges.emplace_back(v, u);
  }
  if (raw_edges.empty()) throw std::runtime_error("empty graph: no edges in input");

  // Dense relabelling in ascending label order.
  std::vector<std::int64_t> labels;
  labels.reserve(raw_edges.size() * 2);
  for (const auto& [u, v] : raw_edges) {
    labels.push_back(u);
    labels.push_back(v);
  }
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  auto dense_id = [&labels](std::int64_t label) {
    return static_cast<NodeId>(std::lower_bound(labels.begin(), labels.end(), label) -
                               labels.begin());
  };

  std::vector<std::pair<NodeId, NodeId>> dense_edges;
  dense_edges.reserve(raw_edges.size());
  for (const auto& [u, v] : raw_edges) dense_edges.emplace_back(dense_id(u), dense_id(v));
  std::sort(dense_edges.begin(), dense_edges.end());
  const std::size_t before = dense_edges.size();
  dense_edges.erase(std::unique(dense_edges.begin(), dense_edges.end()), dense_edges.end());
  const int duplicates = static_cast<int>(before - dense_edges.size());

  std::vector<WeightedEdge> edges;
  edges.reserve(dense_edges.size());
  for (const auto& [u, v] : dense_edges) edges.push_back({u, v, 0.0});

  const int node_count = static_cast<int>(labels.size());
  DirectedGraph graph(node_count, std::move(edges), std::move(labels));
  graph.self_loops_dropped_ = self_loops;
  graph.duplicate_edges_dropped_ = duplicates;
  return graph;
}

DirectedGraph load_edge_list_file(const std::string& path, bool directed) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file: " + path);
  return load_edge_list(in, directed);
}

DirectedGraph assign_weights(const DirectedGraph& graph, const EdgeWeightModel& model,
                             std::uint64_t rng_seed) {
  std::vector<WeightedEdge> edges = graph.edges();
  if (model.model == WeightModel::kWeightedCascade) {
    for (WeightedEdge& e : edges) e.weight = 1.0 / graph.in_degree(e.to);
  } else {
    if (model.trivalency_constants.empty())
      throw std::runtime_error("trivalency constant set must be non-empty");
    for (double c : model.trivalency_constants)
      if (!(c > 0.0 && c <= 1.0))
        throw std::runtime_error("trivalency constants must lie in (0, 1]");
    rng::Engine eng = rng::make_engine(rng_seed);
    for (WeightedEdge& e : edges) {
      e.weight = model.trivalency_constants[rng::bounded(eng, model.trivalency_constants.size())];
    }
  }
  return DirectedGraph(graph.node_count(), std::move(edges),
                       std::vector<std::int64_t>(graph.original_labels()));
}

InducedSubgraph induced_subgraph(const DirectedGraph& graph, std::span<const NodeId> nodes) {
  if (nodes.empty()) throw std::runtime_error("induced_subgraph: empty node set");
  std::vector<NodeId> sorted(nodes.begin(), nodes.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (NodeId v : sorted) graph.throw_if_invalid_node(v, "induced_subgraph");

  std::vector<NodeId> local(graph.node_count(), -1);
  for (std::size_t i = 0; i < sorted.size(); ++i) local[sorted[i]] = static_cast<NodeId>(i);

  std::vector<WeightedEdge> edges;
  std::vector<std::int64_t> labels;
  labels.reserve(sorted.size());
  for (NodeId v : sorted) {
    labels.push_back(graph.original_label(v));
    for (const Arc& a : graph.out_edges(v)) {
      if (local[a.node] >= 0) edges.push_back({local[v], local[a.node], a.weight});
    }
  }
  return {DirectedGraph(static_cast<int>(sorted.size()), std::move(edges), std::move(labels)),
          std::move(sorted)};
}

}  // namespace cim
