#include "cim/solvers.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <stdexcept>

namespace cim {

namespace {

void check_budget(const DirectedGraph& graph, int k, bool allow_truncation, const char* what) {
  if (k <= 0) throw std::runtime_error(std::string(what) + ": budget must be positive");
  if (!allow_truncation && k > graph.node_count())
    throw std::runtime_error(std::string(what) + ": budget exceeds node count");
}

}  // namespace

GreedyTrace lazy_greedy(const DirectedGraph& graph, int k, InfluenceOracle& oracle) {
  check_budget(graph, k, true, "lazy_greedy");
  const int n = graph.node_count();
  const int target = std::min(k, n);
  const std::int64_t calls_before = oracle.calls();

  struct Entry {
    double gain;
    NodeId node;
    int evaluated_at;  // |selection| when the gain was computed
  };
  // Max-heap: higher gain first, then smaller node id, matching the naive
  // greedy argmax tie-break.
  auto worse = [](const Entry& a, const Entry& b) {
    if (a.gain != b.gain) return a.gain < b.gain;
    return a.node > b.node;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> queue(worse);

  GreedyTrace trace;
  double current_value = 0.0;
  std::vector<NodeId> trial;
  for (NodeId v = 0; v < n; ++v) queue.push({oracle.evaluate({v}), v, 0});

  while (static_cast<int>(trace.seeds_in_order.size()) < target) {
    Entry top = queue.top();
    queue.pop();
    if (top.evaluated_at == static_cast<int>(trace.seeds_in_order.size())) {
      trace.seeds_in_order.push_back(top.node);
      current_value += top.gain;
      trace.influence_at_size.push_back(current_value);
    } else {
      trial = trace.seeds_in_order;
      trial.push_back(top.node);
      top.gain = oracle.evaluate(trial) - current_value;
      top.evaluated_at = static_cast<int>(trace.seeds_in_order.size());
      queue.push(top);
    }
  }
  trace.oracle_calls = oracle.calls() - calls_before;
  return trace;
}

GreedyTrace greedy_naive(const DirectedGraph& graph, int k, InfluenceOracle& oracle) {
  check_budget(graph, k, true, "greedy_naive");
  const int n = graph.node_count();
  const int target = std::min(k, n);
  const std::int64_t calls_before = oracle.calls();

  GreedyTrace trace;
  std::vector<bool> selected(n, false);
  double current_value = 0.0;
  std::vector<NodeId> trial;
  for (int round = 0; round < target; ++round) {
    double best_gain = -std::numeric_limits<double>::infinity();
    NodeId best_node = -1;
    for (NodeId v = 0; v < n; ++v) {
      if (selected[v]) continue;
      trial = trace.seeds_in_order;
      trial.push_back(v);
      const double gain = oracle.evaluate(trial) - current_value;
      if (gain > best_gain) {  // ascending scan keeps the smallest id on ties
        best_gain = gain;
        best_node = v;
      }
    }
    selected[best_node] = true;
    trace.seeds_in_order.push_back(best_node);
    current_value += best_gain;
    trace.influence_at_size.push_back(current_value);
  }
  trace.oracle_calls = oracle.calls() - calls_before;
  return trace;
}

std::vector<NodeId> degree_topk(const DirectedGraph& graph, int k) {
  check_budget(graph, k, false, "degree_topk");
  std::vector<NodeId> nodes(graph.node_count());
  for (NodeId v = 0; v < graph.node_count(); ++v) nodes[v] = v;
  std::sort(nodes.begin(), nodes.end(), [&graph](NodeId a, NodeId b) {
    const int da = graph.out_degree(a), db = graph.out_degree(b);
    if (da != db) return da > db;
    return a < b;
  });
  nodes.resize(k);
  return nodes;
}

std::vector<NodeId> degree_discount(const DirectedGraph& graph, int k,
                                    double propagation_probability) {
  check_budget(graph, k, false, "degree_discount");
  if (propagation_probability < 0.0 || propagation_probability > 1.0)
    throw std::runtime_error("degree_discount: propagation probability outside [0, 1]");
  const int n = graph.node_count();
  std::vector<double> discounted(n);
  std::vector<int> selected_in_neighbors(n, 0);
  std::vector<bool> selected(n, false);
  for (NodeId v = 0; v < n; ++v) discounted[v] = graph.out_degree(v);

  std::vector<NodeId> picks;
  picks.reserve(k);
  for (int round = 0; round < k; ++round) {
    NodeId best = -1;
    for (NodeId v = 0; v < n; ++v) {
      if (selected[v]) continue;
      if (best < 0 || discounted[v] > discounted[best]) best = v;
    }
    selected[best] = true;
    picks.push_back(best);
    for (const Arc& a : graph.out_edges(best)) {
      const NodeId w = a.node;
      if (selected[w]) continue;
      const double d = graph.out_degree(w);
      const double t = ++selected_in_neighbors[w];
      discounted[w] = d - 2.0 * t - (d - t) * t * propagation_probability;
    }
  }
  return picks;
}

}  // namespace cim
