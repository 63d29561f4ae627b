#pragma once

#include <cstdint>
#include <vector>

#include "cim/diffusion.hpp"
#include "cim/graph.hpp"

namespace cim {

// Nested greedy solution: the size-j seed set is the first j picks. The
// influence value of each prefix and the number of oracle evaluations spent
// producing the trace are recorded alongside.
struct GreedyTrace {
  std::vector<NodeId> seeds_in_order;
  std::vector<double> influence_at_size;  // influence_at_size[j-1] = value of the size-j prefix
  std::int64_t oracle_calls = 0;
};

// Lazy greedy seed selection: a max-priority queue of stale marginal gains,
// re-evaluating the top entry until its gain is current. Under a
// deterministic estimator this returns exactly the naive greedy sequence
// while skipping most re-evaluations. Ties break towards the smaller node id.
// Stops at n picks when k > n; throws when k <= 0.
GreedyTrace lazy_greedy(const DirectedGraph& graph, int k, InfluenceOracle& oracle);

// Naive greedy: every remaining node's marginal gain is re-evaluated each
// round, so oracle usage is exactly n + (n-1) + ... + (n-k+1). Serves as the
// correctness reference for lazy_greedy.
GreedyTrace greedy_naive(const DirectedGraph& graph, int k, InfluenceOracle& oracle);

// Top-k nodes by out-degree, ties towards the smaller id. Throws when k > n.
std::vector<NodeId> degree_topk(const DirectedGraph& graph, int k);

// Degree-discount heuristic: repeatedly pick the node maximizing
//   dd_v = d_v - 2 t_v - (d_v - t_v) t_v p
// where d_v is the out-degree and t_v counts already selected in-neighbors
// of v; neighbors are updated after every pick. Ties towards the smaller id.
std::vector<NodeId> degree_discount(const DirectedGraph& graph, int k,
                                    double propagation_probability = 0.01);

}  // namespace cim
