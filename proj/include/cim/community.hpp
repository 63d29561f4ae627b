#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "cim/graph.hpp"

namespace cim {

// Hard partition of the node set: every node belongs to exactly one of c
// non-empty communities, indexed 0..c-1.
struct Partition {
  std::vector<int> assignment;       // node -> community index
  int community_count = 0;
  std::vector<int> community_sizes;  // indexed by community

  // Renumbers arbitrary labels densely by first appearance and validates the
  // hard-partition invariants.
  static Partition from_assignment(std::vector<int> raw_assignment);

  // Node lists per community, each sorted ascending.
  std::vector<std::vector<NodeId>> groups() const;

  bool operator==(const Partition&) const = default;
};

// Newman modularity of the partition, treating the graph as undirected
// (directed edges are symmetrized and deduplicated):
//   Q = sum_i [ L_i/m - (delta_i/(2m))^2 ]
// with m the undirected edge count, L_i the intra-community edge count and
// delta_i the total undirected degree of community i. Throws when m == 0.
double modularity(const DirectedGraph& graph, const Partition& partition);

// Louvain method: repeated local moves plus community aggregation until the
// modularity gain of a level drops below 1e-7. Node visit order is shuffled
// with the seeded stream, so a seed pins the partition.
Partition louvain(const DirectedGraph& graph, std::uint64_t rng_seed);

// Asynchronous label propagation in seeded random node order: each node
// adopts the majority label among its undirected neighbors, ties broken by
// the smallest label. Stops when a sweep changes nothing or after 100 sweeps.
Partition label_propagation(const DirectedGraph& graph, std::uint64_t rng_seed);

struct GirvanNewmanResult {
  Partition partition;
  double modularity_score = 0.0;
  // Modularity after each removal step, starting with the intact graph.
  std::vector<double> modularity_trace;
};

// Girvan-Newman: repeatedly remove the edge(s) of maximum betweenness
// (shortest-path counts with 1/d weight across d equal-shortest paths;
// betweenness is recomputed only in components touched by a removal). All
// edges tied for the maximum are removed together, so a component-count
// target can be overshot. Without a target the partition with maximum
// modularity along the removal sequence is returned; with a target the first
// partition with at least `target_communities` components is returned.
GirvanNewmanResult girvan_newman(const DirectedGraph& graph,
                                 std::optional<int> target_communities = std::nullopt);

// Unions all communities whose size is strictly below
// threshold_fraction * node_count into a single community. With fewer than
// two qualifying communities the partition is returned unchanged.
Partition merge_small(const Partition& partition, double threshold_fraction = 0.01);

// Text interchange: one "node_label community_id" pair per line, using the
// graph's original node labels.
void write_partition(std::ostream& out, const DirectedGraph& graph, const Partition& partition);
Partition read_partition(std::istream& in, const DirectedGraph& graph);
Partition read_partition_file(const std::string& path, const DirectedGraph& graph);

}  // namespace cim
