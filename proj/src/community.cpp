#include "cim/community.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "cim/rng.hpp"

namespace cim {

namespace {

// Undirected, unweighted view of a directed graph: each symmetrized edge
// appears once in `edges` (u < v) and in both adjacency lists.
struct UndirectedView {
  int n = 0;
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::vector<std::vector<std::pair<NodeId, int>>> adjacency;  // (neighbor, edge id)

  int degree(NodeId v) const { return static_cast<int>(adjacency[v].size()); }
};

UndirectedView make_undirected_view(const DirectedGraph& graph) {
  UndirectedView view;
  view.n = graph.node_count();
  view.edges.reserve(graph.edge_count());
  for (NodeId v = 0; v < view.n; ++v) {
    for (const Arc& a : graph.out_edges(v)) {
      view.edges.emplace_back(std::min(v, a.node), std::max(v, a.node));
    }
  }
  std::sort(view.edges.begin(), view.edges.end());
  view.edges.erase(std::unique(view.edges.begin(), view.edges.end()), view.edges.end());
  view.adjacency.resize(view.n);
  for (int e = 0; e < static_cast<int>(view.edges.size()); ++e) {
    const auto [u, v] = view.edges[e];
    view.adjacency[u].emplace_back(v, e);
    view.adjacency[v].emplace_back(u, e);
  }
  return view;
}

double modularity_of_view(const UndirectedView& view, const Partition& partition) {
  const double m = static_cast<double>(view.edges.size());
  std::vector<std::int64_t> intra(partition.community_count, 0);
  std::vector<std::int64_t> degree_sum(partition.community_count, 0);
  for (const auto& [u, v] : view.edges) {
    if (partition.assignment[u] == partition.assignment[v]) ++intra[partition.assignment[u]];
  }
  for (NodeId v = 0; v < view.n; ++v) degree_sum[partition.assignment[v]] += view.degree(v);
  double q = 0.0;
  for (int c = 0; c < partition.community_count; ++c) {
    const double fraction = intra[c] / m;
    const double expected = degree_sum[c] / (2.0 * m);
    q += fraction - expected * expected;
  }
  return q;
}

// Weighted multigraph used across Louvain aggregation levels. Self-loop
// weight is stored once; weighted_degree counts it twice.
struct LouvainLevel {
  int n = 0;
  std::vector<std::vector<std::pair<int, double>>> adjacency;
  std::vector<double> self_weight;
  std::vector<double> weighted_degree;
  double total_degree = 0.0;  // 2W
};

LouvainLevel level_from_view(const UndirectedView& view) {
  LouvainLevel level;
  level.n = view.n;
  level.adjacency.resize(view.n);
  level.self_weight.assign(view.n, 0.0);
  level.weighted_degree.assign(view.n, 0.0);
  for (const auto& [u, v] : view.edges) {
    level.adjacency[u].emplace_back(v, 1.0);
    level.adjacency[v].emplace_back(u, 1.0);
  }
  for (int v = 0; v < view.n; ++v) {
    level.weighted_degree[v] = static_cast<double>(level.adjacency[v].size());
    level.total_degree += level.weighted_degree[v];
  }
  return level;
}

std::vector<int> renumber_first_appearance(const std::vector<int>& raw, int* count_out) {
  std::unordered_map<int, int> remap;
  std::vector<int> dense(raw.size());
  int next = 0;
  for (std::size_t v = 0; v < raw.size(); ++v) {
    auto [it, inserted] = remap.emplace(raw[v], next);
    if (inserted) ++next;
    dense[v] = it->second;
  }
  if (count_out) *count_out = next;
  return dense;
}

// One round of local moves. Returns the dense community assignment and
// whether any node moved.
std::vector<int> louvain_local_moves(const LouvainLevel& level, rng::Engine& eng, bool* moved_any) {
  std::vector<int> community(level.n);
  std::vector<double> community_degree(level.n);
  for (int v = 0; v < level.n; ++v) {
    community[v] = v;
    community_degree[v] = level.weighted_degree[v];
  }
  std::vector<int> order(level.n);
  for (int v = 0; v < level.n; ++v) order[v] = v;
  rng::shuffle(order, eng);

  *moved_any = false;
  std::vector<std::pair<int, double>> neighbor_weights;
  bool moved = true;
  int sweeps = 0;
  while (moved && sweeps++ < 10000) {
    moved = false;
    for (int v : order) {
      const int old_community = community[v];
      neighbor_weights.clear();
      for (const auto& [u, w] : level.adjacency[v]) neighbor_weights.emplace_back(community[u], w);
      std::sort(neighbor_weights.begin(), neighbor_weights.end());

      community_degree[old_community] -= level.weighted_degree[v];
      const double degree_scale = level.weighted_degree[v] / level.total_degree;

      double stay_weight = 0.0;
      for (const auto& [c, w] : neighbor_weights)
        if (c == old_community) stay_weight += w;
      const double stay_gain = stay_weight - community_degree[old_community] * degree_scale;

      int best_community = old_community;
      double best_gain = stay_gain;
      for (std::size_t i = 0; i < neighbor_weights.size();) {
        const int c = neighbor_weights[i].first;
        double weight_to_c = 0.0;
        for (; i < neighbor_weights.size() && neighbor_weights[i].first == c; ++i)
          weight_to_c += neighbor_weights[i].second;
        if (c == old_community) continue;
        // Candidates arrive in ascending community id, so a strict comparison
        // keeps the smallest id among ties and never moves on a tie with the
        // current community.
        const double gain = weight_to_c - community_degree[c] * degree_scale;
        if (gain > best_gain) {
          best_gain = gain;
          best_community = c;
        }
      }

      community_degree[best_community] += level.weighted_degree[v];
      if (best_community != old_community) {
        community[v] = best_community;
        moved = true;
        *moved_any = true;
      }
    }
  }
  int count = 0;
  return renumber_first_appearance(community, &count);
}

LouvainLevel aggregate_level(const LouvainLevel& level, const std::vector<int>& community,
                             int community_count) {
  LouvainLevel next;
  next.n = community_count;
  next.adjacency.resize(community_count);
  next.self_weight.assign(community_count, 0.0);
  next.weighted_degree.assign(community_count, 0.0);
  std::vector<std::map<int, double>> between(community_count);
  for (int v = 0; v < level.n; ++v) {
    next.self_weight[community[v]] += level.self_weight[v];
    for (const auto& [u, w] : level.adjacency[v]) {
      if (u < v) continue;  // each undirected edge once
      if (community[u] == community[v]) {
        next.self_weight[community[v]] += w;
      } else {
        between[community[v]][community[u]] += w;
      }
    }
  }
  for (int c = 0; c < community_count; ++c) {
    for (const auto& [d, w] : between[c]) {
      next.adjacency[c].emplace_back(d, w);
      next.adjacency[d].emplace_back(c, w);
    }
  }
  for (int c = 0; c < community_count; ++c) {
    double degree = 2.0 * next.self_weight[c];
    for (const auto& [d, w] : next.adjacency[c]) degree += w;
    next.weighted_degree[c] = degree;
    next.total_degree += degree;
  }
  return next;
}

std::vector<int> components_of(const UndirectedView& view, const std::vector<bool>& edge_alive) {
  std::vector<int> component(view.n, -1);
  int count = 0;
  std::deque<NodeId> queue;
  for (NodeId start = 0; start < view.n; ++start) {
    if (component[start] >= 0) continue;
    component[start] = count;
    queue.push_back(start);
    while (!queue.empty()) {
      NodeId v = queue.front();
      queue.pop_front();
      for (const auto& [u, e] : view.adjacency[v]) {
        if (!edge_alive[e] || component[u] >= 0) continue;
        component[u] = count;
        queue.push_back(u);
      }
    }
    ++count;
  }
  return component;
}

// Brandes edge betweenness restricted to the sources of one component,
// accumulated onto `betweenness` (indexed by edge id). Equal-length shortest
// paths split weight 1/d; unordered pairs are counted once.
void accumulate_component_betweenness(const UndirectedView& view,
                                      const std::vector<bool>& edge_alive,
                                      const std::vector<int>& component, int target_component,
                                      std::vector<double>& betweenness) {
  const int n = view.n;
  std::vector<int> distance(n), order;
  std::vector<double> sigma(n), delta(n);
  for (NodeId source = 0; source < n; ++source) {
    if (component[source] != target_component) continue;
    std::fill(distance.begin(), distance.end(), -1);
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    order.clear();
    std::deque<NodeId> queue;
    distance[source] = 0;
    sigma[source] = 1.0;
    queue.push_back(source);
    while (!queue.empty()) {
      NodeId v = queue.front();
      queue.pop_front();
      order.push_back(v);
      for (const auto& [u, e] : view.adjacency[v]) {
        if (!edge_alive[e]) continue;
        if (distance[u] < 0) {
          distance[u] = distance[v] + 1;
          queue.push_back(u);
        }
        if (distance[u] == distance[v] + 1) sigma[u] += sigma[v];
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      NodeId w = *it;
      for (const auto& [v, e] : view.adjacency[w]) {
        if (!edge_alive[e] || distance[v] != distance[w] - 1) continue;
        const double share = sigma[v] / sigma[w] * (1.0 + delta[w]);
        betweenness[e] += share * 0.5;  // each unordered pair visited from both sides
        delta[v] += share;
      }
    }
  }
}

}  // namespace

Partition Partition::from_assignment(std::vector<int> raw_assignment) {
  if (raw_assignment.empty()) throw std::runtime_error("partition of an empty node set");
  Partition partition;
  partition.assignment = renumber_first_appearance(raw_assignment, &partition.community_count);
  partition.community_sizes.assign(partition.community_count, 0);
  for (int c : partition.assignment) ++partition.community_sizes[c];
  return partition;
}

std::vector<std::vector<NodeId>> Partition::groups() const {
  std::vector<std::vector<NodeId>> result(community_count);
  for (NodeId v = 0; v < static_cast<NodeId>(assignment.size()); ++v)
    result[assignment[v]].push_back(v);
  return result;
}

double modularity(const DirectedGraph& graph, const Partition& partition) {
  if (static_cast<int>(partition.assignment.size()) != graph.node_count())
    throw std::runtime_error("partition does not cover the node set");
  const UndirectedView view = make_undirected_view(graph);
  if (view.edges.empty()) throw std::runtime_error("modularity undefined on an edgeless graph");
  return modularity_of_view(view, partition);
}

Partition louvain(const DirectedGraph& graph, std::uint64_t rng_seed) {
  const UndirectedView view = make_undirected_view(graph);
  if (view.edges.empty()) throw std::runtime_error("modularity undefined on an edgeless graph");
  rng::Engine eng = rng::make_engine(rng_seed);

  LouvainLevel level = level_from_view(view);
  std::vector<int> node_to_super(graph.node_count());
  for (int v = 0; v < graph.node_count(); ++v) node_to_super[v] = v;

  Partition best = Partition::from_assignment(node_to_super);
  double previous_q = modularity_of_view(view, best);
  for (;;) {
    bool moved = false;
    const std::vector<int> community = louvain_local_moves(level, eng, &moved);
    if (!moved) break;
    int community_count = 1 + *std::max_element(community.begin(), community.end());
    for (int& super : node_to_super) super = community[super];
    const Partition current = Partition::from_assignment(node_to_super);
    const double q = modularity_of_view(view, current);
    best = current;
    if (q - previous_q < 1e-7) break;
    previous_q = q;
    level = aggregate_level(level, community, community_count);
  }
  return best;
}

Partition label_propagation(const DirectedGraph& graph, std::uint64_t rng_seed) {
  const UndirectedView view = make_undirected_view(graph);
  rng::Engine eng = rng::make_engine(rng_seed);
  std::vector<int> label(view.n);
  for (int v = 0; v < view.n; ++v) label[v] = v;
  std::vector<int> order(label);

  for (int sweep = 0; sweep < 100; ++sweep) {
    rng::shuffle(order, eng);
    bool changed = false;
    for (int v : order) {
      if (view.adjacency[v].empty()) continue;
      std::vector<int> neighbor_labels;
      neighbor_labels.reserve(view.adjacency[v].size());
      for (const auto& [u, e] : view.adjacency[v]) neighbor_labels.push_back(label[u]);
      std::sort(neighbor_labels.begin(), neighbor_labels.end());
      int best_label = neighbor_labels.front(), best_count = 0;
      for (std::size_t i = 0; i < neighbor_labels.size();) {
        const int l = neighbor_labels[i];
        int count = 0;
        for (; i < neighbor_labels.size() && neighbor_labels[i] == l; ++i) ++count;
        if (count > best_count) {  // ties keep the smallest label (sorted scan)
          best_count = count;
          best_label = l;
        }
      }
      if (best_label != label[v]) {
        label[v] = best_label;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return Partition::from_assignment(label);
}

GirvanNewmanResult girvan_newman(const DirectedGraph& graph,
                                 std::optional<int> target_communities) {
  if (target_communities && (*target_communities < 1 || *target_communities > graph.node_count()))
    throw std::runtime_error("girvan_newman: target community count outside [1, n]");
  UndirectedView view = make_undirected_view(graph);
  if (view.edges.empty()) throw std::runtime_error("modularity undefined on an edgeless graph");

  const int edge_count = static_cast<int>(view.edges.size());
  std::vector<bool> alive(edge_count, true);
  std::vector<double> betweenness(edge_count, 0.0);
  int alive_edges = edge_count;

  GirvanNewmanResult result;
  std::vector<int> component = components_of(view, alive);
  Partition current = Partition::from_assignment(component);
  double current_q = modularity_of_view(view, current);
  result.partition = current;
  result.modularity_score = current_q;
  result.modularity_trace.push_back(current_q);
  if (target_communities && current.community_count >= *target_communities) return result;

  std::vector<int> dirty_nodes;  // endpoints of the last removal batch
  bool first_pass = true;

  while (alive_edges > 0) {
    // Recompute betweenness only in components touched by the last removal.
    std::vector<bool> dirty(current.community_count, false);
    if (first_pass) {
      std::fill(dirty.begin(), dirty.end(), true);
      first_pass = false;
    } else {
      for (int v : dirty_nodes) dirty[component[v]] = true;
    }
    for (int e = 0; e < edge_count; ++e) {
      if (alive[e] && dirty[component[view.edges[e].first]]) betweenness[e] = 0.0;
    }
    for (int c = 0; c < current.community_count; ++c) {
      if (dirty[c]) accumulate_component_betweenness(view, alive, component, c, betweenness);
    }

    double max_betweenness = -1.0;
    for (int e = 0; e < edge_count; ++e)
      if (alive[e]) max_betweenness = std::max(max_betweenness, betweenness[e]);
    dirty_nodes.clear();
    for (int e = 0; e < edge_count; ++e) {
      if (alive[e] && betweenness[e] >= max_betweenness - 1e-9) {
        alive[e] = false;
        --alive_edges;
        dirty_nodes.push_back(view.edges[e].first);
        dirty_nodes.push_back(view.edges[e].second);
      }
    }

    component = components_of(view, alive);
    current = Partition::from_assignment(component);
    current_q = modularity_of_view(view, current);
    result.modularity_trace.push_back(current_q);

    if (target_communities) {
      if (current.community_count >= *target_communities) {
        result.partition = current;
        result.modularity_score = current_q;
        return result;
      }
    } else if (current_q > result.modularity_score) {
      result.partition = current;
      result.modularity_score = current_q;
    }
  }
  if (target_communities) {
    // Every edge removed: n singleton components, so any target <= n is met.
    result.partition = current;
    result.modularity_score = current_q;
  }
  return result;
}

Partition merge_small(const Partition& partition, double threshold_fraction) {
  const double threshold =
      threshold_fraction * static_cast<double>(partition.assignment.size());
  std::vector<bool> small(partition.community_count, false);
  int qualifying = 0;
  for (int c = 0; c < partition.community_count; ++c) {
    if (static_cast<double>(partition.community_sizes[c]) < threshold) {
      small[c] = true;
      ++qualifying;
    }
  }
  if (qualifying <= 1) return partition;
  std::vector<int> merged(partition.assignment.size());
  for (std::size_t v = 0; v < partition.assignment.size(); ++v) {
    const int c = partition.assignment[v];
    merged[v] = small[c] ? partition.community_count : c;
  }
  return Partition::from_assignment(std::move(merged));
}

void write_partition(std::ostream& out, const DirectedGraph& graph, const Partition& partition) {
  for (NodeId v = 0; v < graph.node_count(); ++v)
    out << graph.original_label(v) << ' ' << partition.assignment[v] << '\n';
}

Partition read_partition(std::istream& in, const DirectedGraph& graph) {
  std::unordered_map<std::int64_t, NodeId> dense;
  dense.reserve(graph.node_count());
  for (NodeId v = 0; v < graph.node_count(); ++v) dense[graph.original_label(v)] = v;

  std::vector<int> assignment(graph.node_count(), -1);
  std::string line;
  std::int64_t line_number = 0;
  int assigned = 0;
  while (std::getline(in, line)) {
    ++line_number;
    std::size_t first = line.find_first_not_of(" \t\r\n");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream tokens(line);
    std::int64_t label;
    int community;
    if (!(tokens >> label >> community))
      throw std::runtime_error("partition parse error at line " + std::to_string(line_number));
    auto it = dense.find(label);
    if (it == dense.end())
      throw std::runtime_error("partition references unknown node label " +
                               std::to_string(label));
    if (assignment[it->second] >= 0)
      throw std::runtime_error("partition assigns node " + std::to_string(label) + " twice");
    assignment[it->second] = community;
    ++assigned;
  }
  if (assigned != graph.node_count())
    throw std::runtime_error("partition must assign every node exactly once (got " +
                             std::to_string(assigned) + " of " +
                             std::to_string(graph.node_count()) + ")");
  return Partition::from_assignment(std::move(assignment));
}

Partition read_partition_file(const std::string& path, const DirectedGraph& graph) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open partition file: " + path);
  return read_partition(in, graph);
}

}  // namespace cim
