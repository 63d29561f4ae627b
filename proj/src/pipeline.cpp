#include "cim/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "cim/rng.hpp"

namespace cim {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double objective_of(const CandidateTable& table, const std::vector<int>& counts) {
  double total = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] > 0) total += table.communities[i].influence_at_size[counts[i] - 1];
  }
  return total;
}

std::vector<NodeId> union_of_prefixes(const CandidateTable& table,
                                      const std::vector<int>& counts) {
  std::vector<NodeId> seeds;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const auto& order = table.communities[i].seeds_in_order;
    seeds.insert(seeds.end(), order.begin(), order.begin() + counts[i]);
  }
  std::sort(seeds.begin(), seeds.end());
  return seeds;
}

}  // namespace

std::int64_t CandidateTable::total_oracle_calls() const {
  std::int64_t total = 0;
  for (const CommunityCandidates& c : communities) total += c.oracle_calls;
  return total;
}

void CandidateTable::write_json(std::ostream& out) const {
  nlohmann::json array = nlohmann::json::array();
  for (std::size_t i = 0; i < communities.size(); ++i) {
    array.push_back({{"community", i},
                     {"seeds", communities[i].seeds_in_order},
                     {"influence", communities[i].influence_at_size},
                     {"oracle_calls", communities[i].oracle_calls}});
  }
  out << array.dump(2) << '\n';
}

CandidateTable CandidateTable::read_json(std::istream& in) {
  nlohmann::json array = nlohmann::json::parse(in);
  if (!array.is_array()) throw std::runtime_error("candidate table: expected a JSON array");
  CandidateTable table;
  table.communities.resize(array.size());
  for (const nlohmann::json& entry : array) {
    const std::size_t index = entry.at("community").get<std::size_t>();
    if (index >= table.communities.size())
      throw std::runtime_error("candidate table: community index out of range");
    CommunityCandidates& c = table.communities[index];
    c.seeds_in_order = entry.at("seeds").get<std::vector<NodeId>>();
    c.influence_at_size = entry.at("influence").get<std::vector<double>>();
    c.oracle_calls = entry.value("oracle_calls", std::int64_t{0});
    if (c.seeds_in_order.size() != c.influence_at_size.size())
      throw std::runtime_error("candidate table: seed and influence lengths differ");
  }
  return table;
}

OracleFactory monte_carlo_oracle_factory(DiffusionModel model, int simulations,
                                         std::uint64_t base_seed, int workers) {
  return [model, simulations, base_seed, workers](const DirectedGraph& community_graph,
                                                  int community_index) {
    return make_monte_carlo_oracle(community_graph, model, simulations,
                                   rng::mix(base_seed, static_cast<std::uint64_t>(community_index)),
                                   workers);
  };
}

OracleFactory exact_ic_oracle_factory() {
  return [](const DirectedGraph& community_graph, int) {
    return make_exact_ic_oracle(community_graph);
  };
}

CandidateTable generate_candidates(const DirectedGraph& graph, const Partition& partition, int k,
                                   SolMethod sol_method, const OracleFactory& oracle_factory,
                                   int workers) {
  if (k < 1) throw std::runtime_error("generate_candidates: budget must be positive");
  if (static_cast<int>(partition.assignment.size()) != graph.node_count())
    throw std::runtime_error("generate_candidates: partition does not cover the node set");
  if (!oracle_factory) throw std::runtime_error("generate_candidates: missing oracle factory");

  const std::vector<std::vector<NodeId>> groups = partition.groups();
  CandidateTable table;
  table.communities.resize(groups.size());

  auto solve_community = [&](int i) {
    const InducedSubgraph sub = induced_subgraph(graph, groups[i]);
    const std::unique_ptr<InfluenceOracle> oracle = oracle_factory(sub.graph, i);
    const GreedyTrace trace = sol_method == SolMethod::kLazyGreedy
                                  ? lazy_greedy(sub.graph, k, *oracle)
                                  : greedy_naive(sub.graph, k, *oracle);
    CommunityCandidates& candidates = table.communities[i];
    candidates.influence_at_size = trace.influence_at_size;
    candidates.oracle_calls = trace.oracle_calls;
    candidates.seeds_in_order.reserve(trace.seeds_in_order.size());
    for (NodeId local : trace.seeds_in_order)
      candidates.seeds_in_order.push_back(sub.to_parent[local]);
  };

  const int community_count = static_cast<int>(groups.size());
  const int worker_count = std::min(resolve_worker_count(workers), community_count);
  if (worker_count <= 1) {
    for (int i = 0; i < community_count; ++i) solve_community(i);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(worker_count);
    for (int w = 0; w < worker_count; ++w) {
      threads.emplace_back([&, w] {
        for (int i = w; i < community_count; i += worker_count) solve_community(i);
      });
    }
    for (std::thread& t : threads) t.join();
  }
  return table;
}

BudgetAllocation progressive_budgeting(const CandidateTable& table, int k) {
  if (k < 1) throw std::runtime_error("progressive_budgeting: budget must be positive");
  if (table.communities.empty())
    throw std::runtime_error("progressive_budgeting: empty candidate table");

  const int c = static_cast<int>(table.communities.size());
  constexpr double kExhausted = -std::numeric_limits<double>::infinity();
  std::vector<double> marginal(c);
  for (int i = 0; i < c; ++i) {
    marginal[i] =
        table.communities[i].max_size() > 0 ? table.communities[i].influence_at_size[0] : kExhausted;
  }

  BudgetAllocation allocation;
  allocation.counts.assign(c, 0);
  for (int round = 0; round < k; ++round) {
    int best = 0;
    for (int i = 1; i < c; ++i) {
      if (marginal[i] > marginal[best]) best = i;  // ties keep the smaller index
    }
    if (marginal[best] == kExhausted) break;  // every community is used up
    allocation.counts[best] += 1;
    allocation.pick_sequence.push_back(best);
    const CommunityCandidates& candidates = table.communities[best];
    const int used = allocation.counts[best];
    marginal[best] = used < candidates.max_size()
                         ? candidates.influence_at_size[used] - candidates.influence_at_size[used - 1]
                         : kExhausted;
  }
  allocation.under_budget = static_cast<int>(allocation.pick_sequence.size()) < k;
  allocation.objective = objective_of(table, allocation.counts);
  allocation.seeds = union_of_prefixes(table, allocation.counts);
  return allocation;
}

BudgetAllocation ilp_bruteforce(const CandidateTable& table, int k) {
  if (k < 1) throw std::runtime_error("ilp_bruteforce: budget must be positive");
  if (table.communities.empty()) throw std::runtime_error("ilp_bruteforce: empty candidate table");
  const int c = static_cast<int>(table.communities.size());
  if (c > 8 || k > 10)
    throw std::runtime_error("ilp_bruteforce: enumeration guard (c <= 8, k <= 10) exceeded");

  std::vector<int> counts(c, 0), best_counts(c, 0);
  double best_objective = -1.0;
  // Lexicographic enumeration; strict improvement keeps the smallest vector.
  auto recurse = [&](auto&& self, int i, int budget_left, double value) -> void {
    if (i == c) {
      if (value > best_objective) {
        best_objective = value;
        best_counts = counts;
      }
      return;
    }
    const CommunityCandidates& candidates = table.communities[i];
    const int limit = std::min(budget_left, candidates.max_size());
    for (int j = 0; j <= limit; ++j) {
      counts[i] = j;
      self(self, i + 1, budget_left - j,
           value + (j > 0 ? candidates.influence_at_size[j - 1] : 0.0));
    }
    counts[i] = 0;
  };
  recurse(recurse, 0, k, 0.0);

  BudgetAllocation allocation;
  allocation.counts = best_counts;
  allocation.objective = objective_of(table, best_counts);
  allocation.seeds = union_of_prefixes(table, best_counts);
  int total = 0;
  for (int j : best_counts) total += j;
  allocation.under_budget = total < k;
  return allocation;
}

LowerBoundCheck check_lower_bound(const DirectedGraph& graph, const Partition& partition,
                                  std::span<const std::vector<NodeId>> subsets,
                                  double tolerance) {
  if (static_cast<int>(subsets.size()) != partition.community_count)
    throw std::runtime_error("check_lower_bound: need one subset per community");
  const std::vector<std::vector<NodeId>> groups = partition.groups();

  LowerBoundCheck check;
  std::vector<NodeId> all_seeds;
  for (int i = 0; i < partition.community_count; ++i) {
    for (NodeId v : subsets[i]) {
      if (partition.assignment[v] != i)
        throw std::runtime_error("check_lower_bound: subset node outside its community");
    }
    all_seeds.insert(all_seeds.end(), subsets[i].begin(), subsets[i].end());
    if (subsets[i].empty()) continue;
    const InducedSubgraph sub = induced_subgraph(graph, groups[i]);
    std::vector<NodeId> local;
    local.reserve(subsets[i].size());
    for (NodeId v : subsets[i]) {
      const auto it = std::lower_bound(sub.to_parent.begin(), sub.to_parent.end(), v);
      local.push_back(static_cast<NodeId>(it - sub.to_parent.begin()));
    }
    check.within_sum += exact_influence_ic(sub.graph, local);
  }
  check.union_value = exact_influence_ic(graph, all_seeds);
  check.holds = check.within_sum <= check.union_value + tolerance;
  return check;
}

CommunityImResult community_im(const DirectedGraph& graph, const CommunityImOptions& options) {
  if (!options.oracle_factory) throw std::runtime_error("community_im: missing oracle factory");
  CommunityImResult result;

  auto start = Clock::now();
  switch (options.com_method) {
    case ComMethod::kLouvain:
      result.detected = louvain(graph, options.detection_seed);
      break;
    case ComMethod::kLabelPropagation:
      result.detected = label_propagation(graph, options.detection_seed);
      break;
    case ComMethod::kGirvanNewman:
      result.detected = girvan_newman(graph).partition;
      break;
    case ComMethod::kExternalFile:
      if (!options.external_partition)
        throw std::runtime_error("community_im: external partition not provided");
      result.detected = *options.external_partition;
      break;
  }
  result.merged = merge_small(result.detected, options.merge_threshold);
  result.merged_modularity = modularity(graph, result.merged);
  result.times.detection_seconds = seconds_since(start);

  start = Clock::now();
  result.table = generate_candidates(graph, result.merged, options.budget, options.sol_method,
                                     options.oracle_factory, options.workers);
  result.times.candidates_seconds = seconds_since(start);

  start = Clock::now();
  result.allocation = progressive_budgeting(result.table, options.budget);
  result.times.budgeting_seconds = seconds_since(start);
  result.seeds = result.allocation.seeds;
  return result;
}

}  // namespace cim
