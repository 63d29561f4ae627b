#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cim/community.hpp"
#include "cim/diffusion.hpp"
#include "cim/graph.hpp"
#include "cim/solvers.hpp"

namespace cim {

// Nested candidate seed sets of one community, expressed in parent node ids:
// the size-j candidate is the first j entries of seeds_in_order, with its
// within-community influence in influence_at_size[j-1].
struct CommunityCandidates {
  std::vector<NodeId> seeds_in_order;
  std::vector<double> influence_at_size;
  std::int64_t oracle_calls = 0;

  int max_size() const { return static_cast<int>(seeds_in_order.size()); }
  bool operator==(const CommunityCandidates&) const = default;
};

struct CandidateTable {
  std::vector<CommunityCandidates> communities;

  std::int64_t total_oracle_calls() const;
  bool operator==(const CandidateTable&) const = default;

  // JSON interchange: [{"community": i, "seeds": [...], "influence": [...]}].
  // Influence lists are per prefix size; synthetic tables can be injected for
  // budgeting experiments without running any diffusion.
  void write_json(std::ostream& out) const;
  static CandidateTable read_json(std::istream& in);
};

enum class SolMethod { kLazyGreedy, kNaiveGreedy };

// Builds the influence estimator used inside one community subgraph.
using OracleFactory =
    std::function<std::unique_ptr<InfluenceOracle>(const DirectedGraph& community_graph,
                                                   int community_index)>;

OracleFactory monte_carlo_oracle_factory(DiffusionModel model, int simulations,
                                         std::uint64_t base_seed, int workers = 0);
OracleFactory exact_ic_oracle_factory();

// Runs the selection method on every community's induced subgraph, with
// influence measured inside the community only. Each community contributes
// min(k, community size) nested candidates. Communities are independent and
// are processed by up to `workers` threads.
CandidateTable generate_candidates(const DirectedGraph& graph, const Partition& partition, int k,
                                   SolMethod sol_method, const OracleFactory& oracle_factory,
                                   int workers = 0);

// Budget split across communities. counts[i] is the number of seeds taken
// from community i; pick_sequence records which community won each round, so
// every intermediate budget's allocation can be replayed.
struct BudgetAllocation {
  std::vector<int> counts;
  double objective = 0.0;
  std::vector<NodeId> seeds;  // union of the chosen prefixes, sorted
  bool under_budget = false;  // fewer candidates than budget units available
  std::vector<int> pick_sequence;
};

// Greedy budget allocation: k rounds, each granting one unit to the community
// with the maximum current marginal gain (ties toward the smaller index).
// Exhausted communities get a -inf marginal and are never selected again.
// Optimal for the allocation problem whenever marginal gains are
// non-increasing. Throws when k < 1 or the table is empty.
BudgetAllocation progressive_budgeting(const CandidateTable& table, int k);

// Exhaustive allocation search, the verification twin of
// progressive_budgeting. Ties resolve to the lexicographically smallest
// counts vector. Guard: at most 8 communities and k <= 10.
BudgetAllocation ilp_bruteforce(const CandidateTable& table, int k);

struct LowerBoundCheck {
  double within_sum = 0.0;   // sum of within-community influences
  double union_value = 0.0;  // influence of the union on the full graph
  bool holds = false;
};

// Exact IC check that within-community influences never exceed the influence
// of the union of the per-community seed sets. subsets[i] must lie inside
// community i.
LowerBoundCheck check_lower_bound(const DirectedGraph& graph, const Partition& partition,
                                  std::span<const std::vector<NodeId>> subsets,
                                  double tolerance = 1e-9);

enum class ComMethod { kLouvain, kLabelPropagation, kGirvanNewman, kExternalFile };

struct CommunityImOptions {
  int budget = 1;
  ComMethod com_method = ComMethod::kLouvain;
  SolMethod sol_method = SolMethod::kLazyGreedy;
  double merge_threshold = 0.01;
  std::uint64_t detection_seed = 0;
  std::optional<Partition> external_partition;  // required for kExternalFile
  OracleFactory oracle_factory;                 // required
  int workers = 0;
};

struct StageTimes {
  double detection_seconds = 0.0;
  double candidates_seconds = 0.0;
  double budgeting_seconds = 0.0;
};

struct CommunityImResult {
  Partition detected;  // partition before the small-community merge
  Partition merged;
  double merged_modularity = 0.0;
  CandidateTable table;
  BudgetAllocation allocation;
  std::vector<NodeId> seeds;  // == allocation.seeds
  StageTimes times;
};

// The full community-aware pipeline: detect communities, merge the small
// ones, generate per-community candidates, allocate the budget progressively
// and return the union of the chosen prefixes.
CommunityImResult community_im(const DirectedGraph& graph, const CommunityImOptions& options);

}  // namespace cim
