#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "cim/graph.hpp"

namespace cim {

enum class DiffusionModel { kIndependentCascade, kLinearThreshold };

// Monte-Carlo influence estimate: sample mean of the final active-set size,
// its standard error, and the sample count behind them.
struct InfluenceEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  int simulations = 0;
  int seed_set_size = 0;
};

// Number of concurrent simulation workers. `requested` <= 0 falls back to the
// CIM_WORKERS environment variable, then to the hardware thread count.
int resolve_worker_count(int requested = 0);

// One independent-cascade run: every newly active node gets a single
// Bernoulli(p) attempt per out-neighbor that is still inactive. Attempts are
// processed in ascending source id, then adjacency order, so a seed pins the
// run. Returns the sorted final active set.
std::vector<NodeId> simulate_ic(const DirectedGraph& graph, std::span<const NodeId> seeds,
                                std::uint64_t rng_seed);

// One linear-threshold run: per-node thresholds are drawn uniformly from
// [0,1) once per run; an inactive node activates when the weight of its
// active in-neighbors reaches its threshold. Requires per-node entering
// weight sums <= 1 + 1e-9.
std::vector<NodeId> simulate_lt(const DirectedGraph& graph, std::span<const NodeId> seeds,
                                std::uint64_t rng_seed);

// Trace variants: also return the newly activated nodes per step (step 0 is
// the seed set). Used to check that cascades are progressive.
std::vector<std::vector<NodeId>> simulate_ic_trace(const DirectedGraph& graph,
                                                   std::span<const NodeId> seeds,
                                                   std::uint64_t rng_seed);
std::vector<std::vector<NodeId>> simulate_lt_trace(const DirectedGraph& graph,
                                                   std::span<const NodeId> seeds,
                                                   std::uint64_t rng_seed);

// Mean final active-set size over `simulations` independent runs. Run r draws
// from a stream derived from (master_seed, r), so the result is bit-identical
// for any worker count and execution order.
InfluenceEstimate estimate_influence(const DirectedGraph& graph, std::span<const NodeId> seeds,
                                     DiffusionModel model, int simulations,
                                     std::uint64_t master_seed, int workers = 0);

// Exact IC influence by enumerating all 2^|E| live/blocked edge outcomes,
// weighting each by its probability and summing reachable-set sizes.
// Enumeration guards: |E| <= 25 and node count <= 64.
double exact_influence_ic(const DirectedGraph& graph, std::span<const NodeId> seeds);

// High-R Monte-Carlo reference for LT influence (there is no closed form).
// Returns (mean, std_error); meant for 3-sigma test tolerances on tiny graphs.
std::pair<double, double> exact_influence_lt(const DirectedGraph& graph,
                                             std::span<const NodeId> seeds,
                                             int simulations = 1000000,
                                             std::uint64_t master_seed = 7);

// Seed-set influence evaluator handed to the selection algorithms. Every
// evaluation is counted; that count is the complexity unit reported in
// solver traces.
class InfluenceOracle {
 public:
  virtual ~InfluenceOracle() = default;

  double evaluate(const std::vector<NodeId>& seeds) {
    ++calls_;
    return evaluate_impl(seeds);
  }
  std::int64_t calls() const { return calls_; }

 private:
  virtual double evaluate_impl(const std::vector<NodeId>& seeds) = 0;
  std::int64_t calls_ = 0;
};

// Monte-Carlo oracle. Each seed set draws from a stream keyed by the set's
// canonical hash, so re-evaluating the same set always returns the same
// value (a self-consistent estimator).
std::unique_ptr<InfluenceOracle> make_monte_carlo_oracle(const DirectedGraph& graph,
                                                         DiffusionModel model, int simulations,
                                                         std::uint64_t base_seed,
                                                         int workers = 0);

// Exact IC oracle for repeated evaluations on one small graph. The live-edge
// enumeration is collapsed into distinct reachability profiles once, after
// which evaluations cost O(profiles). Guard: |E| <= 22, nodes <= 64.
std::unique_ptr<InfluenceOracle> make_exact_ic_oracle(const DirectedGraph& graph);

}  // namespace cim
