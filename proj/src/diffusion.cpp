#include "cim/diffusion.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>

#include "cim/rng.hpp"

namespace cim {

namespace {

constexpr double kLtWeightSlack = 1e-9;

std::vector<NodeId> canonical_seed_set(const DirectedGraph& graph, std::span<const NodeId> seeds,
                                       const char* what) {
  std::vector<NodeId> sorted(seeds.begin(), seeds.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (NodeId v : sorted) graph.throw_if_invalid_node(v, what);
  return sorted;
}

void check_lt_weights(const DirectedGraph& graph) {
  const double worst = graph.max_in_weight_sum();
  if (worst > 1.0 + kLtWeightSlack) {
    throw std::runtime_error(
        "linear threshold requires per-node entering weight sums <= 1 (got " +
        std::to_string(worst) + "); the trivalency weight model is incompatible with LT");
  }
}

// Scratch buffers shared across simulations by one worker.
struct SimScratch {
  std::vector<std::uint8_t> active;
  std::vector<std::uint8_t> pending;
  std::vector<double> thresholds;
  std::vector<double> incoming;
  std::vector<NodeId> frontier, next;

  explicit SimScratch(int n)
      : active(n, 0), pending(n, 0), thresholds(n, 0.0), incoming(n, 0.0) {}
};

// Core IC run. Seeds must be sorted/validated. Appends per-step newly active
// lists to `trace` when non-null. Returns the number of active nodes.
int run_ic(const DirectedGraph& graph, const std::vector<NodeId>& seeds, rng::Engine& eng,
           SimScratch& s, std::vector<std::vector<NodeId>>* trace) {
  std::fill(s.active.begin(), s.active.end(), 0);
  std::fill(s.pending.begin(), s.pending.end(), 0);
  s.frontier = seeds;
  for (NodeId v : seeds) s.active[v] = 1;
  int active_count = static_cast<int>(seeds.size());
  if (trace) trace->push_back(seeds);
  while (!s.frontier.empty()) {
    s.next.clear();
    for (NodeId u : s.frontier) {
      for (const Arc& a : graph.out_edges(u)) {
        if (s.active[a.node]) continue;  // activated at an earlier step
        const bool success = rng::uniform01(eng) < a.weight;
        if (success && !s.pending[a.node]) {
          s.pending[a.node] = 1;
          s.next.push_back(a.node);
        }
      }
    }
    std::sort(s.next.begin(), s.next.end());
    for (NodeId v : s.next) {
      s.active[v] = 1;
      s.pending[v] = 0;
    }
    active_count += static_cast<int>(s.next.size());
    if (trace && !s.next.empty()) trace->push_back(s.next);
    std::swap(s.frontier, s.next);
  }
  return active_count;
}

// Core LT run. Thresholds are resampled every run (the influence expectation
// is over threshold randomness).
int run_lt(const DirectedGraph& graph, const std::vector<NodeId>& seeds, rng::Engine& eng,
           SimScratch& s, std::vector<std::vector<NodeId>>* trace) {
  const int n = graph.node_count();
  std::fill(s.active.begin(), s.active.end(), 0);
  std::fill(s.pending.begin(), s.pending.end(), 0);
  std::fill(s.incoming.begin(), s.incoming.end(), 0.0);
  for (int v = 0; v < n; ++v) s.thresholds[v] = rng::uniform01(eng);
  s.frontier = seeds;
  for (NodeId v : seeds) s.active[v] = 1;
  int active_count = static_cast<int>(seeds.size());
  if (trace) trace->push_back(seeds);
  while (!s.frontier.empty()) {
    s.next.clear();
    for (NodeId u : s.frontier) {
      for (const Arc& a : graph.out_edges(u)) {
        NodeId v = a.node;
        if (s.active[v]) continue;
        s.incoming[v] += a.weight;
        if (!s.pending[v] && s.incoming[v] >= s.thresholds[v]) {
          s.pending[v] = 1;
          s.next.push_back(v);
        }
      }
    }
    std::sort(s.next.begin(), s.next.end());
    for (NodeId v : s.next) {
      s.active[v] = 1;
      s.pending[v] = 0;
    }
    active_count += static_cast<int>(s.next.size());
    if (trace && !s.next.empty()) trace->push_back(s.next);
    std::swap(s.frontier, s.next);
  }
  return active_count;
}

std::vector<NodeId> collect_active(const std::vector<std::vector<NodeId>>& trace) {
  std::vector<NodeId> all;
  for (const auto& step : trace) all.insert(all.end(), step.begin(), step.end());
  std::sort(all.begin(), all.end());
  return all;
}

// Live-edge enumeration with incremental reachability closures. Walks the
// complete binary tree of live/blocked outcomes over the edge list; at each
// leaf calls leaf(weight, closures) where closures[v] is the bitmask of nodes
// reachable from v under the live edges. Zero-probability branches are
// pruned, so p=0/1 edges cost nothing.
template <typename Leaf>
void enumerate_live_edge_closures(const DirectedGraph& graph, Leaf&& leaf) {
  const int n = graph.node_count();
  const auto edges = graph.edges();
  const int m = static_cast<int>(edges.size());
  std::vector<std::vector<std::uint64_t>> closure_stack(m + 1,
                                                        std::vector<std::uint64_t>(n));
  for (int v = 0; v < n; ++v) closure_stack[0][v] = 1ull << v;

  // Explicit recursion over edge index; depth <= 25.
  auto recurse = [&](auto&& self, int depth, double weight) -> void {
    if (depth == m) {
      leaf(weight, closure_stack[depth]);
      return;
    }
    const WeightedEdge& e = edges[depth];
    const std::vector<std::uint64_t>& cur = closure_stack[depth];
    // Blocked branch reuses the current closure.
    if (e.weight < 1.0) {
      closure_stack[depth + 1] = cur;
      self(self, depth + 1, weight * (1.0 - e.weight));
    }
    // Live branch: everything reaching `from` gains `to`'s closure.
    if (e.weight > 0.0) {
      std::vector<std::uint64_t>& next = closure_stack[depth + 1];
      next = cur;
      const std::uint64_t gained = cur[e.to];
      const std::uint64_t from_bit = 1ull << e.from;
      for (int w = 0; w < n; ++w) {
        if (next[w] & from_bit) next[w] |= gained;
      }
      self(self, depth + 1, weight * e.weight);
    }
  };
  recurse(recurse, 0, 1.0);
}

void check_enumeration_guard(const DirectedGraph& graph, std::int64_t max_edges,
                             const char* what) {
  if (graph.edge_count() > max_edges)
    throw std::runtime_error(std::string(what) + ": edge count " +
                             std::to_string(graph.edge_count()) + " exceeds enumeration guard " +
                             std::to_string(max_edges));
  if (graph.node_count() > 64)
    throw std::runtime_error(std::string(what) + ": node count exceeds 64-bit closure guard");
}

class MonteCarloOracle final : public InfluenceOracle {
 public:
  MonteCarloOracle(const DirectedGraph& graph, DiffusionModel model, int simulations,
                   std::uint64_t base_seed, int workers)
      : graph_(graph),
        model_(model),
        simulations_(simulations),
        base_seed_(base_seed),
        workers_(workers) {}

 private:
  double evaluate_impl(const std::vector<NodeId>& seeds) override {
    const std::uint64_t stream = rng::mix(base_seed_, rng::hash_node_set(seeds));
    return estimate_influence(graph_, seeds, model_, simulations_, stream, workers_).mean;
  }

  const DirectedGraph& graph_;
  DiffusionModel model_;
  int simulations_;
  std::uint64_t base_seed_;
  int workers_;
};

struct ProfileHash {
  std::size_t operator()(const std::vector<std::uint64_t>& profile) const {
    std::uint64_t h = 0x243f6a8885a308d3ull;
    for (std::uint64_t word : profile) {
      std::uint64_t s = h ^ word;
      h = rng::splitmix64(s);
    }
    return static_cast<std::size_t>(h);
  }
};

class ExactIcOracle final : public InfluenceOracle {
 public:
  explicit ExactIcOracle(const DirectedGraph& graph) : node_count_(graph.node_count()) {
    check_enumeration_guard(graph, 22, "exact IC oracle");
    std::unordered_map<std::vector<std::uint64_t>, double, ProfileHash> grouped;
    enumerate_live_edge_closures(graph,
                                 [&](double weight, const std::vector<std::uint64_t>& closures) {
                                   grouped[closures] += weight;
                                 });
    profiles_.reserve(grouped.size() * node_count_);
    weights_.reserve(grouped.size());
    for (const auto& [profile, weight] : grouped) {
      profiles_.insert(profiles_.end(), profile.begin(), profile.end());
      weights_.push_back(weight);
    }
  }

 private:
  double evaluate_impl(const std::vector<NodeId>& seeds) override {
    for (NodeId v : seeds)
      if (v < 0 || v >= node_count_) throw std::out_of_range("exact IC oracle: bad node id");
    double total = 0.0;
    const std::uint64_t* profile = profiles_.data();
    for (double weight : weights_) {
      std::uint64_t reached = 0;
      for (NodeId s : seeds) reached |= profile[s];
      total += weight * std::popcount(reached);
      profile += node_count_;
    }
    return total;
  }

  int node_count_;
  std::vector<std::uint64_t> profiles_;  // row-major: profile index x node
  std::vector<double> weights_;
};

}  // namespace

int resolve_worker_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("CIM_WORKERS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) return parsed;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

std::vector<NodeId> simulate_ic(const DirectedGraph& graph, std::span<const NodeId> seeds,
                                std::uint64_t rng_seed) {
  return collect_active(simulate_ic_trace(graph, seeds, rng_seed));
}

std::vector<NodeId> simulate_lt(const DirectedGraph& graph, std::span<const NodeId> seeds,
                                std::uint64_t rng_seed) {
  return collect_active(simulate_lt_trace(graph, seeds, rng_seed));
}

std::vector<std::vector<NodeId>> simulate_ic_trace(const DirectedGraph& graph,
                                                   std::span<const NodeId> seeds,
                                                   std::uint64_t rng_seed) {
  const std::vector<NodeId> sorted = canonical_seed_set(graph, seeds, "simulate_ic");
  rng::Engine eng = rng::make_engine(rng_seed);
  SimScratch scratch(graph.node_count());
  std::vector<std::vector<NodeId>> trace;
  run_ic(graph, sorted, eng, scratch, &trace);
  return trace;
}

std::vector<std::vector<NodeId>> simulate_lt_trace(const DirectedGraph& graph,
                                                   std::span<const NodeId> seeds,
                                                   std::uint64_t rng_seed) {
  const std::vector<NodeId> sorted = canonical_seed_set(graph, seeds, "simulate_lt");
  check_lt_weights(graph);
  rng::Engine eng = rng::make_engine(rng_seed);
  SimScratch scratch(graph.node_count());
  std::vector<std::vector<NodeId>> trace;
  run_lt(graph, sorted, eng, scratch, &trace);
  return trace;
}

InfluenceEstimate estimate_influence(const DirectedGraph& graph, std::span<const NodeId> seeds,
                                     DiffusionModel model, int simulations,
                                     std::uint64_t master_seed, int workers) {
  if (simulations < 1) throw std::runtime_error("estimate_influence: need at least 1 simulation");
  const std::vector<NodeId> sorted = canonical_seed_set(graph, seeds, "estimate_influence");
  if (model == DiffusionModel::kLinearThreshold) check_lt_weights(graph);

  const int worker_count = std::min(resolve_worker_count(workers), simulations);
  std::vector<std::uint64_t> sums(worker_count, 0), square_sums(worker_count, 0);

  auto run_range = [&](int worker, int begin, int end) {
    SimScratch scratch(graph.node_count());
    std::uint64_t sum = 0, square_sum = 0;
    for (int r = begin; r < end; ++r) {
      rng::Engine eng = rng::make_engine(rng::mix(master_seed, static_cast<std::uint64_t>(r)));
      const int active = model == DiffusionModel::kIndependentCascade
                             ? run_ic(graph, sorted, eng, scratch, nullptr)
                             : run_lt(graph, sorted, eng, scratch, nullptr);
      sum += static_cast<std::uint64_t>(active);
      square_sum += static_cast<std::uint64_t>(active) * static_cast<std::uint64_t>(active);
    }
    sums[worker] = sum;
    square_sums[worker] = square_sum;
  };

  if (worker_count == 1) {
    run_range(0, 0, simulations);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(worker_count);
    const int chunk = (simulations + worker_count - 1) / worker_count;
    for (int w = 0; w < worker_count; ++w) {
      const int begin = w * chunk;
      const int end = std::min(simulations, begin + chunk);
      threads.emplace_back(run_range, w, begin, end);
    }
    for (std::thread& t : threads) t.join();
  }

  // Integer totals make the combine order immaterial: results are identical
  // for any worker count.
  std::uint64_t sum = 0, square_sum = 0;
  for (int w = 0; w < worker_count; ++w) {
    sum += sums[w];
    square_sum += square_sums[w];
  }

  InfluenceEstimate estimate;
  estimate.simulations = simulations;
  estimate.seed_set_size = static_cast<int>(sorted.size());
  estimate.mean = static_cast<double>(sum) / simulations;
  if (simulations > 1) {
    const long double r = simulations;
    long double variance =
        (static_cast<long double>(square_sum) - static_cast<long double>(sum) *
                                                    static_cast<long double>(sum) / r) /
        (r - 1);
    if (variance < 0) variance = 0;
    estimate.std_error = static_cast<double>(std::sqrt(variance / r));
  }
  if (estimate.mean < static_cast<double>(sorted.size()) ||
      estimate.mean > static_cast<double>(graph.node_count())) {
    throw std::logic_error("influence estimate escaped [|S|, n]");
  }
  return estimate;
}

double exact_influence_ic(const DirectedGraph& graph, std::span<const NodeId> seeds) {
  check_enumeration_guard(graph, 25, "exact_influence_ic");
  const std::vector<NodeId> sorted = canonical_seed_set(graph, seeds, "exact_influence_ic");
  if (sorted.empty()) return 0.0;
  double total = 0.0;
  enumerate_live_edge_closures(graph,
                               [&](double weight, const std::vector<std::uint64_t>& closures) {
                                 std::uint64_t reached = 0;
                                 for (NodeId s : sorted) reached |= closures[s];
                                 total += weight * std::popcount(reached);
                               });
  return total;
}

std::pair<double, double> exact_influence_lt(const DirectedGraph& graph,
                                             std::span<const NodeId> seeds, int simulations,
                                             std::uint64_t master_seed) {
  if (seeds.empty()) return {0.0, 0.0};
  const InfluenceEstimate estimate = estimate_influence(
      graph, seeds, DiffusionModel::kLinearThreshold, simulations, master_seed);
  return {estimate.mean, estimate.std_error};
}

std::unique_ptr<InfluenceOracle> make_monte_carlo_oracle(const DirectedGraph& graph,
                                                         DiffusionModel model, int simulations,
                                                         std::uint64_t base_seed, int workers) {
  if (model == DiffusionModel::kLinearThreshold) check_lt_weights(graph);
  return std::make_unique<MonteCarloOracle>(graph, model, simulations, base_seed, workers);
}

std::unique_ptr<InfluenceOracle> make_exact_ic_oracle(const DirectedGraph& graph) {
  return std::make_unique<ExactIcOracle>(graph);
}

}  // namespace cim
