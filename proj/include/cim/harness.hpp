#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cim/pipeline.hpp"

namespace cim {

enum class Method { kCommunityIm, kCelfPp, kGreedyNaive, kDegree, kDegreeDiscount };

std::string to_string(Method method);
std::string to_string(ComMethod method);
std::string to_string(DiffusionModel model);
std::string to_string(WeightModel model);
Method method_from_string(const std::string& name);
ComMethod com_method_from_string(const std::string& name);
DiffusionModel diffusion_from_string(const std::string& name);
WeightModel weights_from_string(const std::string& name);

// Raised for invalid configuration (bad flags, bad files, forbidden model
// combinations); the CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string graph_path;
  bool directed = true;
  DiffusionModel diffusion = DiffusionModel::kIndependentCascade;
  WeightModel weights = WeightModel::kWeightedCascade;
  Method method = Method::kCommunityIm;
  ComMethod com_method = ComMethod::kLouvain;
  std::string partition_path;  // used with ComMethod::kExternalFile
  std::vector<int> budgets{1};
  int simulations = 1000;
  std::uint64_t master_seed = 0;
  double merge_threshold = 0.01;
  std::string output_path;

  // Validates invariants (LT excludes trivalency weights, budgets strictly
  // increasing and positive, simulations >= 1); throws ConfigError.
  void validate() const;

  std::string network_name() const;  // graph file stem, used in result rows

  bool operator==(const ExperimentConfig&) const = default;
};

std::string to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const std::string& text);
std::vector<ExperimentConfig> config_list_from_json_file(const std::string& path);

struct PartitionStats {
  int communities = 0;
  double modularity_score = 0.0;
  std::vector<int> sizes;  // descending

  bool operator==(const PartitionStats&) const = default;
};

// One per-budget result row. Everything here is deterministic for a fixed
// config and seed; wall times live on the enclosing RunRecord.
struct BudgetResult {
  int budget = 0;
  std::vector<std::int64_t> seed_labels;  // original node labels, ascending
  double influence = 0.0;
  double std_error = 0.0;
  std::int64_t oracle_calls = 0;

  bool operator==(const BudgetResult&) const = default;
};

struct RunRecord {
  ExperimentConfig config;
  std::vector<BudgetResult> results;
  std::optional<PartitionStats> partition;  // community-aware runs only
  StageTimes stage_times;                   // non-deterministic diagnostics
  double selection_seconds = 0.0;
  bool under_budget = false;

  bool operator==(const RunRecord& other) const {
    return config == other.config && results == other.results && partition == other.partition &&
           under_budget == other.under_budget;
  }
};

// Runs the configured method once at the largest budget (all methods produce
// nested solutions, so smaller budgets are prefixes) and re-estimates every
// budget's seed set on the full graph with the shared estimator, so every
// method is scored identically.
RunRecord run_experiment(const ExperimentConfig& config);

// Deterministic result table: one row per budget. Wall times are deliberately
// excluded; they are written to the JSON sidecar instead so that repeated
// runs with the same config and seed emit byte-identical CSV.
void write_run_csv(std::ostream& out, const RunRecord& record);
std::vector<BudgetResult> parse_run_csv(std::istream& in);

// Full record (config echo, timings, partition stats) for the sidecar.
std::string run_record_sidecar_json(const RunRecord& record);

struct ComparisonRow {
  std::string method;
  std::string network;
  std::string diffusion;
  std::string weights;
  int budget = 0;
  double influence = 0.0;
  double std_error = 0.0;
  double runtime_seconds = 0.0;  // rounded to milliseconds on construction
  std::int64_t oracle_calls = 0;
  std::string status = "ok";

  bool operator==(const ComparisonRow&) const = default;
};

// Runs each config in turn; a failing config contributes a single row with an
// error status while the remaining configs still run.
std::vector<ComparisonRow> compare_methods(const std::vector<ExperimentConfig>& configs);

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows);
std::vector<ComparisonRow> parse_comparison_csv(std::istream& in);

struct PartitionReport {
  std::string com_method;
  PartitionStats stats;
  int largest_community = 0;
  double largest_fraction = 0.0;
};

PartitionReport make_partition_report(const DirectedGraph& graph, ComMethod com_method,
                                      std::uint64_t seed, double merge_threshold,
                                      const std::optional<Partition>& external = std::nullopt);
void write_partition_report(std::ostream& out, const PartitionReport& report);

}  // namespace cim
