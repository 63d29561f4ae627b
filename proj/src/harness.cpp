#include "cim/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "cim/rng.hpp"

namespace cim {

namespace {

using Clock = std::chrono::steady_clock;

// Seed-stream ids carved out of the master seed; keeping them distinct makes
// every stage independently reproducible.
enum SeedStream : std::uint64_t {
  kWeightStream = 1,
  kSelectionStream = 2,
  kEvaluationStream = 3,
  kDetectionStream = 4,
};

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::string format_fixed3(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.3f", value);
  return buffer;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string join_labels(const std::vector<std::int64_t>& labels) {
  std::string out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(labels[i]);
  }
  return out;
}

std::vector<std::int64_t> parse_labels(const std::string& joined) {
  std::vector<std::int64_t> labels;
  std::istringstream in(joined);
  std::string token;
  while (std::getline(in, token, ';'))
    if (!token.empty()) labels.push_back(std::stoll(token));
  return labels;
}

std::string sanitize_status(std::string message) {
  for (char& c : message) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return message;
}

PartitionStats stats_of(const DirectedGraph& graph, const Partition& partition) {
  PartitionStats stats;
  stats.communities = partition.community_count;
  stats.modularity_score = modularity(graph, partition);
  stats.sizes = partition.community_sizes;
  std::sort(stats.sizes.begin(), stats.sizes.end(), std::greater<>());
  return stats;
}

}  // namespace

std::string to_string(Method method) {
  switch (method) {
    case Method::kCommunityIm: return "community-im";
    case Method::kCelfPp: return "celfpp";
    case Method::kGreedyNaive: return "greedy-naive";
    case Method::kDegree: return "degree";
    case Method::kDegreeDiscount: return "degree-discount";
  }
  return "?";
}

std::string to_string(ComMethod method) {
  switch (method) {
    case ComMethod::kLouvain: return "louvain";
    case ComMethod::kLabelPropagation: return "label-propagation";
    case ComMethod::kGirvanNewman: return "girvan-newman";
    case ComMethod::kExternalFile: return "external-file";
  }
  return "?";
}

std::string to_string(DiffusionModel model) {
  return model == DiffusionModel::kIndependentCascade ? "ic" : "lt";
}

std::string to_string(WeightModel model) {
  return model == WeightModel::kWeightedCascade ? "wc" : "tv";
}

Method method_from_string(const std::string& name) {
  if (name == "community-im") return Method::kCommunityIm;
  if (name == "celfpp") return Method::kCelfPp;
  if (name == "greedy-naive") return Method::kGreedyNaive;
  if (name == "degree") return Method::kDegree;
  if (name == "degree-discount") return Method::kDegreeDiscount;
  throw ConfigError("unknown method: " + name);
}

ComMethod com_method_from_string(const std::string& name) {
  if (name == "louvain") return ComMethod::kLouvain;
  if (name == "label-propagation") return ComMethod::kLabelPropagation;
  if (name == "girvan-newman") return ComMethod::kGirvanNewman;
  if (name == "external-file") return ComMethod::kExternalFile;
  throw ConfigError("unknown community method: " + name);
}

DiffusionModel diffusion_from_string(const std::string& name) {
  if (name == "ic") return DiffusionModel::kIndependentCascade;
  if (name == "lt") return DiffusionModel::kLinearThreshold;
  throw ConfigError("unknown diffusion model: " + name);
}

WeightModel weights_from_string(const std::string& name) {
  if (name == "wc") return WeightModel::kWeightedCascade;
  if (name == "tv") return WeightModel::kTrivalency;
  throw ConfigError("unknown edge-weight model: " + name);
}

void ExperimentConfig::validate() const {
  if (graph_path.empty()) throw ConfigError("graph path is required");
  if (budgets.empty()) throw ConfigError("at least one budget is required");
  if (budgets.front() < 1) throw ConfigError("budgets must be positive");
  for (std::size_t i = 1; i < budgets.size(); ++i) {
    if (budgets[i] <= budgets[i - 1]) throw ConfigError("budgets must be strictly increasing");
  }
  if (simulations < 1) throw ConfigError("simulation count must be at least 1");
  if (diffusion == DiffusionModel::kLinearThreshold && weights == WeightModel::kTrivalency) {
    throw ConfigError(
        "the trivalency weight model is incompatible with linear threshold diffusion "
        "(entering weight sums may exceed 1)");
  }
  if (merge_threshold < 0.0 || merge_threshold > 1.0)
    throw ConfigError("merge threshold must lie in [0, 1]");
  if (method == Method::kCommunityIm && com_method == ComMethod::kExternalFile &&
      partition_path.empty()) {
    throw ConfigError("com-method external-file requires a partition file");
  }
}

std::string ExperimentConfig::network_name() const {
  return std::filesystem::path(graph_path).stem().string();
}

std::string to_json(const ExperimentConfig& config) {
  nlohmann::json j{{"graph", config.graph_path},
                   {"directed", config.directed},
                   {"diffusion", to_string(config.diffusion)},
                   {"weights", to_string(config.weights)},
                   {"method", to_string(config.method)},
                   {"com_method", to_string(config.com_method)},
                   {"partition_file", config.partition_path},
                   {"budgets", config.budgets},
                   {"sims", config.simulations},
                   {"seed", config.master_seed},
                   {"merge_threshold", config.merge_threshold},
                   {"out", config.output_path}};
  return j.dump(2);
}

namespace {

ExperimentConfig config_from_json_value(const nlohmann::json& j) {
  ExperimentConfig config;
  try {
    config.graph_path = j.at("graph").get<std::string>();
    config.directed = j.value("directed", true);
    config.diffusion = diffusion_from_string(j.value("diffusion", "ic"));
    config.weights = weights_from_string(j.value("weights", "wc"));
    config.method = method_from_string(j.value("method", "community-im"));
    config.com_method = com_method_from_string(j.value("com_method", "louvain"));
    config.partition_path = j.value("partition_file", "");
    config.budgets = j.value("budgets", std::vector<int>{1});
    config.simulations = j.value("sims", 1000);
    config.master_seed = j.value("seed", std::uint64_t{0});
    config.merge_threshold = j.value("merge_threshold", 0.01);
    config.output_path = j.value("out", "");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config JSON: ") + e.what());
  }
  return config;
}

}  // namespace

ExperimentConfig config_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ConfigError("config is not valid JSON");
  return config_from_json_value(j);
}

std::vector<ExperimentConfig> config_list_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("config file is not valid JSON: " + path);
  if (!j.is_array()) throw ConfigError("config file must hold a JSON array of configs");
  std::vector<ExperimentConfig> configs;
  configs.reserve(j.size());
  for (const nlohmann::json& entry : j) configs.push_back(config_from_json_value(entry));
  return configs;
}

RunRecord run_experiment(const ExperimentConfig& config) {
  config.validate();
  if (!std::filesystem::exists(config.graph_path))
    throw ConfigError("graph file does not exist: " + config.graph_path);
  if (config.method == Method::kCommunityIm && com_method_needs_file(config) &&
      !std::filesystem::exists(config.partition_path))
    throw ConfigError("partition file does not exist: " + config.partition_path);
  RunRecord record;
  record.config = config;

  const DirectedGraph unweighted = load_edge_list_file(config.graph_path, config.directed);
  const DirectedGraph graph = assign_weights(
      unweighted,
      config.weights == WeightModel::kWeightedCascade ? EdgeWeightModel::weighted_cascade()
                                                      : EdgeWeightModel::trivalency(),
      rng::mix(config.master_seed, kWeightStream));

  const int k_max = config.budgets.back();
  if (k_max > graph.node_count())
    throw ConfigError("largest budget exceeds the node count of " + config.network_name());

  // Selection once at the largest budget; every smaller budget is a prefix of
  // the nested solution.
  const std::uint64_t selection_seed = rng::mix(config.master_seed, kSelectionStream);
  std::vector<NodeId> picks_in_order;        // trace-style methods
  std::vector<std::vector<NodeId>> by_budget;  // community-im: seeds per requested budget
  std::int64_t oracle_calls = 0;

  const auto selection_start = Clock::now();
  if (config.method == Method::kCommunityIm) {
    CommunityImOptions options;
    options.budget = k_max;
    options.com_method = config.com_method;
    options.sol_method = SolMethod::kLazyGreedy;
    options.merge_threshold = config.merge_threshold;
    options.detection_seed = rng::mix(config.master_seed, kDetectionStream);
    if (config.com_method == ComMethod::kExternalFile)
      options.external_partition = read_partition_file(config.partition_path, graph);
    options.oracle_factory =
        monte_carlo_oracle_factory(config.diffusion, config.simulations, selection_seed);
    const CommunityImResult result = community_im(graph, options);

    record.partition = stats_of(graph, result.merged);
    record.stage_times = result.times;
    record.under_budget = result.allocation.under_budget;
    oracle_calls = result.table.total_oracle_calls();

    // Replay the pick sequence to recover the allocation at every budget.
    std::vector<int> counts(result.table.communities.size(), 0);
    std::size_t next_pick = 0;
    for (int budget : config.budgets) {
      while (next_pick < result.allocation.pick_sequence.size() &&
             static_cast<int>(next_pick) < budget) {
        counts[result.allocation.pick_sequence[next_pick]] += 1;
        ++next_pick;
      }
      std::vector<NodeId> seeds;
      for (std::size_t i = 0; i < counts.size(); ++i) {
        const auto& order = result.table.communities[i].seeds_in_order;
        seeds.insert(seeds.end(), order.begin(), order.begin() + counts[i]);
      }
      std::sort(seeds.begin(), seeds.end());
      by_budget.push_back(std::move(seeds));
    }
  } else if (config.method == Method::kCelfPp || config.method == Method::kGreedyNaive) {
    const auto oracle = make_monte_carlo_oracle(graph, config.diffusion, config.simulations,
                                                selection_seed);
    const GreedyTrace trace = config.method == Method::kCelfPp
                                  ? lazy_greedy(graph, k_max, *oracle)
                                  : greedy_naive(graph, k_max, *oracle);
    picks_in_order = trace.seeds_in_order;
    oracle_calls = trace.oracle_calls;
  } else if (config.method == Method::kDegree) {
    picks_in_order = degree_topk(graph, k_max);
  } else {
    picks_in_order = degree_discount(graph, k_max);
  }
  record.selection_seconds = std::chrono::duration<double>(Clock::now() - selection_start).count();

  // Every method's seed sets are re-scored on the full graph with the same
  // estimator stream.
  const std::uint64_t evaluation_seed = rng::mix(config.master_seed, kEvaluationStream);
  for (std::size_t b = 0; b < config.budgets.size(); ++b) {
    const int budget = config.budgets[b];
    std::vector<NodeId> seeds;
    if (config.method == Method::kCommunityIm) {
      seeds = by_budget[b];
    } else {
      seeds.assign(picks_in_order.begin(),
                   picks_in_order.begin() + std::min<std::size_t>(budget, picks_in_order.size()));
      std::sort(seeds.begin(), seeds.end());
    }
    const InfluenceEstimate estimate = estimate_influence(
        graph, seeds, config.diffusion, config.simulations,
        rng::mix(evaluation_seed, rng::hash_node_set(seeds)));

    BudgetResult row;
    row.budget = budget;
    row.seed_labels.reserve(seeds.size());
    for (NodeId v : seeds) row.seed_labels.push_back(graph.original_label(v));
    std::sort(row.seed_labels.begin(), row.seed_labels.end());
    row.influence = estimate.mean;
    row.std_error = estimate.std_error;
    row.oracle_calls = oracle_calls;
    record.results.push_back(std::move(row));
  }
  return record;
}

void write_run_csv(std::ostream& out, const RunRecord& record) {
  out << "method,network,diffusion,weights,budget,seed_set,influence,std_error,oracle_calls\n";
  for (const BudgetResult& row : record.results) {
    out << to_string(record.config.method) << ',' << record.config.network_name() << ','
        << to_string(record.config.diffusion) << ',' << to_string(record.config.weights) << ','
        << row.budget << ',' << join_labels(row.seed_labels) << ',' << format_double(row.influence)
        << ',' << format_double(row.std_error) << ',' << row.oracle_calls << '\n';
  }
}

std::vector<BudgetResult> parse_run_csv(std::istream& in) {
  std::vector<BudgetResult> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != 9) throw std::runtime_error("run CSV: expected 9 fields per row");
    BudgetResult row;
    row.budget = std::stoi(fields[4]);
    row.seed_labels = parse_labels(fields[5]);
    row.influence = std::stod(fields[6]);
    row.std_error = std::stod(fields[7]);
    row.oracle_calls = std::stoll(fields[8]);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string run_record_sidecar_json(const RunRecord& record) {
  nlohmann::json j;
  j["config"] = nlohmann::json::parse(to_json(record.config));
  j["under_budget"] = record.under_budget;
  j["timings"] = {{"selection_seconds", record.selection_seconds},
                  {"detection_seconds", record.stage_times.detection_seconds},
                  {"candidates_seconds", record.stage_times.candidates_seconds},
                  {"budgeting_seconds", record.stage_times.budgeting_seconds}};
  if (record.partition) {
    j["partition"] = {{"communities", record.partition->communities},
                      {"modularity", record.partition->modularity_score},
                      {"sizes", record.partition->sizes}};
  }
  return j.dump(2);
}

std::vector<ComparisonRow> compare_methods(const std::vector<ExperimentConfig>& configs) {
  std::vector<ComparisonRow> rows;
  for (const ExperimentConfig& config : configs) {
    ComparisonRow base;
    base.method = to_string(config.method);
    base.network = config.network_name();
    base.diffusion = to_string(config.diffusion);
    base.weights = to_string(config.weights);
    try {
      const RunRecord record = run_experiment(config);
      for (const BudgetResult& result : record.results) {
        ComparisonRow row = base;
        row.budget = result.budget;
        row.influence = result.influence;
        row.std_error = result.std_error;
        row.runtime_seconds = std::round(record.selection_seconds * 1000.0) / 1000.0;
        row.oracle_calls = result.oracle_calls;
        rows.push_back(std::move(row));
      }
    } catch (const std::exception& e) {
      ComparisonRow row = base;
      row.status = sanitize_status(std::string("error: ") + e.what());
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows) {
  out << "method,network,diffusion,weights,budget,influence,std_error,runtime_s,oracle_calls,"
         "status\n";
  for (const ComparisonRow& row : rows) {
    out << row.method << ',' << row.network << ',' << row.diffusion << ',' << row.weights << ','
        << row.budget << ',' << format_double(row.influence) << ','
        << format_double(row.std_error) << ',' << format_fixed3(row.runtime_seconds) << ','
        << row.oracle_calls << ',' << row.status << '\n';
  }
}

std::vector<ComparisonRow> parse_comparison_csv(std::istream& in) {
  std::vector<ComparisonRow> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != 10) throw std::runtime_error("comparison CSV: expected 10 fields per row");
    ComparisonRow row;
    row.method = fields[0];
    row.network = fields[1];
    row.diffusion = fields[2];
    row.weights = fields[3];
    row.budget = std::stoi(fields[4]);
    row.influence = std::stod(fields[5]);
    row.std_error = std::stod(fields[6]);
    row.runtime_seconds = std::stod(fields[7]);
    row.oracle_calls = std::stoll(fields[8]);
    row.status = fields[9];
    rows.push_back(std::move(row));
  }
  return rows;
}

PartitionReport make_partition_report(const DirectedGraph& graph, ComMethod com_method,
                                      std::uint64_t seed, double merge_threshold,
                                      const std::optional<Partition>& external) {
  Partition detected;
  switch (com_method) {
    case ComMethod::kLouvain:
      detected = louvain(graph, seed);
      break;
    case ComMethod::kLabelPropagation:
      detected = label_propagation(graph, seed);
      break;
    case ComMethod::kGirvanNewman:
      detected = girvan_newman(graph).partition;
      break;
    case ComMethod::kExternalFile:
      if (!external) throw ConfigError("partition report: external partition not provided");
      detected = *external;
      break;
  }
  const Partition merged = merge_small(detected, merge_threshold);

  PartitionReport report;
  report.com_method = to_string(com_method);
  report.stats = stats_of(graph, merged);
  report.largest_community = report.stats.sizes.empty() ? 0 : report.stats.sizes.front();
  report.largest_fraction =
      static_cast<double>(report.largest_community) / static_cast<double>(graph.node_count());
  return report;
}

void write_partition_report(std::ostream& out, const PartitionReport& report) {
  out << "com-method: " << report.com_method << '\n'
      << "communities: " << report.stats.communities << '\n'
      << "modularity: " << format_double(report.stats.modularity_score) << '\n'
      << "largest-community: " << report.largest_community << " nodes ("
      << format_fixed3(report.largest_fraction) << " of the graph)\n";
  out << "sizes:";
  for (int size : report.stats.sizes) out << ' ' << size;
  out << '\n';
}

}  // namespace cim
