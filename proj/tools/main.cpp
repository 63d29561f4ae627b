#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cim/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntimeError = 1;
constexpr int kExitConfigError = 2;

int do_run(const cim::ExperimentConfig& config) {
  const cim::RunRecord record = cim::run_experiment(config);

  if (config.output_path.empty()) {
    cim::write_run_csv(std::cout, record);
  } else {
    std::ofstream out(config.output_path);
    if (!out) throw cim::ConfigError("cannot write output file: " + config.output_path);
    cim::write_run_csv(out, record);
    std::ofstream sidecar(config.output_path + ".meta.json");
    if (!sidecar) throw cim::ConfigError("cannot write sidecar next to: " + config.output_path);
    sidecar << cim::run_record_sidecar_json(record) << '\n';
    std::cout << "wrote " << record.results.size() << " rows to " << config.output_path << '\n';
  }
  if (record.under_budget) {
    std::cerr << "warning: fewer candidate seeds than budget units; allocation is under budget\n";
  }
  return kExitOk;
}

int do_partition_report(const std::string& graph_path, bool undirected,
                        const std::string& com_method_name, const std::string& partition_path,
                        std::uint64_t seed, double merge_threshold) {
  const cim::ComMethod com_method = cim::com_method_from_string(com_method_name);
  const cim::DirectedGraph graph = cim::load_edge_list_file(graph_path, !undirected);
  std::optional<cim::Partition> external;
  if (com_method == cim::ComMethod::kExternalFile) {
    if (partition_path.empty())
      throw cim::ConfigError("com-method external-file requires --partition-file");
    external = cim::read_partition_file(partition_path, graph);
  }
  const cim::PartitionReport report =
      cim::make_partition_report(graph, com_method, seed, merge_threshold, external);
  cim::write_partition_report(std::cout, report);
  return kExitOk;
}

int do_compare(const std::string& config_path, const std::string& out_path) {
  const std::vector<cim::ExperimentConfig> configs =
      cim::config_list_from_json_file(config_path);
  const std::vector<cim::ComparisonRow> rows = cim::compare_methods(configs);
  if (out_path.empty()) {
    cim::write_comparison_csv(std::cout, rows);
  } else {
    std::ofstream out(out_path);
    if (!out) throw cim::ConfigError("cannot write output file: " + out_path);
    cim::write_comparison_csv(out, rows);
    std::cout << "wrote " << rows.size() << " rows to " << out_path << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Community-aware influence maximization benchmark"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Run one method over a budget list");
  cim::ExperimentConfig config;
  std::string diffusion = "ic", weights = "wc", method = "community-im", com_method = "louvain";
  bool undirected = false;
  run->add_option("--graph", config.graph_path, "Edge list file")->required();
  run->add_flag("--undirected", undirected, "Treat input edges as undirected");
  run->add_option("--diffusion", diffusion, "Diffusion model: ic | lt");
  run->add_option("--weights", weights, "Edge-weight model: wc | tv");
  run->add_option("--method", method,
                  "community-im | celfpp | greedy-naive | degree | degree-discount");
  run->add_option("--com-method", com_method,
                  "louvain | label-propagation | girvan-newman | external-file");
  run->add_option("--partition-file", config.partition_path,
                  "Partition file for --com-method external-file");
  run->add_option("--budgets", config.budgets, "Strictly increasing budget list, e.g. 1,5,10")
      ->delimiter(',');
  run->add_option("--sims", config.simulations, "Monte Carlo simulations per estimate");
  run->add_option("--seed", config.master_seed, "Master random seed");
  run->add_option("--merge-threshold", config.merge_threshold,
                  "Communities below this node fraction are merged");
  run->add_option("--out", config.output_path, "Output CSV path (stdout when omitted)");

  // partition-report
  auto* report = app.add_subcommand("partition-report", "Detect communities and report stats");
  std::string report_graph, report_com = "louvain", report_partition;
  bool report_undirected = false;
  std::uint64_t report_seed = 0;
  double report_threshold = 0.01;
  report->add_option("--graph", report_graph, "Edge list file")->required();
  report->add_flag("--undirected", report_undirected, "Treat input edges as undirected");
  report->add_option("--com-method", report_com,
                     "louvain | label-propagation | girvan-newman | external-file");
  report->add_option("--partition-file", report_partition,
                     "Partition file for --com-method external-file");
  report->add_option("--seed", report_seed, "Detection random seed");
  report->add_option("--merge-threshold", report_threshold,
                     "Communities below this node fraction are merged");

  // compare
  auto* compare = app.add_subcommand("compare", "Run a list of configs and emit one CSV");
  std::string compare_config, compare_out;
  compare->add_option("--config", compare_config, "JSON array of run configs")->required();
  compare->add_option("--out", compare_out, "Output CSV path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (run->parsed()) {
      config.directed = !undirected;
      config.diffusion = cim::diffusion_from_string(diffusion);
      config.weights = cim::weights_from_string(weights);
      config.method = cim::method_from_string(method);
      config.com_method = cim::com_method_from_string(com_method);
      config.validate();
      return do_run(config);
    }
    if (report->parsed()) {
      return do_partition_report(report_graph, report_undirected, report_com, report_partition,
                                 report_seed, report_threshold);
    }
    return do_compare(compare_config, compare_out);
  } catch (const cim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntimeError;
  }
}
