#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "cim/harness.hpp"
#include "test_support.hpp"

using namespace cim;

namespace {

namespace fs = std::filesystem;

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "cim_harness_tests";
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const std::string& name, const std::string& content) {
  const fs::path path = temp_dir() / name;
  std::ofstream out(path);
  out << content;
  return path;
}

// Directed star 0 -> 1..n-1; every leaf has in-degree 1 so weighted-cascade
// weights are all 1 and cascades from the center are certain.
fs::path star_file(int n) {
  std::ostringstream out;
  for (int v = 1; v < n; ++v) out << 0 << ' ' << v << '\n';
  return write_file("star.txt", out.str());
}

// Two disconnected directed cycles; in-degrees are all 1, so weighted-cascade
// weights are 1 and one seed activates its whole ring.
fs::path two_rings_file(int ring) {
  std::ostringstream out;
  for (int v = 0; v < ring; ++v) out << v << ' ' << (v + 1) % ring << '\n';
  for (int v = 0; v < ring; ++v) out << ring + v << ' ' << ring + (v + 1) % ring << '\n';
  return write_file("rings.txt", out.str());
}

// Four 12-cliques joined in a ring by single undirected bridges.
fs::path planted_cliques_file() {
  std::ostringstream out;
  const int cliques = 4, size = 12;
  for (int c = 0; c < cliques; ++c) {
    const int base = c * size;
    for (int u = 0; u < size; ++u)
      for (int v = u + 1; v < size; ++v) out << base + u << ' ' << base + v << '\n';
    out << base << ' ' << ((c + 1) % cliques) * size << '\n';
  }
  return write_file("planted.txt", out.str());
}

// Four directed hub-and-chain communities with a few bridges. Non-hub nodes
// keep in-degree 2, so weighted-cascade edges carry probability ~1/2: a hub
// ignites most of its community, and bridges let full-graph cascades spill
// into neighboring communities. Community subgraphs cap the cascade length,
// which is what makes the candidate stage cheaper there.
fs::path planted_hubs_file() {
  std::ostringstream out;
  const int communities = 4, size = 60;
  for (int c = 0; c < communities; ++c) {
    const int base = c * size;
    for (int i = 1; i < size; ++i) out << base << ' ' << base + i << '\n';        // hub star
    for (int i = 1; i + 1 < size; ++i) out << base + i << ' ' << base + i + 1 << '\n';
    for (int i = 1; i <= 3; ++i) out << base + i << ' ' << base << '\n';          // into the hub
    const int next = ((c + 1) % communities) * size;
    out << base + 10 << ' ' << next + 20 << '\n';
    out << base + 25 << ' ' << next + 35 << '\n';
    out << base + 40 << ' ' << next + 50 << '\n';
    out << base + 55 << ' ' << next + 5 << '\n';
  }
  return write_file("planted_hubs.txt", out.str());
}

ExperimentConfig base_config(const fs::path& graph) {
  ExperimentConfig config;
  config.graph_path = graph.string();
  config.simulations = 100;
  config.master_seed = 7;
  return config;
}

}  // namespace

TEST_CASE("config validation") {
  ExperimentConfig config = base_config(star_file(5));
  config.budgets = {1, 5, 3};
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config.budgets = {1, 1};
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config.budgets = {1, 3};
  config.diffusion = DiffusionModel::kLinearThreshold;
  config.weights = WeightModel::kTrivalency;
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config.weights = WeightModel::kWeightedCascade;
  config.validate();
}

TEST_CASE("config JSON round trip") {
  ExperimentConfig config = base_config(star_file(5));
  config.method = Method::kDegreeDiscount;
  config.diffusion = DiffusionModel::kLinearThreshold;
  config.budgets = {1, 2, 3};
  config.merge_threshold = 0.05;
  config.output_path = "results.csv";
  CHECK(config_from_json(to_json(config)) == config);
}

TEST_CASE("degree on a star with budget one reaches everyone") {
  ExperimentConfig config = base_config(star_file(8));
  config.method = Method::kDegree;
  config.budgets = {1};
  const RunRecord record = run_experiment(config);
  REQUIRE(record.results.size() == 1);
  CHECK(record.results[0].seed_labels == std::vector<std::int64_t>{0});
  CHECK(record.results[0].influence == 8.0);
  CHECK(record.results[0].std_error == 0.0);
  CHECK(record.results[0].oracle_calls == 0);
}

TEST_CASE("community-im covers both rings, the disjoint equality case") {
  const fs::path graph = two_rings_file(10);
  // Inject the exact two-ring partition through the external-file surface.
  std::ostringstream partition_text;
  for (int v = 0; v < 20; ++v) partition_text << v << ' ' << (v < 10 ? 0 : 1) << '\n';
  const fs::path partition = write_file("rings_partition.txt", partition_text.str());

  ExperimentConfig config = base_config(graph);
  config.method = Method::kCommunityIm;
  config.com_method = ComMethod::kExternalFile;
  config.partition_path = partition.string();
  config.budgets = {2};
  const RunRecord record = run_experiment(config);
  REQUIRE(record.results.size() == 1);
  CHECK(record.results[0].influence == 20.0);  // one seed per ring, certain cascades
  REQUIRE(record.partition.has_value());
  CHECK(record.partition->communities == 2);
}

TEST_CASE("repeated runs and different worker counts give identical records") {
  ExperimentConfig config = base_config(planted_cliques_file());
  config.directed = false;
  config.method = Method::kCommunityIm;
  config.budgets = {1, 3};
  config.simulations = 50;

  setenv("CIM_WORKERS", "1", 1);
  const RunRecord serial = run_experiment(config);
  setenv("CIM_WORKERS", "4", 1);
  const RunRecord parallel = run_experiment(config);
  unsetenv("CIM_WORKERS");
  CHECK(serial == parallel);

  std::ostringstream a, b;
  write_run_csv(a, serial);
  write_run_csv(b, parallel);
  CHECK(a.str() == b.str());  // byte-identical result tables
}

TEST_CASE("run CSV round trip") {
  ExperimentConfig config = base_config(star_file(6));
  config.method = Method::kDegreeDiscount;
  config.budgets = {1, 2};
  const RunRecord record = run_experiment(config);

  std::ostringstream out;
  write_run_csv(out, record);
  std::istringstream in(out.str());
  CHECK(parse_run_csv(in) == record.results);
}

TEST_CASE("comparison CSV round trip including error rows") {
  std::vector<ComparisonRow> rows(2);
  rows[0] = {"degree", "star", "ic", "wc", 3, 7.25, 0.125, 1.234, 42, "ok"};
  rows[1] = {"celfpp", "star", "ic", "wc", 0, 0.0, 0.0, 0.0, 0, "error: cannot open graph"};

  std::ostringstream out;
  write_comparison_csv(out, rows);
  std::istringstream in(out.str());
  CHECK(parse_comparison_csv(in) == rows);
}

TEST_CASE("compare runs every config and records failures") {
  ExperimentConfig good = base_config(star_file(6));
  good.method = Method::kDegree;
  good.budgets = {1, 2};
  ExperimentConfig bad = good;
  bad.graph_path = (temp_dir() / "missing.txt").string();

  const std::vector<ComparisonRow> rows = compare_methods({good, bad});
  REQUIRE(rows.size() == 3);  // two budget rows + one error row
  CHECK(rows[0].status == "ok");
  CHECK(rows[1].status == "ok");
  CHECK(rows[2].status.substr(0, 6) == "error:");

  CHECK(compare_methods({}).empty());
}

TEST_CASE("community-im spends fewer oracle calls than full-graph naive greedy") {
  ExperimentConfig community = base_config(planted_cliques_file());
  community.directed = false;
  community.method = Method::kCommunityIm;
  community.budgets = {5};
  community.simulations = 30;
  ExperimentConfig naive = community;
  naive.method = Method::kGreedyNaive;

  const RunRecord community_record = run_experiment(community);
  const RunRecord naive_record = run_experiment(naive);
  // 48 nodes, k = 5: naive spends 48+47+46+45+44; the partitioned run saves
  // c*k*(k-1)/2 evaluations and the lazy queue saves more on top.
  CHECK(naive_record.results[0].oracle_calls == 48 + 47 + 46 + 45 + 44);
  CHECK(community_record.results[0].oracle_calls < naive_record.results[0].oracle_calls);
}

TEST_CASE("candidate generation is faster than full-graph lazy greedy here") {
  ExperimentConfig community = base_config(planted_hubs_file());
  community.method = Method::kCommunityIm;
  community.budgets = {5};
  community.simulations = 400;
  ExperimentConfig lazy = community;
  lazy.method = Method::kCelfPp;

  const RunRecord community_record = run_experiment(community);
  const RunRecord lazy_record = run_experiment(lazy);
  REQUIRE(community_record.partition.has_value());
  CHECK(community_record.partition->communities >= 4);
  CHECK(community_record.partition->modularity_score >= 0.5);
  CHECK(community_record.stage_times.candidates_seconds < lazy_record.selection_seconds);
}

TEST_CASE("partition report on two cliques") {
  std::ostringstream out;
  for (int u = 0; u < 5; ++u)
    for (int v = u + 1; v < 5; ++v) out << u << ' ' << v << '\n';
  for (int u = 5; u < 10; ++u)
    for (int v = u + 1; v < 10; ++v) out << u << ' ' << v << '\n';
  const fs::path graph_path = write_file("cliques.txt", out.str());
  const DirectedGraph graph = load_edge_list_file(graph_path.string(), false);

  const PartitionReport report = make_partition_report(graph, ComMethod::kLouvain, 1, 0.01);
  CHECK(report.stats.communities == 2);
  CHECK(report.stats.modularity_score == 0.5);
  CHECK(report.largest_community == 5);
  CHECK(report.largest_fraction == doctest::Approx(0.5));

  // forcing a single community through the external surface gives Q = 0
  const Partition single = Partition::from_assignment(std::vector<int>(10, 0));
  const PartitionReport forced =
      make_partition_report(graph, ComMethod::kExternalFile, 0, 0.01, single);
  CHECK(forced.stats.modularity_score == 0.0);
}
