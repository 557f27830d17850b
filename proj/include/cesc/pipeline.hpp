#pragma once

#include "cesc/ctembed.hpp"
#include "cesc/dataset.hpp"
#include "cesc/eval.hpp"
#include "cesc/exactspec.hpp"
#include "cesc/kmeans.hpp"
#include "cesc/simgraph.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace cesc {

enum class InputKind { automatic, csv, edgelist, synth };
enum class PipelineKind { cesc, exact };

/// Resolved settings for one run. Defaults: k1 = 10, k_RP = 50,
/// 5 k-means replications of at most 100 iterations.
struct RunConfig {
  std::string input = "synth:two_moons";
  InputKind kind = InputKind::automatic;
  // Synthetic inputs.
  Index synth_n = 1000;
  /// Unset: the generator's default_noise.
  std::optional<double> synth_noise;
  std::uint64_t data_seed = 0;
  // CSV inputs.
  bool has_header = false;
  std::optional<Index> label_column;
  bool standardize = false;

  GraphMode graph = GraphMode::knn(10);
  Bandwidth sigma = Bandwidth::median();
  /// 0 = from the input labels when present, otherwise 2.
  Index k = 0;
  Index k_rp = 50;
  std::uint64_t seed = 0;
  double tol = 1e-6;
  Preconditioner preconditioner = Preconditioner::multigrid;
  Index reps = 5;
  Index max_iter = 100;
  PipelineKind pipeline = PipelineKind::cesc;
  SpectralVariant variant = SpectralVariant::njw;
  /// Also run exact spectral clustering and report accuracy against it.
  bool reference_exact = false;
  unsigned threads = 0;
  std::string out;

  InputKind resolved_kind() const;
  /// synth_noise, or the default for the synthetic shape named by `input`.
  double resolved_noise() const;
};

InputKind parse_input_kind(std::string_view s);
PipelineKind parse_pipeline_kind(std::string_view s);

/// Input after ingestion and graph construction, restricted to the largest
/// connected component.
struct PreparedGraph {
  SimilarityGraph graph;
  /// Points/nodes in the input, before component extraction.
  Index input_size = 0;
  Index feature_dim = 0;
  /// new_to_old[v] = input row (or dense edge-list id) of graph node v.
  std::vector<Index> new_to_old;
  /// Ground-truth labels restricted to the kept nodes, when available.
  std::optional<std::vector<int>> truth;
  /// External ids of edge-list inputs (indexed by dense input id).
  std::vector<std::uint64_t> external_ids;
  Index k = 2;
};

/// Ingests `cfg.input` and builds the graph; timed as the "graph" stage.
PreparedGraph prepare_graph(const RunConfig& cfg);

struct ClusterRun {
  /// One label per input point; -1 for points outside the kept component.
  std::vector<int> labels;
  /// Labels per graph node (kept component only).
  std::vector<int> node_labels;
  std::optional<std::vector<int>> reference_labels;
  RunReport report;
  PreparedGraph prepared;
};

/// ingest -> graph -> embed (or eigen) -> k-means -> evaluate.
ClusterRun run_cluster(const RunConfig& cfg);

/// Same, starting from an already prepared graph.
ClusterRun run_cluster(const RunConfig& cfg, PreparedGraph prepared);

/// Writes `<out>` (labels), `<out>.report.json` and, for edge lists,
/// `<out>.ids`. On failure every file already written is removed.
void write_cluster_outputs(const ClusterRun& run, const std::filesystem::path& out);

std::string format_labels(std::span<const int> labels);
std::vector<int> parse_labels(std::string_view text);
std::vector<int> load_labels(const std::filesystem::path& path);

struct SweepRow {
  Index k_rp = 0;
  double accuracy = 0.0;  // median over repeats, vs exact spectral clustering
  std::optional<double> accuracy_truth;
  double embed_seconds = 0.0;
  double total_seconds = 0.0;
  std::string status = "ok";
};

/// Accuracy and time per k_RP. Every row uses seeds cfg.seed .. cfg.seed +
/// repeats - 1, so rows are paired.
std::vector<SweepRow> sweep_krp(const RunConfig& cfg, std::span<const Index> krp_list, Index repeats = 1);
std::string format_sweep_csv(std::span<const SweepRow> rows);

struct BenchRow {
  Index n = 0;
  Index m = 0;
  double graph_seconds = 0.0;
  double embed_seconds = 0.0;
  double kmeans_seconds = 0.0;
  double total_seconds = 0.0;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  /// Least-squares slope of log(embed time) against log(n).
  double embed_exponent = 0.0;
  /// Soft expectations, reported but not enforced.
  std::vector<std::string> notes;
};

/// Scaling benchmark over synthetic sizes; each timing is the minimum over
/// `repeats` runs.
BenchResult bench(const RunConfig& cfg, std::span<const Index> sizes, Index repeats = 1);
std::string format_bench_csv(const BenchResult& result);

/// Least-squares slope of log(y) on log(x).
double log_log_slope(std::span<const double> x, std::span<const double> y);

}  // namespace cesc
