#pragma once

#include "cesc/common.hpp"

#include <json.hpp>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cesc {

/// Maximum-weight perfect matching on a square matrix (Hungarian method,
/// O(n^3)). Returns assignment[row] = column.
std::vector<Index> max_weight_assignment(const Eigen::MatrixXd& weights);

/// Fraction of points whose predicted cluster maps to their reference
/// class under the best one-to-one cluster-to-class map. Label values are
/// arbitrary integers; the two sides may use different cluster counts.
double hungarian_accuracy(std::span<const int> predicted, std::span<const int> reference);

/// One timed stage, in seconds on a monotonic clock.
struct StageSample {
  std::string name;
  double start = 0.0;
  double end = 0.0;
};

struct RunSizes {
  Index n = 0;
  Index m = 0;
  Index d = 0;
  Index k = 0;
  Index k_rp = 0;
};

struct StageTiming {
  std::string name;
  double seconds = 0.0;
  /// Percentage of the summed stage time.
  double share = 0.0;
};

/// Everything about one run: echo of the resolved configuration, per-stage
/// timings with their share of the stage total, sizes and accuracies.
struct RunReport {
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  std::vector<StageTiming> stages;
  double total_seconds = 0.0;
  RunSizes sizes;
  /// Against the exact spectral clustering labels (the benchmark).
  std::optional<double> accuracy_vs_exact;
  /// Against ground-truth labels from the input.
  std::optional<double> accuracy_vs_truth;
  /// Solver and k-means diagnostics (free-form).
  nlohmann::ordered_json diagnostics = nlohmann::ordered_json::object();

  const StageTiming* stage(std::string_view name) const;
};

/// Builds a report from stage samples. Samples must be ordered and
/// non-overlapping (each start >= previous end, each end >= its start).
RunReport assemble_report(std::span<const StageSample> stages, nlohmann::ordered_json params, RunSizes sizes,
                          std::optional<double> accuracy_vs_exact = std::nullopt,
                          std::optional<double> accuracy_vs_truth = std::nullopt);

nlohmann::ordered_json to_json(const RunReport& r);
RunReport report_from_json(const nlohmann::ordered_json& j);

/// Human-readable table in the style of a per-stage time breakdown.
std::string format_report(const RunReport& r);

/// Wall-clock stopwatch producing StageSample values.
class StageClock {
 public:
  StageClock();
  /// Seconds since construction.
  double now() const;
  void begin(std::string name);
  void end();
  const std::vector<StageSample>& samples() const noexcept { return samples_; }

 private:
  std::int64_t origin_ns_;
  std::vector<StageSample> samples_;
};

}  // namespace cesc
