#include "cesc/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <limits>
#include <map>

namespace cesc {

std::vector<Index> max_weight_assignment(const Eigen::MatrixXd& weights) {
  const auto n = static_cast<Index>(weights.rows());
  if (weights.cols() != weights.rows()) throw Error("max_weight_assignment: matrix must be square");
  if (n == 0) return {};
  const double top = weights.maxCoeff();
  auto cost = [&](Index i, Index j) {
    return top - weights(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(j - 1));
  };

  // Shortest augmenting path with potentials; rows/cols are 1-based and
  // column 0 is a virtual source.
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<Index> match(n + 1, 0), way(n + 1, 0);
  for (Index i = 1; i <= n; ++i) {
    match[0] = i;
    Index j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const Index i0 = match[j0];
      double delta = inf;
      Index j1 = 0;
      for (Index j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (Index j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const Index j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<Index> assignment(n);
  for (Index j = 1; j <= n; ++j) assignment[match[j] - 1] = j - 1;
  return assignment;
}

double hungarian_accuracy(std::span<const int> predicted, std::span<const int> reference) {
  if (predicted.size() != reference.size()) throw Error("hungarian_accuracy: label vectors differ in length");
  if (predicted.empty()) throw Error("hungarian_accuracy: empty labelings");

  std::map<int, Index> pred_ids;
  std::map<int, Index> ref_ids;
  for (const int p : predicted) pred_ids.try_emplace(p, pred_ids.size());
  for (const int r : reference) ref_ids.try_emplace(r, ref_ids.size());

  // Confusion matrix padded to square with zeros.
  const Index size = std::max(pred_ids.size(), ref_ids.size());
  Eigen::MatrixXd confusion = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(size));
  for (std::size_t i = 0; i < predicted.size(); ++i)
    confusion(static_cast<Eigen::Index>(pred_ids[predicted[i]]), static_cast<Eigen::Index>(ref_ids[reference[i]])) += 1.0;

  const auto assignment = max_weight_assignment(confusion);
  double matched = 0.0;
  for (Index r = 0; r < size; ++r)
    matched += confusion(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(assignment[r]));
  return matched / static_cast<double>(predicted.size());
}

const StageTiming* RunReport::stage(std::string_view name) const {
  for (const auto& s : stages)
    if (s.name == name) return &s;
  return nullptr;
}

RunReport assemble_report(std::span<const StageSample> stages, nlohmann::ordered_json params, RunSizes sizes,
                          std::optional<double> accuracy_vs_exact, std::optional<double> accuracy_vs_truth) {
  for (std::size_t i = 0; i < stages.size(); ++i) {
    if (!(stages[i].end >= stages[i].start) || (i > 0 && stages[i].start < stages[i - 1].end))
      throw Error("assemble_report: stage timestamps are not monotone");
  }
  for (const auto acc : {accuracy_vs_exact, accuracy_vs_truth})
    if (acc && !(*acc >= 0.0 && *acc <= 1.0)) throw Error("assemble_report: accuracy outside [0, 1]");

  RunReport r;
  r.params = std::move(params);
  r.sizes = sizes;
  r.accuracy_vs_exact = accuracy_vs_exact;
  r.accuracy_vs_truth = accuracy_vs_truth;
  double sum = 0.0;
  for (const auto& s : stages) {
    r.stages.push_back({s.name, s.end - s.start, 0.0});
    sum += s.end - s.start;
  }
  if (sum > 0.0)
    for (auto& s : r.stages) s.share = 100.0 * s.seconds / sum;
  r.total_seconds = stages.empty() ? 0.0 : stages.back().end - stages.front().start;
  return r;
}

nlohmann::ordered_json to_json(const RunReport& r) {
  using json = nlohmann::ordered_json;
  json stages = json::array();
  for (const auto& s : r.stages) stages.push_back({{"name", s.name}, {"seconds", s.seconds}, {"share", s.share}});
  auto optional = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  return {
      {"params", r.params},
      {"sizes", {{"n", r.sizes.n}, {"m", r.sizes.m}, {"d", r.sizes.d}, {"k", r.sizes.k}, {"k_rp", r.sizes.k_rp}}},
      {"timings", {{"stages", stages}, {"total", r.total_seconds}}},
      {"accuracy", {{"vs_exact", optional(r.accuracy_vs_exact)}, {"vs_truth", optional(r.accuracy_vs_truth)}}},
      {"diagnostics", r.diagnostics},
  };
}

RunReport report_from_json(const nlohmann::ordered_json& j) {
  RunReport r;
  try {
    r.params = j.at("params");
    const auto& sizes = j.at("sizes");
    r.sizes = {sizes.at("n").get<Index>(), sizes.at("m").get<Index>(), sizes.at("d").get<Index>(),
               sizes.at("k").get<Index>(), sizes.at("k_rp").get<Index>()};
    for (const auto& s : j.at("timings").at("stages"))
      r.stages.push_back({s.at("name").get<std::string>(), s.at("seconds").get<double>(), s.at("share").get<double>()});
    r.total_seconds = j.at("timings").at("total").get<double>();
    const auto& acc = j.at("accuracy");
    if (!acc.at("vs_exact").is_null()) r.accuracy_vs_exact = acc.at("vs_exact").get<double>();
    if (!acc.at("vs_truth").is_null()) r.accuracy_vs_truth = acc.at("vs_truth").get<double>();
    r.diagnostics = j.value("diagnostics", nlohmann::ordered_json::object());
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed run report: ") + e.what());
  }
  return r;
}

std::string format_report(const RunReport& r) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "n = %zu, m = %zu, d = %zu, k = %zu, k_RP = %zu\n", r.sizes.n, r.sizes.m, r.sizes.d,
                r.sizes.k, r.sizes.k_rp);
  out += line;
  out += "stage                 seconds    share\n";
  for (const auto& s : r.stages) {
    std::snprintf(line, sizeof line, "%-20s %9.3f %7.1f%%\n", s.name.c_str(), s.seconds, s.share);
    out += line;
  }
  std::snprintf(line, sizeof line, "%-20s %9.3f\n", "total", r.total_seconds);
  out += line;
  if (r.accuracy_vs_exact) {
    std::snprintf(line, sizeof line, "accuracy vs exact spectral clustering: %.4f\n", *r.accuracy_vs_exact);
    out += line;
  }
  if (r.accuracy_vs_truth) {
    std::snprintf(line, sizeof line, "accuracy vs reference labels: %.4f\n", *r.accuracy_vs_truth);
    out += line;
  }
  return out;
}

namespace {
std::int64_t monotonic_ns() {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}
}  // namespace

StageClock::StageClock() : origin_ns_(monotonic_ns()) {}

double StageClock::now() const { return static_cast<double>(monotonic_ns() - origin_ns_) * 1e-9; }

void StageClock::begin(std::string name) { samples_.push_back({std::move(name), now(), now()}); }

void StageClock::end() {
  if (samples_.empty()) throw Error("StageClock::end without begin");
  samples_.back().end = now();
}

}  // namespace cesc
