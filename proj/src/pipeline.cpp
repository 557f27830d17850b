#include "cesc/pipeline.hpp"

#include "cesc/random.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace cesc {
namespace {

constexpr std::string_view kSynthPrefix = "synth:";

double median_of(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

nlohmann::ordered_json config_echo(const RunConfig& cfg, const PreparedGraph& prepared) {
  const auto& meta = prepared.graph.meta();
  nlohmann::ordered_json j;
  j["input"] = cfg.input;
  switch (cfg.resolved_kind()) {
    case InputKind::synth:
      j["kind"] = "synth";
      j["synth_n"] = cfg.synth_n;
      j["synth_noise"] = cfg.resolved_noise();
      j["data_seed"] = cfg.data_seed;
      break;
    case InputKind::csv:
      j["kind"] = "csv";
      j["has_header"] = cfg.has_header;
      j["label_column"] = cfg.label_column ? nlohmann::ordered_json(*cfg.label_column) : nlohmann::ordered_json(nullptr);
      j["standardize"] = cfg.standardize;
      break;
    default:
      j["kind"] = "edgelist";
      break;
  }
  j["graph"] = to_string(meta.kind);
  j["k1"] = meta.k1;
  j["epsilon"] = meta.epsilon;
  j["sigma"] = meta.sigma;
  j["sigma_mode"] = meta.kind == GraphKind::edge_list ? "none" : (meta.sigma_from_heuristic ? "median" : "fixed");
  j["k"] = prepared.k;
  j["k_rp"] = cfg.k_rp;
  j["seed"] = cfg.seed;
  j["tol"] = cfg.tol;
  j["preconditioner"] = to_string(cfg.preconditioner);
  j["reps"] = cfg.reps;
  j["max_iter"] = cfg.max_iter;
  j["pipeline"] = cfg.pipeline == PipelineKind::cesc ? "cesc" : "exact";
  j["variant"] = to_string(cfg.variant);
  j["reference"] = cfg.reference_exact ? "exact" : "none";
  j["threads"] = cfg.threads;
  return j;
}

KMeansConfig kmeans_config(const RunConfig& cfg, Index k) {
  KMeansConfig km;
  km.k = k;
  km.replications = cfg.reps;
  km.max_iter = cfg.max_iter;
  km.seed = derive_seed(cfg.seed, 0x6B6D65616E73ull);
  km.threads = cfg.threads;
  return km;
}

EmbeddingOptions embedding_options(const RunConfig& cfg) {
  EmbeddingOptions opts;
  opts.k_rp = cfg.k_rp;
  opts.seed = cfg.seed;
  opts.solver.tol = cfg.tol;
  opts.solver.preconditioner = cfg.preconditioner;
  opts.threads = cfg.threads;
  return opts;
}

std::vector<int> exact_reference(const RunConfig& cfg, const PreparedGraph& p) {
  return spectral_cluster_exact(p.graph, p.k, cfg.variant, kmeans_config(cfg, p.k)).labels;
}

ClusterRun cluster_prepared(const RunConfig& cfg, PreparedGraph prepared, StageClock& clock) {
  const Index k = prepared.k;
  if (k > prepared.graph.node_count())
    throw Error("k = " + std::to_string(k) + " exceeds the " + std::to_string(prepared.graph.node_count()) +
                " nodes of the graph");

  ClusterRun run;
  nlohmann::ordered_json diagnostics;
  DenseMatrix coords;
  if (cfg.pipeline == PipelineKind::cesc) {
    clock.begin("embedding");
    EmbeddingResult emb = build_embedding(prepared.graph, embedding_options(cfg));
    clock.end();
    diagnostics["solver_max_residual"] = emb.report.max_residual();
    diagnostics["solver_total_iterations"] = emb.report.total_iterations();
    coords = std::move(emb.embedding.coords);
  } else {
    clock.begin("eigen");
    coords = spectral_coordinates(prepared.graph, k, cfg.variant);
    clock.end();
  }
  clock.begin("kmeans");
  const ClusterAssignment assignment = kmeans_cluster(coords, kmeans_config(cfg, k));
  clock.end();
  diagnostics["kmeans_cost"] = assignment.cost;
  diagnostics["kmeans_iterations"] = assignment.iterations;
  diagnostics["kmeans_replication"] = assignment.replication_index;
  diagnostics["dropped_nodes"] = prepared.input_size - prepared.graph.node_count();

  run.node_labels = assignment.labels;
  std::optional<double> vs_exact;
  std::optional<double> vs_truth;
  if (cfg.reference_exact && cfg.pipeline == PipelineKind::cesc) {
    run.reference_labels = exact_reference(cfg, prepared);
    vs_exact = hungarian_accuracy(run.node_labels, *run.reference_labels);
  }
  if (prepared.truth) vs_truth = hungarian_accuracy(run.node_labels, *prepared.truth);

  run.labels.assign(prepared.input_size, -1);
  for (Index v = 0; v < prepared.new_to_old.size(); ++v) run.labels[prepared.new_to_old[v]] = run.node_labels[v];

  const RunSizes sizes{prepared.graph.node_count(), prepared.graph.edge_count(), prepared.feature_dim, k,
                       cfg.pipeline == PipelineKind::cesc ? cfg.k_rp : 0};
  run.report = assemble_report(clock.samples(), config_echo(cfg, prepared), sizes, vs_exact, vs_truth);
  run.report.diagnostics = std::move(diagnostics);
  run.prepared = std::move(prepared);
  return run;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out.flush()) throw Error("write failed for " + path.string());
}

}  // namespace

InputKind RunConfig::resolved_kind() const {
  if (kind != InputKind::automatic) return kind;
  if (std::string_view(input).starts_with(kSynthPrefix)) return InputKind::synth;
  if (std::filesystem::path(input).extension() == ".csv") return InputKind::csv;
  return InputKind::edgelist;
}

namespace {
ShapeKind synth_shape(const std::string& input) {
  std::string_view name = input;
  if (name.starts_with(kSynthPrefix)) name.remove_prefix(kSynthPrefix.size());
  return parse_shape_kind(name);
}
}  // namespace

double RunConfig::resolved_noise() const {
  if (synth_noise) return *synth_noise;
  return default_noise(synth_shape(input));
}

InputKind parse_input_kind(std::string_view s) {
  if (s == "auto") return InputKind::automatic;
  if (s == "csv") return InputKind::csv;
  if (s == "edgelist") return InputKind::edgelist;
  if (s == "synth") return InputKind::synth;
  throw Error("unknown input kind '" + std::string(s) + "'");
}

PipelineKind parse_pipeline_kind(std::string_view s) {
  if (s == "cesc") return PipelineKind::cesc;
  if (s == "exact") return PipelineKind::exact;
  throw Error("unknown pipeline '" + std::string(s) + "'");
}

PreparedGraph prepare_graph(const RunConfig& cfg) {
  PreparedGraph p;
  SimilarityGraph graph;
  std::optional<std::vector<int>> truth;
  Index default_k = 2;

  const InputKind kind = cfg.resolved_kind();
  if (kind == InputKind::edgelist) {
    const EdgeList edges = load_edge_list(cfg.input);
    graph = edge_graph(edges);
    p.external_ids = edges.external_ids;
  } else {
    FeatureMatrix fm;
    if (kind == InputKind::synth) {
      const ShapeKind shape = synth_shape(cfg.input);
      fm = synth_shapes(shape, cfg.synth_n, cfg.resolved_noise(), cfg.data_seed);
      default_k = shape_cluster_count(shape);
    } else {
      fm = load_features(cfg.input, cfg.has_header, cfg.label_column);
      if (fm.labels) default_k = std::set<int>(fm.labels->begin(), fm.labels->end()).size();
    }
    if (cfg.standardize) fm = standardize(fm);
    p.feature_dim = fm.cols();
    truth = fm.labels;
    graph = build_graph(fm, cfg.graph, cfg.sigma, cfg.threads);
  }

  p.input_size = graph.node_count();
  ComponentExtraction lcc = largest_component(graph);
  p.graph = std::move(lcc.graph);
  p.new_to_old = std::move(lcc.new_to_old);
  if (truth) {
    std::vector<int> kept;
    kept.reserve(p.new_to_old.size());
    for (const Index v : p.new_to_old) kept.push_back((*truth)[v]);
    p.truth = std::move(kept);
  }
  p.k = cfg.k ? cfg.k : default_k;
  return p;
}

ClusterRun run_cluster(const RunConfig& cfg) {
  StageClock clock;
  clock.begin("graph");
  PreparedGraph prepared = prepare_graph(cfg);
  clock.end();
  return cluster_prepared(cfg, std::move(prepared), clock);
}

ClusterRun run_cluster(const RunConfig& cfg, PreparedGraph prepared) {
  StageClock clock;
  return cluster_prepared(cfg, std::move(prepared), clock);
}

std::string format_labels(std::span<const int> labels) {
  std::string out;
  out.reserve(labels.size() * 3);
  for (const int l : labels) {
    out += std::to_string(l);
    out += '\n';
  }
  return out;
}

std::vector<int> parse_labels(std::string_view text) {
  std::vector<int> labels;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    int value = 0;
    const char* begin = line.data() + first;
    const char* end = line.data() + last + 1;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) throw ParseError("label is not an integer", line_no);
    labels.push_back(value);
  }
  return labels;
}

std::vector<int> load_labels(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_labels(ss.str());
}

void write_cluster_outputs(const ClusterRun& run, const std::filesystem::path& out) {
  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::filesystem::path& path, const std::string& text) {
    written.push_back(path);
    write_text(path, text);
  };
  try {
    emit(out, format_labels(run.labels));
    emit(std::filesystem::path(out.string() + ".report.json"), to_json(run.report).dump(2) + "\n");
    if (!run.prepared.external_ids.empty()) {
      std::string ids;
      for (const auto id : run.prepared.external_ids) ids += std::to_string(id) + "\n";
      emit(std::filesystem::path(out.string() + ".ids"), ids);
    }
  } catch (...) {
    std::error_code ec;
    for (const auto& p : written) std::filesystem::remove(p, ec);
    throw;
  }
}

std::vector<SweepRow> sweep_krp(const RunConfig& cfg, std::span<const Index> krp_list, Index repeats) {
  if (repeats == 0) throw Error("sweep_krp: repeats must be >= 1");
  const PreparedGraph prepared = prepare_graph(cfg);
  const std::vector<int> reference = exact_reference(cfg, prepared);

  std::vector<SweepRow> rows;
  for (const Index k_rp : krp_list) {
    SweepRow row;
    row.k_rp = k_rp;
    try {
      std::vector<double> acc, acc_truth, embed_t, total_t;
      for (Index r = 0; r < repeats; ++r) {
        RunConfig run_cfg = cfg;
        run_cfg.k_rp = k_rp;
        run_cfg.seed = cfg.seed + r;
        run_cfg.pipeline = PipelineKind::cesc;
        StageClock clock;
        clock.begin("embedding");
        const EmbeddingResult emb = build_embedding(prepared.graph, embedding_options(run_cfg));
        clock.end();
        clock.begin("kmeans");
        const auto labels = kmeans_cluster(emb.embedding.coords, kmeans_config(run_cfg, prepared.k)).labels;
        clock.end();
        acc.push_back(hungarian_accuracy(labels, reference));
        if (prepared.truth) acc_truth.push_back(hungarian_accuracy(labels, *prepared.truth));
        embed_t.push_back(clock.samples()[0].end - clock.samples()[0].start);
        total_t.push_back(clock.samples()[1].end - clock.samples()[0].start);
      }
      row.accuracy = median_of(acc);
      if (!acc_truth.empty()) row.accuracy_truth = median_of(acc_truth);
      row.embed_seconds = median_of(embed_t);
      row.total_seconds = median_of(total_t);
    } catch (const std::exception& e) {
      row.accuracy = std::nan("");
      row.status = std::string("error: ") + e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_sweep_csv(std::span<const SweepRow> rows) {
  std::ostringstream out;
  out.precision(17);
  out << "k_rp,accuracy,accuracy_truth,embed_seconds,total_seconds,status\n";
  for (const auto& r : rows) {
    std::string status = r.status;
    std::replace(status.begin(), status.end(), ',', ';');
    std::replace(status.begin(), status.end(), '\n', ' ');
    out << r.k_rp << ',' << r.accuracy << ',';
    if (r.accuracy_truth) out << *r.accuracy_truth;
    out << ',' << r.embed_seconds << ',' << r.total_seconds << ',' << status << '\n';
  }
  return out.str();
}

double log_log_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw Error("log_log_slope: need at least two paired samples");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw Error("log_log_slope: samples must be positive");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw Error("log_log_slope: x values must differ");
  return sxy / sxx;
}

BenchResult bench(const RunConfig& cfg, std::span<const Index> sizes, Index repeats) {
  if (cfg.resolved_kind() != InputKind::synth) throw Error("bench: input must be a synthetic kind (synth:<kind>)");
  if (repeats == 0) throw Error("bench: repeats must be >= 1");
  BenchResult result;
  for (const Index n : sizes) {
    RunConfig run_cfg = cfg;
    run_cfg.synth_n = n;
    run_cfg.pipeline = PipelineKind::cesc;
    run_cfg.reference_exact = false;
    BenchRow row;
    row.n = n;
    for (Index r = 0; r < repeats; ++r) {
      const ClusterRun run = run_cluster(run_cfg);
      const double g = run.report.stage("graph")->seconds;
      const double e = run.report.stage("embedding")->seconds;
      const double k = run.report.stage("kmeans")->seconds;
      if (r == 0 || e < row.embed_seconds) row.embed_seconds = e;
      if (r == 0 || g < row.graph_seconds) row.graph_seconds = g;
      if (r == 0 || k < row.kmeans_seconds) row.kmeans_seconds = k;
      row.m = run.report.sizes.m;
    }
    row.total_seconds = row.graph_seconds + row.embed_seconds + row.kmeans_seconds;
    result.rows.push_back(row);
  }

  if (result.rows.size() >= 2) {
    std::vector<double> xs, ys;
    for (const auto& r : result.rows) {
      xs.push_back(static_cast<double>(r.n));
      ys.push_back(r.embed_seconds);
    }
    result.embed_exponent = log_log_slope(xs, ys);
  }
  for (std::size_t i = 1; i < result.rows.size(); ++i)
    if (result.rows[i].total_seconds < result.rows[i - 1].total_seconds)
      result.notes.push_back("total time decreased from n = " + std::to_string(result.rows[i - 1].n) + " to n = " +
                             std::to_string(result.rows[i].n));
  if (!result.rows.empty()) {
    const auto& last = result.rows.back();
    const bool graph_largest = last.graph_seconds >= last.embed_seconds && last.graph_seconds >= last.kmeans_seconds;
    result.notes.push_back(std::string("graph stage ") + (graph_largest ? "is" : "is not") +
                           " the largest share at n = " + std::to_string(last.n));
  }
  return result;
}

std::string format_bench_csv(const BenchResult& result) {
  std::ostringstream out;
  out.precision(17);
  out << "n,m,graph_seconds,embed_seconds,kmeans_seconds,total_seconds\n";
  for (const auto& r : result.rows)
    out << r.n << ',' << r.m << ',' << r.graph_seconds << ',' << r.embed_seconds << ',' << r.kmeans_seconds << ','
        << r.total_seconds << '\n';
  return out.str();
}

}  // namespace cesc
