// Command-line front end: cluster, sweep-krp, bench, embed, eval.

#include "cesc/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

struct CliOptions {
  std::string input = "synth:two_moons";
  std::string kind = "auto";
  std::string graph = "knn";
  std::size_t k1 = 10;
  double epsilon = 0.0;
  std::string sigma = "median";
  std::size_t k = 0;
  std::size_t krp = 50;
  std::uint64_t seed = 0;
  double tol = 1e-6;
  std::string precond = "multigrid";
  std::size_t reps = 5;
  std::size_t max_iter = 100;
  std::string pipeline = "cesc";
  std::string variant = "njw";
  std::string reference = "none";
  unsigned threads = 0;
  std::string out;
  std::size_t n = 1000;
  std::optional<double> noise;
  std::uint64_t data_seed = 0;
  bool header = false;
  long label_column = -1;
  bool standardize = false;
};

void add_run_options(CLI::App* app, CliOptions& o) {
  app->add_option("--input", o.input, "Input path, or synth:<two_moons|blobs|text_mask>")->capture_default_str();
  app->add_option("--kind", o.kind, "Input kind: auto, csv, edgelist, synth")->capture_default_str();
  app->add_option("--graph", o.graph, "Similarity graph: knn, epsilon, full")->capture_default_str();
  app->add_option("--k1", o.k1, "Nearest neighbors for the knn graph")->capture_default_str();
  app->add_option("--epsilon", o.epsilon, "Radius for the epsilon graph");
  app->add_option("--sigma", o.sigma, "Gaussian bandwidth, or 'median'")->capture_default_str();
  app->add_option("--k", o.k, "Number of clusters (0 = from labels, else 2)")->capture_default_str();
  app->add_option("--krp", o.krp, "Random projection dimension k_RP")->capture_default_str();
  app->add_option("--seed", o.seed, "Random seed for projection and k-means")->capture_default_str();
  app->add_option("--tol", o.tol, "Laplacian solver relative residual")->capture_default_str();
  app->add_option("--precond", o.precond, "Solver preconditioner: multigrid or jacobi")->capture_default_str();
  app->add_option("--reps", o.reps, "k-means replications")->capture_default_str();
  app->add_option("--max-iter", o.max_iter, "k-means iteration limit")->capture_default_str();
  app->add_option("--pipeline", o.pipeline, "cesc or exact")->capture_default_str();
  app->add_option("--variant", o.variant, "Exact spectral variant: unnorm, shi_malik, njw")->capture_default_str();
  app->add_option("--reference", o.reference, "none or exact: also score against exact spectral clustering")
      ->capture_default_str();
  app->add_option("--threads", o.threads, "Worker threads (0 = all cores)")->capture_default_str();
  app->add_option("--out", o.out, "Output path");
  app->add_option("--n", o.n, "Synthetic point count")->capture_default_str();
  app->add_option("--noise", o.noise, "Synthetic noise level (default: per shape)");
  app->add_option("--data-seed", o.data_seed, "Synthetic data seed")->capture_default_str();
  app->add_flag("--header", o.header, "CSV has a header line");
  app->add_option("--label-column", o.label_column, "CSV column holding class labels (-1 = none)");
  app->add_flag("--standardize", o.standardize, "Standardize features to mean 0, sd 1");
}

cesc::RunConfig to_config(const CliOptions& o) {
  cesc::RunConfig cfg;
  cfg.input = o.input;
  cfg.kind = cesc::parse_input_kind(o.kind);
  cfg.synth_n = o.n;
  cfg.synth_noise = o.noise;
  cfg.data_seed = o.data_seed;
  cfg.has_header = o.header;
  if (o.label_column >= 0) cfg.label_column = static_cast<cesc::Index>(o.label_column);
  cfg.standardize = o.standardize;
  if (o.graph == "knn")
    cfg.graph = cesc::GraphMode::knn(o.k1);
  else if (o.graph == "epsilon")
    cfg.graph = cesc::GraphMode::epsilon_ball(o.epsilon);
  else if (o.graph == "full")
    cfg.graph = cesc::GraphMode::full();
  else
    throw cesc::Error("unknown graph mode '" + o.graph + "'");
  cfg.graph.k1 = o.k1;
  if (o.sigma == "median") {
    cfg.sigma = cesc::Bandwidth::median();
  } else {
    try {
      cfg.sigma = cesc::Bandwidth::fixed(std::stod(o.sigma));
    } catch (const std::logic_error&) {
      throw cesc::Error("--sigma must be a number or 'median'");
    }
  }
  cfg.k = o.k;
  cfg.k_rp = o.krp;
  cfg.seed = o.seed;
  cfg.tol = o.tol;
  cfg.preconditioner = cesc::parse_preconditioner(o.precond);
  cfg.reps = o.reps;
  cfg.max_iter = o.max_iter;
  cfg.pipeline = cesc::parse_pipeline_kind(o.pipeline);
  cfg.variant = cesc::parse_spectral_variant(o.variant);
  if (o.reference != "none" && o.reference != "exact") throw cesc::Error("--reference must be none or exact");
  cfg.reference_exact = o.reference == "exact";
  cfg.threads = o.threads;
  cfg.out = o.out;
  return cfg;
}

void write_or_print(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) {
    std::error_code ec;
    std::filesystem::remove(path, ec);
    throw cesc::Error("cannot write " + path);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral clustering through approximate commute-time embeddings"};
  app.require_subcommand(1);

  CliOptions cluster_opts;
  auto* cluster = app.add_subcommand("cluster", "Cluster an input and write labels plus a run report");
  add_run_options(cluster, cluster_opts);

  CliOptions sweep_opts;
  std::vector<std::size_t> krp_list{10, 25, 50, 100, 200};
  std::size_t sweep_repeats = 1;
  auto* sweep = app.add_subcommand("sweep-krp", "Accuracy and time as a function of k_RP (CSV)");
  add_run_options(sweep, sweep_opts);
  sweep->add_option("--krp-list", krp_list, "k_RP values")->delimiter(',')->capture_default_str();
  sweep->add_option("--repeats", sweep_repeats, "Seeds per row (medians are reported)")->capture_default_str();

  CliOptions bench_opts;
  std::vector<std::size_t> sizes{1000, 2000, 4000, 8000};
  std::size_t bench_repeats = 1;
  auto* bench = app.add_subcommand("bench", "Stage timings over synthetic sizes (CSV)");
  add_run_options(bench, bench_opts);
  bench->add_option("--sizes", sizes, "Point counts")->delimiter(',')->capture_default_str();
  bench->add_option("--repeats", bench_repeats, "Runs per size (minimum time is kept)")->capture_default_str();

  CliOptions embed_opts;
  auto* embed = app.add_subcommand("embed", "Write the commute-time embedding as CSV");
  add_run_options(embed, embed_opts);

  std::string pred_path;
  std::string ref_path;
  auto* eval = app.add_subcommand("eval", "Hungarian-matched accuracy between two label files");
  eval->add_option("pred", pred_path, "Predicted labels, one per line")->required();
  eval->add_option("ref", ref_path, "Reference labels, one per line")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (cluster->parsed()) {
      const cesc::RunConfig cfg = to_config(cluster_opts);
      const cesc::ClusterRun run = cesc::run_cluster(cfg);
      if (cfg.out.empty())
        std::cout << cesc::format_labels(run.labels);
      else
        cesc::write_cluster_outputs(run, cfg.out);
      std::cerr << cesc::format_report(run.report);
    } else if (sweep->parsed()) {
      const cesc::RunConfig cfg = to_config(sweep_opts);
      const auto rows = cesc::sweep_krp(cfg, krp_list, sweep_repeats);
      write_or_print(cfg.out, cesc::format_sweep_csv(rows));
    } else if (bench->parsed()) {
      const cesc::RunConfig cfg = to_config(bench_opts);
      const auto result = cesc::bench(cfg, sizes, bench_repeats);
      write_or_print(cfg.out, cesc::format_bench_csv(result));
      std::cerr << "embedding time exponent: " << result.embed_exponent << "\n";
      for (const auto& note : result.notes) std::cerr << "note: " << note << "\n";
    } else if (embed->parsed()) {
      const cesc::RunConfig cfg = to_config(embed_opts);
      const cesc::PreparedGraph prepared = cesc::prepare_graph(cfg);
      cesc::Embedding e;
      if (cfg.pipeline == cesc::PipelineKind::exact) {
        e = cesc::exact_commute_embedding(prepared.graph);
      } else {
        cesc::EmbeddingOptions opts;
        opts.k_rp = cfg.k_rp;
        opts.seed = cfg.seed;
        opts.solver.tol = cfg.tol;
        opts.solver.preconditioner = cfg.preconditioner;
        opts.threads = cfg.threads;
        e = cesc::build_embedding(prepared.graph, opts).embedding;
      }
      write_or_print(cfg.out, cesc::format_embedding_csv(e));
    } else if (eval->parsed()) {
      const auto pred = cesc::load_labels(pred_path);
      const auto ref = cesc::load_labels(ref_path);
      if (pred.size() != ref.size()) throw cesc::Error("label files differ in length");
      // Points dropped from the clustered component carry -1 and are skipped.
      std::vector<int> p, r;
      for (std::size_t i = 0; i < pred.size(); ++i) {
        if (pred[i] < 0) continue;
        p.push_back(pred[i]);
        r.push_back(ref[i]);
      }
      std::printf("%.6f\n", cesc::hungarian_accuracy(p, r));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
