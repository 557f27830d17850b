#include "cesc/ctembed.hpp"
#include "cesc/embedding.hpp"

#include "support.hpp"

#include <doctest.h>

#include <filesystem>
#include <sstream>

using namespace cesc;

TEST_CASE("projection matrix") {
  const ProjectionMatrix q = sample_projection(50, 300, 9);
  CHECK(q.magnitude() == doctest::Approx(0.141421).epsilon(1e-6));
  for (Index r = 0; r < 50; ++r)
    for (Index c = 0; c < 300; ++c) CHECK_UNARY(std::abs(q(r, c)) == q.magnitude());

  const ProjectionMatrix again = sample_projection(50, 300, 9);
  bool same = true;
  for (Index r = 0; r < 50; ++r)
    for (Index c = 0; c < 300; ++c) same = same && q.sign(r, c) == again.sign(r, c);
  CHECK(same);

  // Entries depend on (seed, r, c) only.
  const ProjectionMatrix wider = sample_projection(60, 400, 9);
  for (Index r = 0; r < 50; r += 7)
    for (Index c = 0; c < 300; c += 11) CHECK(wider.sign(r, c) == q.sign(r, c));

  CHECK_THROWS_AS(sample_projection(0, 3, 0), Error);
}

TEST_CASE("projection entries are balanced") {
  const Index k = 50, m = 20000;
  const ProjectionMatrix q = sample_projection(k, m, 2);
  double sum = 0.0;
  for (Index r = 0; r < k; ++r)
    for (Index c = 0; c < m; ++c) sum += q(r, c);
  const double mean = sum / static_cast<double>(k * m);
  CHECK(std::abs(mean) <= 4.0 / std::sqrt(1e6 * static_cast<double>(k)));
}

TEST_CASE("laplacian_solve small cases") {
  const SparseMatrix l = laplacian(testing::single_edge());
  for (const auto pc : {Preconditioner::jacobi, Preconditioner::multigrid}) {
    SolverOptions opts;
    opts.preconditioner = pc;
    CHECK(laplacian_solve(l, Vector::Zero(2), opts).z == Vector::Zero(2));
    const auto sol = laplacian_solve(l, Eigen::Vector2d(1.0, -1.0), opts);
    CHECK(sol.z[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(sol.z[1] == doctest::Approx(-0.5).epsilon(1e-12));
  }
}

TEST_CASE("laplacian_solve matches the dense pseudoinverse") {
  for (const auto pc : {Preconditioner::jacobi, Preconditioner::multigrid}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const SimilarityGraph g = testing::random_connected_graph(50, 60, seed);
      const Eigen::MatrixXd pinv = testing::pinv_oracle(testing::dense_laplacian(g));
      Rng rng(seed + 100);
      Vector y(50);
      for (auto& v : y) v = rng.normal();
      y.array() -= y.mean();
      SolverOptions opts;
      opts.tol = 1e-8;
      opts.preconditioner = pc;
      const auto sol = laplacian_solve(laplacian(g), y, opts);
      const Vector want = pinv * y;
      CHECK((sol.z - want).norm() <= 1e-6 * want.norm());
      CHECK(sol.residual <= 1e-8);
      CHECK(std::abs(sol.z.sum()) < 1e-10 * sol.z.norm());
    }
  }
}

TEST_CASE("laplacian_solve errors") {
  const SimilarityGraph g = testing::random_connected_graph(40, 40, 3);
  const SparseMatrix l = laplacian(g);
  CHECK_THROWS_AS(laplacian_solve(l, Vector::Ones(40)), Error);
  CHECK_THROWS_AS(laplacian_solve(l, Vector::Zero(3)), Error);

  Rng rng(4);
  Vector y(40);
  for (auto& v : y) v = rng.normal();
  y.array() -= y.mean();
  SolverOptions opts;
  opts.tol = 1e-12;
  opts.max_iter = 2;
  opts.preconditioner = Preconditioner::jacobi;
  try {
    laplacian_solve(l, y, opts);
    FAIL("expected SolverError");
  } catch (const SolverError& e) {
    CHECK(e.achieved_residual() > 1e-12);
  }
  CHECK(parse_preconditioner("jacobi") == Preconditioner::jacobi);
  CHECK_THROWS_AS(parse_preconditioner("ilu"), Error);
}

TEST_CASE("embedding shape, self distance and symmetry") {
  const SimilarityGraph g = testing::random_connected_graph(80, 120, 5);
  const auto res = build_embedding(g);
  CHECK(res.embedding.size() == 80);
  CHECK(res.embedding.dimension() == 50);
  CHECK(approx_commute(res.embedding, 7, 7) == 0.0);
  CHECK(approx_commute(res.embedding, 3, 9) == approx_commute(res.embedding, 9, 3));
  CHECK_THROWS_AS(approx_commute(res.embedding, 0, 80), std::out_of_range);
  CHECK(res.report.residuals.size() == 50);
  CHECK(res.report.max_residual() <= res.report.tolerance);
}

TEST_CASE("right-hand sides are orthogonal to the ones vector") {
  const SimilarityGraph g = testing::random_connected_graph(60, 90, 6);
  const IncidenceFactor f = incidence_factorization(g);
  const DenseMatrix y = project_incidence(g.volume(), f, sample_projection(30, f.edge_count(), 1));
  for (Eigen::Index r = 0; r < y.rows(); ++r) CHECK(std::abs(y.row(r).sum()) <= 1e-10 * y.row(r).norm());
}

TEST_CASE("two-node graph with many projections") {
  EmbeddingOptions opts;
  opts.k_rp = 2000;
  for (const double w : {1.0, 0.3}) {
    const auto res = build_embedding(testing::single_edge(w), opts);
    CHECK(std::abs(approx_commute(res.embedding, 0, 1) - 2.0) <= 0.2);
  }
}

TEST_CASE("distances are invariant under edge reorientation") {
  const SimilarityGraph g = testing::random_connected_graph(70, 100, 7);
  const IncidenceFactor f = incidence_factorization(g);
  const ProjectionMatrix q = sample_projection(20, f.edge_count(), 3);
  std::vector<bool> flip(f.edge_count());
  Rng rng(8);
  for (Index e = 0; e < flip.size(); ++e) flip[e] = rng.uniform() < 0.5;
  EmbeddingOptions opts;
  opts.k_rp = 20;
  opts.solver.tol = 1e-12;
  const auto a = build_embedding(g, f, q, opts);
  const auto b = build_embedding(g, reorient(f, flip), q.with_flipped_columns(flip), opts);
  double worst = 0.0;
  for (Index i = 0; i < 70; ++i)
    for (Index j = i + 1; j < 70; ++j)
      worst = std::max(worst, testing::relative_gap(approx_commute(b.embedding, i, j), approx_commute(a.embedding, i, j)));
  CHECK(worst <= 1e-10);
}

TEST_CASE("embedding is bit-identical across thread counts") {
  const SimilarityGraph g = testing::random_connected_graph(300, 600, 9);
  EmbeddingOptions opts;
  opts.seed = 4;
  opts.threads = 1;
  const auto one = build_embedding(g, opts);
  opts.threads = 4;
  const auto four = build_embedding(g, opts);
  CHECK(one.embedding.coords == four.embedding.coords);
}

TEST_CASE("disconnected graphs are rejected") {
  const SimilarityGraph g = testing::graph_of(4, {{0, 1, 1.0}, {2, 3, 1.0}});
  CHECK_THROWS_AS(build_embedding(g), DisconnectedGraphError);
}

TEST_CASE("embedding csv") {
  Embedding e;
  e.coords.resize(2, 2);
  e.coords << 0.1, -2, 3, 1e-300;
  const std::string csv = format_embedding_csv(e);
  std::istringstream in(csv);
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 2);
  CHECK(csv.find("0.1") != std::string::npos);
  CHECK(csv.find("1e-300") != std::string::npos);
}
