#include "cesc/dataset.hpp"
#include "cesc/eval.hpp"
#include "cesc/exactspec.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace cesc;

TEST_CASE("analytic commute and hitting times") {
  for (const double w : {1.0, 0.25, 7.0}) {
    const SimilarityGraph e = testing::single_edge(w);
    CHECK(commute_pinv(e, 0, 1) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(hitting_times(e, 1)[0] == doctest::Approx(1.0).epsilon(1e-12));
  }
  const SimilarityGraph p = testing::unit_path3();
  CHECK(commute_pinv(p, 0, 2) == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(hitting_times(p, 2)[0] == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(hitting_times(p, 0)[2] == doctest::Approx(4.0).epsilon(1e-12));
  const SimilarityGraph t = testing::unit_triangle();
  for (Index target = 0; target < 3; ++target) {
    const Vector h = hitting_times(t, target);
    for (Index i = 0; i < 3; ++i) CHECK(h[static_cast<Eigen::Index>(i)] == doctest::Approx(i == target ? 0.0 : 2.0).epsilon(1e-12));
  }
}

TEST_CASE("hitting times satisfy the first-step recursion") {
  const auto edges = testing::random_connected_edges(40, 50, 3);
  const SimilarityGraph g = testing::graph_of(40, edges);
  for (Index target : {Index{0}, Index{17}}) {
    const Vector h = hitting_times(g, target);
    const Vector want = testing::hitting_oracle(40, edges, target);
    CHECK((h - want).cwiseAbs().maxCoeff() <= 1e-8 * want.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("commute oracle agrees with the pseudoinverse formula") {
  const SimilarityGraph g = testing::random_connected_graph(60, 80, 4);
  const CommuteOracle oracle(g);
  const Eigen::MatrixXd want = testing::commute_oracle(g);
  double worst = 0.0;
  for (Index i = 0; i < 60; ++i)
    for (Index j = 0; j < 60; ++j)
      if (i != j) worst = std::max(worst, testing::relative_gap(oracle.commute(i, j), want(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
  CHECK(worst < 1e-9);
  CHECK(oracle.commute(5, 5) == 0.0);
  CHECK_THROWS_AS(oracle.commute(0, 60), std::out_of_range);
}

TEST_CASE("exact embedding reproduces commute times") {
  const SimilarityGraph e = testing::single_edge();
  CHECK(approx_commute(exact_commute_embedding(e), 0, 1) == doctest::Approx(2.0).epsilon(1e-12));

  const SimilarityGraph g = testing::random_connected_graph(120, 200, 5);
  const Embedding emb = exact_commute_embedding(g);
  CHECK(emb.dimension() == 119);
  const CommuteOracle oracle(g);
  double worst = 0.0;
  for (Index i = 0; i < 120; ++i)
    for (Index j = i + 1; j < 120; ++j) worst = std::max(worst, testing::relative_gap(approx_commute(emb, i, j), oracle.commute(i, j)));
  CHECK(worst <= 1e-8);
}

TEST_CASE("disconnected inputs are rejected") {
  const SimilarityGraph g = testing::graph_of(4, {{0, 1, 1.0}, {2, 3, 1.0}});
  CHECK_THROWS_AS(commute_pinv(g, 0, 1), DisconnectedGraphError);
  CHECK_THROWS_AS(hitting_times(g, 0), DisconnectedGraphError);
  CHECK_THROWS_AS(exact_commute_embedding(g), DisconnectedGraphError);
}

TEST_CASE("Lanczos agrees with the dense solver") {
  const SimilarityGraph g = testing::random_connected_graph(400, 800, 6);
  const SparseMatrix l = normalized_laplacian(g, NormalizedKind::sym);
  const EigenPair dense = symmetric_eigen_full(l);
  const EigenPair lz = lanczos_smallest(l, 6, 1e-10, 1);
  for (Eigen::Index i = 0; i < 6; ++i) {
    CHECK(lz.values[i] == doctest::Approx(dense.values[i]).epsilon(1e-7));
    // Same eigenvector up to sign.
    CHECK(std::abs(lz.vectors.col(i).dot(dense.vectors.col(i))) == doctest::Approx(1.0).epsilon(1e-6));
  }
  const EigenPair small = smallest_eigenpairs(l, 3);
  CHECK((small.values - dense.values.head(3)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("spectral coordinates") {
  const SimilarityGraph g = testing::random_connected_graph(50, 60, 7);
  const DenseMatrix njw = spectral_coordinates(g, 3, SpectralVariant::njw);
  for (Eigen::Index r = 0; r < njw.rows(); ++r) CHECK(njw.row(r).norm() == doctest::Approx(1.0).epsilon(1e-12));

  // shi_malik vectors solve the generalized problem L v = lambda D v.
  const DenseMatrix sm = spectral_coordinates(g, 3, SpectralVariant::shi_malik);
  const Eigen::MatrixXd l = testing::dense_laplacian(g);
  const Eigen::VectorXd d = l.diagonal();
  for (Eigen::Index c = 0; c < 3; ++c) {
    const Eigen::VectorXd v = sm.col(c);
    const double lambda = v.dot(l * v) / v.dot(d.asDiagonal() * v);
    CHECK((l * v - lambda * d.asDiagonal() * v).norm() < 1e-8);
  }
  CHECK_THROWS_AS(spectral_coordinates(g, 51, SpectralVariant::njw), Error);
  CHECK(parse_spectral_variant("unnorm") == SpectralVariant::unnorm);
  CHECK_THROWS_AS(parse_spectral_variant("ratio"), Error);
}

TEST_CASE("exact spectral clustering") {
  KMeansConfig km;
  SUBCASE("k = 1") {
    const auto a = spectral_cluster_exact(testing::random_connected_graph(30, 30, 1), 1, SpectralVariant::njw, km);
    CHECK(std::all_of(a.labels.begin(), a.labels.end(), [](int l) { return l == 0; }));
  }
  SUBCASE("two far blobs") {
    DenseMatrix centers(2, 2);
    centers << -20, 0, 20, 0;
    const FeatureMatrix x = synth_blobs(centers, 200, 1.0, 2);
    // A kNN graph would split the blobs apart; the full graph keeps them joined.
    const SimilarityGraph g = build_graph(x, GraphMode::full(), Bandwidth::fixed(5.0));
    REQUIRE(is_connected(g));
    const auto a = spectral_cluster_exact(g, 2, SpectralVariant::njw, km);
    CHECK(hungarian_accuracy(a.labels, *x.labels) == 1.0);
  }
  SUBCASE("two moons") {
    const FeatureMatrix x = synth_shapes(ShapeKind::two_moons, 1000, default_noise(ShapeKind::two_moons), 0);
    const SimilarityGraph g = build_graph(x, GraphMode::knn(10));
    REQUIRE(is_connected(g));
    const auto a = spectral_cluster_exact(g, 2, SpectralVariant::njw, km);
    CHECK(hungarian_accuracy(a.labels, *x.labels) >= 0.95);
  }
}
