#include "cesc/dataset.hpp"
#include "cesc/random.hpp"
#include "cesc/simgraph.hpp"

#include "support.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

using namespace cesc;

TEST_CASE("csv parse") {
  const FeatureMatrix m = parse_features("1,2\n3,4\n5,6");
  CHECK(m.rows() == 3);
  CHECK(m.cols() == 2);
  CHECK(m.values(2, 1) == 6.0);
  CHECK_FALSE(m.labels);
}

TEST_CASE("csv label column and header") {
  const FeatureMatrix m = parse_features("a,b,c,y\n1,2,3,0\n4,5,6,1\n7,8,9,1\n", true, 3);
  CHECK(m.rows() == 3);
  CHECK(m.cols() == 3);
  REQUIRE(m.labels);
  CHECK(*m.labels == std::vector<int>{0, 1, 1});
  CHECK(m.values(1, 2) == 6.0);
}

TEST_CASE("csv errors carry line numbers") {
  try {
    parse_features("1,2\n3\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  try {
    parse_features("1,2\n3,x\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_features(""), ParseError);
  CHECK_THROWS_AS(load_features("/nonexistent/file.csv"), Error);
}

TEST_CASE("edge list parse") {
  const EdgeList a = parse_edge_list("0 1\n1 2");
  CHECK(a.node_count == 3);
  REQUIRE(a.edges.size() == 2);
  CHECK(a.edges[0].weight == 1.0);

  const EdgeList b = parse_edge_list("5 9 2.0\n9 5 3.0");
  CHECK(b.node_count == 2);
  REQUIRE(b.edges.size() == 1);
  CHECK(b.edges[0].weight == 2.0);
  CHECK(b.duplicates_dropped == 1);
  CHECK(b.external_ids == std::vector<std::uint64_t>{5, 9});

  const EdgeList c = parse_edge_list("# comment\n\n0 1 0.5 # trailing\n");
  CHECK(c.edges.size() == 1);
}

TEST_CASE("edge list errors") {
  try {
    parse_edge_list("0 1\n2 2\n");
    FAIL("self-loop accepted");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_edge_list("0 1 -1"), ParseError);
  CHECK_THROWS_AS(parse_edge_list("0 1 0"), ParseError);
  CHECK_THROWS_AS(parse_edge_list("0 x"), ParseError);
}

TEST_CASE("edge list counts match a line scan on 1000 random edges") {
  Rng rng(11);
  std::ostringstream text;
  for (int e = 0; e < 1000; ++e) {
    std::uint64_t u = rng.below(400), v = rng.below(400);
    if (u == v) v = (v + 1) % 400;
    text << u * 7 << ' ' << v * 7 << ' ' << rng.uniform(0.5, 2.0) << '\n';
  }
  const std::string s = text.str();
  // Second parser: plain stream extraction with a set of canonical pairs.
  std::istringstream in(s);
  std::set<std::pair<std::uint64_t, std::uint64_t>> pairs;
  std::set<std::uint64_t> nodes;
  std::uint64_t u, v;
  double w;
  while (in >> u >> v >> w) {
    pairs.insert(std::minmax(u, v));
    nodes.insert(u);
    nodes.insert(v);
  }
  const EdgeList el = parse_edge_list(s);
  CHECK(el.node_count == nodes.size());
  CHECK(el.edges.size() == pairs.size());
  CHECK(el.edges.size() + el.duplicates_dropped == 1000);
}

TEST_CASE("edge list round trip through a file") {
  const EdgeList a = parse_edge_list("10 20 0.1\n20 30 0.30000000000000004\n");
  const auto path = std::filesystem::temp_directory_path() / "cesc_edges_roundtrip.txt";
  write_edge_list(path, a);
  const EdgeList b = load_edge_list(path);
  std::filesystem::remove(path);
  CHECK(b.external_ids == a.external_ids);
  CHECK(b.edges == a.edges);
}

TEST_CASE("standardize") {
  FeatureMatrix two;
  two.values.resize(2, 1);
  two.values << 1, 3;
  // Sample convention: sd of (1, 3) is sqrt(2).
  const FeatureMatrix s = standardize(two);
  CHECK(s.values(0, 0) == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(s.values(1, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));

  FeatureMatrix constant;
  constant.values.resize(3, 1);
  constant.values << 5, 5, 5;
  CHECK(standardize(constant).values.isZero(0.0));

  const FeatureMatrix r = standardize(testing::random_points(100, 4, 3));
  for (Eigen::Index c = 0; c < 4; ++c) {
    const auto col = r.values.col(c);
    const double mean = col.mean();
    const double sd = std::sqrt((col.array() - mean).square().sum() / 99.0);
    CHECK(std::abs(mean) <= 1e-10);
    CHECK(std::abs(sd - 1.0) <= 1e-10);
  }
}

TEST_CASE("synthetic generators") {
  SUBCASE("two_moons is deterministic") {
    const FeatureMatrix a = synth_shapes(ShapeKind::two_moons, 1000, 0.05, 7);
    const FeatureMatrix b = synth_shapes(ShapeKind::two_moons, 1000, 0.05, 7);
    CHECK(a.values == b.values);
    CHECK(*a.labels == *b.labels);
    CHECK(a.rows() == 1000);
  }
  SUBCASE("far blobs are linearly separable") {
    DenseMatrix centers(2, 2);
    centers << -50, 0, 50, 0;
    const FeatureMatrix b = synth_blobs(centers, 200, 1.0, 3);
    REQUIRE(b.labels);
    for (Index i = 0; i < b.rows(); ++i) CHECK((b.values(static_cast<Eigen::Index>(i), 0) > 0) == ((*b.labels)[i] == 1));
  }
  SUBCASE("text_mask has ten equal labeled glyphs and a connected 10-NN graph") {
    const FeatureMatrix t = synth_shapes(ShapeKind::text_mask, 2000, default_noise(ShapeKind::text_mask), 0);
    REQUIRE(t.labels);
    std::map<int, int> counts;
    for (int l : *t.labels) ++counts[l];
    CHECK(counts.size() == 10);
    for (const auto& [label, count] : counts) CHECK(count == 200);
    const SimilarityGraph g = build_graph(t, GraphMode::knn(10));
    CHECK(is_connected(g));
  }
  SUBCASE("names and counts") {
    CHECK(parse_shape_kind("text_mask") == ShapeKind::text_mask);
    CHECK(to_string(ShapeKind::blobs) == "blobs");
    CHECK_THROWS_AS(parse_shape_kind("spirals"), Error);
    CHECK(shape_cluster_count(ShapeKind::two_moons) == 2);
    CHECK(shape_cluster_count(ShapeKind::text_mask) == 10);
    CHECK_THROWS_AS(synth_shapes(ShapeKind::two_moons, 100, -1.0, 0), Error);
  }
}
