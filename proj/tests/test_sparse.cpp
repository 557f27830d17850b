#include "cesc/random.hpp"
#include "cesc/sparse.hpp"

#include <doctest.h>

#include <vector>

using cesc::Index;
using cesc::SparseMatrix;

namespace {

SparseMatrix random_sparse(Index rows, Index cols, double density, std::uint64_t seed) {
  cesc::Rng rng(seed);
  std::vector<SparseMatrix::Triplet> t;
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c)
      if (rng.uniform() < density) t.push_back({r, c, rng.uniform(-1.0, 1.0)});
  return SparseMatrix::from_triplets(rows, cols, t);
}

}  // namespace

TEST_CASE("from_triplets sums duplicates and drops exact zeros") {
  const std::vector<SparseMatrix::Triplet> t{{0, 1, 2.0}, {0, 1, 3.0}, {1, 0, 1.0}, {1, 0, -1.0}, {1, 1, 4.0}};
  const SparseMatrix m = SparseMatrix::from_triplets(2, 2, t);
  CHECK(m.nnz() == 2);
  CHECK(m.coeff(0, 1) == 5.0);
  CHECK(m.coeff(1, 0) == 0.0);
  CHECK(m.coeff(1, 1) == 4.0);
}

TEST_CASE("from_csr rejects unsorted rows and explicit zeros") {
  CHECK_THROWS_AS(SparseMatrix::from_csr(1, 3, {0, 2}, {2, 1}, {1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(SparseMatrix::from_csr(1, 3, {0, 1}, {1}, {0.0}), std::invalid_argument);
  CHECK_NOTHROW(SparseMatrix::from_csr(1, 3, {0, 2}, {0, 2}, {1.0, -1.0}));
}

TEST_CASE("products and transpose agree with dense algebra") {
  const SparseMatrix a = random_sparse(17, 11, 0.3, 1);
  const SparseMatrix b = random_sparse(11, 9, 0.3, 2);
  const Eigen::MatrixXd ad = a.to_dense(), bd = b.to_dense();
  CHECK(((a * b).to_dense() - ad * bd).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((a.transpose().to_dense() - ad.transpose()).cwiseAbs().maxCoeff() == 0.0);

  cesc::Rng rng(3);
  cesc::Vector x(11);
  for (auto& v : x) v = rng.normal();
  CHECK(((a * x) - ad * x).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((a.row_sums() - ad.rowwise().sum()).cwiseAbs().maxCoeff() < 1e-14);

  const SparseMatrix c = random_sparse(17, 11, 0.3, 4);
  CHECK(((a - c).to_dense() - (ad - c.to_dense())).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("scaled and diagonal") {
  const SparseMatrix a = random_sparse(6, 6, 0.5, 5);
  cesc::Vector l(6), r(6);
  l << 1, 2, 3, 4, 5, 6;
  r << 6, 5, 4, 3, 2, 1;
  const Eigen::MatrixXd want = l.asDiagonal() * a.to_dense() * r.asDiagonal();
  CHECK((a.scaled(l, r).to_dense() - want).cwiseAbs().maxCoeff() < 1e-14);
  const SparseMatrix d = SparseMatrix::diagonal(l);
  CHECK(d.nnz() == 6);
  CHECK((d.diagonal_values() - l).norm() == 0.0);
}

TEST_CASE("symmetry check") {
  const SparseMatrix a = random_sparse(8, 8, 0.4, 6);
  const SparseMatrix s = a - a.transpose();  // antisymmetric
  REQUIRE(s.nnz() > 0);
  CHECK_FALSE(s.is_symmetric());
  std::vector<SparseMatrix::Triplet> t{{0, 1, 2.0}, {1, 0, 2.0}, {2, 2, 1.0}};
  CHECK(SparseMatrix::from_triplets(3, 3, t).is_symmetric());
}
