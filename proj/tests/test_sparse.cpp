#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "speclab/errors.hpp"
#include "speclab/sparse.hpp"

using namespace speclab;

namespace {

SparseSymMatrix to_sparse(const oracle::Dense& a) {
  std::vector<SparseSymMatrix::Entry> e;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      if (a[i][j] != 0.0) e.push_back({i, j, a[i][j]});
  return SparseSymMatrix::from_entries(a.size(), e);
}

}  // namespace

TEST_CASE("assembly sums duplicates and rejects asymmetry") {
  auto m = SparseSymMatrix::from_entries(2, {{0, 0, 1.0}, {0, 0, 2.0}, {0, 1, -1.0}, {1, 0, -1.0}, {1, 1, 5.0}});
  CHECK(m.coeff(0, 0) == 3.0);
  CHECK(m.coeff(0, 1) == -1.0);
  CHECK(m.has_positive_diagonal());
  CHECK_THROWS_AS(SparseSymMatrix::from_entries(2, {{0, 1, 1.0}}), ArgumentError);
  CHECK(SparseSymMatrix::identity(4).nonzeros() == 4);
}

TEST_CASE("matrix-vector product matches the dense product") {
  const auto a = oracle::random_spd(17, 3);
  const auto m = to_sparse(a);
  std::vector<double> x(17);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(1.0 + i);
  const auto y = m * x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) s += a[i][j] * x[j];
    CHECK(y[i] == doctest::Approx(s).epsilon(1e-13));
  }
}

TEST_CASE("principal submatrix") {
  const auto a = oracle::random_spd(9, 8, 0.8);
  const std::vector<std::size_t> keep{1, 4, 5, 8};
  const auto r = to_sparse(a).restricted(keep);
  REQUIRE(r.size() == 4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK(r.coeff(i, j) == a[keep[i]][keep[j]]);
}

TEST_CASE("conjugate gradients and Cholesky agree with elimination") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const std::size_t n = 10 + 5 * seed;
    const auto a = oracle::random_spd(n, seed);
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) b[i] = std::cos(0.3 * i * seed);
    const auto ref = oracle::solve(a, b);
    const auto m = to_sparse(a);
    const auto x = cg_solve(m, b, 1e-13, 1000);
    const auto y = SpdFactorization(m).solve(b);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(x[i] == doctest::Approx(ref[i]).epsilon(1e-9));
      CHECK(y[i] == doctest::Approx(ref[i]).epsilon(1e-11));
    }
  }
}

TEST_CASE("conjugate gradients report their iteration limit") {
  const auto m = to_sparse(oracle::random_spd(30, 11, 0.9));
  std::vector<double> b(30, 1.0);
  try {
    cg_solve(m, b, 1e-14, 1);
    FAIL("expected IterationLimitError");
  } catch (const IterationLimitError& e) {
    CHECK(e.residual() > 1e-14);
  }
}

TEST_CASE("smallest eigenpairs against dense Jacobi") {
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    const std::size_t n = 12 + (seed % 7) * 4;
    const auto a = oracle::random_spd(n, seed);
    const auto ref = oracle::jacobi_eigenvalues(a);
    const auto m = to_sparse(a);
    const int k = 5;
    EigenOptions o;
    o.tol = 1e-11;
    const auto pairs = smallest_eigenpairs(m, k, o);
    REQUIRE(pairs.size() == static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
      CHECK(std::abs(pairs[i].value - ref[i]) <= 1e-8 * ref[i]);
      // residual and normalization
      const auto av = m * pairs[i].vector;
      double res = 0.0, nrm = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        res += std::pow(av[j] - pairs[i].value * pairs[i].vector[j], 2);
        nrm += pairs[i].vector[j] * pairs[i].vector[j];
      }
      CHECK(nrm == doctest::Approx(1.0));
      CHECK(std::sqrt(res) <= 1e-7 * pairs[i].value);
    }
  }
}

TEST_CASE("eigensolver is deterministic for a fixed seed") {
  const auto m = to_sparse(oracle::random_spd(25, 77));
  const auto a = smallest_eigenpairs(m, 3), b = smallest_eigenpairs(m, 3);
  for (int i = 0; i < 3; ++i) CHECK(a[i].value == b[i].value);
}

TEST_CASE("eigensolver with the CG inner solver") {
  const auto a = oracle::random_spd(20, 5);
  const auto ref = oracle::jacobi_eigenvalues(a);
  EigenOptions o;
  o.inner = InnerSolver::cg;
  const auto pairs = smallest_eigenpairs(to_sparse(a), 3, o);
  for (int i = 0; i < 3; ++i) CHECK(pairs[i].value == doctest::Approx(ref[i]).epsilon(1e-8));
}

TEST_CASE("eigensolver argument checks") {
  const auto m = SparseSymMatrix::identity(4);
  CHECK_THROWS_AS(smallest_eigenpairs(m, 0), ArgumentError);
  CHECK_THROWS_AS(smallest_eigenpairs(m, 4), ArgumentError);
}

TEST_CASE("seeded uniform stream") {
  SeededUniform a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a(), y = b(), z = c();
    CHECK(x == y);
    CHECK(x >= -0.5);
    CHECK(x < 0.5);
    differs |= x != z;
  }
  CHECK(differs);
}
