#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace speclab {

/// Symmetric sparse matrix in compressed column form.
class SparseSymMatrix {
 public:
  struct Entry {
    std::size_t row;
    std::size_t col;
    double value;
  };

  SparseSymMatrix() = default;
  /// Duplicate entries are summed. Throws ArgumentError when the result is
  /// not symmetric.
  static SparseSymMatrix from_entries(std::size_t n, const std::vector<Entry>& entries);
  static SparseSymMatrix identity(std::size_t n);

  std::size_t size() const { return static_cast<std::size_t>(m_.rows()); }
  std::size_t nonzeros() const { return static_cast<std::size_t>(m_.nonZeros()); }
  double coeff(std::size_t i, std::size_t j) const;
  bool has_positive_diagonal() const;

  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> operator*(std::span<const double> x) const;

  /// Principal submatrix on the given strictly increasing indices.
  SparseSymMatrix restricted(std::span<const std::size_t> keep) const;

  const Eigen::SparseMatrix<double>& eigen() const { return m_; }

 private:
  explicit SparseSymMatrix(Eigen::SparseMatrix<double> m) : m_(std::move(m)) {}
  Eigen::SparseMatrix<double> m_;
};

/// Jacobi-preconditioned conjugate gradients. Returns x with
/// ||Ax - b|| <= tol * ||b||, or throws IterationLimitError.
std::vector<double> cg_solve(const SparseSymMatrix& A, std::span<const double> b, double tol,
                             int max_iter, std::span<const double> x0 = {});

/// Sparse Cholesky factorization, reused across many right-hand sides.
class SpdFactorization {
 public:
  explicit SpdFactorization(const SparseSymMatrix& A);
  ~SpdFactorization();
  SpdFactorization(SpdFactorization&&) noexcept;
  SpdFactorization& operator=(SpdFactorization&&) noexcept;

  std::vector<double> solve(std::span<const double> b) const;
  Eigen::MatrixXd solve(const Eigen::MatrixXd& b) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

enum class InnerSolver { cholesky, cg };

struct EigenOptions {
  /// Relative residual target ||Av - lambda v|| <= tol * lambda.
  double tol = 1e-8;
  int max_iter = 1000;
  std::uint64_t seed = 0x5eedULL;
  /// Extra block vectors beyond k; negative picks max(4, k/2).
  int guard = -1;
  /// Inverse powers of the block kept in each Rayleigh-Ritz space; 1 is
  /// plain subspace iteration.
  int krylov_depth = 3;
  InnerSolver inner = InnerSolver::cholesky;
  double cg_tol = 1e-12;
  int cg_max_iter = 200000;
  /// Optional start vectors (each of length n); missing columns are random.
  std::vector<std::vector<double>> start;
};

struct EigenPair {
  double value = 0.0;
  std::vector<double> vector;  // unit Euclidean norm
};

/// k smallest eigenpairs of an SPD matrix by blocked inverse iteration:
/// each sweep applies A^{-1} to the block krylov_depth times and restarts
/// from the Rayleigh-Ritz vectors of the whole span. Values ascending. Throws ArgumentError when
/// k < 1 or k >= n, IterationLimitError when the block does not converge.
std::vector<EigenPair> smallest_eigenpairs(const SparseSymMatrix& A, int k,
                                           const EigenOptions& options = {});

/// Deterministic uniform numbers in [-1/2, 1/2) from a 64-bit Mersenne
/// twister, independent of the standard library's distribution code.
class SeededUniform {
 public:
  explicit SeededUniform(std::uint64_t seed) : gen_(seed) {}
  double operator()() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53 - 0.5; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace speclab
