#include "speclab/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "speclab/errors.hpp"

namespace speclab {

SparseSymMatrix SparseSymMatrix::from_entries(std::size_t n, const std::vector<Entry>& entries) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(entries.size());
  for (const auto& e : entries) {
    if (e.row >= n || e.col >= n) throw ArgumentError("matrix entry out of range");
    t.emplace_back(static_cast<int>(e.row), static_cast<int>(e.col), e.value);
  }
  const auto dim = static_cast<Eigen::Index>(n);
  Eigen::SparseMatrix<double> m(dim, dim);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  const Eigen::SparseMatrix<double> mt = m.transpose();
  if ((m - mt).norm() > 1e-12 * std::max(1.0, m.norm()))
    throw ArgumentError("matrix is not symmetric");
  return SparseSymMatrix(std::move(m));
}

SparseSymMatrix SparseSymMatrix::identity(std::size_t n) {
  std::vector<Entry> e;
  e.reserve(n);
  for (std::size_t i = 0; i < n; ++i) e.push_back({i, i, 1.0});
  return from_entries(n, e);
}

double SparseSymMatrix::coeff(std::size_t i, std::size_t j) const {
  return m_.coeff(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
}

bool SparseSymMatrix::has_positive_diagonal() const {
  for (Eigen::Index i = 0; i < m_.rows(); ++i)
    if (!(m_.coeff(i, i) > 0.0)) return false;
  return true;
}

void SparseSymMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != size() || y.size() != size()) throw ArgumentError("multiply: size mismatch");
  Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
  Eigen::Map<Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
  yv.noalias() = m_ * xv;
}

std::vector<double> SparseSymMatrix::operator*(std::span<const double> x) const {
  std::vector<double> y(size());
  multiply(x, y);
  return y;
}

SparseSymMatrix SparseSymMatrix::restricted(std::span<const std::size_t> keep) const {
  std::vector<long> where(size(), -1);
  for (std::size_t r = 0; r < keep.size(); ++r) {
    if (keep[r] >= size() || (r > 0 && keep[r] <= keep[r - 1]))
      throw ArgumentError("restricted: indices must be increasing and in range");
    where[keep[r]] = static_cast<long>(r);
  }
  std::vector<Entry> e;
  for (Eigen::Index c = 0; c < m_.outerSize(); ++c) {
    if (where[static_cast<std::size_t>(c)] < 0) continue;
    for (Eigen::SparseMatrix<double>::InnerIterator it(m_, c); it; ++it) {
      const long r = where[static_cast<std::size_t>(it.row())];
      if (r >= 0)
        e.push_back({static_cast<std::size_t>(r),
                     static_cast<std::size_t>(where[static_cast<std::size_t>(c)]), it.value()});
    }
  }
  return from_entries(keep.size(), e);
}

std::vector<double> cg_solve(const SparseSymMatrix& A, std::span<const double> b, double tol,
                             int max_iter, std::span<const double> x0) {
  const std::size_t n = A.size();
  if (b.size() != n) throw ArgumentError("cg_solve: right-hand side has wrong size");
  if (!(tol > 0.0)) throw ArgumentError("cg_solve: tolerance must be positive");
  if (!x0.empty() && x0.size() != n) throw ArgumentError("cg_solve: initial guess has wrong size");

  using Vec = Eigen::VectorXd;
  const auto N = static_cast<Eigen::Index>(n);
  const Eigen::SparseMatrix<double>& M = A.eigen();
  Eigen::Map<const Vec> bv(b.data(), N);
  const double bnorm = bv.norm();
  Vec x = x0.empty() ? Vec::Zero(N) : Vec(Eigen::Map<const Vec>(x0.data(), N));
  if (bnorm == 0.0) return std::vector<double>(n, 0.0);

  Vec inv_diag(N);
  for (Eigen::Index i = 0; i < N; ++i) {
    const double d = M.coeff(i, i);
    inv_diag[i] = d > 0.0 ? 1.0 / d : 1.0;
  }

  Vec r = bv - M * x;
  Vec z = inv_diag.cwiseProduct(r);
  Vec p = z;
  double rz = r.dot(z);
  double rel = r.norm() / bnorm;
  for (int it = 0; it < max_iter; ++it) {
    if (rel <= tol) {
      // confirm against the true residual; recurrences drift
      r = bv - M * x;
      rel = r.norm() / bnorm;
      if (rel <= tol) break;
      z = inv_diag.cwiseProduct(r);
      p = z;
      rz = r.dot(z);
    }
    const Vec Ap = M * p;
    const double pAp = p.dot(Ap);
    if (!(pAp > 0.0)) throw ArgumentError("cg_solve: matrix is not positive definite");
    const double alpha = rz / pAp;
    x += alpha * p;
    r -= alpha * Ap;
    z = inv_diag.cwiseProduct(r);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
    rel = r.norm() / bnorm;
  }
  if (rel > tol) {
    rel = (bv - M * x).norm() / bnorm;
    if (rel > tol)
      throw IterationLimitError("cg_solve: no convergence within " + std::to_string(max_iter) +
                                    " iterations",
                                rel);
  }
  return {x.data(), x.data() + n};
}

// ---------------------------------------------------------------------------

struct SpdFactorization::Impl {
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> llt;
};

SpdFactorization::SpdFactorization(const SparseSymMatrix& A) : impl_(std::make_unique<Impl>()) {
  impl_->llt.compute(A.eigen());
  if (impl_->llt.info() != Eigen::Success)
    throw ArgumentError("factorization failed: matrix is not positive definite");
}

SpdFactorization::~SpdFactorization() = default;
SpdFactorization::SpdFactorization(SpdFactorization&&) noexcept = default;
SpdFactorization& SpdFactorization::operator=(SpdFactorization&&) noexcept = default;

std::vector<double> SpdFactorization::solve(std::span<const double> b) const {
  Eigen::Map<const Eigen::VectorXd> bv(b.data(), static_cast<Eigen::Index>(b.size()));
  const Eigen::VectorXd x = impl_->llt.solve(bv);
  return {x.data(), x.data() + x.size()};
}

Eigen::MatrixXd SpdFactorization::solve(const Eigen::MatrixXd& b) const { return impl_->llt.solve(b); }

// ---------------------------------------------------------------------------

namespace {

// Orthonormalizes the columns of B against the orthonormal columns of Q and
// each other: two block projections, then Gram-Schmidt inside the block.
// Columns that collapse are refilled from the generator.
void orthonormalize(Eigen::Ref<Eigen::MatrixXd> B, const Eigen::Ref<const Eigen::MatrixXd>& Q,
                    SeededUniform& rnd) {
  for (int pass = 0; pass < 2 && Q.cols() > 0; ++pass) B.noalias() -= Q * (Q.transpose() * B);
  for (Eigen::Index j = 0; j < B.cols(); ++j) {
    for (int attempt = 0; attempt < 8; ++attempt) {
      const double before = B.col(j).norm();
      for (int pass = 0; pass < 2; ++pass) {
        if (Q.cols() > 0) B.col(j) -= Q * (Q.transpose() * B.col(j));
        for (Eigen::Index i = 0; i < j; ++i) B.col(j) -= B.col(i).dot(B.col(j)) * B.col(i);
      }
      const double after = B.col(j).norm();
      if (after > 1e-10 * before && after > 0.0) {
        B.col(j) /= after;
        break;
      }
      for (Eigen::Index r = 0; r < B.rows(); ++r) B(r, j) = rnd();
    }
  }
}

void orthonormalize(Eigen::MatrixXd& X, SeededUniform& rnd) {
  orthonormalize(X, Eigen::MatrixXd(X.rows(), 0), rnd);
}

void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index arg = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > best * (1.0 + 1e-9)) {
      best = std::abs(v[i]);
      arg = i;
    }
  }
  if (v[arg] < 0.0) v = -v;
}

}  // namespace

std::vector<EigenPair> smallest_eigenpairs(const SparseSymMatrix& A, int k, const EigenOptions& opt) {
  const std::size_t n = A.size();
  if (k < 1 || static_cast<std::size_t>(k) >= n)
    throw ArgumentError("smallest_eigenpairs: need 1 <= k < n (k=" + std::to_string(k) +
                        ", n=" + std::to_string(n) + ")");
  const int guard = opt.guard >= 0 ? opt.guard : std::max(4, k / 2);
  const auto N = static_cast<Eigen::Index>(n);
  const Eigen::Index m = std::min<Eigen::Index>(N, k + guard);

  SeededUniform rnd(opt.seed);
  Eigen::MatrixXd X(N, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto sj = static_cast<std::size_t>(j);
    if (sj < opt.start.size() && opt.start[sj].size() == n) {
      for (Eigen::Index r = 0; r < N; ++r) X(r, j) = opt.start[sj][static_cast<std::size_t>(r)];
    } else {
      for (Eigen::Index r = 0; r < N; ++r) X(r, j) = rnd();
    }
  }
  orthonormalize(X, rnd);

  std::unique_ptr<SpdFactorization> factor;
  if (opt.inner == InnerSolver::cholesky) factor = std::make_unique<SpdFactorization>(A);
  const Eigen::SparseMatrix<double>& M = A.eigen();

  auto apply_inverse = [&](const Eigen::MatrixXd& B) {
    if (factor) return factor->solve(B);
    Eigen::MatrixXd Y(N, B.cols());
    for (Eigen::Index j = 0; j < B.cols(); ++j) {
      const Eigen::VectorXd col = B.col(j);
      const auto x = cg_solve(A, std::span<const double>(col.data(), n), opt.cg_tol, opt.cg_max_iter);
      Y.col(j) = Eigen::Map<const Eigen::VectorXd>(x.data(), N);
    }
    return Y;
  };

  const int depth = std::max(1, opt.krylov_depth);
  const Eigen::Index width = std::min<Eigen::Index>(N, m * (depth + 1));
  Eigen::VectorXd theta;
  double worst = 0.0;
  for (int it = 0; it < opt.max_iter; ++it) {
    // orthonormal basis of [X, A^-1 X, ..., A^-depth X], truncated at N columns
    Eigen::MatrixXd V(N, width);
    Eigen::Index filled = std::min(m, width);
    V.leftCols(filled) = X.leftCols(filled);
    while (filled < width) {
      const Eigen::Index prev = std::min(m, filled);
      Eigen::MatrixXd B = apply_inverse(V.middleCols(filled - prev, prev));
      const Eigen::Index take = std::min<Eigen::Index>(B.cols(), width - filled);
      orthonormalize(B.leftCols(take), V.leftCols(filled), rnd);
      V.middleCols(filled, take) = B.leftCols(take);
      filled += take;
    }
    const Eigen::MatrixXd AV = M * V;
    Eigen::MatrixXd H = V.transpose() * AV;
    H = 0.5 * (H + H.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    if (es.info() != Eigen::Success) throw Error("Rayleigh-Ritz eigensolve failed");
    theta = es.eigenvalues().head(m);
    const Eigen::MatrixXd Q = es.eigenvectors().leftCols(m);
    X.noalias() = V * Q;
    const Eigen::MatrixXd AX = AV * Q;

    worst = 0.0;
    for (int i = 0; i < k; ++i) {
      if (!(theta[i] > 0.0)) throw ArgumentError("smallest_eigenpairs: matrix is not positive definite");
      const double res = (AX.col(i) - theta[i] * X.col(i)).norm() / theta[i];
      worst = std::max(worst, res);
    }
    if (worst <= opt.tol || width == N) {
      std::vector<EigenPair> out(static_cast<std::size_t>(k));
      for (int i = 0; i < k; ++i) {
        Eigen::VectorXd v = X.col(i);
        fix_sign(v);
        out[static_cast<std::size_t>(i)].value = theta[i];
        out[static_cast<std::size_t>(i)].vector.assign(v.data(), v.data() + N);
      }
      return out;
    }
  }
  throw IterationLimitError("smallest_eigenpairs: block did not converge", worst);
}

}  // namespace speclab
