#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace mdix {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Symmetric eigendecomposition, eigenvalues in descending order, columns
/// orthonormal with the first nonzero entry of each column positive.
struct EigPair {
  Vector eigenvalues;
  Matrix eigenvectors;
};

namespace detail {

// Entries below 1e-12 of the column's max magnitude count as zero for the
// sign convention.
inline void fix_column_signs(Matrix& v) {
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    const double scale = v.col(j).cwiseAbs().maxCoeff();
    if (scale == 0.0) continue;
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      if (std::abs(v(i, j)) > 1e-12 * scale) {
        if (v(i, j) < 0.0) v.col(j) = -v.col(j);
        break;
      }
    }
  }
}

inline bool column_lex_less(const Matrix& v, Eigen::Index a, Eigen::Index b) {
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    if (v(i, a) != v(i, b)) return v(i, a) < v(i, b);
  }
  return false;
}

}  // namespace detail

/// Full spectral decomposition of a symmetric matrix. The input is
/// symmetrized as (A + A')/2; relative asymmetry beyond 1e-10 is rejected.
/// Exact eigenvalue ties are ordered lexicographically by the sign-fixed
/// eigenvector columns, which is arbitrary but deterministic.
inline EigPair sym_eig(const Matrix& a) {
  if (a.rows() == 0 || a.rows() != a.cols()) {
    throw std::invalid_argument("sym_eig: matrix must be square and nonempty");
  }
  if (!a.allFinite()) {
    throw std::invalid_argument("sym_eig: non-finite input");
  }
  const double scale = a.cwiseAbs().maxCoeff();
  if (scale > 0.0 &&
      (a - a.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw std::invalid_argument("sym_eig: input not symmetric within 1e-10");
  }
  const Matrix sym = 0.5 * (a + a.transpose());

  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    const double residual =
        (sym * solver.eigenvectors() -
         solver.eigenvectors() * solver.eigenvalues().asDiagonal())
            .norm();
    throw std::runtime_error(
        "sym_eig: iteration did not converge, residual " +
        std::to_string(residual));
  }

  const Eigen::Index n = a.rows();
  // Eigen returns ascending order; flip to descending.
  Vector values(n);
  Matrix vectors(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    values(j) = solver.eigenvalues()(n - 1 - j);
    vectors.col(j) = solver.eigenvectors().col(n - 1 - j);
  }
  detail::fix_column_signs(vectors);

  // Stable reorder of exact ties only.
  std::vector<Eigen::Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) {
                     if (values(x) != values(y)) return values(x) > values(y);
                     return detail::column_lex_less(vectors, x, y);
                   });
  EigPair out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    out.eigenvalues(j) = values(order[static_cast<size_t>(j)]);
    out.eigenvectors.col(j) = vectors.col(order[static_cast<size_t>(j)]);
  }
  return out;
}

/// Solves Ax = b for symmetric positive-definite A via LDL'. Rejects
/// matrices whose smallest pivot falls below 1e-12 of the largest, carrying
/// the pivot-ratio condition estimate in the error message.
inline Vector solve_spd(const Matrix& a, const Vector& b) {
  if (a.rows() == 0 || a.rows() != a.cols() || b.size() != a.rows()) {
    throw std::invalid_argument("solve_spd: dimension mismatch");
  }
  if (!a.allFinite() || !b.allFinite()) {
    throw std::invalid_argument("solve_spd: non-finite input");
  }
  Eigen::LDLT<Matrix> ldlt(0.5 * (a + a.transpose()));
  if (ldlt.info() != Eigen::Success) {
    throw std::runtime_error("solve_spd: factorization failed (matrix not positive definite)");
  }
  const Vector d = ldlt.vectorD();
  const double dmax = d.maxCoeff();
  const double dmin = d.minCoeff();
  if (!(dmin > 1e-12 * dmax) || dmax <= 0.0) {
    const double cond = (dmin > 0.0) ? dmax / dmin
                                     : std::numeric_limits<double>::infinity();
    throw std::runtime_error(
        "solve_spd: matrix singular or ill-conditioned, condition estimate " +
        std::to_string(cond));
  }
  return ldlt.solve(b);
}

/// Kronecker product of two vectors: element (i*n + j) = a_i * b_j.
inline Vector kron(const Vector& a, const Vector& b) {
  if (a.size() == 0 || b.size() == 0) {
    throw std::invalid_argument("kron: empty input");
  }
  const Eigen::Index m = a.size();
  const Eigen::Index n = b.size();
  Vector out(m * n);
  for (Eigen::Index i = 0; i < m; ++i) {
    out.segment(i * n, n) = a(i) * b;
  }
  return out;
}

/// ‖A‖₂ = sqrt(λ_max(A'A)), computed on the smaller Gram matrix.
inline double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  if (!a.allFinite()) {
    throw std::invalid_argument("spectral_norm: non-finite input");
  }
  const bool wide = a.cols() > a.rows();
  const Matrix gram = wide ? Matrix(a * a.transpose()) : Matrix(a.transpose() * a);
  Eigen::SelfAdjointEigenSolver<Matrix> solver;
  if (gram.rows() <= 3) {
    solver.computeDirect(gram, Eigen::EigenvaluesOnly);
  } else {
    solver.compute(gram, Eigen::EigenvaluesOnly);
  }
  const double lmax = solver.eigenvalues().maxCoeff();
  return std::sqrt(std::max(0.0, lmax));
}

/// ‖A‖_F = sqrt(tr(AA')).
inline double frob_norm(const Matrix& a) {
  if (!a.allFinite()) {
    throw std::invalid_argument("frob_norm: non-finite input");
  }
  return a.norm();
}

}  // namespace mdix
