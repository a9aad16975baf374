#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "mdix/linalg.hpp"
#include "mdix/types.hpp"

namespace mdix::pca {

enum class DimFallbackRule { second_largest_ratio };

/// Upper bounds for the eigenvalue-ratio search; 0 means ceil(dim/2).
struct DimSelectConfig {
  int k_max = 0;
  int r_max = 0;
  DimFallbackRule fallback_rule = DimFallbackRule::second_largest_ratio;
};

struct DimSelection {
  int k_hat = 0;
  int r_hat = 0;
  bool k_used_fallback = false;  // ratio sequence had <= 1 local maximum
  bool r_used_fallback = false;
};

/// Moment matrices on the transformed data X*_t = X_t + (sqrt(α+1)-1)·X̄:
/// M̂_R = (1/pqT)·Σ X*_t X*_t',  M̂_C = (1/pqT)·Σ X*_t' X*_t,
/// which equals the direct form ((1+α)·X̄X̄' + sample covariance)/(pq).
inline MomentMatrices moment_matrices(const MatrixSeries& series,
                                      double alpha_weight) {
  if (!(alpha_weight >= -1.0)) {
    throw std::invalid_argument("moment_matrices: alpha must be >= -1");
  }
  const int t_count = series.size();
  const int p = series.rows();
  const int q = series.cols();

  Matrix xbar = Matrix::Zero(p, q);
  for (const auto& x : series.values) xbar += x;
  xbar /= static_cast<double>(t_count);
  const double alpha_tilde = std::sqrt(alpha_weight + 1.0) - 1.0;

  // Stack the transformed observations so both Gram products run as single
  // matrix multiplies.
  Matrix stacked(p * t_count, q);
  for (int t = 0; t < t_count; ++t) {
    stacked.middleRows(static_cast<Eigen::Index>(t) * p, p) =
        series.values[static_cast<size_t>(t)] + alpha_tilde * xbar;
  }
  const double scale = 1.0 / (static_cast<double>(p) * q * t_count);
  Matrix m_c = scale * (stacked.transpose() * stacked);
  Matrix m_r = Matrix::Zero(p, p);
  for (int t = 0; t < t_count; ++t) {
    const auto block = stacked.middleRows(static_cast<Eigen::Index>(t) * p, p);
    m_r.noalias() += block * block.transpose();
  }
  m_r *= scale;
  m_r = 0.5 * (m_r + m_r.transpose()).eval();
  m_c = 0.5 * (m_c + m_c.transpose()).eval();
  return MomentMatrices(std::move(m_r), std::move(m_c), alpha_weight);
}

/// R̂ = √p × top-k eigenvectors of M̂_R, Ĉ = √q × top-r eigenvectors of M̂_C,
/// F̂_t = (1/pq)·R̂'X_tĈ.
inline FactorEstimate fit(const MatrixSeries& series, int k, int r,
                          double alpha_weight) {
  const int p = series.rows();
  const int q = series.cols();
  if (k < 1 || k > p) {
    throw std::invalid_argument("alpha_pca::fit: k must satisfy 1 <= k <= p");
  }
  if (r < 1 || r > q) {
    throw std::invalid_argument("alpha_pca::fit: r must satisfy 1 <= r <= q");
  }
  const MomentMatrices mm = moment_matrices(series, alpha_weight);
  const EigPair er = sym_eig(mm.m_r);
  const EigPair ec = sym_eig(mm.m_c);
  if (!(er.eigenvalues(0) > 0.0) || !(ec.eigenvalues(0) > 0.0)) {
    throw std::invalid_argument(
        "alpha_pca::fit: degenerate series (top eigenvectors undefined)");
  }

  Matrix r_hat = std::sqrt(static_cast<double>(p)) * er.eigenvectors.leftCols(k);
  Matrix c_hat = std::sqrt(static_cast<double>(q)) * ec.eigenvectors.leftCols(r);
  Vector eig_r = er.eigenvalues.head(k).cwiseMax(0.0);
  Vector eig_c = ec.eigenvalues.head(r).cwiseMax(0.0);

  const double scale = 1.0 / (static_cast<double>(p) * q);
  std::vector<Matrix> f_hat;
  f_hat.reserve(series.values.size());
  for (const auto& x : series.values) {
    f_hat.push_back(scale * (r_hat.transpose() * x * c_hat));
  }
  return FactorEstimate(std::move(r_hat), std::move(c_hat), std::move(f_hat),
                        std::move(eig_r), std::move(eig_c), alpha_weight);
}

namespace detail {

struct RatioPick {
  int index;
  bool used_fallback;
};

// argmax_j λ_j/λ_{j+1} over j = 1..j_max, with λ_{j+1} = 0 treated as an
// infinite ratio when λ_j is meaningfully positive (exactly rank-j
// spectrum). When the ratio sequence has at most one local maximum, the
// index of the second-largest ratio is returned instead and flagged.
inline RatioPick ratio_select(const Vector& eigs_in, int j_max, const char* name) {
  const int n = static_cast<int>(eigs_in.size());
  const Vector eigs = eigs_in.cwiseMax(0.0);
  if (!(eigs(0) > 0.0)) {
    throw std::runtime_error(
        std::string("estimate_dims: fewer than 2 positive eigenvalues of ") + name);
  }
  const double tol = 1e-13 * eigs(0);
  const int cap = std::min(j_max, n - 1);
  std::vector<double> ratio(static_cast<size_t>(cap));
  for (int j = 0; j < cap; ++j) {
    const double num = eigs(j);
    const double den = eigs(j + 1);
    if (den <= tol) {
      // λ_{j+1} is (numerically) zero: the spectrum is exactly rank j, so
      // the infinite ratio selects j outright and no fallback applies.
      if (num > tol) return {j + 1, false};
      ratio[static_cast<size_t>(j)] = 0.0;  // past the rank: never a maximum
    } else {
      ratio[static_cast<size_t>(j)] = num / den;
    }
  }

  int best = 0;
  for (int j = 1; j < cap; ++j) {
    if (ratio[static_cast<size_t>(j)] > ratio[static_cast<size_t>(best)]) best = j;
  }
  if (cap == 1) return {1, false};

  int local_maxima = 0;
  for (int j = 0; j < cap; ++j) {
    const bool left_ok = (j == 0) || ratio[static_cast<size_t>(j)] > ratio[static_cast<size_t>(j - 1)];
    const bool right_ok = (j == cap - 1) || ratio[static_cast<size_t>(j)] > ratio[static_cast<size_t>(j + 1)];
    if (left_ok && right_ok) ++local_maxima;
  }
  if (local_maxima >= 2) return {best + 1, false};

  int second = -1;
  for (int j = 0; j < cap; ++j) {
    if (j == best) continue;
    if (second < 0 || ratio[static_cast<size_t>(j)] > ratio[static_cast<size_t>(second)]) second = j;
  }
  if (second < 0 || ratio[static_cast<size_t>(second)] == ratio[static_cast<size_t>(best)]) {
    return {best + 1, false};  // no strictly smaller runner-up to substitute
  }
  return {second + 1, true};
}

}  // namespace detail

/// Eigenvalue-ratio selection of the factor dimensions (k̂, r̂).
inline DimSelection estimate_dims(const MatrixSeries& series, double alpha_weight,
                                  DimSelectConfig cfg = {}) {
  const int p = series.rows();
  const int q = series.cols();
  if (p < 3 || q < 3) {
    throw std::invalid_argument("estimate_dims: need p >= 3 and q >= 3");
  }
  if (cfg.k_max == 0) cfg.k_max = (p + 1) / 2;
  if (cfg.r_max == 0) cfg.r_max = (q + 1) / 2;
  if (cfg.k_max < 1 || cfg.k_max > p - 1 || cfg.r_max < 1 || cfg.r_max > q - 1) {
    throw std::invalid_argument("estimate_dims: bounds must satisfy 1 <= k_max <= p-1, 1 <= r_max <= q-1");
  }
  const MomentMatrices mm = moment_matrices(series, alpha_weight);
  const EigPair er = sym_eig(mm.m_r);
  const EigPair ec = sym_eig(mm.m_c);
  const auto pick_k = detail::ratio_select(er.eigenvalues, cfg.k_max, "M_R");
  const auto pick_r = detail::ratio_select(ec.eigenvalues, cfg.r_max, "M_C");
  return DimSelection{pick_k.index, pick_r.index, pick_k.used_fallback,
                      pick_r.used_fallback};
}

}  // namespace mdix::pca
