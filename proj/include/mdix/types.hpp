#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mdix/linalg.hpp"

namespace mdix {

namespace detail {

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// Reports the first non-finite entry as (t, i, j).
inline void check_finite_series(const std::vector<Matrix>& values,
                                const char* what) {
  for (size_t t = 0; t < values.size(); ++t) {
    if (values[t].allFinite()) continue;
    for (Eigen::Index i = 0; i < values[t].rows(); ++i) {
      for (Eigen::Index j = 0; j < values[t].cols(); ++j) {
        if (!std::isfinite(values[t](i, j))) {
          throw std::invalid_argument(
              std::string(what) + ": non-finite entry at t=" +
              std::to_string(t) + ", (" + std::to_string(i) + "," +
              std::to_string(j) + ")");
        }
      }
    }
  }
}

// First entry whose magnitude exceeds 1e-12 of the column max must be > 0.
inline bool first_nonzero_positive(const Vector& v) {
  const double scale = v.cwiseAbs().maxCoeff();
  if (scale == 0.0) return true;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-12 * scale) return v(i) > 0.0;
  }
  return true;
}

}  // namespace detail

inline std::vector<std::string> default_time_index(int t_count) {
  std::vector<std::string> labels;
  labels.reserve(static_cast<size_t>(t_count));
  int width = 1;
  for (int v = t_count - 1; v >= 10; v /= 10) ++width;
  for (int t = 0; t < t_count; ++t) {
    std::string digits = std::to_string(t);
    labels.push_back("t" + std::string(static_cast<size_t>(width) - digits.size(), '0') + digits);
  }
  return labels;
}

/// Observed T×p×q panel {X_t} with an aligned time index.
struct MatrixSeries {
  std::vector<Matrix> values;
  std::vector<std::string> time_index;

  MatrixSeries(std::vector<Matrix> vals, std::vector<std::string> times)
      : values(std::move(vals)), time_index(std::move(times)) {
    check_invariants();
  }

  explicit MatrixSeries(std::vector<Matrix> vals)
      : values(std::move(vals)),
        time_index(default_time_index(static_cast<int>(values.size()))) {
    check_invariants();
  }

  int size() const { return static_cast<int>(values.size()); }
  int rows() const { return static_cast<int>(values.front().rows()); }
  int cols() const { return static_cast<int>(values.front().cols()); }

 private:
  void check_invariants() const {
    detail::require(values.size() >= 2, "MatrixSeries: need T >= 2");
    detail::require(time_index.size() == values.size(),
                    "MatrixSeries: time index length mismatch");
    const Eigen::Index p = values.front().rows();
    const Eigen::Index q = values.front().cols();
    detail::require(p >= 1 && q >= 1, "MatrixSeries: need p >= 1 and q >= 1");
    for (size_t t = 0; t < values.size(); ++t) {
      detail::require(values[t].rows() == p && values[t].cols() == q,
                      "MatrixSeries: inconsistent shape at t=" + std::to_string(t));
    }
    detail::check_finite_series(values, "MatrixSeries");
  }
};

/// Scalar target series sharing the MatrixSeries time-index contract.
struct ScalarSeries {
  Vector values;
  std::vector<std::string> time_index;

  ScalarSeries(Vector vals, std::vector<std::string> times)
      : values(std::move(vals)), time_index(std::move(times)) {
    check_invariants();
  }

  explicit ScalarSeries(Vector vals)
      : values(std::move(vals)),
        time_index(default_time_index(static_cast<int>(values.size()))) {
    check_invariants();
  }

  int size() const { return static_cast<int>(values.size()); }

 private:
  void check_invariants() const {
    detail::require(values.size() >= 1, "ScalarSeries: empty series");
    detail::require(time_index.size() == static_cast<size_t>(values.size()),
                    "ScalarSeries: time index length mismatch");
    for (Eigen::Index t = 0; t < values.size(); ++t) {
      detail::require(std::isfinite(values(t)),
                      "ScalarSeries: non-finite entry at t=" + std::to_string(t));
    }
  }
};

/// Pairs X_t with y_{t+h}: element t of the result aligns with
/// series.values[t], for t = 0..T-h-1. Idempotent; the pairing count is
/// exactly T - h.
inline Vector validate(const MatrixSeries& series, const ScalarSeries& target,
                       int horizon) {
  detail::require(horizon >= 1, "validate: horizon must be >= 1");
  detail::require(series.size() == target.size(),
                  "validate: length mismatch (T=" + std::to_string(series.size()) +
                      " matrix observations vs " + std::to_string(target.size()) +
                      " target values)");
  const int pairs = series.size() - horizon;
  if (pairs < 1) {
    throw std::invalid_argument("validate: no usable pairs (T=" +
                                std::to_string(series.size()) +
                                ", h=" + std::to_string(horizon) + ")");
  }
  return target.values.segment(horizon, pairs);
}

/// M̂_R = ((1+α)·X̄X̄' + (1/T)Σ(X_t−X̄)(X_t−X̄)')/(pq), M̂_C with transposes.
struct MomentMatrices {
  Matrix m_r;
  Matrix m_c;
  double alpha_weight;

  MomentMatrices(Matrix mr, Matrix mc, double alpha)
      : m_r(std::move(mr)), m_c(std::move(mc)), alpha_weight(alpha) {
    detail::require(alpha_weight >= -1.0, "MomentMatrices: alpha must be >= -1");
    check_one(m_r, "M_R");
    check_one(m_c, "M_C");
    const double tr = m_r.trace();
    const double tc = m_c.trace();
    const double scale = std::max({std::abs(tr), std::abs(tc), 1e-300});
    detail::require(std::abs(tr - tc) <= 1e-10 * scale,
                    "MomentMatrices: trace(M_R) != trace(M_C)");
  }

 private:
  static void check_one(const Matrix& m, const char* name) {
    detail::require(m.rows() >= 1 && m.rows() == m.cols(),
                    std::string("MomentMatrices: ") + name + " must be square");
    detail::require(m.allFinite(),
                    std::string("MomentMatrices: ") + name + " has non-finite entries");
    const double scale = m.cwiseAbs().maxCoeff();
    detail::require(scale == 0.0 ||
                        (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale,
                    std::string("MomentMatrices: ") + name + " not symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (m + m.transpose()),
                                                 Eigen::EigenvaluesOnly);
    const double lmin = solver.eigenvalues().minCoeff();
    const double lmax = solver.eigenvalues().maxCoeff();
    detail::require(lmin >= -1e-10 * std::max(lmax, 1e-300) - 1e-300,
                    std::string("MomentMatrices: ") + name + " not positive semidefinite");
  }
};

/// α-PCA output: R̂ (p×k), Ĉ (q×r), F̂_t (k×r each), top eigenvalues.
struct FactorEstimate {
  Matrix r_hat;
  Matrix c_hat;
  std::vector<Matrix> f_hat;
  Vector eig_r;
  Vector eig_c;
  double alpha_weight;

  FactorEstimate(Matrix r, Matrix c, std::vector<Matrix> f, Vector er, Vector ec,
                 double alpha)
      : r_hat(std::move(r)),
        c_hat(std::move(c)),
        f_hat(std::move(f)),
        eig_r(std::move(er)),
        eig_c(std::move(ec)),
        alpha_weight(alpha) {
    const Eigen::Index p = r_hat.rows();
    const Eigen::Index k = r_hat.cols();
    const Eigen::Index q = c_hat.rows();
    const Eigen::Index r_dim = c_hat.cols();
    detail::require(p >= k && k >= 1, "FactorEstimate: bad R_hat shape");
    detail::require(q >= r_dim && r_dim >= 1, "FactorEstimate: bad C_hat shape");
    detail::require(alpha_weight >= -1.0, "FactorEstimate: alpha must be >= -1");
    detail::require(eig_r.size() == k && eig_c.size() == r_dim,
                    "FactorEstimate: eigenvalue count mismatch");
    check_loading(r_hat, static_cast<double>(p), "R_hat");
    check_loading(c_hat, static_cast<double>(q), "C_hat");
    check_eigs(eig_r, "eig_R");
    check_eigs(eig_c, "eig_C");
    detail::require(!f_hat.empty(), "FactorEstimate: empty factor series");
    for (size_t t = 0; t < f_hat.size(); ++t) {
      detail::require(f_hat[t].rows() == k && f_hat[t].cols() == r_dim,
                      "FactorEstimate: factor shape mismatch at t=" + std::to_string(t));
    }
    detail::check_finite_series(f_hat, "FactorEstimate");
  }

  int k() const { return static_cast<int>(r_hat.cols()); }
  int r() const { return static_cast<int>(c_hat.cols()); }

 private:
  static void check_loading(const Matrix& l, double dim, const char* name) {
    const Matrix gram = l.transpose() * l / dim;
    const Matrix eye = Matrix::Identity(l.cols(), l.cols());
    detail::require((gram - eye).cwiseAbs().maxCoeff() <= 1e-8,
                    std::string("FactorEstimate: ") + name +
                        " columns not orthonormal after scaling");
    for (Eigen::Index j = 0; j < l.cols(); ++j) {
      detail::require(detail::first_nonzero_positive(l.col(j)),
                      std::string("FactorEstimate: ") + name +
                          " violates the sign convention in column " +
                          std::to_string(j));
    }
  }
  static void check_eigs(const Vector& e, const char* name) {
    for (Eigen::Index j = 0; j < e.size(); ++j) {
      detail::require(std::isfinite(e(j)) && e(j) >= 0.0,
                      std::string("FactorEstimate: ") + name + " must be nonnegative");
      if (j > 0) {
        detail::require(e(j) <= e(j - 1),
                        std::string("FactorEstimate: ") + name + " not descending");
      }
    }
  }
};

/// Iterative LSE output: unit-norm α̂ (sign-fixed), β̂ carrying the scale.
struct LoadingEstimate {
  Vector alpha_vec;
  Vector beta_vec;
  std::vector<double> objective_trace;
  bool converged;
  int iterations;

  LoadingEstimate(Vector a, Vector b, std::vector<double> trace, bool conv,
                  int iters)
      : alpha_vec(std::move(a)),
        beta_vec(std::move(b)),
        objective_trace(std::move(trace)),
        converged(conv),
        iterations(iters) {
    detail::require(alpha_vec.size() >= 1 && beta_vec.size() >= 1,
                    "LoadingEstimate: empty loading vector");
    detail::require(alpha_vec.allFinite() && beta_vec.allFinite(),
                    "LoadingEstimate: non-finite loading");
    detail::require(std::abs(alpha_vec.norm() - 1.0) <= 1e-10,
                    "LoadingEstimate: alpha_vec must have unit norm");
    detail::require(detail::first_nonzero_positive(alpha_vec),
                    "LoadingEstimate: alpha_vec violates the sign convention");
    for (size_t i = 1; i < objective_trace.size(); ++i) {
      detail::require(objective_trace[i] <= objective_trace[i - 1],
                      "LoadingEstimate: objective trace increased at sweep " +
                          std::to_string(i + 1));
    }
    detail::require(iterations >= 0, "LoadingEstimate: negative iteration count");
  }
};

enum class FactorKind { matrix_normal, mar1 };
enum class NoiseKind { iid, mar1_noise, row_col_corr };

inline const char* to_string(FactorKind k) {
  return k == FactorKind::matrix_normal ? "i" : "ii";
}
inline const char* to_string(NoiseKind k) {
  switch (k) {
    case NoiseKind::iid: return "i";
    case NoiseKind::mar1_noise: return "ii";
    default: return "iii";
  }
}

/// Ground truth for one simulated replication.
struct SimTruth {
  Matrix R;
  Matrix C;
  std::vector<Matrix> F_series;
  Vector alpha_vec;
  Vector beta_vec;
  NoiseKind noise_kind;
  FactorKind factor_kind;
  Vector phi1, phi2;  // diagonals of the factor MAR(1) coefficients
  Vector psi1, psi2;  // diagonals of the noise MAR(1) coefficients
  double sigma2;
  int horizon;
  std::uint64_t seed;

  SimTruth(Matrix r, Matrix c, std::vector<Matrix> f, Vector a, Vector b,
           NoiseKind nk, FactorKind fk, Vector p1, Vector p2, Vector s1,
           Vector s2, double s2e, int h, std::uint64_t sd)
      : R(std::move(r)),
        C(std::move(c)),
        F_series(std::move(f)),
        alpha_vec(std::move(a)),
        beta_vec(std::move(b)),
        noise_kind(nk),
        factor_kind(fk),
        phi1(std::move(p1)),
        phi2(std::move(p2)),
        psi1(std::move(s1)),
        psi2(std::move(s2)),
        sigma2(s2e),
        horizon(h),
        seed(sd) {
    const Eigen::Index k = R.cols();
    const Eigen::Index r_dim = C.cols();
    detail::require(k >= 1 && r_dim >= 1, "SimTruth: bad loading shapes");
    detail::require(!F_series.empty(), "SimTruth: empty factor series");
    for (const auto& f_t : F_series) {
      detail::require(f_t.rows() == k && f_t.cols() == r_dim,
                      "SimTruth: factor shape mismatch");
    }
    detail::require(alpha_vec.size() == k && beta_vec.size() == r_dim,
                    "SimTruth: loading vector length mismatch");
    detail::require(std::abs(alpha_vec.norm() - 1.0) <= 1e-10,
                    "SimTruth: alpha_vec must have unit norm");
    check_diag(phi1, "phi1");
    check_diag(phi2, "phi2");
    check_diag(psi1, "psi1");
    check_diag(psi2, "psi2");
    detail::require(sigma2 >= 0.0 && std::isfinite(sigma2),
                    "SimTruth: invalid innovation variance");
    detail::require(horizon >= 1, "SimTruth: horizon must be >= 1");
  }

  int p() const { return static_cast<int>(R.rows()); }
  int q() const { return static_cast<int>(C.rows()); }
  int k() const { return static_cast<int>(R.cols()); }
  int r() const { return static_cast<int>(C.cols()); }
  int t_count() const { return static_cast<int>(F_series.size()); }

 private:
  static void check_diag(const Vector& d, const char* name) {
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      detail::require(d(i) > -1.0 && d(i) < 1.0,
                      std::string("SimTruth: ") + name + " entries must lie in (-1,1)");
    }
  }
};

// Window and slice helpers shared by the evaluation pipelines.

inline MatrixSeries subrange(const MatrixSeries& s, int begin, int end) {
  detail::require(begin >= 0 && end <= s.size() && end - begin >= 2,
                  "subrange: invalid window");
  std::vector<Matrix> vals(s.values.begin() + begin, s.values.begin() + end);
  std::vector<std::string> times(s.time_index.begin() + begin,
                                 s.time_index.begin() + end);
  return MatrixSeries(std::move(vals), std::move(times));
}

inline ScalarSeries subrange(const ScalarSeries& s, int begin, int end) {
  detail::require(begin >= 0 && end <= s.size() && end - begin >= 1,
                  "subrange: invalid window");
  std::vector<std::string> times(s.time_index.begin() + begin,
                                 s.time_index.begin() + end);
  return ScalarSeries(s.values.segment(begin, end - begin), std::move(times));
}

inline Matrix select_entries(const Matrix& x, const std::vector<int>& rows,
                             const std::vector<int>& cols) {
  Matrix out(static_cast<Eigen::Index>(rows.size()),
             static_cast<Eigen::Index>(cols.size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t j = 0; j < cols.size(); ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          x(rows[i], cols[j]);
    }
  }
  return out;
}

inline MatrixSeries select_entries(const MatrixSeries& s,
                                   const std::vector<int>& rows,
                                   const std::vector<int>& cols) {
  detail::require(!rows.empty() && !cols.empty(), "select_entries: empty index set");
  std::vector<Matrix> vals;
  vals.reserve(s.values.size());
  for (const auto& x : s.values) vals.push_back(select_entries(x, rows, cols));
  return MatrixSeries(std::move(vals), s.time_index);
}

}  // namespace mdix
