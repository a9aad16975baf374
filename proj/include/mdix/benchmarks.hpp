#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "mdix/bilinear_lse.hpp"
#include "mdix/evaluate.hpp"
#include "mdix/types.hpp"

namespace mdix::bench {

enum class BenchmarkKind { raw_bilinear, vec_ols, vec_lasso, ar1 };

inline const char* to_string(BenchmarkKind k) {
  switch (k) {
    case BenchmarkKind::raw_bilinear: return "raw";
    case BenchmarkKind::vec_ols: return "vec";
    case BenchmarkKind::vec_lasso: return "vec_lasso";
    default: return "ar1";
  }
}

/// y_{t+h} = α'X_tβ + ε: the bilinear LSE run on the raw observation matrix.
inline LoadingEstimate fit_raw(const MatrixSeries& series, const ScalarSeries& target,
                               int horizon, const lse::LseConfig& cfg = {}) {
  validate(series, target, horizon);
  if (series.size() - horizon < series.rows() + series.cols()) {
    throw std::invalid_argument("fit_raw: need T - h >= p + q observations");
  }
  return lse::fit(series.values, target.values, horizon, cfg);
}

inline double predict_raw(const Matrix& x, const LoadingEstimate& loadings) {
  return lse::forecast(x, loadings);
}

namespace detail {

// Design matrix of vectorized observations (column-major vec) paired with
// y_{t+h}.
inline std::pair<Matrix, Vector> vec_design(const MatrixSeries& series,
                                            const ScalarSeries& target,
                                            int horizon) {
  const Vector aligned = validate(series, target, horizon);
  const int n = static_cast<int>(aligned.size());
  const int dim = series.rows() * series.cols();
  Matrix design(n, dim);
  for (int t = 0; t < n; ++t) {
    design.row(t) = Eigen::Map<const Vector>(
        series.values[static_cast<size_t>(t)].data(), dim);
  }
  return {std::move(design), aligned};
}

}  // namespace detail

/// Minimum-norm least squares on vec(X_t); handles pq > T.
inline Vector fit_vec_ols(const MatrixSeries& series, const ScalarSeries& target,
                          int horizon) {
  auto [design, y] = detail::vec_design(series, target, horizon);
  return design.completeOrthogonalDecomposition().solve(y);
}

inline double predict_vec(const Matrix& x, const Vector& coef) {
  if (coef.size() != x.size()) {
    throw std::invalid_argument("predict_vec: coefficient length mismatch");
  }
  return Eigen::Map<const Vector>(x.data(), x.size()).dot(coef);
}

struct LassoConfig {
  std::vector<double> lambda_grid;  // empty: 50 log-spaced from λ_max to 1e-4·λ_max
  int cv_folds = 5;
  double cv_test_fraction = 0.2;
  int max_iterations = 2000;
  double tol = 1e-8;
};

struct LassoFit {
  Vector coef;
  double lambda;
  bool converged;
};

namespace detail {

// One coordinate-descent solve of (1/2n)‖y − Zb‖² + λ‖b‖₁ for columns
// scaled to unit mean square. `b` warm-starts and carries the solution.
inline bool lasso_cd(const Matrix& z, const Vector& y, double lambda, Vector& b,
                     int max_iterations, double tol,
                     std::vector<double>* objective_trace = nullptr) {
  const int n = static_cast<int>(z.rows());
  const int dim = static_cast<int>(z.cols());
  Vector residual = y - z * b;
  auto soft = [](double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
  };
  auto objective = [&]() {
    return residual.squaredNorm() / (2.0 * n) + lambda * b.lpNorm<1>();
  };
  if (objective_trace != nullptr) objective_trace->push_back(objective());
  for (int sweep = 0; sweep < max_iterations; ++sweep) {
    double max_delta = 0.0;
    for (int j = 0; j < dim; ++j) {
      const double old = b(j);
      const double rho = z.col(j).dot(residual) / n + old;
      const double updated = soft(rho, lambda);
      if (updated != old) {
        residual.noalias() -= (updated - old) * z.col(j);
        b(j) = updated;
        max_delta = std::max(max_delta, std::abs(updated - old));
      }
    }
    if (objective_trace != nullptr) objective_trace->push_back(objective());
    if (max_delta <= tol * std::max(1.0, b.cwiseAbs().maxCoeff())) return true;
  }
  return false;
}

inline std::vector<double> default_lambda_grid(double lambda_max) {
  std::vector<double> grid;
  const int points = 50;
  const double lo = std::log(1e-4 * lambda_max);
  const double hi = std::log(lambda_max);
  for (int i = 0; i < points; ++i) {
    grid.push_back(std::exp(hi + (lo - hi) * i / (points - 1)));
  }
  return grid;
}

}  // namespace detail

/// Coordinate-descent lasso on standardized vec(X_t) predictors; λ picked by
/// rolling-window CV on the training span, coefficients returned on the
/// original scale.
inline LassoFit fit_vec_lasso(const MatrixSeries& series, const ScalarSeries& target,
                              int horizon, const LassoConfig& cfg = {}) {
  auto [design, y] = detail::vec_design(series, target, horizon);
  const int n = static_cast<int>(design.rows());
  const int dim = static_cast<int>(design.cols());

  // Scale columns to unit mean square; constant-zero columns are dropped
  // from the penalty path and get zero coefficients.
  Vector scale(dim);
  Matrix z = design;
  for (int j = 0; j < dim; ++j) {
    const double ms = std::sqrt(design.col(j).squaredNorm() / n);
    scale(j) = ms;
    if (ms > 0.0) z.col(j) /= ms;
  }
  const double lambda_max = (z.transpose() * y).cwiseAbs().maxCoeff() / n;
  std::vector<double> grid = cfg.lambda_grid;
  if (grid.empty()) {
    if (lambda_max <= 0.0) {
      return LassoFit{Vector::Zero(dim), 0.0, true};
    }
    grid = detail::default_lambda_grid(lambda_max);
  }
  std::sort(grid.begin(), grid.end(), std::greater<double>());

  double best_lambda = grid.front();
  if (grid.size() > 1) {
    // Rolling CV over the aligned pairs: later chunks are held out one at a
    // time, fitting the warm-started λ path on everything before them.
    const auto folds = eval::cv_folds(n, cfg.cv_folds, cfg.cv_test_fraction);
    std::vector<double> cv_sse(grid.size(), 0.0);
    std::vector<int> cv_count(grid.size(), 0);
    for (const auto& fold : folds) {
      if (fold.start < 2) continue;
      const Matrix z_train = z.topRows(fold.start);
      const Vector y_train = y.head(fold.start);
      Vector b = Vector::Zero(dim);
      for (size_t g = 0; g < grid.size(); ++g) {
        detail::lasso_cd(z_train, y_train, grid[g], b, cfg.max_iterations, cfg.tol);
        for (int i = 0; i < fold.size; ++i) {
          const double pred = z.row(fold.start + i).dot(b);
          const double err = pred - y(fold.start + i);
          cv_sse[g] += err * err;
          cv_count[g] += 1;
        }
      }
    }
    double best_mse = std::numeric_limits<double>::infinity();
    for (size_t g = 0; g < grid.size(); ++g) {
      if (cv_count[g] == 0) continue;
      const double mse = cv_sse[g] / cv_count[g];
      if (mse < best_mse - 1e-12) {
        best_mse = mse;
        best_lambda = grid[g];
      }
    }
  }

  // Refit on the full span, warm-starting down the path to the chosen λ.
  Vector b = Vector::Zero(dim);
  bool converged = true;
  for (double lambda : grid) {
    if (lambda < best_lambda) break;
    converged = detail::lasso_cd(z, y, lambda, b, cfg.max_iterations, cfg.tol);
  }
  if (!converged) {
    throw std::runtime_error("fit_vec_lasso: coordinate descent hit the iteration cap");
  }
  Vector coef = Vector::Zero(dim);
  for (int j = 0; j < dim; ++j) {
    if (scale(j) > 0.0) coef(j) = b(j) / scale(j);
  }
  return LassoFit{std::move(coef), best_lambda, converged};
}

/// AR(1) without intercept: OLS slope of y_{t+1} on y_t.
inline double fit_ar1(const ScalarSeries& target) {
  const int t_count = target.size();
  if (t_count < 3) throw std::invalid_argument("fit_ar1: need T >= 3");
  double num = 0.0, den = 0.0;
  for (int t = 0; t + 1 < t_count; ++t) {
    num += target.values(t) * target.values(t + 1);
    den += target.values(t) * target.values(t);
  }
  if (den <= 0.0) throw std::runtime_error("fit_ar1: zero variance of y");
  return num / den;
}

}  // namespace mdix::bench
