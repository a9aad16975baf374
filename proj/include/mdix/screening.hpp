#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mdix/stats.hpp"
#include "mdix/types.hpp"

namespace mdix::screening {

/// Diagnostics from the supervised screening pass.
struct ScreenResult {
  Matrix corr;             // ρ_ij = corr(x_{ij,t}, y_t)
  Vector row_means;        // ρ̄_i = (1/q)·Σ_j |ρ_ij|
  Vector col_means;        // ρ̄_j = (1/p)·Σ_i |ρ_ij|
  std::vector<int> kept_rows;
  std::vector<int> kept_cols;
  double row_threshold = 0.0;
  double col_threshold = 0.0;
  int zero_variance_cells = 0;
};

/// Entrywise Pearson correlation between x_{ij,t} and the contemporaneous
/// target y_t. Constant predictor cells yield ρ_ij = 0 and are counted in
/// *zero_variance_cells.
inline Matrix correlation_map(const MatrixSeries& series,
                              const ScalarSeries& target,
                              int* zero_variance_cells = nullptr) {
  const int t_count = series.size();
  if (t_count < 3) {
    throw std::invalid_argument("correlation_map: need T >= 3");
  }
  if (target.size() != t_count) {
    throw std::invalid_argument("correlation_map: length mismatch");
  }
  const int p = series.rows();
  const int q = series.cols();
  std::vector<double> y(target.values.data(), target.values.data() + t_count);
  {
    const double m = stats::mean(y);
    double var = 0.0;
    for (double v : y) var += (v - m) * (v - m);
    if (var <= 0.0) {
      throw std::invalid_argument("correlation_map: target has zero variance");
    }
  }

  int degenerate = 0;
  Matrix corr(p, q);
  std::vector<double> cell(static_cast<size_t>(t_count));
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < q; ++j) {
      for (int t = 0; t < t_count; ++t) {
        cell[static_cast<size_t>(t)] = series.values[static_cast<size_t>(t)](i, j);
      }
      const auto rho = stats::pearson(cell, y);
      if (rho) {
        corr(i, j) = *rho;
      } else {
        corr(i, j) = 0.0;
        ++degenerate;
      }
    }
  }
  if (zero_variance_cells != nullptr) *zero_variance_cells = degenerate;
  return corr;
}

/// Keeps rows with ρ̄_i >= row_threshold and columns with ρ̄_j >=
/// col_threshold, returning the sliced series and the full diagnostics.
inline std::pair<MatrixSeries, ScreenResult> refine(const MatrixSeries& series,
                                                    const ScalarSeries& target,
                                                    double row_threshold,
                                                    double col_threshold) {
  if (!(row_threshold >= 0.0 && row_threshold < 1.0) ||
      !(col_threshold >= 0.0 && col_threshold < 1.0)) {
    throw std::invalid_argument("refine: thresholds must lie in [0,1)");
  }
  ScreenResult result;
  result.row_threshold = row_threshold;
  result.col_threshold = col_threshold;
  result.corr = correlation_map(series, target, &result.zero_variance_cells);
  const int p = series.rows();
  const int q = series.cols();
  result.row_means = result.corr.cwiseAbs().rowwise().mean();
  result.col_means = result.corr.cwiseAbs().colwise().mean().transpose();
  for (int i = 0; i < p; ++i) {
    if (result.row_means(i) >= row_threshold) result.kept_rows.push_back(i);
  }
  for (int j = 0; j < q; ++j) {
    if (result.col_means(j) >= col_threshold) result.kept_cols.push_back(j);
  }
  if (result.kept_rows.empty()) {
    throw std::runtime_error(
        "refine: every row fell below the threshold; lower row_threshold");
  }
  if (result.kept_cols.empty()) {
    throw std::runtime_error(
        "refine: every column fell below the threshold; lower col_threshold");
  }
  MatrixSeries refined = select_entries(series, result.kept_rows, result.kept_cols);
  return {std::move(refined), std::move(result)};
}

inline std::pair<MatrixSeries, ScreenResult> refine(const MatrixSeries& series,
                                                    const ScalarSeries& target,
                                                    double rho_delta) {
  return refine(series, target, rho_delta, rho_delta);
}

}  // namespace mdix::screening
