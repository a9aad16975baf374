#pragma once

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mdix/alpha_pca.hpp"
#include "mdix/bilinear_lse.hpp"
#include "mdix/screening.hpp"
#include "mdix/types.hpp"

namespace mdix::pipeline {

/// Full α-PCA → LSE forecasting pipeline, optionally preceded by supervised
/// screening of the predictor matrix.
struct Config {
  double alpha_weight = 0.0;
  int k = 0;  // 0 with estimate_dims=false is invalid
  int r = 0;
  bool estimate_dims = false;
  pca::DimSelectConfig dim_cfg;
  bool screen = false;
  double row_threshold = 0.0;
  double col_threshold = 0.0;
  int horizon = 1;
  lse::LseConfig lse_cfg;
};

struct Fit {
  Config config;                 // with k, r resolved
  std::vector<int> kept_rows;    // indices into the unscreened matrix
  std::vector<int> kept_cols;
  std::optional<screening::ScreenResult> screen_diag;
  std::optional<pca::DimSelection> dim_diag;
  FactorEstimate factors;        // fitted on the (screened) training series
  LoadingEstimate loadings;

  /// F̂ for a new observation: slice to the kept rows/columns, then
  /// (1/p̃q̃)·R̂'X̃Ĉ.
  Matrix project(const Matrix& x_full) const {
    const Matrix x = select_entries(x_full, kept_rows, kept_cols);
    const double scale =
        1.0 / (static_cast<double>(x.rows()) * static_cast<double>(x.cols()));
    return scale * (factors.r_hat.transpose() * x * factors.c_hat);
  }

  double predict(const Matrix& x_full) const {
    return lse::forecast(project(x_full), loadings);
  }
};

inline Fit fit(const MatrixSeries& series, const ScalarSeries& target,
               const Config& cfg) {
  validate(series, target, cfg.horizon);

  std::vector<int> kept_rows(static_cast<size_t>(series.rows()));
  std::vector<int> kept_cols(static_cast<size_t>(series.cols()));
  for (int i = 0; i < series.rows(); ++i) kept_rows[static_cast<size_t>(i)] = i;
  for (int j = 0; j < series.cols(); ++j) kept_cols[static_cast<size_t>(j)] = j;

  std::optional<screening::ScreenResult> screen_diag;
  const MatrixSeries* working = &series;
  std::optional<MatrixSeries> screened;
  if (cfg.screen) {
    auto [refined, diag] = screening::refine(series, target, cfg.row_threshold,
                                             cfg.col_threshold);
    screened = std::move(refined);
    kept_rows = diag.kept_rows;
    kept_cols = diag.kept_cols;
    screen_diag = std::move(diag);
    working = &*screened;
  }

  Config resolved = cfg;
  std::optional<pca::DimSelection> dim_diag;
  if (cfg.estimate_dims) {
    const auto sel = pca::estimate_dims(*working, cfg.alpha_weight, cfg.dim_cfg);
    resolved.k = sel.k_hat;
    resolved.r = sel.r_hat;
    dim_diag = sel;
  } else if (cfg.k < 1 || cfg.r < 1) {
    throw std::invalid_argument("pipeline::fit: k and r must be given when estimate_dims is off");
  }

  FactorEstimate factors = pca::fit(*working, resolved.k, resolved.r, cfg.alpha_weight);
  LoadingEstimate loadings =
      lse::fit(factors.f_hat, target.values, cfg.horizon, cfg.lse_cfg);
  return Fit{std::move(resolved), std::move(kept_rows), std::move(kept_cols),
             std::move(screen_diag), std::move(dim_diag), std::move(factors),
             std::move(loadings)};
}

}  // namespace mdix::pipeline
