#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "mdix/linalg.hpp"
#include "mdix/pipeline.hpp"
#include "mdix/stats.hpp"
#include "mdix/types.hpp"

namespace mdix::eval {

/// Rotation matrices linking estimates to truth:
///   H_R = (1/pqT)·Σ F̃_t C'C F̃_t' R' R̂ V_R⁻¹,
///   H_C = (1/pqT)·Σ F̃_t' R'R F̃_t C' Ĉ V_C⁻¹,
/// with F̃_t = F_t + (sqrt(α+1)-1)·F̄ and V the diagonal of the top
/// moment-matrix eigenvalues.
struct RotationPair {
  Matrix h_r;
  Matrix h_c;
  Vector v_r;
  Vector v_c;
  bool degenerate = false;  // condition number of H_R or H_C above 1e8

  RotationPair(Matrix hr, Matrix hc, Vector vr, Vector vc)
      : h_r(std::move(hr)), h_c(std::move(hc)), v_r(std::move(vr)), v_c(std::move(vc)) {
    detail::require(h_r.allFinite() && h_c.allFinite(),
                    "RotationPair: non-finite rotation");
    for (Eigen::Index i = 0; i < v_r.size(); ++i) {
      detail::require(v_r(i) > 0.0, "RotationPair: V_R must be strictly positive");
    }
    for (Eigen::Index i = 0; i < v_c.size(); ++i) {
      detail::require(v_c(i) > 0.0, "RotationPair: V_C must be strictly positive");
    }
    degenerate = condition(h_r) >= 1e8 || condition(h_c) >= 1e8;
  }

 private:
  static double condition(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m);
    const double smin = svd.singularValues().minCoeff();
    if (smin <= 0.0) return std::numeric_limits<double>::infinity();
    return svd.singularValues().maxCoeff() / smin;
  }
};

inline RotationPair rotations(const SimTruth& truth, const FactorEstimate& est) {
  const int p = truth.p();
  const int q = truth.q();
  const int k = truth.k();
  const int r = truth.r();
  const int t_count = truth.t_count();
  if (est.r_hat.rows() != p || est.c_hat.rows() != q || est.k() != k ||
      est.r() != r || static_cast<int>(est.f_hat.size()) != t_count) {
    throw std::invalid_argument("rotations: truth and estimate shapes differ");
  }
  for (int j = 0; j < k; ++j) {
    if (!(est.eig_r(j) > 0.0)) {
      throw std::runtime_error("rotations: V_R has a zero eigenvalue");
    }
  }
  for (int j = 0; j < r; ++j) {
    if (!(est.eig_c(j) > 0.0)) {
      throw std::runtime_error("rotations: V_C has a zero eigenvalue");
    }
  }

  const double alpha_tilde = std::sqrt(est.alpha_weight + 1.0) - 1.0;
  Matrix fbar = Matrix::Zero(k, r);
  for (const auto& f : truth.F_series) fbar += f;
  fbar /= static_cast<double>(t_count);

  const Matrix ctc = truth.C.transpose() * truth.C;
  const Matrix rtr = truth.R.transpose() * truth.R;
  Matrix sum_r = Matrix::Zero(k, k);
  Matrix sum_c = Matrix::Zero(r, r);
  for (const auto& f : truth.F_series) {
    const Matrix ft = f + alpha_tilde * fbar;
    sum_r.noalias() += ft * ctc * ft.transpose();
    sum_c.noalias() += ft.transpose() * rtr * ft;
  }
  const double scale = 1.0 / (static_cast<double>(p) * q * t_count);
  const Matrix h_r = scale * sum_r * truth.R.transpose() * est.r_hat *
                     est.eig_r.cwiseInverse().asDiagonal();
  const Matrix h_c = scale * sum_c * truth.C.transpose() * est.c_hat *
                     est.eig_c.cwiseInverse().asDiagonal();
  return RotationPair(h_r, h_c, est.eig_r, est.eig_c);
}

/// Per-t spectral-norm loss ‖F̂_t − H_R⁻¹ F_t H_C⁻¹'‖₂.
inline std::vector<double> factor_loss(const SimTruth& truth,
                                       const FactorEstimate& est,
                                       const RotationPair& rot) {
  if (static_cast<int>(est.f_hat.size()) != truth.t_count()) {
    throw std::invalid_argument("factor_loss: length mismatch");
  }
  const Eigen::PartialPivLU<Matrix> lu_r(rot.h_r);
  const Eigen::PartialPivLU<Matrix> lu_c(rot.h_c);
  std::vector<double> losses;
  losses.reserve(est.f_hat.size());
  for (size_t t = 0; t < est.f_hat.size(); ++t) {
    const Matrix left = lu_r.solve(truth.F_series[t]);           // H_R⁻¹ F_t
    const Matrix rotated = lu_c.solve(left.transpose()).transpose();  // · H_C⁻¹'
    losses.push_back(spectral_norm(est.f_hat[t] - rotated));
  }
  return losses;
}

/// log‖β̂⊗α̂ − (H_C'β)⊗(H_R'α)‖_F². An exact match would be log(0) and is
/// reported as an error instead.
inline double kron_loss(const SimTruth& truth, const LoadingEstimate& loadings,
                        const RotationPair& rot) {
  const Vector rotated_alpha = rot.h_r.transpose() * truth.alpha_vec;
  const Vector rotated_beta = rot.h_c.transpose() * truth.beta_vec;
  const Vector diff = kron(loadings.beta_vec, loadings.alpha_vec) -
                      kron(rotated_beta, rotated_alpha);
  const double sq = diff.squaredNorm();
  if (sq == 0.0) {
    throw std::runtime_error("kron_loss: exact match (loss would be -inf)");
  }
  return std::log(sq);
}

/// MSFE = (1/n)·Σ (ŷ − y)².
inline double msfe(const Vector& pred, const Vector& actual) {
  if (pred.size() == 0) throw std::invalid_argument("msfe: empty input");
  if (pred.size() != actual.size()) {
    throw std::invalid_argument("msfe: length mismatch");
  }
  return (pred - actual).squaredNorm() / static_cast<double>(pred.size());
}

struct DMResult {
  double statistic;
  double p_value;
  Vector loss_diff;
};

/// Diebold–Mariano comparison with Bartlett long-run variance at lag h-1 and
/// a two-sided normal reference.
inline DMResult dm_test(const Vector& loss_a, const Vector& loss_b, int horizon) {
  if (loss_a.size() != loss_b.size()) {
    throw std::invalid_argument("dm_test: length mismatch");
  }
  const int n = static_cast<int>(loss_a.size());
  if (n < 5) throw std::invalid_argument("dm_test: need at least 5 loss pairs");
  if (horizon < 1) throw std::invalid_argument("dm_test: horizon must be >= 1");
  const Vector d = loss_a - loss_b;
  const double dbar = d.mean();
  const Vector centered = d.array() - dbar;
  auto gamma = [&](int lag) {
    double s = 0.0;
    for (int t = lag; t < n; ++t) s += centered(t) * centered(t - lag);
    return s / static_cast<double>(n);
  };
  double lrv = gamma(0);
  for (int lag = 1; lag <= horizon - 1 && lag < n; ++lag) {
    lrv += 2.0 * (1.0 - static_cast<double>(lag) / horizon) * gamma(lag);
  }
  if (lrv <= 0.0) {
    if (dbar == 0.0) return DMResult{0.0, 1.0, d};  // identical losses
    throw std::runtime_error("dm_test: zero variance of the loss differential");
  }
  const double stat = dbar / std::sqrt(lrv / n);
  const double p = std::erfc(std::abs(stat) / std::sqrt(2.0));
  return DMResult{stat, p, d};
}

struct Fold {
  int start;  // first y-time of the fold
  int size;
};

/// Splits the last floor(test_fraction·T) time points into n_folds
/// contiguous folds, sizes balanced by largest remainder (earlier folds
/// take the extra point).
inline std::vector<Fold> cv_folds(int t_total, int n_folds, double test_fraction) {
  if (n_folds < 1 || !(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw std::invalid_argument("cv_folds: invalid fold configuration");
  }
  const int n_test = static_cast<int>(std::floor(test_fraction * t_total));
  if (n_test < n_folds) {
    throw std::invalid_argument("cv_folds: insufficient data (a fold would be empty)");
  }
  const int base = n_test / n_folds;
  const int rem = n_test % n_folds;
  std::vector<Fold> folds;
  folds.reserve(static_cast<size_t>(n_folds));
  int start = t_total - n_test;
  for (int i = 0; i < n_folds; ++i) {
    const int size = base + (i < rem ? 1 : 0);
    folds.push_back(Fold{start, size});
    start += size;
  }
  return folds;
}

struct CvReport {
  std::vector<double> fold_msfe;
  double mean_msfe;
  std::vector<Vector> predictions;

  CvReport(std::vector<double> msfes, std::vector<Vector> preds)
      : fold_msfe(std::move(msfes)), mean_msfe(0.0), predictions(std::move(preds)) {
    detail::require(!fold_msfe.empty(), "CvReport: no folds");
    double s = 0.0;
    for (double m : fold_msfe) {
      detail::require(m >= 0.0 && std::isfinite(m), "CvReport: invalid fold MSFE");
      s += m;
    }
    mean_msfe = s / static_cast<double>(fold_msfe.size());
  }
};

/// One rolling-window evaluation step: `fit(n_train)` trains on times
/// [0, n_train) and returns a predictor mapping a y-time to its forecast.
using FitFunction = std::function<std::function<double(int)>(int)>;

inline CvReport rolling_cv_generic(int t_total, int n_folds, double test_fraction,
                                   const Vector& y_actual, const FitFunction& fit) {
  if (y_actual.size() != t_total) {
    throw std::invalid_argument("rolling_cv: target length mismatch");
  }
  const auto folds = cv_folds(t_total, n_folds, test_fraction);
  std::vector<double> msfes;
  std::vector<Vector> preds;
  for (const auto& fold : folds) {
    const auto predict = fit(fold.start);
    Vector pred(fold.size), actual(fold.size);
    for (int i = 0; i < fold.size; ++i) {
      pred(i) = predict(fold.start + i);
      actual(i) = y_actual(fold.start + i);
    }
    msfes.push_back(msfe(pred, actual));
    preds.push_back(std::move(pred));
  }
  return CvReport(std::move(msfes), std::move(preds));
}

struct CvConfig {
  pipeline::Config pipeline_cfg;
  int folds = 10;
  double test_fraction = 0.2;
};

/// Rolling-window CV of the α-PCA-LSE pipeline: each fold refits screening,
/// factors and loadings on all data strictly before the fold.
inline CvReport rolling_cv(const MatrixSeries& series, const ScalarSeries& target,
                           const CvConfig& cfg) {
  validate(series, target, cfg.pipeline_cfg.horizon);
  const int h = cfg.pipeline_cfg.horizon;
  const auto fit_fn = [&](int n_train) {
    const auto window_x = subrange(series, 0, n_train);
    const auto window_y = subrange(target, 0, n_train);
    auto fitted = std::make_shared<pipeline::Fit>(
        pipeline::fit(window_x, window_y, cfg.pipeline_cfg));
    const int pairs = n_train - h;
    if (pairs < 5 * (fitted->config.k + fitted->config.r)) {
      throw std::runtime_error(
          "rolling_cv: training window shorter than 5(k+r) pairs");
    }
    return std::function<double(int)>([&series, fitted, h](int y_time) {
      return fitted->predict(series.values[static_cast<size_t>(y_time - h)]);
    });
  };
  return rolling_cv_generic(series.size(), cfg.folds, cfg.test_fraction,
                            target.values, fit_fn);
}

}  // namespace mdix::eval
