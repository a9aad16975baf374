#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "mdix/alpha_pca.hpp"
#include "mdix/bilinear_lse.hpp"
#include "mdix/evaluate.hpp"
#include "mdix/rng.hpp"
#include "mdix/screening.hpp"
#include "mdix/stats.hpp"
#include "mdix/threading.hpp"
#include "mdix/types.hpp"

namespace mdix::sim {

inline constexpr int kMarBurnIn = 200;

struct SimConfig {
  int p = 10;
  int q = 10;
  int k = 3;
  int r = 2;
  int T = 100;
  int horizon = 1;
  FactorKind factor_kind = FactorKind::matrix_normal;
  NoiseKind noise_kind = NoiseKind::iid;
  double alpha_weight = 0.0;  // estimation hyperparameter, not part of the DGP
  int replications = 200;
  std::uint64_t seed = 0;
  double noise_scale = 1.0;
  double sigma2 = 1.0;  // variance of the target innovation e_t

  void check() const {
    if (p < 1 || q < 1 || k < 1 || r < 1 || k > p || r > q || T < 2 ||
        horizon < 1 || replications < 1 || noise_scale < 0.0 || sigma2 < 0.0 ||
        !(alpha_weight >= -1.0)) {
      throw std::invalid_argument("SimConfig: invalid configuration");
    }
  }
};

namespace detail {

inline std::uint64_t fold_bits(std::uint64_t acc, std::uint64_t v) {
  return rng::splitmix64(acc ^ v);
}

// Stream id derived from the DGP-relevant fields only, so the same data is
// drawn no matter which estimation settings consume it.
inline std::uint64_t config_stream(const SimConfig& cfg) {
  std::uint64_t acc = 0x6d646978ULL;
  acc = fold_bits(acc, static_cast<std::uint64_t>(cfg.p));
  acc = fold_bits(acc, static_cast<std::uint64_t>(cfg.q));
  acc = fold_bits(acc, static_cast<std::uint64_t>(cfg.k));
  acc = fold_bits(acc, static_cast<std::uint64_t>(cfg.r));
  acc = fold_bits(acc, static_cast<std::uint64_t>(cfg.T));
  acc = fold_bits(acc, static_cast<std::uint64_t>(cfg.horizon));
  acc = fold_bits(acc, static_cast<std::uint64_t>(cfg.factor_kind));
  acc = fold_bits(acc, static_cast<std::uint64_t>(cfg.noise_kind));
  acc = fold_bits(acc, std::bit_cast<std::uint64_t>(cfg.noise_scale));
  acc = fold_bits(acc, std::bit_cast<std::uint64_t>(cfg.sigma2));
  return acc;
}

inline Matrix gaussian_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = gauss(rng);
  }
  return m;
}

inline Matrix uniform_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = unif(rng);
  }
  return m;
}

// Diagonal of a MAR(1) coefficient matrix, entries strictly inside (-1,1).
inline Vector stationary_diag(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Vector d(n);
  for (int i = 0; i < n; ++i) {
    double v = unif(rng);
    while (!(v > -1.0 && v < 1.0)) v = unif(rng);
    d(i) = v;
  }
  return d;
}

// MAR(1) recursion A_t = diag(d1)·A_{t-1}·diag(d2)' + Z_t from a zero start,
// discarding kMarBurnIn steps.
inline std::vector<Matrix> mar1_series(int t_count, const Vector& d1,
                                       const Vector& d2, std::mt19937_64& rng) {
  const int rows = static_cast<int>(d1.size());
  const int cols = static_cast<int>(d2.size());
  std::vector<Matrix> out;
  out.reserve(static_cast<size_t>(t_count));
  Matrix state = Matrix::Zero(rows, cols);
  for (int t = 0; t < kMarBurnIn + t_count; ++t) {
    Matrix next = d1.asDiagonal() * state * d2.asDiagonal();
    next += gaussian_matrix(rows, cols, rng);
    state = std::move(next);
    if (t >= kMarBurnIn) out.push_back(state);
  }
  return out;
}

// Symmetric square root of the equicorrelation matrix (diag 1, off-diag c).
inline Matrix equicorr_sqrt(int n, double off_diag) {
  Matrix m = Matrix::Constant(n, n, off_diag);
  m.diagonal().setOnes();
  const EigPair eig = sym_eig(m);
  return eig.eigenvectors * eig.eigenvalues.cwiseMax(0.0).cwiseSqrt().asDiagonal() *
         eig.eigenvectors.transpose();
}

struct TruthParams {
  Matrix R;
  Matrix C;
  Vector alpha;
  Vector beta;
};

// Draw order is fixed: R, C, α, β.
inline TruthParams draw_truth_params(const SimConfig& cfg, std::mt19937_64& rng) {
  TruthParams out;
  out.R = uniform_matrix(cfg.p, cfg.k, rng);
  out.C = uniform_matrix(cfg.q, cfg.r, rng);
  std::normal_distribution<double> gauss(0.0, 1.0);
  out.alpha.resize(cfg.k);
  double norm = 0.0;
  while (norm == 0.0) {
    for (int i = 0; i < cfg.k; ++i) out.alpha(i) = gauss(rng);
    norm = out.alpha.norm();
  }
  out.alpha /= norm;
  out.beta.resize(cfg.r);
  for (int i = 0; i < cfg.r; ++i) out.beta(i) = gauss(rng);
  return out;
}

struct DrawnPaths {
  std::vector<Matrix> factors;
  std::vector<Matrix> noise;
  Vector target_innovations;
  Vector phi1, phi2, psi1, psi2;
};

// Draw order is fixed: factor coefficients + path, noise coefficients +
// path, target innovations.
inline DrawnPaths draw_paths(const SimConfig& cfg, std::mt19937_64& rng) {
  DrawnPaths out;
  if (cfg.factor_kind == FactorKind::mar1) {
    out.phi1 = stationary_diag(cfg.k, rng);
    out.phi2 = stationary_diag(cfg.r, rng);
    out.factors = mar1_series(cfg.T, out.phi1, out.phi2, rng);
  } else {
    out.factors.reserve(static_cast<size_t>(cfg.T));
    for (int t = 0; t < cfg.T; ++t) {
      out.factors.push_back(gaussian_matrix(cfg.k, cfg.r, rng));
    }
  }

  switch (cfg.noise_kind) {
    case NoiseKind::iid: {
      out.noise.reserve(static_cast<size_t>(cfg.T));
      for (int t = 0; t < cfg.T; ++t) {
        out.noise.push_back(gaussian_matrix(cfg.p, cfg.q, rng));
      }
      break;
    }
    case NoiseKind::mar1_noise: {
      out.psi1 = stationary_diag(cfg.p, rng);
      out.psi2 = stationary_diag(cfg.q, rng);
      out.noise = mar1_series(cfg.T, out.psi1, out.psi2, rng);
      break;
    }
    case NoiseKind::row_col_corr: {
      const Matrix u_sqrt = equicorr_sqrt(cfg.p, 1.0 / cfg.p);
      const Matrix v_sqrt = equicorr_sqrt(cfg.q, 1.0 / cfg.q);
      out.noise.reserve(static_cast<size_t>(cfg.T));
      for (int t = 0; t < cfg.T; ++t) {
        out.noise.push_back(u_sqrt * gaussian_matrix(cfg.p, cfg.q, rng) * v_sqrt);
      }
      break;
    }
  }
  if (cfg.noise_scale != 1.0) {
    for (auto& e : out.noise) e *= cfg.noise_scale;
  }

  std::normal_distribution<double> gauss(0.0, 1.0);
  const double sd = std::sqrt(cfg.sigma2);
  out.target_innovations.resize(cfg.T);
  for (int t = 0; t < cfg.T; ++t) out.target_innovations(t) = sd * gauss(rng);
  return out;
}

}  // namespace detail

struct Replication {
  SimTruth truth;
  MatrixSeries series;
  ScalarSeries target;
};

namespace detail {

inline Replication assemble(const SimConfig& cfg, TruthParams params,
                            DrawnPaths paths, std::uint64_t derived_seed) {
  std::vector<Matrix> x;
  x.reserve(static_cast<size_t>(cfg.T));
  for (int t = 0; t < cfg.T; ++t) {
    x.push_back(params.R * paths.factors[static_cast<size_t>(t)] *
                    params.C.transpose() +
                paths.noise[static_cast<size_t>(t)]);
  }
  // y_{t+h} = α'F_tβ + e_{t+h}; the first h values carry only innovations.
  Vector y(cfg.T);
  for (int t = 0; t < cfg.T; ++t) {
    y(t) = paths.target_innovations(t);
    if (t >= cfg.horizon) {
      y(t) += params.alpha.dot(
          paths.factors[static_cast<size_t>(t - cfg.horizon)] * params.beta);
    }
  }
  auto times = default_time_index(cfg.T);
  SimTruth truth(std::move(params.R), std::move(params.C), std::move(paths.factors),
                 std::move(params.alpha), std::move(params.beta), cfg.noise_kind,
                 cfg.factor_kind, std::move(paths.phi1), std::move(paths.phi2),
                 std::move(paths.psi1), std::move(paths.psi2), cfg.sigma2,
                 cfg.horizon, derived_seed);
  return Replication{std::move(truth), MatrixSeries(std::move(x), times),
                     ScalarSeries(std::move(y), times)};
}

}  // namespace detail

/// One replication of the §-style DGP; the random stream is a pure function
/// of (cfg.seed, rep_index).
inline Replication gen_replication(const SimConfig& cfg, int rep_index) {
  cfg.check();
  const std::uint64_t derived =
      rng::derive_seed(cfg.seed ^ detail::config_stream(cfg),
                       rng::kStreamReplication, static_cast<std::uint64_t>(rep_index));
  std::mt19937_64 rng(derived);
  auto params = detail::draw_truth_params(cfg, rng);
  auto paths = detail::draw_paths(cfg, rng);
  return detail::assemble(cfg, std::move(params), std::move(paths), derived);
}

/// Replication whose observation matrix is padded with extra pure-noise
/// rows/columns (appended after the signal block).
inline Replication gen_padded_replication(const SimConfig& cfg, int extra_rows,
                                          int extra_cols, int rep_index) {
  if (extra_rows < 0 || extra_cols < 0) {
    throw std::invalid_argument("gen_padded_replication: negative padding");
  }
  cfg.check();
  const std::uint64_t derived =
      rng::derive_seed(cfg.seed ^ detail::config_stream(cfg),
                       rng::kStreamReplication, static_cast<std::uint64_t>(rep_index));
  std::mt19937_64 rng(derived);
  auto params = detail::draw_truth_params(cfg, rng);
  auto paths = detail::draw_paths(cfg, rng);
  auto base = detail::assemble(cfg, std::move(params), std::move(paths), derived);
  if (extra_rows == 0 && extra_cols == 0) return base;

  const int p_out = cfg.p + extra_rows;
  const int q_out = cfg.q + extra_cols;
  std::vector<Matrix> padded;
  padded.reserve(base.series.values.size());
  for (const auto& x : base.series.values) {
    Matrix big = detail::gaussian_matrix(p_out, q_out, rng);
    big.topLeftCorner(cfg.p, cfg.q) = x;
    padded.push_back(std::move(big));
  }
  return Replication{std::move(base.truth),
                     MatrixSeries(std::move(padded), base.series.time_index),
                     std::move(base.target)};
}

struct CellStat {
  double mean = 0.0;
  double sd = 0.0;
  int n = 0;
};

namespace detail {

template <typename PerRep>
CellStat replicate(int replications, int threads, PerRep&& per_rep) {
  std::vector<double> values(static_cast<size_t>(replications));
  parallel_for(replications, threads,
               [&](int rep) { values[static_cast<size_t>(rep)] = per_rep(rep); });
  return CellStat{stats::mean(values),
                  replications > 1 ? stats::sample_sd(values) : 0.0, replications};
}

}  // namespace detail

/// Mean over t of ‖F̂_t − H_R⁻¹F_tH_C⁻¹'‖₂ for one replication.
inline double factor_loss_one_rep(const SimConfig& cfg, int rep_index) {
  const auto repl = gen_replication(cfg, rep_index);
  const auto est = pca::fit(repl.series, cfg.k, cfg.r, cfg.alpha_weight);
  const auto rot = eval::rotations(repl.truth, est);
  const auto losses = eval::factor_loss(repl.truth, est, rot);
  return stats::mean(losses);
}

/// log‖β̂⊗α̂ − (H_C'β)⊗(H_R'α)‖_F² for one replication.
inline double kron_loss_one_rep(const SimConfig& cfg, int rep_index) {
  const auto repl = gen_replication(cfg, rep_index);
  const auto est = pca::fit(repl.series, cfg.k, cfg.r, cfg.alpha_weight);
  const auto loadings =
      lse::fit(est.f_hat, repl.target.values, cfg.horizon);
  const auto rot = eval::rotations(repl.truth, est);
  return eval::kron_loss(repl.truth, loadings, rot);
}

inline CellStat table1_cell(const SimConfig& cfg, int threads) {
  return detail::replicate(cfg.replications, threads,
                           [&](int rep) { return factor_loss_one_rep(cfg, rep); });
}

inline CellStat table2_cell(const SimConfig& cfg, int threads) {
  return detail::replicate(cfg.replications, threads,
                           [&](int rep) { return kron_loss_one_rep(cfg, rep); });
}

struct TableRow {
  FactorKind factor_kind;
  NoiseKind noise_kind;
  int p, q, T;
  CellStat stat;
};

inline const std::array<std::pair<FactorKind, NoiseKind>, 6>& dgp_combos() {
  static const std::array<std::pair<FactorKind, NoiseKind>, 6> combos{{
      {FactorKind::matrix_normal, NoiseKind::iid},
      {FactorKind::matrix_normal, NoiseKind::mar1_noise},
      {FactorKind::matrix_normal, NoiseKind::row_col_corr},
      {FactorKind::mar1, NoiseKind::iid},
      {FactorKind::mar1, NoiseKind::mar1_noise},
      {FactorKind::mar1, NoiseKind::row_col_corr},
  }};
  return combos;
}

inline const std::array<std::pair<int, int>, 3>& table_sizes() {
  static const std::array<std::pair<int, int>, 3> sizes{{{5, 10}, {10, 10}, {20, 20}}};
  return sizes;
}

/// Factor-loss grid: 6 DGP combos × 3 sizes × T ∈ {pq/2, pq, 2pq}.
inline std::vector<TableRow> run_table1(std::uint64_t seed, int replications,
                                        int threads) {
  std::vector<TableRow> rows;
  for (const auto& [fk, nk] : dgp_combos()) {
    for (const auto& [p, q] : table_sizes()) {
      for (int t_mult : {1, 2, 4}) {  // T = pq/2, pq, 2pq
        SimConfig cfg;
        cfg.p = p;
        cfg.q = q;
        cfg.T = p * q * t_mult / 2;
        cfg.factor_kind = fk;
        cfg.noise_kind = nk;
        cfg.replications = replications;
        cfg.seed = seed;
        rows.push_back(TableRow{fk, nk, p, q, cfg.T, table1_cell(cfg, threads)});
      }
    }
  }
  return rows;
}

/// Kron-loss grid: 6 DGP combos × 3 sizes × T ∈ {100, 200, 400, 5000}.
inline std::vector<TableRow> run_table2(std::uint64_t seed, int replications,
                                        int threads) {
  std::vector<TableRow> rows;
  for (const auto& [fk, nk] : dgp_combos()) {
    for (const auto& [p, q] : table_sizes()) {
      for (int t_len : {100, 200, 400, 5000}) {
        SimConfig cfg;
        cfg.p = p;
        cfg.q = q;
        cfg.T = t_len;
        cfg.factor_kind = fk;
        cfg.noise_kind = nk;
        cfg.replications = replications;
        cfg.seed = seed;
        rows.push_back(TableRow{fk, nk, p, q, t_len, table2_cell(cfg, threads)});
      }
    }
  }
  return rows;
}

struct Table3Row {
  double alpha_weight;
  double msfe_noisy;
  double msfe_refined;
  double reduction_pct;
  int n;
};

inline constexpr double kTable3Threshold = 0.06;
inline constexpr int kTable3ExtraRows = 5;
inline constexpr int kTable3ExtraCols = 5;

namespace detail {

// 80/20 chronological split: fit α-PCA + LSE on the training span, forecast
// the held-out tail.
inline double split_msfe(const MatrixSeries& series, const ScalarSeries& target,
                         int k, int r, double alpha_weight, int horizon) {
  const int t_total = series.size();
  const int n_test = t_total / 5;
  const int n_train = t_total - n_test;
  const auto train_x = subrange(series, 0, n_train);
  const auto train_y = subrange(target, 0, n_train);
  const auto est = pca::fit(train_x, k, r, alpha_weight);
  const auto loadings = lse::fit(est.f_hat, train_y.values, horizon);
  const double scale = 1.0 / (static_cast<double>(series.rows()) * series.cols());
  Vector pred(n_test), actual(n_test);
  for (int i = 0; i < n_test; ++i) {
    const int y_time = n_train + i;
    const Matrix f = scale * (est.r_hat.transpose() *
                              series.values[static_cast<size_t>(y_time - horizon)] *
                              est.c_hat);
    pred(i) = lse::forecast(f, loadings);
    actual(i) = target.values(y_time);
  }
  return eval::msfe(pred, actual);
}

}  // namespace detail

/// Screening study: (10,10) MAR(1)-factor signal padded to (15,15) with iid
/// noise, T = 1000, ρ_δ = 0.06, MSFE of the noisy vs refined pipeline over
/// the α grid −1…1 (step 0.1).
inline std::vector<Table3Row> run_table3(std::uint64_t seed, int replications,
                                         int threads) {
  SimConfig cfg;
  cfg.p = 10;
  cfg.q = 10;
  cfg.k = 3;
  cfg.r = 2;
  cfg.T = 1000;
  cfg.factor_kind = FactorKind::mar1;
  cfg.noise_kind = NoiseKind::iid;
  cfg.replications = replications;
  cfg.seed = seed;

  const int n_alpha = 21;
  std::vector<std::vector<double>> noisy(static_cast<size_t>(n_alpha)),
      refined(static_cast<size_t>(n_alpha));
  for (auto& v : noisy) v.resize(static_cast<size_t>(replications));
  for (auto& v : refined) v.resize(static_cast<size_t>(replications));

  parallel_for(replications, threads, [&](int rep) {
    const auto repl =
        gen_padded_replication(cfg, kTable3ExtraRows, kTable3ExtraCols, rep);
    const int n_train = cfg.T - cfg.T / 5;
    const auto train_x = subrange(repl.series, 0, n_train);
    const auto train_y = subrange(repl.target, 0, n_train);

    // Screening is fit on the training window only. When the threshold
    // would empty a dimension (or leave fewer than k rows / r columns),
    // fall back to the unscreened matrix for this replication.
    std::vector<int> rows, cols;
    try {
      const auto [unused, diag] =
          screening::refine(train_x, train_y, kTable3Threshold);
      rows = diag.kept_rows;
      cols = diag.kept_cols;
    } catch (const std::runtime_error&) {
      rows.clear();
    }
    const bool screen_ok = static_cast<int>(rows.size()) >= cfg.k &&
                           static_cast<int>(cols.size()) >= cfg.r;

    for (int a = 0; a < n_alpha; ++a) {
      const double alpha_weight = -1.0 + 0.1 * a;
      noisy[static_cast<size_t>(a)][static_cast<size_t>(rep)] = detail::split_msfe(
          repl.series, repl.target, cfg.k, cfg.r, alpha_weight, cfg.horizon);
      if (screen_ok) {
        const auto sliced = select_entries(repl.series, rows, cols);
        refined[static_cast<size_t>(a)][static_cast<size_t>(rep)] =
            detail::split_msfe(sliced, repl.target, cfg.k, cfg.r, alpha_weight,
                               cfg.horizon);
      } else {
        refined[static_cast<size_t>(a)][static_cast<size_t>(rep)] =
            noisy[static_cast<size_t>(a)][static_cast<size_t>(rep)];
      }
    }
  });

  std::vector<Table3Row> out;
  for (int a = 0; a < n_alpha; ++a) {
    const double mean_noisy = stats::mean(noisy[static_cast<size_t>(a)]);
    const double mean_refined = stats::mean(refined[static_cast<size_t>(a)]);
    out.push_back(Table3Row{-1.0 + 0.1 * a, mean_noisy, mean_refined,
                            100.0 * (1.0 - mean_refined / mean_noisy),
                            replications});
  }
  return out;
}

// Normality study over the PCA hyperparameter α ∈ {-1, 0, 1}: per-coordinate
// samples of α̂₁, β̂₁ and (β̂⊗α̂)₁ across replications, sign-aligned to the
// rotated truth, then standardized.
inline constexpr std::array<const char*, 3> kEstimandNames{"alpha1", "beta1",
                                                           "kron1"};

struct NormalitySamples {
  double pca_alpha;
  std::array<std::vector<double>, 3> raw;
  std::array<stats::Standardized, 3> standardized;
};

struct NormalityResult {
  std::vector<NormalitySamples> per_alpha;
  int replications;
};

inline NormalityResult run_normality(std::uint64_t seed, int replications,
                                     int threads) {
  SimConfig cfg;
  cfg.p = 10;
  cfg.q = 10;
  cfg.k = 3;
  cfg.r = 2;
  cfg.T = 400;
  cfg.replications = replications;
  cfg.seed = seed;
  cfg.check();

  // One truth (R, C, α, β) for the whole study; only F, E, e are redrawn.
  std::mt19937_64 truth_rng(
      rng::derive_seed(cfg.seed ^ detail::config_stream(cfg), rng::kStreamTruth));
  const auto params = detail::draw_truth_params(cfg, truth_rng);

  const std::array<double, 3> alphas{-1.0, 0.0, 1.0};
  std::vector<std::array<std::array<double, 3>, 3>> samples(
      static_cast<size_t>(replications));

  parallel_for(replications, threads, [&](int rep) {
    const std::uint64_t derived =
        rng::derive_seed(cfg.seed ^ detail::config_stream(cfg),
                         rng::kStreamReplication, static_cast<std::uint64_t>(rep));
    std::mt19937_64 rng_rep(derived);
    auto paths = detail::draw_paths(cfg, rng_rep);
    auto repl = detail::assemble(cfg, params, std::move(paths), derived);
    for (size_t a = 0; a < alphas.size(); ++a) {
      const auto est = pca::fit(repl.series, cfg.k, cfg.r, alphas[a]);
      const auto loadings = lse::fit(est.f_hat, repl.target.values, cfg.horizon);
      const auto rot = eval::rotations(repl.truth, est);
      const Vector target_alpha = rot.h_r.transpose() * repl.truth.alpha_vec;
      const double sign = loadings.alpha_vec.dot(target_alpha) < 0.0 ? -1.0 : 1.0;
      samples[static_cast<size_t>(rep)][a][0] = sign * loadings.alpha_vec(0);
      samples[static_cast<size_t>(rep)][a][1] = sign * loadings.beta_vec(0);
      samples[static_cast<size_t>(rep)][a][2] =
          loadings.beta_vec(0) * loadings.alpha_vec(0);
    }
  });

  NormalityResult out;
  out.replications = replications;
  for (size_t a = 0; a < alphas.size(); ++a) {
    NormalitySamples entry;
    entry.pca_alpha = alphas[a];
    for (int est = 0; est < 3; ++est) {
      auto& raw = entry.raw[static_cast<size_t>(est)];
      raw.resize(static_cast<size_t>(replications));
      for (int rep = 0; rep < replications; ++rep) {
        raw[static_cast<size_t>(rep)] =
            samples[static_cast<size_t>(rep)][a][static_cast<size_t>(est)];
      }
      entry.standardized[static_cast<size_t>(est)] = stats::standardize(raw);
    }
    out.per_alpha.push_back(std::move(entry));
  }
  return out;
}

}  // namespace mdix::sim
