#include "mdix/simulate.hpp"

#include <gtest/gtest.h>

#include <cmath>

using mdix::Matrix;
using mdix::Vector;
using mdix::sim::SimConfig;

TEST(GenReplication, DeterministicPerSeedAndIndex) {
  SimConfig cfg;
  cfg.p = 5;
  cfg.q = 4;
  cfg.T = 30;
  cfg.seed = 99;
  const auto a = mdix::sim::gen_replication(cfg, 3);
  const auto b = mdix::sim::gen_replication(cfg, 3);
  const auto c = mdix::sim::gen_replication(cfg, 4);
  for (int t = 0; t < cfg.T; ++t) {
    EXPECT_TRUE((a.series.values[static_cast<size_t>(t)].array() ==
                 b.series.values[static_cast<size_t>(t)].array())
                    .all());
  }
  EXPECT_TRUE((a.target.values.array() == b.target.values.array()).all());
  EXPECT_FALSE((a.series.values[0].array() == c.series.values[0].array()).all());
}

TEST(GenReplication, TargetFollowsBilinearEquation) {
  SimConfig cfg;
  cfg.p = 6;
  cfg.q = 5;
  cfg.T = 5000;
  cfg.seed = 11;
  const auto repl = mdix::sim::gen_replication(cfg, 0);
  // y_{t+h} − α'F_tβ is the unit-variance innovation sequence.
  std::vector<double> resid;
  for (int t = 0; t + cfg.horizon < cfg.T; ++t) {
    resid.push_back(repl.target.values(t + cfg.horizon) -
                    repl.truth.alpha_vec.dot(
                        repl.truth.F_series[static_cast<size_t>(t)] *
                        repl.truth.beta_vec));
  }
  EXPECT_NEAR(mdix::stats::mean(resid), 0.0, 0.05);
  EXPECT_NEAR(mdix::stats::sample_sd(resid), 1.0, 0.05);
}

TEST(GenReplication, Mar1CoefficientsStationaryByConstruction) {
  SimConfig cfg;
  cfg.p = 4;
  cfg.q = 4;
  cfg.T = 20;
  cfg.factor_kind = mdix::FactorKind::mar1;
  cfg.noise_kind = mdix::NoiseKind::mar1_noise;
  for (int rep = 0; rep < 25; ++rep) {
    const auto repl = mdix::sim::gen_replication(cfg, rep);
    for (int i = 0; i < repl.truth.phi1.size(); ++i) {
      EXPECT_GT(repl.truth.phi1(i), -1.0);
      EXPECT_LT(repl.truth.phi1(i), 1.0);
    }
    for (int i = 0; i < repl.truth.psi1.size(); ++i) {
      EXPECT_GT(repl.truth.psi1(i), -1.0);
      EXPECT_LT(repl.truth.psi1(i), 1.0);
    }
  }
}

TEST(Mar1Series, ZeroCoefficientsReduceToWhiteNoise) {
  std::mt19937_64 rng_a(7);
  std::mt19937_64 rng_b(7);
  const Vector zero2 = Vector::Zero(2);
  const Vector zero3 = Vector::Zero(3);
  const auto series = mdix::sim::detail::mar1_series(10, zero2, zero3, rng_a);
  // With Φ = 0 each step equals its innovation; replaying the stream must
  // reproduce the same draws.
  for (int t = 0; t < mdix::sim::kMarBurnIn + 10; ++t) {
    const Matrix innovation = mdix::sim::detail::gaussian_matrix(2, 3, rng_b);
    if (t >= mdix::sim::kMarBurnIn) {
      EXPECT_TRUE(
          (series[static_cast<size_t>(t - mdix::sim::kMarBurnIn)].array() ==
           innovation.array())
              .all());
    }
  }
}

TEST(EquicorrNoise, ScalarCaseIsStandardNormal) {
  EXPECT_NEAR(mdix::sim::detail::equicorr_sqrt(1, 1.0)(0, 0), 1.0, 1e-12);
}

// Sample covariance of vec(E_t) under the row/column-correlated regime must
// match the Kronecker covariance V_E ⊗ U_E.
TEST(EquicorrNoise, VecCovarianceMatchesKroneckerOracle) {
  const int p = 3, q = 3, n = 100000;
  const Matrix u_sqrt = mdix::sim::detail::equicorr_sqrt(p, 1.0 / p);
  const Matrix v_sqrt = mdix::sim::detail::equicorr_sqrt(q, 1.0 / q);
  std::mt19937_64 rng(5);
  Matrix cov = Matrix::Zero(p * q, p * q);
  for (int s = 0; s < n; ++s) {
    const Matrix e = u_sqrt * mdix::sim::detail::gaussian_matrix(p, q, rng) * v_sqrt;
    const Eigen::Map<const Vector> v(e.data(), p * q);
    cov.noalias() += v * v.transpose();
  }
  cov /= static_cast<double>(n);
  Matrix u_e = Matrix::Constant(p, p, 1.0 / p);
  u_e.diagonal().setOnes();
  Matrix v_e = Matrix::Constant(q, q, 1.0 / q);
  v_e.diagonal().setOnes();
  for (int a = 0; a < q; ++a) {
    for (int b = 0; b < q; ++b) {
      for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) {
          const double want = v_e(a, b) * u_e(i, j);
          EXPECT_NEAR(cov(a * p + i, b * p + j), want, 0.012);
        }
      }
    }
  }
}

TEST(PaddedReplication, SignalBlockMatchesBase) {
  SimConfig cfg;
  cfg.p = 4;
  cfg.q = 3;
  cfg.T = 25;
  cfg.seed = 21;
  const auto base = mdix::sim::gen_replication(cfg, 2);
  const auto padded = mdix::sim::gen_padded_replication(cfg, 2, 3, 2);
  EXPECT_EQ(padded.series.rows(), 6);
  EXPECT_EQ(padded.series.cols(), 6);
  for (int t = 0; t < cfg.T; ++t) {
    EXPECT_TRUE((padded.series.values[static_cast<size_t>(t)]
                     .topLeftCorner(4, 3)
                     .array() ==
                 base.series.values[static_cast<size_t>(t)].array())
                    .all());
  }
  EXPECT_TRUE((padded.target.values.array() == base.target.values.array()).all());
}

TEST(TableCells, ReproducibleAcrossThreadCounts) {
  SimConfig cfg;
  cfg.p = 5;
  cfg.q = 10;
  cfg.T = 25;
  cfg.replications = 8;
  cfg.seed = 3;
  const auto serial = mdix::sim::table1_cell(cfg, 1);
  const auto parallel = mdix::sim::table1_cell(cfg, 4);
  EXPECT_EQ(serial.mean, parallel.mean);
  EXPECT_EQ(serial.sd, parallel.sd);
}

TEST(Table3, SmokeRunProducesFiniteRows) {
  const auto rows = mdix::sim::run_table3(12345, 3, 1);
  ASSERT_EQ(rows.size(), 21u);
  EXPECT_DOUBLE_EQ(rows.front().alpha_weight, -1.0);
  EXPECT_DOUBLE_EQ(rows.back().alpha_weight, 1.0);
  for (const auto& row : rows) {
    EXPECT_TRUE(std::isfinite(row.msfe_noisy));
    EXPECT_TRUE(std::isfinite(row.msfe_refined));
    EXPECT_GT(row.msfe_noisy, 0.0);
    EXPECT_GT(row.msfe_refined, 0.0);
    EXPECT_EQ(row.n, 3);
  }
}

TEST(Normality, ShapesAndStandardization) {
  const auto result = mdix::sim::run_normality(7, 40, 1);
  ASSERT_EQ(result.per_alpha.size(), 3u);  // 3 estimands × 3 α values = 9 columns
  for (const auto& entry : result.per_alpha) {
    for (int est = 0; est < 3; ++est) {
      const auto& std_samples = entry.standardized[static_cast<size_t>(est)];
      ASSERT_EQ(std_samples.values.size(), 40u);
      EXPECT_FALSE(std_samples.degenerate);
      EXPECT_NEAR(mdix::stats::mean(std_samples.values), 0.0, 1e-10);
      EXPECT_NEAR(mdix::stats::sample_sd(std_samples.values), 1.0, 1e-10);
    }
  }
}

TEST(Normality, ZeroSpreadSamplesAreFlagged) {
  const std::vector<double> constant(25, 3.5);
  const auto out = mdix::stats::standardize(constant);
  EXPECT_TRUE(out.degenerate);
  for (double v : out.values) EXPECT_DOUBLE_EQ(v, 0.0);
}

TEST(QqHelpers, StandardNormalSampleHasHighQqCorrelation) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> sample(2000);
  for (auto& v : sample) v = gauss(rng);
  const auto std_sample = mdix::stats::standardize(sample);
  EXPECT_GT(mdix::stats::qq_correlation(std_sample.values), 0.995);
  // Heavy-tailed data scores visibly lower.
  std::vector<double> heavy(2000);
  std::cauchy_distribution<double> cauchy(0.0, 1.0);
  for (auto& v : heavy) v = cauchy(rng);
  EXPECT_LT(mdix::stats::qq_correlation(heavy), 0.9);
}
