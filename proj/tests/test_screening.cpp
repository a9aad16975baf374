#include "mdix/screening.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using mdix::Matrix;
using mdix::MatrixSeries;
using mdix::ScalarSeries;
using mdix::Vector;

namespace {

ScalarSeries make_target(std::initializer_list<double> vals) {
  Vector y(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index i = 0;
  for (double v : vals) y(i++) = v;
  return ScalarSeries(std::move(y));
}

// Panel whose (i,j) cell is scale_ij * y_t + noise_ij,t.
MatrixSeries panel_from_target(const ScalarSeries& y, const Matrix& scale,
                               double noise_sd, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Matrix> vals;
  for (int t = 0; t < y.size(); ++t) {
    Matrix x = scale * y.values(t);
    if (noise_sd > 0.0) {
      for (int i = 0; i < x.rows(); ++i) {
        for (int j = 0; j < x.cols(); ++j) x(i, j) += noise_sd * gauss(rng);
      }
    }
    vals.push_back(x);
  }
  return MatrixSeries(std::move(vals), y.time_index);
}

}  // namespace

TEST(CorrelationMap, PerfectAndAntiCorrelation) {
  const auto y = make_target({1.0, 2.0, -0.5, 3.0, 0.0});
  Matrix scale(2, 1);
  scale << 1.0, -1.0;
  const auto corr = mdix::screening::correlation_map(panel_from_target(y, scale, 0.0, 0), y);
  EXPECT_NEAR(corr(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(corr(1, 0), -1.0, 1e-12);
}

// x = (1,2,3,4) vs y = (1,3,2,4): ρ = 4/5.
TEST(CorrelationMap, HandComputedPearson) {
  const auto y = make_target({1.0, 3.0, 2.0, 4.0});
  std::vector<Matrix> vals;
  for (double v : {1.0, 2.0, 3.0, 4.0}) vals.push_back(Matrix::Constant(1, 1, v));
  const auto corr = mdix::screening::correlation_map(MatrixSeries(std::move(vals), y.time_index), y);
  EXPECT_NEAR(corr(0, 0), 0.8, 1e-12);
}

TEST(CorrelationMap, ZeroVarianceCellMapsToZeroWithFlag) {
  const auto y = make_target({1.0, 2.0, 3.0, 4.0});
  std::vector<Matrix> vals;
  for (int t = 0; t < 4; ++t) {
    Matrix x(1, 2);
    x << 5.0, static_cast<double>(t);  // first cell constant
    vals.push_back(x);
  }
  int degenerate = -1;
  const auto corr = mdix::screening::correlation_map(
      MatrixSeries(std::move(vals), y.time_index), y, &degenerate);
  EXPECT_DOUBLE_EQ(corr(0, 0), 0.0);
  EXPECT_NEAR(corr(0, 1), 1.0, 1e-12);
  EXPECT_EQ(degenerate, 1);
}

TEST(CorrelationMap, ErrorsOnDegenerateInput) {
  const auto y2 = make_target({1.0, 2.0});
  std::vector<Matrix> two(2, Matrix::Zero(1, 1));
  EXPECT_THROW(mdix::screening::correlation_map(MatrixSeries(std::move(two), y2.time_index), y2),
               std::invalid_argument);
  const auto yc = make_target({3.0, 3.0, 3.0, 3.0});
  std::vector<Matrix> vals;
  for (int t = 0; t < 4; ++t) vals.push_back(Matrix::Constant(1, 1, static_cast<double>(t)));
  EXPECT_THROW(mdix::screening::correlation_map(MatrixSeries(std::move(vals), yc.time_index), yc),
               std::invalid_argument);
}

TEST(Refine, ZeroThresholdKeepsEverything) {
  const auto y = make_target({0.4, -1.0, 2.0, 0.3, -0.7, 1.4});
  Matrix scale(3, 2);
  scale << 1.0, 0.5, -0.2, 0.8, 0.0, -1.0;
  const auto panel = panel_from_target(y, scale, 0.5, 3);
  const auto [refined, result] = mdix::screening::refine(panel, y, 0.0, 0.0);
  EXPECT_EQ(refined.rows(), 3);
  EXPECT_EQ(refined.cols(), 2);
  for (int t = 0; t < refined.size(); ++t) {
    EXPECT_TRUE((refined.values[static_cast<size_t>(t)].array() ==
                 panel.values[static_cast<size_t>(t)].array())
                    .all());
  }
}

TEST(Refine, DropsRowBelowThreshold) {
  // Row 1 carries no signal: its mean |ρ| stays near zero while row 0 is
  // perfectly correlated.
  const auto y = make_target({1.0, -2.0, 0.5, 3.0, -1.5, 2.5, 0.1, -0.8});
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Matrix> vals;
  for (int t = 0; t < y.size(); ++t) {
    Matrix x(2, 2);
    x(0, 0) = y.values(t);
    x(0, 1) = -y.values(t);
    x(1, 0) = gauss(rng) * 0.01 + 7.0;
    x(1, 1) = gauss(rng) * 0.01 - 3.0;
    vals.push_back(x);
  }
  const auto [refined, result] =
      mdix::screening::refine(MatrixSeries(std::move(vals), y.time_index), y, 0.9, 0.0);
  EXPECT_EQ(result.kept_rows, std::vector<int>{0});
  EXPECT_EQ(refined.rows(), 1);
  EXPECT_EQ(refined.cols(), 2);
}

TEST(Refine, ConstructedRowMeanJustBelowThresholdIsRemoved) {
  // Force ρ̄_row1 ≈ 0.05 < 0.06 by mixing one weak cell with noise cells.
  std::mt19937_64 rng(23);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int t_count = 4000;
  Vector yv(t_count);
  for (int t = 0; t < t_count; ++t) yv(t) = gauss(rng);
  const ScalarSeries y(std::move(yv));
  std::vector<Matrix> vals;
  std::mt19937_64 rng2(29);
  for (int t = 0; t < t_count; ++t) {
    Matrix x(2, 2);
    x(0, 0) = y.values(t) + 0.1 * gauss(rng2);   // strong row
    x(0, 1) = -y.values(t) + 0.1 * gauss(rng2);  // strong row
    // weak row: correlation ≈ 0.1 in one cell, 0 in the other → mean ≈ 0.05
    x(1, 0) = 0.1 * y.values(t) + gauss(rng2);
    x(1, 1) = gauss(rng2);
    vals.push_back(x);
  }
  const auto [refined, result] =
      mdix::screening::refine(MatrixSeries(std::move(vals), y.time_index), y, 0.06, 0.0);
  EXPECT_LT(result.row_means(1), 0.06);
  EXPECT_EQ(result.kept_rows, std::vector<int>{0});
}

TEST(Refine, ThresholdMonotonicity) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector yv(50);
  for (int t = 0; t < 50; ++t) yv(t) = gauss(rng);
  const ScalarSeries y(std::move(yv));
  Matrix scale(4, 3);
  std::mt19937_64 rng2(6);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 3; ++j) scale(i, j) = gauss(rng2) * 0.3;
  }
  const auto panel = panel_from_target(y, scale, 1.0, 7);
  std::vector<int> prev_rows, prev_cols;
  bool first = true;
  for (double theta : {0.0, 0.05, 0.1, 0.2, 0.4}) {
    std::vector<int> rows, cols;
    try {
      const auto [refined, result] = mdix::screening::refine(panel, y, theta, theta);
      rows = result.kept_rows;
      cols = result.kept_cols;
    } catch (const std::runtime_error&) {
      rows.clear();
      cols.clear();
    }
    if (!first) {
      EXPECT_TRUE(std::includes(prev_rows.begin(), prev_rows.end(), rows.begin(), rows.end()));
      EXPECT_TRUE(std::includes(prev_cols.begin(), prev_cols.end(), cols.begin(), cols.end()));
    }
    prev_rows = rows;
    prev_cols = cols;
    first = false;
  }
}

TEST(Refine, PermutationEquivariance) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector yv(60);
  for (int t = 0; t < 60; ++t) yv(t) = gauss(rng);
  const ScalarSeries y(std::move(yv));
  Matrix scale(3, 2);
  scale << 1.0, 0.9, 0.02, 0.01, 0.6, 0.7;
  const auto panel = panel_from_target(y, scale, 0.4, 9);
  const std::vector<int> perm{2, 0, 1};
  std::vector<Matrix> permuted;
  for (const auto& x : panel.values) {
    Matrix px(3, 2);
    for (int i = 0; i < 3; ++i) px.row(i) = x.row(perm[static_cast<size_t>(i)]);
    permuted.push_back(px);
  }
  const double theta = 0.2;
  const auto [r1, s1] = mdix::screening::refine(panel, y, theta, 0.0);
  const auto [r2, s2] =
      mdix::screening::refine(MatrixSeries(std::move(permuted), y.time_index), y, theta, 0.0);
  std::vector<int> mapped;
  for (int i = 0; i < 3; ++i) {
    if (std::find(s1.kept_rows.begin(), s1.kept_rows.end(), perm[static_cast<size_t>(i)]) !=
        s1.kept_rows.end()) {
      mapped.push_back(i);
    }
  }
  EXPECT_EQ(s2.kept_rows, mapped);
}

TEST(Refine, AllRemovedIsAnError) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector yv(40);
  for (int t = 0; t < 40; ++t) yv(t) = gauss(rng);
  const ScalarSeries y(std::move(yv));
  const auto panel = panel_from_target(y, Matrix::Zero(2, 2), 1.0, 19);
  try {
    mdix::screening::refine(panel, y, 0.9, 0.9);
    FAIL() << "expected an error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("threshold"), std::string::npos);
  }
  EXPECT_THROW(mdix::screening::refine(panel, y, 1.0, 0.0), std::invalid_argument);
}
