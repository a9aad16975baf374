#include "mdix/linalg.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using mdix::Matrix;
using mdix::Vector;

namespace {

Matrix random_symmetric(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = gauss(rng);
  }
  return 0.5 * (a + a.transpose()).eval();
}

}  // namespace

TEST(SymEig, Identity) {
  const auto eig = mdix::sym_eig(Matrix::Identity(3, 3));
  for (int j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(eig.eigenvalues(j), 1.0);
}

TEST(SymEig, Diagonal) {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 4.0;
  a(1, 1) = 1.0;
  const auto eig = mdix::sym_eig(a);
  EXPECT_DOUBLE_EQ(eig.eigenvalues(0), 4.0);
  EXPECT_DOUBLE_EQ(eig.eigenvalues(1), 1.0);
  EXPECT_NEAR(eig.eigenvectors(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(eig.eigenvectors(1, 1), 1.0, 1e-12);
}

// [[2,1],[1,2]] has characteristic polynomial (λ-3)(λ-1).
TEST(SymEig, TwoByTwoByHand) {
  Matrix a(2, 2);
  a << 2.0, 1.0, 1.0, 2.0;
  const auto eig = mdix::sym_eig(a);
  EXPECT_NEAR(eig.eigenvalues(0), 3.0, 1e-12);
  EXPECT_NEAR(eig.eigenvalues(1), 1.0, 1e-12);
  const double s = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(eig.eigenvectors(0, 0), s, 1e-12);
  EXPECT_NEAR(eig.eigenvectors(1, 0), s, 1e-12);
  EXPECT_NEAR(eig.eigenvectors(0, 1), s, 1e-12);
  EXPECT_NEAR(eig.eigenvectors(1, 1), -s, 1e-12);
}

TEST(SymEig, ReconstructionAndOrthonormality) {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    const Matrix a = random_symmetric(12, seed);
    const auto eig = mdix::sym_eig(a);
    const Matrix rec = eig.eigenvectors * eig.eigenvalues.asDiagonal() *
                       eig.eigenvectors.transpose();
    EXPECT_LE((rec - a).cwiseAbs().maxCoeff(), 1e-8 * mdix::spectral_norm(a));
    const Matrix vtv = eig.eigenvectors.transpose() * eig.eigenvectors;
    EXPECT_LE((vtv - Matrix::Identity(12, 12)).cwiseAbs().maxCoeff(), 1e-10);
    for (int j = 1; j < 12; ++j) {
      EXPECT_GE(eig.eigenvalues(j - 1), eig.eigenvalues(j));
    }
    // Residual of each eigenpair.
    for (int j = 0; j < 12; ++j) {
      const Vector res = a * eig.eigenvectors.col(j) -
                         eig.eigenvalues(j) * eig.eigenvectors.col(j);
      EXPECT_LE(res.norm(), 1e-8 * mdix::spectral_norm(a));
    }
  }
}

TEST(SymEig, DeterministicBits) {
  const Matrix a = random_symmetric(9, 42);
  const auto e1 = mdix::sym_eig(a);
  const auto e2 = mdix::sym_eig(a);
  EXPECT_TRUE((e1.eigenvalues.array() == e2.eigenvalues.array()).all());
  EXPECT_TRUE((e1.eigenvectors.array() == e2.eigenvectors.array()).all());
}

TEST(SymEig, RejectsBadInput) {
  Matrix asym(2, 2);
  asym << 1.0, 2.0, 0.0, 1.0;
  EXPECT_THROW(mdix::sym_eig(asym), std::invalid_argument);
  Matrix nan = Matrix::Zero(2, 2);
  nan(0, 1) = std::nan("");
  nan(1, 0) = std::nan("");
  EXPECT_THROW(mdix::sym_eig(nan), std::invalid_argument);
  EXPECT_THROW(mdix::sym_eig(Matrix::Zero(2, 3)), std::invalid_argument);
}

TEST(SolveSpd, IdentityAndDiagonal) {
  Vector b(2);
  b << 2.0, 8.0;
  const Vector x_id = mdix::solve_spd(Matrix::Identity(2, 2), b);
  EXPECT_DOUBLE_EQ(x_id(0), 2.0);
  EXPECT_DOUBLE_EQ(x_id(1), 8.0);
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 4.0;
  const Vector x = mdix::solve_spd(d, b);
  EXPECT_DOUBLE_EQ(x(0), 1.0);
  EXPECT_DOUBLE_EQ(x(1), 2.0);
}

TEST(SolveSpd, RandomSpdResidual) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix b_mat(5, 5);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) b_mat(i, j) = gauss(rng);
  }
  const Matrix a = b_mat.transpose() * b_mat + Matrix::Identity(5, 5);
  Vector rhs(5);
  for (int i = 0; i < 5; ++i) rhs(i) = gauss(rng);
  const Vector x = mdix::solve_spd(a, rhs);
  EXPECT_LE((a * x - rhs).norm(), 1e-8 * rhs.norm());
}

TEST(SolveSpd, RejectsSingular) {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 1.0;  // rank 1
  Vector b(2);
  b << 1.0, 1.0;
  try {
    mdix::solve_spd(a, b);
    FAIL() << "expected an error for a singular matrix";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("condition"), std::string::npos);
  }
}

TEST(Kron, SmallCases) {
  Vector a1(1), b1(2);
  a1 << 1.0;
  b1 << 1.0, 2.0;
  const Vector k1 = mdix::kron(a1, b1);
  ASSERT_EQ(k1.size(), 2);
  EXPECT_DOUBLE_EQ(k1(0), 1.0);
  EXPECT_DOUBLE_EQ(k1(1), 2.0);

  Vector a2(2), b2(2);
  a2 << 1.0, 0.0;
  b2 << 0.0, 1.0;
  const Vector k2 = mdix::kron(a2, b2);
  ASSERT_EQ(k2.size(), 4);
  EXPECT_DOUBLE_EQ(k2(0), 0.0);
  EXPECT_DOUBLE_EQ(k2(1), 1.0);
  EXPECT_DOUBLE_EQ(k2(2), 0.0);
  EXPECT_DOUBLE_EQ(k2(3), 0.0);

  Vector a3(2), b3(2);
  a3 << 2.0, 3.0;
  b3 << 1.0, -1.0;
  const Vector k3 = mdix::kron(a3, b3);
  EXPECT_DOUBLE_EQ(k3(0), 2.0);
  EXPECT_DOUBLE_EQ(k3(1), -2.0);
  EXPECT_DOUBLE_EQ(k3(2), 3.0);
  EXPECT_DOUBLE_EQ(k3(3), -3.0);
}

// Element (i*n + j) must equal a_i * b_j bit for bit.
TEST(Kron, MatchesElementwiseExpansionExactly) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    const int m = 1 + static_cast<int>(rng() % 5);
    const int n = 1 + static_cast<int>(rng() % 5);
    Vector a(m), b(n);
    for (int i = 0; i < m; ++i) a(i) = gauss(rng);
    for (int j = 0; j < n; ++j) b(j) = gauss(rng);
    const Vector k = mdix::kron(a, b);
    ASSERT_EQ(k.size(), m * n);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) {
        EXPECT_EQ(k(i * n + j), a(i) * b(j));
      }
    }
  }
}

TEST(Norms, KnownValues) {
  EXPECT_DOUBLE_EQ(mdix::spectral_norm(Matrix::Identity(2, 2)), 1.0);
  EXPECT_DOUBLE_EQ(mdix::frob_norm(Matrix::Identity(2, 2)), std::sqrt(2.0));
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 3.0;
  d(1, 1) = 4.0;
  EXPECT_NEAR(mdix::spectral_norm(d), 4.0, 1e-12);
  EXPECT_NEAR(mdix::frob_norm(d), 5.0, 1e-12);
}

TEST(Norms, RankOneSpectralNorm) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector u(4), v(6);
  for (int i = 0; i < 4; ++i) u(i) = gauss(rng);
  for (int j = 0; j < 6; ++j) v(j) = gauss(rng);
  const Matrix a = u * v.transpose();
  EXPECT_NEAR(mdix::spectral_norm(a), u.norm() * v.norm(), 1e-10);
}

TEST(Norms, SpectralBoundedByFrobenius) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int rep = 0; rep < 30; ++rep) {
    const int m = 1 + static_cast<int>(rng() % 8);
    const int n = 1 + static_cast<int>(rng() % 8);
    Matrix a(m, n);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) a(i, j) = gauss(rng);
    }
    EXPECT_LE(mdix::spectral_norm(a), mdix::frob_norm(a) + 1e-12);
  }
}
