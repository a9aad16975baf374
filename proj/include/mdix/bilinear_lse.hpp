#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "mdix/linalg.hpp"
#include "mdix/types.hpp"

namespace mdix::lse {

enum class InitRule { first_unit_vector, seeded_random_unit };

struct LseConfig {
  int max_iterations = 200;
  double rel_tol = 1e-10;  // on the relative objective decrease per sweep
  InitRule init_rule = InitRule::first_unit_vector;
  std::uint64_t init_seed = 0;
};

namespace detail {

inline Vector initial_beta(int r, const LseConfig& cfg) {
  Vector beta = Vector::Zero(r);
  if (cfg.init_rule == InitRule::first_unit_vector) {
    beta(0) = 1.0;
    return beta;
  }
  std::mt19937_64 rng(cfg.init_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double norm = 0.0;
  while (norm == 0.0) {
    for (int i = 0; i < r; ++i) beta(i) = gauss(rng);
    norm = beta.norm();
  }
  return beta / norm;
}

}  // namespace detail

/// Alternating least squares for y_{t+h} = α'F_tβ + e_{t+h}:
///   α ← (Σ F_tββ'F_t')⁻¹ Σ y_{t+h}F_tβ,
///   β ← (Σ F_t'αα'F_t)⁻¹ Σ y_{t+h}F_t'α,
/// iterated until the relative objective decrease falls below rel_tol. On
/// exit α is rescaled to unit norm (scale absorbed into β) and the sign of
/// its first nonzero entry is fixed positive (sign compensated into β).
inline LoadingEstimate fit(const std::vector<Matrix>& factors,
                           const Vector& target, int horizon,
                           const LseConfig& cfg = {}) {
  if (cfg.max_iterations < 1 || !(cfg.rel_tol > 0.0)) {
    throw std::invalid_argument("lse::fit: invalid configuration");
  }
  if (horizon < 1) throw std::invalid_argument("lse::fit: horizon must be >= 1");
  const int t_count = static_cast<int>(factors.size());
  if (target.size() != t_count) {
    throw std::invalid_argument("lse::fit: factor and target lengths differ");
  }
  const int n = t_count - horizon;
  if (n < 1) throw std::invalid_argument("lse::fit: no usable pairs");
  const int k = static_cast<int>(factors.front().rows());
  const int r = static_cast<int>(factors.front().cols());
  for (const auto& f : factors) {
    if (f.rows() != k || f.cols() != r || !f.allFinite()) {
      throw std::invalid_argument("lse::fit: factors must be finite with a common shape");
    }
  }
  if (!target.allFinite()) throw std::invalid_argument("lse::fit: non-finite target");
  if (n < k + r) {
    throw std::invalid_argument("lse::fit: need T - h >= k + r observations");
  }

  Vector beta = detail::initial_beta(r, cfg);
  Vector alpha = Vector::Zero(k);
  Vector prev_alpha = alpha, prev_beta = beta;
  std::vector<double> trace;
  bool converged = false;

  auto objective = [&]() {
    double s = 0.0;
    for (int t = 0; t < n; ++t) {
      const double resid =
          target(t + horizon) - alpha.dot(factors[static_cast<size_t>(t)] * beta);
      s += resid * resid;
    }
    return s;
  };

  for (int sweep = 1; sweep <= cfg.max_iterations; ++sweep) {
    Matrix gram_a = Matrix::Zero(k, k);
    Vector rhs_a = Vector::Zero(k);
    for (int t = 0; t < n; ++t) {
      const Vector u = factors[static_cast<size_t>(t)] * beta;
      gram_a.noalias() += u * u.transpose();
      rhs_a.noalias() += target(t + horizon) * u;
    }
    try {
      alpha = solve_spd(gram_a, rhs_a);
    } catch (const std::runtime_error& e) {
      throw std::runtime_error("lse::fit: singular alpha update at sweep " +
                               std::to_string(sweep) + " (" + e.what() + ")");
    }

    Matrix gram_b = Matrix::Zero(r, r);
    Vector rhs_b = Vector::Zero(r);
    for (int t = 0; t < n; ++t) {
      const Vector v = factors[static_cast<size_t>(t)].transpose() * alpha;
      gram_b.noalias() += v * v.transpose();
      rhs_b.noalias() += target(t + horizon) * v;
    }
    try {
      beta = solve_spd(gram_b, rhs_b);
    } catch (const std::runtime_error& e) {
      throw std::runtime_error("lse::fit: singular beta update at sweep " +
                               std::to_string(sweep) + " (" + e.what() + ")");
    }

    const double obj = objective();
    if (!trace.empty() && obj > trace.back()) {
      // Roundoff floor reached; keep the previous sweep's values.
      alpha = prev_alpha;
      beta = prev_beta;
      converged = true;
      break;
    }
    trace.push_back(obj);
    if (trace.size() >= 2) {
      const double prev = trace[trace.size() - 2];
      if (prev - obj <= cfg.rel_tol * prev) {
        converged = true;
        break;
      }
    } else if (obj == 0.0) {
      converged = true;
      break;
    }
    prev_alpha = alpha;
    prev_beta = beta;
  }

  const double norm = alpha.norm();
  if (!(norm > 0.0)) {
    throw std::runtime_error("lse::fit: alpha collapsed to zero");
  }
  beta *= norm;
  alpha /= norm;
  const double scale = alpha.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < alpha.size(); ++i) {
    if (std::abs(alpha(i)) > 1e-12 * scale) {
      if (alpha(i) < 0.0) {
        alpha = -alpha;
        beta = -beta;
      }
      break;
    }
  }
  return LoadingEstimate(std::move(alpha), std::move(beta), std::move(trace),
                         converged, static_cast<int>(trace.size()));
}

/// Point forecast α̂'F̂_tβ̂.
inline double forecast(const Matrix& factors_t, const LoadingEstimate& loadings) {
  if (factors_t.rows() != loadings.alpha_vec.size() ||
      factors_t.cols() != loadings.beta_vec.size()) {
    throw std::invalid_argument("lse::forecast: dimension mismatch");
  }
  return loadings.alpha_vec.dot(factors_t * loadings.beta_vec);
}

}  // namespace mdix::lse
