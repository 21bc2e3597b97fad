#pragma once

#include <cmath>
#include <stdexcept>

#include "tadp/dataset.hpp"
#include "tadp/rng.hpp"

namespace tadp {

/// Inverse trust score: 0 = fully trusted (max utility), 1 = untrusted
/// (max privacy).
struct TrustScore {
  double tau;
  explicit TrustScore(double t) : tau(t) {
    if (!(t >= 0.0 && t <= 1.0))
      throw std::invalid_argument("trust score must lie in [0,1]");
  }
};

/// Privacy-budget bounds, failure probability, L2 sensitivity (= clip
/// radius), and the embedding distortion parameter.
struct BudgetConfig {
  double eps_min = 15.0;
  double eps_max = 80.0;
  double delta = 1e-5;
  double delta2 = 1.0;
  double alpha = 2.0 * M_PI;
  // Optional trust-coupled distortion: alpha(tau) = alpha * (1 + tau).
  bool adaptive_alpha = false;

  void validate() const {
    if (!(eps_min > 0) || !(eps_max >= eps_min))
      throw std::invalid_argument("require 0 < eps_min <= eps_max");
    if (!(delta > 0 && delta < 1))
      throw std::invalid_argument("delta must lie in (0,1)");
    if (!(delta2 > 0)) throw std::invalid_argument("delta2 must be positive");
    if (!(alpha > 0)) throw std::invalid_argument("alpha must be positive");
  }

  double effective_alpha(double tau) const {
    return adaptive_alpha ? alpha * (1.0 + tau) : alpha;
  }
};

/// Output of the full mechanism: n x 2d embedding plus the realized budget.
struct ProtectedData {
  Matrix Z;
  double tau = 0.0;
  double epsilon = 0.0;
  double sigma = 0.0;
};

/// eps(tau) = eps_max - tau * (eps_max - eps_min); affine, decreasing in tau.
inline double trust_budget(TrustScore t, const BudgetConfig& cfg) {
  cfg.validate();
  return cfg.eps_max - t.tau * (cfg.eps_max - cfg.eps_min);
}

/// Gaussian-mechanism calibration: sigma = delta2 * sqrt(2 ln(1.25/delta)) / eps.
inline double noise_sigma(double epsilon, double delta, double delta2) {
  if (!(epsilon > 0)) throw std::invalid_argument("invalid budget");
  if (!(delta > 0 && delta < 1))
    throw std::invalid_argument("delta must lie in (0,1)");
  if (!(delta2 > 0)) throw std::invalid_argument("delta2 must be positive");
  return delta2 * std::sqrt(2.0 * std::log(1.25 / delta)) / epsilon;
}

/// Y = X + sigma * N with N iid standard normal, drawn in row-major order.
/// sigma = 0 returns X unchanged.
inline Matrix gaussian_perturb(const Matrix& X, double sigma, Rng& rng) {
  if (sigma < 0) throw std::invalid_argument("sigma must be nonnegative");
  if (sigma == 0.0) return X;
  Matrix Y = X;
  for (Eigen::Index i = 0; i < Y.rows(); ++i)
    for (Eigen::Index j = 0; j < Y.cols(); ++j)
      Y(i, j) += sigma * rng.gaussian();
  return Y;
}

/// Coordinate-wise periodic embedding v -> (v cos(alpha v), v sin(alpha v)).
/// Output layout: the d cosine components, then the d sine components.
inline Matrix rme_embed(const Matrix& Y, double alpha) {
  if (!(alpha > 0)) throw std::invalid_argument("alpha must be positive");
  const Eigen::Index d = Y.cols();
  Matrix Z(Y.rows(), 2 * d);
  Z.leftCols(d) = Y.array() * (alpha * Y.array()).cos();
  Z.rightCols(d) = Y.array() * (alpha * Y.array()).sin();
  return Z;
}

/// Full pipeline: budget from trust, calibrated Gaussian noise, then the
/// embedding. Input rows must already satisfy ||x||_2 <= delta2.
inline ProtectedData protect(const Matrix& X, TrustScore t,
                             const BudgetConfig& cfg, Rng& rng) {
  cfg.validate();
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    if (X.row(i).norm() > cfg.delta2 + 1e-9)
      throw std::invalid_argument("sensitivity violation");

  ProtectedData out;
  out.tau = t.tau;
  out.epsilon = trust_budget(t, cfg);
  out.sigma = noise_sigma(out.epsilon, cfg.delta, cfg.delta2);
  out.Z = rme_embed(gaussian_perturb(X, out.sigma, rng),
                    cfg.effective_alpha(t.tau));
  return out;
}

}  // namespace tadp
