#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "tadp/mechanism.hpp"

namespace tadp {

enum class BaselineKind {
  gaussian_dp,
  laplace_dp,
  personalized_dp,
  random_projection,
  additive_noise,
  lsh,
  binary_encoding,
  reconstruction_resistant,
};

inline std::string baseline_name(BaselineKind k) {
  switch (k) {
    case BaselineKind::gaussian_dp: return "gaussian_dp";
    case BaselineKind::laplace_dp: return "laplace_dp";
    case BaselineKind::personalized_dp: return "personalized_dp";
    case BaselineKind::random_projection: return "random_projection";
    case BaselineKind::additive_noise: return "additive_noise";
    case BaselineKind::lsh: return "lsh";
    case BaselineKind::binary_encoding: return "binary_encoding";
    case BaselineKind::reconstruction_resistant: return "reconstruction_resistant";
  }
  throw std::invalid_argument("unknown baseline kind");
}

inline BaselineKind parse_baseline(const std::string& s) {
  for (auto k : {BaselineKind::gaussian_dp, BaselineKind::laplace_dp,
                 BaselineKind::personalized_dp, BaselineKind::random_projection,
                 BaselineKind::additive_noise, BaselineKind::lsh,
                 BaselineKind::binary_encoding,
                 BaselineKind::reconstruction_resistant})
    if (baseline_name(k) == s) return k;
  throw std::invalid_argument("unknown baseline kind '" + s + "'");
}

/// One comparison mechanism plus its parameters. Fields irrelevant to a kind
/// are ignored by apply_baseline; defaults come from make_baseline.
struct BaselineSpec {
  BaselineKind kind = BaselineKind::gaussian_dp;
  double epsilon = 47.5;  // DP kinds
  double delta = 1e-5;
  double delta2 = 1.0;
  int proj_dim = 0;       // 0 = derive from the input dimension
  double noise = 0.5;     // post-projection / additive noise scale
  int bits = 256;         // lsh
  double flip = 0.25;     // binary_encoding
  double pdp_eps_lo = 0.5, pdp_eps_hi = 5.0;

  void validate() const {
    switch (kind) {
      case BaselineKind::gaussian_dp:
        if (!(epsilon > 0) || !(delta > 0 && delta < 1) || !(delta2 > 0))
          throw std::invalid_argument("gaussian_dp: bad parameters");
        break;
      case BaselineKind::laplace_dp:
        if (!(epsilon > 0) || !(delta2 > 0))
          throw std::invalid_argument("laplace_dp: bad parameters");
        break;
      case BaselineKind::personalized_dp:
        if (!(pdp_eps_lo > 0) || !(pdp_eps_hi >= pdp_eps_lo) ||
            !(delta > 0 && delta < 1) || !(delta2 > 0))
          throw std::invalid_argument("personalized_dp: bad parameters");
        break;
      case BaselineKind::random_projection:
      case BaselineKind::reconstruction_resistant:
        if (proj_dim < 0 || noise < 0)
          throw std::invalid_argument(baseline_name(kind) + ": bad parameters");
        break;
      case BaselineKind::additive_noise:
        if (noise < 0) throw std::invalid_argument("additive_noise: bad noise");
        break;
      case BaselineKind::lsh:
        if (bits <= 0) throw std::invalid_argument("lsh: bits must be positive");
        break;
      case BaselineKind::binary_encoding:
        if (!(flip >= 0 && flip <= 1))
          throw std::invalid_argument("binary_encoding: flip must lie in [0,1]");
        break;
    }
  }
};

/// Default parameterization per kind.
inline BaselineSpec make_baseline(BaselineKind kind) {
  BaselineSpec spec;
  spec.kind = kind;
  switch (kind) {
    case BaselineKind::random_projection: spec.noise = 0.5; break;
    case BaselineKind::reconstruction_resistant: spec.noise = 0.5; break;
    case BaselineKind::additive_noise: spec.noise = 0.1; break;
    default: break;
  }
  return spec;
}

namespace detail {

inline Matrix gaussian_matrix(int rows, int cols, double stddev, Rng& rng) {
  Matrix P(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) P(i, j) = stddev * rng.gaussian();
  return P;
}

}  // namespace detail

/// Applies the selected comparison mechanism. X is assumed clipped to the
/// sensitivity the DP variants expect. Deterministic given (spec, X, rng seed).
inline Matrix apply_baseline(const BaselineSpec& spec, const Matrix& X, Rng& rng) {
  spec.validate();
  const int d = static_cast<int>(X.cols());

  switch (spec.kind) {
    case BaselineKind::gaussian_dp:
      return gaussian_perturb(
          X, noise_sigma(spec.epsilon, spec.delta, spec.delta2), rng);

    case BaselineKind::laplace_dp: {
      // L1 sensitivity taken as the worst case over the L2 ball.
      const double b = spec.delta2 * std::sqrt(static_cast<double>(d)) / spec.epsilon;
      Matrix Y = X;
      for (Eigen::Index i = 0; i < Y.rows(); ++i)
        for (Eigen::Index j = 0; j < Y.cols(); ++j) Y(i, j) += rng.laplace(b);
      return Y;
    }

    case BaselineKind::personalized_dp: {
      // Per-record budget drawn from the configured range; the global epsilon
      // is deliberately ignored.
      Matrix Y = X;
      for (Eigen::Index i = 0; i < Y.rows(); ++i) {
        const double eps_i = rng.uniform(spec.pdp_eps_lo, spec.pdp_eps_hi);
        const double s = noise_sigma(eps_i, spec.delta, spec.delta2);
        for (Eigen::Index j = 0; j < Y.cols(); ++j) Y(i, j) += s * rng.gaussian();
      }
      return Y;
    }

    case BaselineKind::random_projection: {
      const int k = spec.proj_dim > 0 ? spec.proj_dim : (d + 3) / 4;
      const Matrix P = detail::gaussian_matrix(d, k, 1.0 / std::sqrt(double(k)), rng);
      return gaussian_perturb(X * P, spec.noise, rng);
    }

    case BaselineKind::additive_noise:
      return gaussian_perturb(X, spec.noise, rng);

    case BaselineKind::lsh: {
      const Matrix H = detail::gaussian_matrix(d, spec.bits, 1.0, rng);
      Matrix S = X * H;
      return S.unaryExpr([](double v) { return v >= 0.0 ? 1.0 : -1.0; });
    }

    case BaselineKind::binary_encoding: {
      Matrix B = X.unaryExpr([](double v) { return v > 0.5 ? 1.0 : 0.0; });
      for (Eigen::Index i = 0; i < B.rows(); ++i)
        for (Eigen::Index j = 0; j < B.cols(); ++j)
          if (rng.uniform() < spec.flip) B(i, j) = 1.0 - B(i, j);
      return B;
    }

    case BaselineKind::reconstruction_resistant: {
      const int k = spec.proj_dim > 0 ? spec.proj_dim : (d + 1) / 2;
      const Matrix P = detail::gaussian_matrix(d, k, 1.0 / std::sqrt(double(k)), rng);
      Matrix Y = gaussian_perturb(X * P, spec.noise, rng);
      for (Eigen::Index i = 0; i < Y.rows(); ++i) {
        const double norm = Y.row(i).norm();
        if (norm > 0) Y.row(i) /= norm;
      }
      return Y;
    }
  }
  throw std::invalid_argument("unknown baseline kind");
}

}  // namespace tadp
