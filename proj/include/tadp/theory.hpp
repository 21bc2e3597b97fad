#pragma once

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace tadp {

using BigInt = boost::multiprecision::cpp_int;

/// Number of ways to partition 2d labeled coordinates into d unordered
/// pairs: (2d)!/(2^d d!) = 1 * 3 * 5 * ... * (2d-1). Exact.
inline BigInt pairing_count(int d) {
  if (d < 0) throw std::invalid_argument("pairing_count: d must be >= 0");
  BigInt result = 1;
  for (int k = 1; k <= d; ++k) result *= 2 * k - 1;
  return result;
}

/// Exhaustive-inversion search space: pairing_count(d) * R^d, with R feasible
/// solutions per recovered pair.
inline BigInt search_space(int d, int R) {
  if (R < 1) throw std::invalid_argument("search_space: R must be >= 1");
  return pairing_count(d) * boost::multiprecision::pow(BigInt(R), static_cast<unsigned>(d));
}

/// Residual search space when l = d - m pairings remain unknown.
inline BigInt search_space_partial(int l, int R) { return search_space(l, R); }

/// Inversion model with partial pairing knowledge.
struct InversionModel {
  int d = 1;       // data dimension
  int R = 2;       // feasible solutions per coordinate pair
  int known = 0;   // correctly identified pairings m

  void validate() const {
    if (d < 1 || R < 1 || known < 0 || known > d)
      throw std::invalid_argument("InversionModel: require 1 <= d, R >= 1, 0 <= m <= d");
  }
  BigInt remaining_search_space() const {
    validate();
    return search_space_partial(d - known, R);
  }
};

namespace detail {
// ln of search_space_partial(l, R) for integer l, summed term by term.
inline double log_search_space(int l, int R) {
  double acc = 0.0;
  for (int k = 1; k <= l; ++k) acc += std::log(2.0 * k - 1.0);
  return acc + l * std::log(static_cast<double>(R));
}
}  // namespace detail

/// Success probability of a single uniform guess over the residual search
/// space when a fraction of pairings is known. The remaining-pair count
/// l = (1 - fraction) * d is treated continuously, log-interpolating between
/// the exact integer evaluations 1/|S_floor(l)| and 1/|S_ceil(l)|; at integer
/// l this is exactly 1/|S_l|, and the curve is strictly decreasing in d for
/// R >= 2.
inline double recovery_probability(int d, double known_fraction, int R) {
  if (d < 1) throw std::invalid_argument("recovery_probability: d must be >= 1");
  if (R < 1) throw std::invalid_argument("recovery_probability: R must be >= 1");
  if (!(known_fraction >= 0.0 && known_fraction <= 1.0))
    throw std::invalid_argument("recovery_probability: fraction must lie in [0,1]");

  const double l = (1.0 - known_fraction) * d;
  const int lo = static_cast<int>(std::floor(l));
  const int hi = static_cast<int>(std::ceil(l));
  if (lo == hi)
    return 1.0 / search_space_partial(lo, R).convert_to<double>();
  const double t = l - lo;
  const double log_p = -((1.0 - t) * detail::log_search_space(lo, R) +
                         t * detail::log_search_space(hi, R));
  return std::exp(log_p);
}

/// Lower bound on KL divergence between the extreme-trust output
/// distributions: (d/2)(r^2 - 2 ln r - 1), r = sigma_min/sigma_max in (0,1].
inline double kl_lower_bound(double r, int d) {
  if (!(r > 0)) throw std::invalid_argument("kl_lower_bound: r must be positive");
  if (!(r <= 1)) throw std::invalid_argument("kl_lower_bound: r must be <= 1");
  if (d < 1) throw std::invalid_argument("kl_lower_bound: d must be >= 1");
  return 0.5 * d * (r * r - 2.0 * std::log(r) - 1.0);
}

/// Gaussian-channel bound on leaked information, in nats:
/// (d/2) ln(1 + E||X||^2 / (d sigma^2)). Decreasing in sigma.
inline double mi_upper_bound(int d, double mean_sq_norm, double sigma) {
  if (d < 1) throw std::invalid_argument("mi_upper_bound: d must be >= 1");
  if (!(sigma > 0)) throw std::invalid_argument("mi_upper_bound: sigma must be positive");
  if (mean_sq_norm < 0)
    throw std::invalid_argument("mi_upper_bound: mean square norm must be >= 0");
  return 0.5 * d * std::log1p(mean_sq_norm / (d * sigma * sigma));
}

/// All preimage candidates of one embedded pair (a, b): the magnitude
/// solutions +-sqrt(a^2+b^2) plus phase-consistent solutions
/// x = (atan2(b,a) + 2 pi k)/alpha for k in [k_min, k_max], filtered by
/// forward evaluation to within 1e-9, deduplicated and sorted.
inline std::vector<double> invert_candidates(double a, double b, double alpha,
                                             int k_min = -8, int k_max = 8) {
  if (!(alpha > 0)) throw std::invalid_argument("invert_candidates: alpha must be positive");
  if (k_min > k_max) throw std::invalid_argument("invert_candidates: empty k range");

  const double rho = std::hypot(a, b);
  std::vector<double> raw{rho, -rho};
  const double theta = std::atan2(b, a);
  for (int k = k_min; k <= k_max; ++k)
    raw.push_back((theta + 2.0 * M_PI * k) / alpha);

  std::vector<double> out;
  for (double x : raw) {
    const double fa = x * std::cos(alpha * x);
    const double fb = x * std::sin(alpha * x);
    if (std::hypot(fa - a, fb - b) < 1e-9) out.push_back(x);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [](double u, double v) { return std::abs(u - v) < 1e-12; }),
            out.end());
  return out;
}

}  // namespace tadp
