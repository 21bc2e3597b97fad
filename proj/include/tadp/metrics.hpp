#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "tadp/learners.hpp"

namespace tadp {

/// Utility-side measurements for one protected representation.
struct UtilityReport {
  double accuracy = 0.0;
  double f1_weighted = 0.0;
  std::map<int, double> knn_overlap;  // k -> overlap in [0,1]
  double spearman_rho = 0.0;
  bool spearman_degenerate = false;
};

/// Linear-probe utility: stratified 80/20 split, per-column standardization
/// fitted on the train fold, accuracy and support-weighted F1 on the test fold.
inline std::pair<double, double> probe_utility(const Matrix& Z,
                                               const std::vector<int>& y,
                                               const FitConfig& cfg) {
  if (static_cast<std::size_t>(Z.rows()) != y.size())
    throw std::invalid_argument("probe_utility: shape mismatch");
  const auto [train_idx, test_idx] = stratified_split(y, 0.2, cfg.seed);
  const auto y_train = take_labels(y, train_idx);
  const auto y_test = take_labels(y, test_idx);
  const int C = *std::max_element(y.begin(), y.end()) + 1;
  {
    std::set<int> distinct(y_test.begin(), y_test.end());
    if (distinct.size() < 2)
      throw std::invalid_argument("probe_utility: single-class test fold");
  }

  Standardizer std_;
  const Matrix Z_train_raw = take_rows(Z, train_idx);
  std_.fit(Z_train_raw);
  const Matrix Z_train = std_.transform(Z_train_raw);
  const Matrix Z_test = std_.transform(take_rows(Z, test_idx));

  const auto model = fit_logistic(Z_train, y_train, cfg);
  const auto pred = predict(model, Z_test);
  return {accuracy(pred, y_test), weighted_f1(pred, y_test, C)};
}

/// Mean fraction of shared k-nearest-neighbor indices between the two spaces,
/// computed exactly on a seeded subsample of at most sample_cap rows (the
/// same rows in both spaces).
inline std::vector<double> knn_overlap_multi(const Matrix& X, const Matrix& Z,
                                             const std::vector<int>& ks,
                                             int sample_cap, std::uint64_t seed) {
  if (X.rows() != Z.rows())
    throw std::invalid_argument("knn_overlap: row count mismatch");
  const int n = static_cast<int>(X.rows());
  const int m = std::min(n, sample_cap);
  const int k_max = *std::max_element(ks.begin(), ks.end());
  if (k_max >= m) throw std::invalid_argument("knn_overlap: k too large for sample");

  Matrix Xs, Zs;
  if (m < n) {
    Rng rng(seed_stream(seed, 0x0E71A));
    const auto pick = rng.sample_without_replacement(n, m);
    Xs = take_rows(X, pick);
    Zs = take_rows(Z, pick);
  } else {
    Xs = X;
    Zs = Z;
  }

  const auto nn_x = knn_indices(Xs, k_max);
  const auto nn_z = knn_indices(Zs, k_max);

  std::vector<double> out;
  out.reserve(ks.size());
  for (int k : ks) {
    double total = 0.0;
    for (int i = 0; i < m; ++i) {
      const auto& a = nn_x[static_cast<std::size_t>(i)];
      const auto& b = nn_z[static_cast<std::size_t>(i)];
      const std::set<int> sa(a.begin(), a.begin() + k);
      int shared = 0;
      for (int j = 0; j < k; ++j) shared += sa.count(b[static_cast<std::size_t>(j)]);
      total += static_cast<double>(shared) / k;
    }
    out.push_back(total / m);
  }
  return out;
}

inline double knn_overlap(const Matrix& X, const Matrix& Z, int k,
                          int sample_cap, std::uint64_t seed) {
  return knn_overlap_multi(X, Z, {k}, sample_cap, seed)[0];
}

struct SpearmanResult {
  double rho = 0.0;
  bool degenerate = false;  // zero variance in a distance list
};

/// Rank correlation of two equally-long lists. Uses the classic
/// 1 - 6*sum(d^2)/(m(m^2-1)) form when ranks are tie-free, and the Pearson
/// correlation of average ranks otherwise.
inline SpearmanResult rank_correlation(const std::vector<double>& a,
                                       const std::vector<double>& b) {
  const std::size_t m = a.size();
  if (m != b.size() || m < 2)
    throw std::invalid_argument("rank_correlation: need two lists of equal size >= 2");

  auto has_ties = [](const std::vector<double>& r) {
    for (double v : r)
      if (v != std::floor(v)) return true;
    return false;
  };
  auto variance = [](const std::vector<double>& r) {
    double mean = 0.0;
    for (double v : r) mean += v;
    mean /= static_cast<double>(r.size());
    double var = 0.0;
    for (double v : r) var += (v - mean) * (v - mean);
    return var;
  };

  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double va = variance(ra), vb = variance(rb);
  if (va == 0.0 || vb == 0.0) return {0.0, true};

  if (!has_ties(ra) && !has_ties(rb)) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) d2 += (ra[i] - rb[i]) * (ra[i] - rb[i]);
    const double md = static_cast<double>(m);
    return {1.0 - 6.0 * d2 / (md * (md * md - 1.0)), false};
  }
  // Tie-adjusted: Pearson on the average ranks.
  const double md = static_cast<double>(m);
  double mean_a = 0.0, mean_b = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mean_a += ra[i];
    mean_b += rb[i];
  }
  mean_a /= md;
  mean_b /= md;
  double cov = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    cov += (ra[i] - mean_a) * (rb[i] - mean_b);
  return {cov / std::sqrt(va * vb), false};
}

/// Spearman correlation between pairwise distances in the two spaces over a
/// seeded sample of distinct index pairs (all pairs when the budget covers
/// them). Zero variance in either list yields rho = 0 with the degenerate
/// flag set.
inline SpearmanResult spearman_distance_corr(const Matrix& X, const Matrix& Z,
                                             long pair_budget, std::uint64_t seed) {
  if (X.rows() != Z.rows())
    throw std::invalid_argument("spearman: row count mismatch");
  if (pair_budget < 10)
    throw std::invalid_argument("spearman: pair budget must be >= 10");
  const long n = X.rows();
  if (n < 2) throw std::invalid_argument("spearman: need at least 2 rows");
  const double total_pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);

  std::vector<std::pair<int, int>> pairs;
  if (total_pairs <= static_cast<double>(pair_budget)) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  } else {
    Rng rng(seed_stream(seed, 0x5EA7));
    std::set<std::uint64_t> seen;
    pairs.reserve(static_cast<std::size_t>(pair_budget));
    while (static_cast<long>(pairs.size()) < pair_budget) {
      int i = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
      int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
      if (i == j) continue;
      if (i > j) std::swap(i, j);
      const std::uint64_t key =
          static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(n) +
          static_cast<std::uint64_t>(j);
      if (seen.insert(key).second) pairs.emplace_back(i, j);
    }
  }

  std::vector<double> da, db;
  da.reserve(pairs.size());
  db.reserve(pairs.size());
  for (const auto& [i, j] : pairs) {
    da.push_back((X.row(i) - X.row(j)).squaredNorm());
    db.push_back((Z.row(i) - Z.row(j)).squaredNorm());
  }
  return rank_correlation(da, db);
}

}  // namespace tadp
