#pragma once

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "tadp/csv.hpp"
#include "tadp/learners.hpp"
#include "tadp/metrics.hpp"

namespace tadp {

// Ridge penalty for the reconstruction adversary (on standardized inputs).
inline constexpr double kReconRidgeLambda = 1.0;

struct AttackRaw {
  double mia_auc = 0.5;
  double aia_accuracy = 0.0;
  double recon_relative_error = 0.0;
};

/// Normalized privacy scores in [0,1] (higher = more resistant), their mean,
/// and the reliability R = 1 - P_attack, identified with that mean.
struct AttackReport {
  double priv_mia = 0.0;
  double priv_aia = 0.0;
  double priv_recon = 0.0;
  double overall = 0.0;
  double reliability = 0.0;
  AttackRaw raw;

  static std::string csv_header() {
    return "mia,aia,recon,overall,reliability,raw_auc,raw_acc,raw_err";
  }
  std::string csv_row() const {
    return csv_num(priv_mia) + "," + csv_num(priv_aia) + "," +
           csv_num(priv_recon) + "," + csv_num(overall) + "," +
           csv_num(reliability) + "," + csv_num(raw.mia_auc) + "," +
           csv_num(raw.aia_accuracy) + "," + csv_num(raw.recon_relative_error);
  }
};

namespace detail {
inline double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }
}  // namespace detail

/// Score maps from raw attack statistics to [0,1].
inline double mia_score(double auc) {
  return detail::clamp01(1.0 - 2.0 * std::abs(auc - 0.5));
}
inline double aia_score(double acc, int classes) {
  const double baseline = 1.0 / classes;
  return detail::clamp01(1.0 - (acc - baseline) / (1.0 - baseline));
}
// Normalized reconstruction error doubles as the failure probability of the
// inversion adversary: error 0 = perfect recovery (no privacy), error >= 1 =
// reconstruction no better than a trivial predictor.
inline double recon_score(double relative_error) {
  return detail::clamp01(relative_error);
}

/// Membership inference: balanced member/nonmember pool, stratified 50/50
/// attack train/test split, logistic attack classifier, AUC on the test half.
inline std::pair<double, double> membership_inference(const Matrix& Z_members,
                                                      const Matrix& Z_nonmembers,
                                                      const FitConfig& cfg,
                                                      Rng& rng) {
  if (Z_members.rows() == 0 || Z_nonmembers.rows() == 0)
    throw std::invalid_argument("membership_inference: empty side");
  if (Z_members.cols() != Z_nonmembers.cols())
    throw std::invalid_argument("membership_inference: column mismatch");

  const int m = static_cast<int>(std::min(Z_members.rows(), Z_nonmembers.rows()));
  auto balance = [&](const Matrix& Z) {
    if (Z.rows() == m) return Z;
    const auto pick = rng.sample_without_replacement(static_cast<int>(Z.rows()), m);
    return take_rows(Z, pick);
  };
  const Matrix mem = balance(Z_members);
  const Matrix non = balance(Z_nonmembers);

  Matrix F(2 * m, mem.cols());
  F.topRows(m) = mem;
  F.bottomRows(m) = non;
  std::vector<int> is_member(static_cast<std::size_t>(2 * m), 0);
  for (int i = 0; i < m; ++i) is_member[static_cast<std::size_t>(i)] = 1;

  const auto [train_idx, test_idx] = stratified_split(is_member, 0.5, rng.next_u64());
  const auto y_train = take_labels(is_member, train_idx);
  const auto y_test = take_labels(is_member, test_idx);

  Standardizer std_;
  const Matrix F_train_raw = take_rows(F, train_idx);
  std_.fit(F_train_raw);
  const auto model = fit_logistic(std_.transform(F_train_raw), y_train, cfg);
  const Matrix P = predict_proba(model, std_.transform(take_rows(F, test_idx)));

  std::vector<double> scores(static_cast<std::size_t>(P.rows()));
  for (Eigen::Index i = 0; i < P.rows(); ++i)
    scores[static_cast<std::size_t>(i)] = P(i, 1);
  const double auc = roc_auc(scores, y_test);
  return {mia_score(auc), auc};
}

/// Attribute inference: predict the class label from the protected
/// representation; scored against the 1/C random baseline.
inline std::pair<double, double> attribute_inference(const Matrix& Z,
                                                     const std::vector<int>& y,
                                                     int classes,
                                                     const FitConfig& cfg) {
  for (int v : y)
    if (v < 0 || v >= classes)
      throw std::invalid_argument("attribute_inference: label out of range");
  const auto [acc, f1] = probe_utility(Z, y, cfg);
  (void)f1;
  return {aia_score(acc, classes), acc};
}

/// Reconstruction: the adversary holds a random half of the (Z, X) pairs,
/// fits ridge from standardized Z to X, and is scored by the relative
/// Frobenius error on the held-out half.
inline std::pair<double, double> reconstruction_attack(const Matrix& Z,
                                                       const Matrix& X,
                                                       const FitConfig& cfg) {
  if (Z.rows() != X.rows() || Z.rows() < 4)
    throw std::invalid_argument("reconstruction_attack: need aligned rows");
  const int n = static_cast<int>(Z.rows());
  Rng rng(seed_stream(cfg.seed, 0x2ECA4));
  auto known = rng.sample_without_replacement(n, n / 2);
  std::vector<char> is_known(static_cast<std::size_t>(n), 0);
  for (int i : known) is_known[static_cast<std::size_t>(i)] = 1;
  std::vector<int> held;
  held.reserve(static_cast<std::size_t>(n - n / 2));
  for (int i = 0; i < n; ++i)
    if (!is_known[static_cast<std::size_t>(i)]) held.push_back(i);

  Standardizer std_;
  const Matrix Z_known_raw = take_rows(Z, known);
  std_.fit(Z_known_raw);
  const auto map =
      fit_ridge(std_.transform(Z_known_raw), take_rows(X, known), kReconRidgeLambda);

  const Matrix X_held = take_rows(X, held);
  const double denom = X_held.norm();
  if (denom == 0.0)
    throw std::invalid_argument("reconstruction_attack: zero-norm target");
  const Matrix X_hat = ridge_predict(map, std_.transform(take_rows(Z, held)));
  const double rel_error = (X_hat - X_held).norm() / denom;
  return {recon_score(rel_error), rel_error};
}

/// Runs all three attacks and assembles the report; overall is their
/// arithmetic mean and reliability is identified with it.
inline AttackReport full_attack_suite(const Matrix& Z_members,
                                      const Matrix& Z_nonmembers,
                                      const Matrix& X_original,
                                      const std::vector<int>& y, int classes,
                                      const FitConfig& cfg, Rng& rng) {
  AttackReport r;
  const auto [mia, auc] = membership_inference(Z_members, Z_nonmembers, cfg, rng);
  const auto [aia, acc] = attribute_inference(Z_members, y, classes, cfg);
  const auto [recon, err] = reconstruction_attack(Z_members, X_original, cfg);
  r.priv_mia = mia;
  r.priv_aia = aia;
  r.priv_recon = recon;
  r.raw = {auc, acc, err};
  r.overall = (r.priv_mia + r.priv_aia + r.priv_recon) / 3.0;
  r.reliability = r.overall;
  return r;
}

}  // namespace tadp
