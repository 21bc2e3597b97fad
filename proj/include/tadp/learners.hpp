#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tadp/dataset.hpp"
#include "tadp/rng.hpp"

namespace tadp {

/// Hyperparameters shared by the linear probe and the attack classifiers.
struct FitConfig {
  double l2 = 1e-4;
  int max_epochs = 200;
  double tol = 1e-6;       // on relative objective decrease
  double lr = 1.0;         // initial backtracking step
  std::uint64_t seed = 0;  // split/initialization seed
};

/// Multinomial logistic model: logits = X W^T + b.
struct LinearClassifier {
  Matrix W;  // C x p
  Vector b;  // C
  int classes = 0;
};

/// Affine map fitted by ridge regression: B_hat = (A - mean_A) M + offset.
struct LinearMap {
  Matrix M;       // p x q
  Vector offset;  // q
};

/// Per-column affine rescaling to zero mean / unit variance; near-constant
/// columns are left at scale 1.
struct Standardizer {
  Vector mean, scale;

  void fit(const Matrix& X) {
    mean = X.colwise().mean();
    Vector var = (X.rowwise() - mean.transpose()).array().square().colwise().mean();
    scale = var.array().sqrt();
    for (Eigen::Index j = 0; j < scale.size(); ++j)
      if (scale(j) < 1e-12) scale(j) = 1.0;
  }

  Matrix transform(const Matrix& X) const {
    return (X.rowwise() - mean.transpose()).array().rowwise() /
           scale.transpose().array();
  }
};

// ---------------------------------------------------------------------------
// Multinomial logistic regression, full-batch gradient descent.
// ---------------------------------------------------------------------------

namespace detail {

// Row-wise log-sum-exp with max subtraction; optionally materializes the
// softmax probabilities.
inline double softmax_cross_entropy(const Matrix& logits,
                                    const std::vector<int>& y,
                                    Matrix* probs_out) {
  const Eigen::Index n = logits.rows(), C = logits.cols();
  double loss = 0.0;
  if (probs_out) probs_out->resize(n, C);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double m = logits.row(i).maxCoeff();
    double sum = 0.0;
    for (Eigen::Index c = 0; c < C; ++c) sum += std::exp(logits(i, c) - m);
    loss += m + std::log(sum) - logits(i, y[static_cast<std::size_t>(i)]);
    if (probs_out)
      for (Eigen::Index c = 0; c < C; ++c)
        (*probs_out)(i, c) = std::exp(logits(i, c) - m) / sum;
  }
  return loss / static_cast<double>(n);
}

}  // namespace detail

/// Regularized objective: mean cross-entropy + (l2/2)||W||^2 (bias unpenalized).
inline double logistic_loss(const Matrix& X, const std::vector<int>& y,
                            const LinearClassifier& model, double l2) {
  Matrix logits = X * model.W.transpose();
  logits.rowwise() += model.b.transpose();
  return detail::softmax_cross_entropy(logits, y, nullptr) +
         0.5 * l2 * model.W.squaredNorm();
}

/// Objective and its analytic gradient in one pass.
inline double logistic_loss_grad(const Matrix& X, const std::vector<int>& y,
                                 const LinearClassifier& model, double l2,
                                 Matrix& grad_W, Vector& grad_b) {
  const Eigen::Index n = X.rows();
  Matrix logits = X * model.W.transpose();
  logits.rowwise() += model.b.transpose();
  Matrix P;
  const double loss = detail::softmax_cross_entropy(logits, y, &P) +
                      0.5 * l2 * model.W.squaredNorm();
  for (Eigen::Index i = 0; i < n; ++i) P(i, y[static_cast<std::size_t>(i)]) -= 1.0;
  P /= static_cast<double>(n);
  grad_W = P.transpose() * X + l2 * model.W;
  grad_b = P.colwise().sum();
  return loss;
}

/// Fits by full-batch gradient descent with Armijo backtracking from zero
/// initialization. The accepted objective sequence is non-increasing;
/// terminates when the relative decrease falls below cfg.tol or the epoch
/// cap is reached.
inline LinearClassifier fit_logistic(const Matrix& X, const std::vector<int>& y,
                                     const FitConfig& cfg) {
  if (X.rows() == 0 || static_cast<std::size_t>(X.rows()) != y.size())
    throw std::invalid_argument("fit_logistic: shape mismatch");
  if (!X.allFinite())
    throw std::invalid_argument("fit_logistic: non-finite input");
  const int C = *std::max_element(y.begin(), y.end()) + 1;
  {
    const int lo = *std::min_element(y.begin(), y.end());
    if (lo < 0) throw std::invalid_argument("fit_logistic: negative label");
    std::vector<bool> seen(static_cast<std::size_t>(C), false);
    for (int v : y) seen[static_cast<std::size_t>(v)] = true;
    int distinct = 0;
    for (bool s : seen) distinct += s;
    if (distinct < 2) throw std::invalid_argument("fit_logistic: single-class labels");
  }

  LinearClassifier model;
  model.classes = C;
  model.W = Matrix::Zero(C, X.cols());
  model.b = Vector::Zero(C);

  Matrix grad_W;
  Vector grad_b;
  double loss = logistic_loss_grad(X, y, model, cfg.l2, grad_W, grad_b);
  double step = cfg.lr;

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    const double grad_sq = grad_W.squaredNorm() + grad_b.squaredNorm();
    if (grad_sq == 0.0) break;

    LinearClassifier trial = model;
    double trial_loss = loss;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      trial.W = model.W - step * grad_W;
      trial.b = model.b - step * grad_b;
      trial_loss = logistic_loss(X, y, trial, cfg.l2);
      if (trial_loss <= loss - 1e-4 * step * grad_sq) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no productive step at any scale

    model.W.swap(trial.W);
    model.b.swap(trial.b);
    const double decrease = (loss - trial_loss) / std::max(1.0, std::abs(loss));
    loss = trial_loss;
    if (decrease < cfg.tol) break;
    step *= 1.5;
    loss = logistic_loss_grad(X, y, model, cfg.l2, grad_W, grad_b);
  }
  return model;
}

/// Row-wise softmax probabilities; each row sums to 1.
inline Matrix predict_proba(const LinearClassifier& model, const Matrix& X) {
  if (X.cols() != model.W.cols())
    throw std::invalid_argument("predict_proba: dimension mismatch");
  Matrix logits = X * model.W.transpose();
  logits.rowwise() += model.b.transpose();
  Matrix P(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double m = logits.row(i).maxCoeff();
    double sum = 0.0;
    for (Eigen::Index c = 0; c < logits.cols(); ++c) {
      P(i, c) = std::exp(logits(i, c) - m);
      sum += P(i, c);
    }
    P.row(i) /= sum;
  }
  return P;
}

/// Row-wise argmax with lowest-index tie-break.
inline std::vector<int> predict(const LinearClassifier& model, const Matrix& X) {
  const Matrix P = predict_proba(model, X);
  std::vector<int> out(static_cast<std::size_t>(P.rows()));
  for (Eigen::Index i = 0; i < P.rows(); ++i) {
    int best = 0;
    for (Eigen::Index c = 1; c < P.cols(); ++c)
      if (P(i, c) > P(i, best)) best = static_cast<int>(c);
    out[static_cast<std::size_t>(i)] = best;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ridge regression, closed form.
// ---------------------------------------------------------------------------

/// M = (A~^T A~ + lambda I)^-1 A~^T B~ on column-centered data; the offset
/// restores the output means.
inline LinearMap fit_ridge(const Matrix& A, const Matrix& B, double lambda) {
  if (A.rows() != B.rows())
    throw std::invalid_argument("fit_ridge: row count mismatch");
  if (!(lambda > 0)) throw std::invalid_argument("fit_ridge: lambda must be positive");

  const Vector mean_a = A.colwise().mean();
  const Vector mean_b = B.colwise().mean();
  const Matrix Ac = A.rowwise() - mean_a.transpose();
  const Matrix Bc = B.rowwise() - mean_b.transpose();

  Matrix gram = Ac.transpose() * Ac;
  gram.diagonal().array() += lambda;
  LinearMap map;
  map.M = gram.ldlt().solve(Ac.transpose() * Bc);
  map.offset = mean_b - map.M.transpose() * mean_a;
  return map;
}

inline Matrix ridge_predict(const LinearMap& map, const Matrix& A) {
  return (A * map.M).rowwise() + map.offset.transpose();
}

// ---------------------------------------------------------------------------
// Exact k nearest neighbors and ranking metrics.
// ---------------------------------------------------------------------------

/// Brute-force Euclidean k-NN among the rows of X for each query row index,
/// excluding the query itself; ties broken by lower index. Empty `queries`
/// means all rows.
inline std::vector<std::vector<int>> knn_indices(const Matrix& X, int k,
                                                 std::vector<int> queries = {}) {
  const int n = static_cast<int>(X.rows());
  if (k <= 0 || k >= n)
    throw std::invalid_argument("knn_indices: need 0 < k < n");
  if (queries.empty()) {
    queries.resize(static_cast<std::size_t>(n));
    std::iota(queries.begin(), queries.end(), 0);
  }

  // For moderate n an n x n Gram matrix turns the distance computation into
  // one GEMM; otherwise fall back to per-query scans.
  const bool use_gram = n <= 4096 && queries.size() > 8;
  Matrix gram;
  Vector sq;
  if (use_gram) {
    gram = X * X.transpose();
    sq = X.rowwise().squaredNorm();
  }

  std::vector<std::vector<int>> result(queries.size());
  std::vector<std::pair<double, int>> dist;
  dist.reserve(static_cast<std::size_t>(n - 1));
  for (std::size_t qi = 0; qi < queries.size(); ++qi) {
    const int q = queries[qi];
    if (q < 0 || q >= n) throw std::invalid_argument("knn_indices: bad query index");
    dist.clear();
    for (int j = 0; j < n; ++j) {
      if (j == q) continue;
      const double d2 = use_gram
                            ? sq(q) + sq(j) - 2.0 * gram(q, j)
                            : (X.row(q) - X.row(j)).squaredNorm();
      dist.emplace_back(d2, j);
    }
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
    auto& out = result[qi];
    out.resize(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) out[static_cast<std::size_t>(j)] = dist[static_cast<std::size_t>(j)].second;
  }
  return result;
}

/// Average ranks (1-based); ties get the mean of their positions.
inline std::vector<double> average_ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return values[static_cast<std::size_t>(a)] < values[static_cast<std::size_t>(b)]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n &&
           values[static_cast<std::size_t>(order[j + 1])] ==
               values[static_cast<std::size_t>(order[i])])
      ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;  // mean of i..j, 1-based
    for (std::size_t t = i; t <= j; ++t) ranks[static_cast<std::size_t>(order[t])] = r;
    i = j + 1;
  }
  return ranks;
}

namespace detail {

// num/den rounded to the nearest multiple of 2^-53 (ties to even), computed
// in integer space. Values on that grid have exactly representable
// complements 1 - x, which makes the AUC anti-symmetry identity hold
// bit-for-bit rather than up to rounding of the final division.
inline double exact_ratio_q53(std::uint64_t num, std::uint64_t den) {
  unsigned __int128 t = static_cast<unsigned __int128>(num) << 53;
  unsigned __int128 q = t / den;
  const unsigned __int128 twice_rem = (t % den) * 2;
  if (twice_rem > den || (twice_rem == den && (q & 1))) ++q;
  return static_cast<double>(static_cast<std::uint64_t>(q)) * 0x1.0p-53;
}

}  // namespace detail

/// Mann-Whitney AUC; ties contribute 1/2. Labels are 0/1. The returned value
/// satisfies roc_auc(1-s, y) == 1 - roc_auc(s, y) exactly whenever negation
/// preserves the score ordering and ties.
inline double roc_auc(const std::vector<double>& scores,
                      const std::vector<int>& labels) {
  if (scores.size() != labels.size() || scores.empty())
    throw std::invalid_argument("roc_auc: shape mismatch");
  std::size_t n_pos = 0;
  for (int v : labels) {
    if (v != 0 && v != 1) throw std::invalid_argument("roc_auc: labels must be 0/1");
    n_pos += static_cast<std::size_t>(v);
  }
  const std::size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw std::invalid_argument("roc_auc: both classes required");

  const auto ranks = average_ranks(scores);
  // ranks are half-integers; 2 * rank sums stay exact in integer arithmetic
  std::uint64_t twice_pos_rank_sum = 0;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == 1)
      twice_pos_rank_sum += static_cast<std::uint64_t>(2.0 * ranks[i] + 0.5);
  const std::uint64_t num = twice_pos_rank_sum - n_pos * (n_pos + 1);
  const std::uint64_t den = 2 * n_pos * n_neg;
  return detail::exact_ratio_q53(num, den);
}

// ---------------------------------------------------------------------------
// Split and score helpers shared by probes and attacks.
// ---------------------------------------------------------------------------

/// Per-class shuffled split; every class with >= 2 members lands on both
/// sides. Returns (train indices, test indices), each in ascending order.
inline std::pair<std::vector<int>, std::vector<int>> stratified_split(
    const std::vector<int>& y, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw std::invalid_argument("test fraction must lie in (0,1)");
  const int C = *std::max_element(y.begin(), y.end()) + 1;
  std::vector<std::vector<int>> per_class(static_cast<std::size_t>(C));
  for (std::size_t i = 0; i < y.size(); ++i)
    per_class[static_cast<std::size_t>(y[i])].push_back(static_cast<int>(i));

  Rng rng(seed_stream(seed, 0x511717));
  std::vector<int> train, test;
  for (auto& members : per_class) {
    if (members.empty()) continue;
    rng.shuffle(members);
    const int nc = static_cast<int>(members.size());
    int n_test = static_cast<int>(std::floor(test_fraction * nc + 0.5));
    if (nc >= 2) n_test = std::clamp(n_test, 1, nc - 1);
    else n_test = 0;
    for (int i = 0; i < nc; ++i)
      (i < n_test ? test : train).push_back(members[static_cast<std::size_t>(i)]);
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {train, test};
}

inline Matrix take_rows(const Matrix& X, const std::vector<int>& idx) {
  Matrix out(static_cast<Eigen::Index>(idx.size()), X.cols());
  for (std::size_t i = 0; i < idx.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = X.row(idx[i]);
  return out;
}

inline std::vector<int> take_labels(const std::vector<int>& y,
                                    const std::vector<int>& idx) {
  std::vector<int> out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = y[static_cast<std::size_t>(idx[i])];
  return out;
}

inline double accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
  if (pred.size() != truth.size() || pred.empty())
    throw std::invalid_argument("accuracy: shape mismatch");
  std::size_t hit = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hit += pred[i] == truth[i];
  return static_cast<double>(hit) / static_cast<double>(pred.size());
}

/// F1 per class, weighted by true-class support.
inline double weighted_f1(const std::vector<int>& pred,
                          const std::vector<int>& truth, int classes) {
  if (pred.size() != truth.size() || pred.empty())
    throw std::invalid_argument("weighted_f1: shape mismatch");
  std::vector<double> tp(static_cast<std::size_t>(classes), 0),
      fp(static_cast<std::size_t>(classes), 0), fn(static_cast<std::size_t>(classes), 0),
      support(static_cast<std::size_t>(classes), 0);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    support[static_cast<std::size_t>(truth[i])] += 1;
    if (pred[i] == truth[i]) tp[static_cast<std::size_t>(truth[i])] += 1;
    else {
      fp[static_cast<std::size_t>(pred[i])] += 1;
      fn[static_cast<std::size_t>(truth[i])] += 1;
    }
  }
  double f1 = 0.0;
  for (int c = 0; c < classes; ++c) {
    const auto cc = static_cast<std::size_t>(c);
    const double denom = 2 * tp[cc] + fp[cc] + fn[cc];
    if (denom > 0) f1 += support[cc] * (2 * tp[cc] / denom);
  }
  return f1 / static_cast<double>(pred.size());
}

}  // namespace tadp
