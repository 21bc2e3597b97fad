#include <catch2/catch_amalgamated.hpp>

#include "tadp/dataset.hpp"
#include "tadp/mechanism.hpp"
#include "tadp/metrics.hpp"

using namespace tadp;

TEST_CASE("probe_utility on separable and shuffled labels") {
  SECTION("separable blobs exceed 0.95") {
    const auto ds = synthesize_blobs(1000, 10, 4, 0.05, 31);
    const auto [acc, f1] = probe_utility(ds.features, ds.labels, FitConfig{});
    CHECK(acc > 0.95);
    CHECK(f1 > 0.95);
  }
  SECTION("shuffled labels land at chance for C = 10") {
    auto ds = synthesize_blobs(1500, 8, 10, 0.05, 32);
    Rng rng(77);
    rng.shuffle(ds.labels);
    const auto [acc, f1] = probe_utility(ds.features, ds.labels, FitConfig{});
    (void)f1;
    CHECK(acc > 0.05);
    CHECK(acc < 0.15);
  }
  SECTION("single-class fold errors") {
    Matrix X = Matrix::Random(20, 3);
    std::vector<int> y(20, 0);
    CHECK_THROWS_AS(probe_utility(X, y, FitConfig{}), std::invalid_argument);
  }
}

TEST_CASE("knn_overlap identities") {
  const auto ds = synthesize_blobs(120, 5, 3, 0.2, 41);
  const Matrix& X = ds.features;
  CHECK(knn_overlap(X, X, 5, 1000, 1) == 1.0);
  CHECK(knn_overlap(X, 2.0 * X, 5, 1000, 1) == 1.0);  // scale-invariant
}

TEST_CASE("knn_overlap of a verified disjoint re-pairing is zero") {
  // Tight pairs far apart; k = 1 neighbors are the pair partners. Z re-pairs
  // every point with a different partner.
  const int pairs = 6;
  Matrix X(2 * pairs, 1), Z(2 * pairs, 1);
  for (int p = 0; p < pairs; ++p) {
    X(2 * p, 0) = 100.0 * p;
    X(2 * p + 1, 0) = 100.0 * p + 1.0;
  }
  // partner in Z: (2p) pairs with (2p+1+2) mod 2*pairs etc. Lay out Z so that
  // point 2p sits next to point 2((p+1) % pairs)+1 instead.
  for (int p = 0; p < pairs; ++p) {
    Z(2 * p, 0) = 100.0 * p;
    Z((2 * (p + pairs - 1) % (2 * pairs)) + 1, 0) = 100.0 * p + 1.0;
  }
  const auto nx = knn_indices(X, 1);
  const auto nz = knn_indices(Z, 1);
  for (int i = 0; i < 2 * pairs; ++i) CHECK(nx[i][0] != nz[i][0]);  // oracle
  CHECK(knn_overlap(X, Z, 1, 1000, 0) == 0.0);
}

TEST_CASE("knn_overlap is non-increasing in noise on blobs") {
  const auto ds = synthesize_blobs(300, 6, 3, 0.05, 55);
  const std::vector<double> sigmas{0.0, 0.05, 0.2, 1.0};
  std::vector<double> means;
  for (double s : sigmas) {
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      Rng rng(seed_stream(900, seed));
      const Matrix Y = gaussian_perturb(ds.features, s, rng);
      total += knn_overlap(ds.features, Y, 5, 1000, seed);
    }
    means.push_back(total / 5.0);
  }
  for (std::size_t i = 1; i < means.size(); ++i)
    CHECK(means[i] <= means[i - 1] + 1e-9);
}

TEST_CASE("embedding distorts neighborhoods on blobs") {
  const auto ds = synthesize_blobs(300, 6, 3, 0.1, 66);
  const Matrix Z = rme_embed(ds.features, 2.0 * M_PI);
  CHECK(knn_overlap(ds.features, Z, 5, 1000, 2) < 1.0);
}

TEST_CASE("rank_correlation hand examples") {
  SECTION("ranks (1,2,3) vs (2,1,3) give 0.5") {
    const auto r = rank_correlation({1.0, 2.0, 3.0}, {2.0, 1.0, 3.0});
    CHECK_FALSE(r.degenerate);
    CHECK(r.rho == 0.5);
  }
  SECTION("identical lists give exactly 1") {
    const auto r = rank_correlation({0.3, 0.9, 0.1, 0.5}, {0.3, 0.9, 0.1, 0.5});
    CHECK(r.rho == 1.0);
  }
}

TEST_CASE("spearman_distance_corr identities and reversal") {
  const auto ds = synthesize_blobs(60, 4, 3, 0.3, 71);
  const Matrix& X = ds.features;
  SECTION("identical spaces give rho = 1") {
    const auto r = spearman_distance_corr(X, X, 100000, 5);
    CHECK_FALSE(r.degenerate);
    CHECK(r.rho == 1.0);
  }
  SECTION("verified rank reversal gives rho = -1") {
    Matrix A(3, 1), B(3, 1);
    A << 0, 1, 3;  // distance ranks (d01,d02,d12) = (1,3,2)
    B << 0, 5, 1;  // distance ranks (3,1,2) — exact reversal
    const auto da = std::vector<double>{1.0, 3.0, 2.0};
    const auto db = std::vector<double>{3.0, 1.0, 2.0};
    CHECK(average_ranks(da) == std::vector<double>{1, 3, 2});
    CHECK(average_ranks(db) == std::vector<double>{3, 1, 2});
    const auto r = spearman_distance_corr(A, B, 100, 0);
    CHECK(r.rho == -1.0);
  }
  SECTION("degenerate distances flag and return 0") {
    const Matrix same = Matrix::Constant(10, 3, 0.5);
    const auto r = spearman_distance_corr(same, X.topRows(10), 100, 0);
    CHECK(r.degenerate);
    CHECK(r.rho == 0.0);
  }
}

TEST_CASE("metrics are invariant under identical row permutation") {
  const auto ds = synthesize_blobs(80, 5, 4, 0.2, 81);
  const Matrix& X = ds.features;
  Rng noise(5);
  const Matrix Z = gaussian_perturb(X, 0.1, noise);

  std::vector<int> perm(80);
  std::iota(perm.begin(), perm.end(), 0);
  Rng shuffler(6);
  shuffler.shuffle(perm);
  Matrix Xp(80, 5), Zp(80, Z.cols());
  for (int i = 0; i < 80; ++i) {
    Xp.row(perm[static_cast<std::size_t>(i)]) = X.row(i);
    Zp.row(perm[static_cast<std::size_t>(i)]) = Z.row(i);
  }

  // full sample / all pairs, so the sampled sets coincide
  CHECK(knn_overlap(X, Z, 5, 100, 3) == knn_overlap(Xp, Zp, 5, 100, 3));
  const auto a = spearman_distance_corr(X, Z, 100000, 4);
  const auto b = spearman_distance_corr(Xp, Zp, 100000, 4);
  CHECK(a.rho == Catch::Approx(b.rho).margin(1e-12));
}
