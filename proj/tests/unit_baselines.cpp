#include <catch2/catch_amalgamated.hpp>

#include "tadp/baselines.hpp"
#include "tadp/dataset.hpp"

using namespace tadp;

namespace {
Matrix test_matrix(int n, int d, double scale, std::uint64_t seed) {
  Rng rng(seed);
  Matrix X(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) X(i, j) = scale * rng.uniform();
  return clip_rows(X, 1.0);
}
}  // namespace

TEST_CASE("additive noise with zero scale is the identity") {
  auto spec = make_baseline(BaselineKind::additive_noise);
  spec.noise = 0.0;
  const Matrix X = test_matrix(20, 5, 1.0, 1);
  Rng rng(2);
  CHECK(apply_baseline(spec, X, rng) == X);
}

TEST_CASE("binary encoding thresholds and flips") {
  auto spec = make_baseline(BaselineKind::binary_encoding);
  spec.flip = 0.0;
  const Matrix X = Matrix::Constant(6, 4, 0.9);
  Rng rng(3);
  const Matrix B = apply_baseline(spec, X, rng);
  CHECK(B == Matrix::Constant(6, 4, 1.0));

  spec.flip = 0.25;
  Rng rng2(4);
  const Matrix C = apply_baseline(spec, test_matrix(30, 6, 1.0, 5), rng2);
  for (int i = 0; i < C.rows(); ++i)
    for (int j = 0; j < C.cols(); ++j) CHECK((C(i, j) == 0.0 || C(i, j) == 1.0));
}

TEST_CASE("gaussian_dp shares the mechanism noise path bit-for-bit") {
  auto spec = make_baseline(BaselineKind::gaussian_dp);
  spec.epsilon = 47.5;
  const Matrix X = test_matrix(15, 4, 1.0, 6);
  Rng r1(7), r2(7);
  const Matrix via_baseline = apply_baseline(spec, X, r1);
  const Matrix via_mechanism =
      gaussian_perturb(X, noise_sigma(47.5, spec.delta, spec.delta2), r2);
  CHECK(via_baseline == via_mechanism);
}

TEST_CASE("gaussian_dp empirical noise scale matches the calibration") {
  auto spec = make_baseline(BaselineKind::gaussian_dp);
  spec.epsilon = 47.5;
  const Matrix X = Matrix::Zero(2000, 10);
  Rng rng(8);
  const Matrix Y = apply_baseline(spec, X, rng);
  const double sd = std::sqrt(Y.array().square().mean());
  CHECK(sd == Catch::Approx(0.10200).margin(0.004));
}

TEST_CASE("lsh produces signs, reconstruction_resistant unit rows") {
  const Matrix X = test_matrix(25, 8, 1.0, 9);
  {
    auto spec = make_baseline(BaselineKind::lsh);
    spec.bits = 32;
    Rng rng(10);
    const Matrix S = apply_baseline(spec, X, rng);
    CHECK(S.cols() == 32);
    for (int i = 0; i < S.rows(); ++i)
      for (int j = 0; j < S.cols(); ++j) CHECK((S(i, j) == 1.0 || S(i, j) == -1.0));
  }
  {
    auto spec = make_baseline(BaselineKind::reconstruction_resistant);
    Rng rng(11);
    const Matrix R = apply_baseline(spec, X, rng);
    CHECK(R.cols() == 4);  // d/2
    for (int i = 0; i < R.rows(); ++i)
      CHECK(std::abs(R.row(i).norm() - 1.0) < 1e-9);
  }
}

TEST_CASE("random projection reduces dimension and adds noise") {
  const Matrix X = test_matrix(30, 16, 1.0, 12);
  auto spec = make_baseline(BaselineKind::random_projection);
  Rng rng(13);
  const Matrix P = apply_baseline(spec, X, rng);
  CHECK(P.cols() == 4);  // ceil(16/4)
  spec.proj_dim = 7;
  Rng rng2(13);
  CHECK(apply_baseline(spec, X, rng2).cols() == 7);
}

TEST_CASE("personalized_dp ignores the global epsilon") {
  const Matrix X = test_matrix(40, 6, 1.0, 14);
  auto spec = make_baseline(BaselineKind::personalized_dp);
  spec.epsilon = 15.0;
  Rng r1(15);
  const Matrix a = apply_baseline(spec, X, r1);
  spec.epsilon = 80.0;
  Rng r2(15);
  const Matrix b = apply_baseline(spec, X, r2);
  CHECK(a == b);
}

TEST_CASE("all baselines are deterministic given the seed") {
  const Matrix X = test_matrix(20, 8, 1.0, 16);
  for (auto kind : {BaselineKind::gaussian_dp, BaselineKind::laplace_dp,
                    BaselineKind::personalized_dp, BaselineKind::random_projection,
                    BaselineKind::additive_noise, BaselineKind::lsh,
                    BaselineKind::binary_encoding,
                    BaselineKind::reconstruction_resistant}) {
    const auto spec = make_baseline(kind);
    Rng r1(17), r2(17);
    CHECK(apply_baseline(spec, X, r1) == apply_baseline(spec, X, r2));
  }
}

TEST_CASE("laplace noise has the configured scale") {
  auto spec = make_baseline(BaselineKind::laplace_dp);
  spec.epsilon = 10.0;
  const int d = 4;
  const Matrix X = Matrix::Zero(5000, d);
  Rng rng(18);
  const Matrix Y = apply_baseline(spec, X, rng);
  // variance of Laplace(b) is 2 b^2 with b = sqrt(d)/eps
  const double b = std::sqrt(static_cast<double>(d)) / 10.0;
  const double var = Y.array().square().mean();
  CHECK(var == Catch::Approx(2 * b * b).epsilon(0.05));
}

TEST_CASE("invalid parameter combinations are rejected") {
  auto spec = make_baseline(BaselineKind::binary_encoding);
  spec.flip = 1.5;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  auto g = make_baseline(BaselineKind::gaussian_dp);
  g.epsilon = -1;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  auto l = make_baseline(BaselineKind::lsh);
  l.bits = 0;
  CHECK_THROWS_AS(l.validate(), std::invalid_argument);
  CHECK_THROWS_AS(parse_baseline("nope"), std::invalid_argument);
  CHECK(parse_baseline("lsh") == BaselineKind::lsh);
}
