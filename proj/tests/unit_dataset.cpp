#include <catch2/catch_amalgamated.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "tadp/dataset.hpp"

using namespace tadp;

namespace {

std::string temp_path(const std::string& stem) {
  return (std::filesystem::temp_directory_path() / stem).string();
}

void write_be_u32(std::ofstream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                        static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<char*>(b), 4);
}

// n 28x28 images; pixel value = (image index + pixel index) % 256, except
// image 0 pixel 0 which is forced to 255.
void write_idx_pair(const std::string& img_path, const std::string& lab_path,
                    int n, int n_labels, std::uint32_t img_magic = 0x00000803,
                    std::uint32_t lab_magic = 0x00000801) {
  std::ofstream img(img_path, std::ios::binary);
  write_be_u32(img, img_magic);
  write_be_u32(img, static_cast<std::uint32_t>(n));
  write_be_u32(img, 28);
  write_be_u32(img, 28);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < 784; ++j) {
      unsigned char v = (i == 0 && j == 0) ? 255 : static_cast<unsigned char>((i + j) % 256);
      img.write(reinterpret_cast<char*>(&v), 1);
    }
  std::ofstream lab(lab_path, std::ios::binary);
  write_be_u32(lab, lab_magic);
  write_be_u32(lab, static_cast<std::uint32_t>(n_labels));
  for (int i = 0; i < n_labels; ++i) {
    unsigned char v = static_cast<unsigned char>(i % 10);
    lab.write(reinterpret_cast<char*>(&v), 1);
  }
}

}  // namespace

TEST_CASE("load_idx parses a well-formed pair") {
  const auto img = temp_path("t_idx_images"), lab = temp_path("t_idx_labels");
  write_idx_pair(img, lab, 10, 10);
  const auto ds = load_idx(img, lab, "t");
  CHECK(ds.n() == 10);
  CHECK(ds.dim() == 784);
  CHECK(ds.features(0, 0) == 1.0);  // byte 255 -> exactly 1.0
  CHECK(ds.features.minCoeff() >= 0.0);
  CHECK(ds.features.maxCoeff() <= 1.0);
  CHECK(ds.labels[3] == 3);
}

TEST_CASE("load_idx rejects count mismatch and bad magic") {
  const auto img = temp_path("t_idx_images2"), lab = temp_path("t_idx_labels2");
  write_idx_pair(img, lab, 10, 9);
  CHECK_THROWS_WITH(load_idx(img, lab), Catch::Matchers::ContainsSubstring("count mismatch"));
  write_idx_pair(img, lab, 3, 3, 0x00000802);
  CHECK_THROWS_AS(load_idx(img, lab), data_error);
  write_idx_pair(img, lab, 3, 3, 0x00000803, 0x00000800);
  CHECK_THROWS_AS(load_idx(img, lab), data_error);
}

TEST_CASE("load_cifar_batch parses records and rejects truncation") {
  const auto path = temp_path("t_cifar.bin");
  {
    std::ofstream out(path, std::ios::binary);
    for (int i = 0; i < 5; ++i) {
      unsigned char label = (i == 2) ? 9 : static_cast<unsigned char>(i);
      out.write(reinterpret_cast<char*>(&label), 1);
      for (int j = 0; j < 3072; ++j) {
        unsigned char v = static_cast<unsigned char>(j % 256);
        out.write(reinterpret_cast<char*>(&v), 1);
      }
    }
  }
  const auto ds = load_cifar_batch(path);
  CHECK(ds.n() == 5);
  CHECK(ds.dim() == 3072);
  CHECK(ds.labels[2] == 9);
  CHECK(ds.features.maxCoeff() <= 1.0);

  std::filesystem::resize_file(path, 3073 * 5 - 100);
  CHECK_THROWS_AS(load_cifar_batch(path), data_error);
}

TEST_CASE("load_csv reads the label column and normalizes features") {
  const auto path = temp_path("t_data.csv");
  {
    std::ofstream out(path);
    out << "f0,label,f1\n";
    out << "0.0,0,10\n";
    out << "2.0,1,20\n";
    out << "4.0,1,30\n";
  }
  const auto ds = load_csv(path);
  CHECK(ds.n() == 3);
  CHECK(ds.dim() == 2);
  CHECK(ds.labels == std::vector<int>{0, 1, 1});
  CHECK(ds.features(1, 0) == Catch::Approx(0.5));
  CHECK(ds.features(2, 1) == Catch::Approx(1.0));
  CHECK(ds.features.minCoeff() == 0.0);

  std::ofstream(path) << "f0,f1\n1,2\n";
  CHECK_THROWS_AS(load_csv(path), data_error);
}

TEST_CASE("synthesize_blobs is deterministic and honors spread") {
  const auto a = synthesize_blobs(100, 2, 2, 0.01, 7);
  const auto b = synthesize_blobs(100, 2, 2, 0.01, 7);
  CHECK(a.features == b.features);
  CHECK(a.labels == b.labels);

  const auto zero = synthesize_blobs(50, 3, 2, 0.0, 3);
  // spread 0: every point of a class equals its mean
  for (int i = 2; i < zero.n(); ++i)
    CHECK(zero.features.row(i) == zero.features.row(i % 2));

  CHECK_THROWS_AS(synthesize_blobs(1, 2, 2, 0.1, 0), data_error);
}

TEST_CASE("subsample draws without replacement, deterministically") {
  const auto ds = synthesize_blobs(40, 3, 2, 0.1, 5);

  SECTION("m = n is a permutation of the original rows") {
    const auto perm = subsample(ds, 40, 1);
    Vector sums_orig = ds.features.rowwise().sum();
    Vector sums_perm = perm.features.rowwise().sum();
    std::vector<double> a(sums_orig.data(), sums_orig.data() + 40);
    std::vector<double> b(sums_perm.data(), sums_perm.data() + 40);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
  }
  SECTION("m = 1 draws a row of the input") {
    const auto one = subsample(ds, 1, 2);
    bool found = false;
    for (int i = 0; i < ds.n(); ++i)
      if (one.features.row(0) == ds.features.row(i)) found = true;
    CHECK(found);
  }
  SECTION("fixed seed reproduces the draw; m > n errors") {
    const auto s1 = subsample(ds, 7, 9);
    const auto s2 = subsample(ds, 7, 9);
    CHECK(s1.features == s2.features);
    CHECK_THROWS_AS(subsample(ds, 41, 0), data_error);
  }
}

TEST_CASE("clip_l2 projects onto the ball") {
  Matrix X(3, 2);
  X << 0, 0, 3, 4, 0.1, 0.1;
  const Matrix C = clip_rows(X, 1.0);
  CHECK(C.row(0) == X.row(0));
  CHECK(C(1, 0) == Catch::Approx(0.6).margin(1e-12));
  CHECK(C(1, 1) == Catch::Approx(0.8).margin(1e-12));
  CHECK(C.row(1).norm() == Catch::Approx(1.0).margin(1e-9));
  CHECK(C.row(2) == X.row(2));
}

TEST_CASE("clip_l2 is idempotent and preserves direction") {
  Rng rng(99);
  Matrix X(50, 8);
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 8; ++j) X(i, j) = 3.0 * rng.gaussian();
  const Matrix once = clip_rows(X, 1.0);
  const Matrix twice = clip_rows(once, 1.0);
  CHECK(once == twice);  // bit-exact
  for (int i = 0; i < 50; ++i) {
    CHECK(once.row(i).norm() <= 1.0 + 1e-9);
    const double cos_sim =
        X.row(i).dot(once.row(i)) / (X.row(i).norm() * once.row(i).norm());
    CHECK(cos_sim == Catch::Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("RawDataset invariants hold for loader outputs") {
  const auto ds = synthesize_blobs(30, 4, 3, 0.2, 1);
  CHECK_NOTHROW(ds.validate());
  CHECK(ds.features.minCoeff() >= 0.0);
  CHECK(ds.features.maxCoeff() <= 1.0);
}
