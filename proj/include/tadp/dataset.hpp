#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tadp/errors.hpp"
#include "tadp/rng.hpp"

namespace tadp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Feature matrix in [0,1]^{n x d} with integer class labels in [0, C).
struct RawDataset {
  std::string name;
  Matrix features;
  std::vector<int> labels;
  int num_classes = 0;

  int n() const { return static_cast<int>(features.rows()); }
  int dim() const { return static_cast<int>(features.cols()); }

  void validate() const {
    if (features.rows() == 0 || features.cols() == 0)
      throw data_error(name + ": empty dataset");
    if (static_cast<int>(labels.size()) != n())
      throw data_error(name + ": label/feature count mismatch");
    if (num_classes < 2) throw data_error(name + ": need at least 2 classes");
    for (int lbl : labels)
      if (lbl < 0 || lbl >= num_classes)
        throw data_error(name + ": label out of range");
  }
};

/// L2 clipping radius; doubles as the mechanism sensitivity.
struct ClipConfig {
  double radius = 1.0;
};

namespace detail {

inline std::uint32_t read_be_u32(std::istream& in, const std::string& what) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4))
    throw data_error(what + ": truncated header");
  return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
         (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

inline std::vector<unsigned char> read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw data_error(path + ": cannot open");
  const auto size = in.tellg();
  in.seekg(0);
  std::vector<unsigned char> buf(static_cast<std::size_t>(size));
  if (size > 0 && !in.read(reinterpret_cast<char*>(buf.data()), size))
    throw data_error(path + ": read failed");
  return buf;
}

}  // namespace detail

/// Loads an IDX image/label pair (big-endian, magics 2051/2049).
/// Pixels are scaled by 1/255; images flattened to d = rows*cols.
inline RawDataset load_idx(const std::string& images_path,
                           const std::string& labels_path,
                           const std::string& name = "idx") {
  std::ifstream img(images_path, std::ios::binary);
  if (!img) throw data_error(images_path + ": cannot open");
  if (detail::read_be_u32(img, images_path) != 0x00000803u)
    throw data_error(images_path + ": bad magic number (want 0x00000803)");
  const std::uint32_t n = detail::read_be_u32(img, images_path);
  const std::uint32_t rows = detail::read_be_u32(img, images_path);
  const std::uint32_t cols = detail::read_be_u32(img, images_path);
  const std::size_t d = std::size_t(rows) * cols;
  if (n == 0 || d == 0) throw data_error(images_path + ": empty image file");

  std::vector<unsigned char> pixels(std::size_t(n) * d);
  if (!img.read(reinterpret_cast<char*>(pixels.data()),
                static_cast<std::streamsize>(pixels.size())))
    throw data_error(images_path + ": truncated pixel data");

  std::ifstream lab(labels_path, std::ios::binary);
  if (!lab) throw data_error(labels_path + ": cannot open");
  if (detail::read_be_u32(lab, labels_path) != 0x00000801u)
    throw data_error(labels_path + ": bad magic number (want 0x00000801)");
  const std::uint32_t n_labels = detail::read_be_u32(lab, labels_path);
  if (n_labels != n)
    throw data_error(name + ": count mismatch between images (" +
                     std::to_string(n) + ") and labels (" +
                     std::to_string(n_labels) + ")");
  std::vector<unsigned char> raw_labels(n);
  if (!lab.read(reinterpret_cast<char*>(raw_labels.data()), n))
    throw data_error(labels_path + ": truncated label data");

  RawDataset ds;
  ds.name = name;
  ds.features.resize(n, static_cast<Eigen::Index>(d));
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j)
      ds.features(i, static_cast<Eigen::Index>(j)) =
          pixels[i * d + j] / 255.0;
  ds.labels.assign(raw_labels.begin(), raw_labels.end());
  ds.num_classes = *std::max_element(ds.labels.begin(), ds.labels.end()) + 1;
  if (ds.num_classes < 2) ds.num_classes = 2;
  ds.validate();
  return ds;
}

/// Loads a CIFAR-10 binary batch: 3073-byte records, 1 label byte + 3072
/// pixels in plane order (R, G, B).
inline RawDataset load_cifar_batch(const std::string& path,
                                   const std::string& name = "cifar10") {
  constexpr std::size_t kRecord = 3073;
  const auto buf = detail::read_all(path);
  if (buf.empty() || buf.size() % kRecord != 0)
    throw data_error(path + ": file length " + std::to_string(buf.size()) +
                     " is not a multiple of 3073");
  const std::size_t n = buf.size() / kRecord;

  RawDataset ds;
  ds.name = name;
  ds.features.resize(static_cast<Eigen::Index>(n), 3072);
  ds.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned char* rec = buf.data() + i * kRecord;
    ds.labels[i] = rec[0];
    for (int j = 0; j < 3072; ++j)
      ds.features(static_cast<Eigen::Index>(i), j) = rec[1 + j] / 255.0;
  }
  ds.num_classes =
      std::max(2, *std::max_element(ds.labels.begin(), ds.labels.end()) + 1);
  ds.validate();
  return ds;
}

/// CSV with a header row; the column named `label` holds class indices, all
/// other columns are features, min-max normalized per column to [0,1].
inline RawDataset load_csv(const std::string& path,
                           const std::string& name = "csv") {
  std::ifstream in(path);
  if (!in) throw data_error(path + ": cannot open");
  std::string line;
  if (!std::getline(in, line)) throw data_error(path + ": empty file");

  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!s.empty() && s.back() == ',') out.emplace_back();
    return out;
  };

  const auto header = split(line);
  int label_col = -1;
  for (std::size_t j = 0; j < header.size(); ++j)
    if (header[j] == "label") label_col = static_cast<int>(j);
  if (label_col < 0) throw data_error(path + ": no column named 'label'");
  const int d = static_cast<int>(header.size()) - 1;
  if (d <= 0) throw data_error(path + ": no feature columns");

  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (static_cast<int>(cells.size()) != d + 1)
      throw data_error(path + ": ragged row with " +
                       std::to_string(cells.size()) + " cells");
    std::vector<double> row;
    row.reserve(static_cast<std::size_t>(d));
    for (std::size_t j = 0; j < cells.size(); ++j) {
      double v;
      try {
        v = std::stod(cells[j]);
      } catch (const std::exception&) {
        throw data_error(path + ": non-numeric cell '" + cells[j] + "'");
      }
      if (static_cast<int>(j) == label_col) {
        const int lbl = static_cast<int>(v);
        if (lbl < 0 || lbl != v) throw data_error(path + ": bad label " + cells[j]);
        labels.push_back(lbl);
      } else {
        row.push_back(v);
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw data_error(path + ": no data rows");

  RawDataset ds;
  ds.name = name;
  ds.features.resize(static_cast<Eigen::Index>(rows.size()), d);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (int j = 0; j < d; ++j)
      ds.features(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
  for (int j = 0; j < d; ++j) {
    const double lo = ds.features.col(j).minCoeff();
    const double hi = ds.features.col(j).maxCoeff();
    if (hi > lo)
      ds.features.col(j) = (ds.features.col(j).array() - lo) / (hi - lo);
    else
      ds.features.col(j).setZero();
  }
  ds.labels = std::move(labels);
  ds.num_classes =
      std::max(2, *std::max_element(ds.labels.begin(), ds.labels.end()) + 1);
  ds.validate();
  return ds;
}

/// Isotropic Gaussian clusters with distinct means in [0,1]^d, clamped to the
/// unit box. Labels are assigned round-robin so any prefix is near-balanced.
inline RawDataset synthesize_blobs(int n, int d, int classes, double spread,
                                   std::uint64_t seed) {
  if (classes < 2) throw data_error("blobs: need at least 2 classes");
  if (n < classes) throw data_error("blobs: n < class count");
  if (d <= 0) throw data_error("blobs: d must be positive");
  if (spread < 0) throw data_error("blobs: negative spread");

  Rng rng(seed_stream(seed, 0xB10B5));
  Matrix means(classes, d);
  for (int c = 0; c < classes; ++c)
    for (int j = 0; j < d; ++j) means(c, j) = rng.uniform(0.1, 0.9);

  RawDataset ds;
  ds.name = "blobs";
  ds.features.resize(n, d);
  ds.labels.resize(static_cast<std::size_t>(n));
  ds.num_classes = classes;
  for (int i = 0; i < n; ++i) {
    const int c = i % classes;
    ds.labels[static_cast<std::size_t>(i)] = c;
    for (int j = 0; j < d; ++j) {
      const double v = means(c, j) + spread * rng.gaussian();
      ds.features(i, j) = std::clamp(v, 0.0, 1.0);
    }
  }
  return ds;
}

/// m rows drawn uniformly without replacement, deterministic given seed.
inline RawDataset subsample(const RawDataset& ds, int m, std::uint64_t seed) {
  if (m > ds.n())
    throw data_error(ds.name + ": subsample size " + std::to_string(m) +
                     " exceeds n = " + std::to_string(ds.n()));
  if (m <= 0) throw data_error(ds.name + ": subsample size must be positive");
  Rng rng(seed_stream(seed, 0x5AB5));
  const auto pick = rng.sample_without_replacement(ds.n(), m);

  RawDataset out;
  out.name = ds.name;
  out.num_classes = ds.num_classes;
  out.features.resize(m, ds.dim());
  out.labels.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    out.features.row(i) = ds.features.row(pick[static_cast<std::size_t>(i)]);
    out.labels[static_cast<std::size_t>(i)] =
        ds.labels[static_cast<std::size_t>(pick[static_cast<std::size_t>(i)])];
  }
  return out;
}

/// Projects each row onto the L2 ball of radius C. Rows already inside
/// (up to a 1e-9 slack that makes the projection idempotent) are untouched.
inline Matrix clip_rows(const Matrix& X, double C) {
  if (C <= 0) throw std::invalid_argument("clip radius must be positive");
  Matrix out = X;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double norm = out.row(i).norm();
    if (norm > C + 1e-9) out.row(i) *= C / norm;
  }
  return out;
}

inline RawDataset clip_l2(const RawDataset& ds, const ClipConfig& cfg) {
  RawDataset out = ds;
  out.features = clip_rows(ds.features, cfg.radius);
  return out;
}

}  // namespace tadp
