#pragma once

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <set>
#include <string>
#include <vector>

#include "tadp/baselines.hpp"
#include "tadp/dataset.hpp"
#include "tadp/errors.hpp"
#include "tadp/learners.hpp"
#include "tadp/mechanism.hpp"

namespace tadp {

struct BlobsParams {
  int n = 1200;
  int d = 16;
  int classes = 4;
  double spread = 0.05;
};

/// Where the data comes from and how it is carved into the protected member
/// set and the disjoint nonmember holdout used by membership inference.
struct DatasetSpec {
  std::string source = "blobs";  // blobs | idx | cifar | csv
  std::string name;              // label used in result CSVs
  std::string images, labels;    // idx pair
  std::string path;              // cifar batch / csv file
  int subsample = 0;             // member rows; 0 = all remaining after holdout
  int holdout = 2000;            // nonmember rows
  BlobsParams blobs;
};

struct MetricParams {
  std::vector<int> k_list{5, 10, 20};
  int sample_cap = 1000;
  long pair_budget = 100000;
};

struct SensitivityGrids {
  std::vector<double> eps_min_grid{10, 15, 20, 30};
  std::vector<double> eps_max_grid{40, 60, 80, 100};
  std::vector<double> clip_grid{0.5, 1.0, 2.0};
};

struct ExperimentConfig {
  int version = 1;
  DatasetSpec dataset;
  std::vector<double> tau_grid{0.0, 0.1, 0.25, 0.5, 0.75, 0.85, 0.95, 1.0};
  BudgetConfig budget;
  FitConfig fit;
  MetricParams metrics;
  int trials = 5;
  std::uint64_t base_seed = 42;
  std::string out_dir = "out";
  std::vector<BaselineSpec> baselines;
  std::vector<double> compare_epsilons{15.0, 47.5, 80.0};
  double ablation_tau = 0.5;
  SensitivityGrids sensitivity;

  void validate() const {
    if (version != 1) throw config_error("unsupported config version");
    if (tau_grid.empty()) throw config_error("tau grid must be nonempty");
    for (double t : tau_grid)
      if (!(t >= 0.0 && t <= 1.0))
        throw config_error("tau values must lie in [0,1]");
    if (trials < 1) throw config_error("trials must be >= 1");
    if (dataset.holdout < 0 || dataset.subsample < 0)
      throw config_error("dataset sizes must be nonnegative");
    try {
      budget.validate();
    } catch (const std::invalid_argument& e) {
      throw config_error(e.what());
    }
    if (metrics.k_list.empty()) throw config_error("metrics.k_list must be nonempty");
    for (const auto& b : baselines) {
      try {
        b.validate();
      } catch (const std::invalid_argument& e) {
        throw config_error(e.what());
      }
    }
  }
};

namespace detail {

using json = nlohmann::json;

inline void check_keys(const json& obj, const std::set<std::string>& allowed,
                       const std::string& where) {
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key))
      throw config_error("unknown key '" + key + "' in " + where);
}

template <typename T>
void maybe(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

inline void parse_dataset(const json& j, DatasetSpec& ds) {
  check_keys(j, {"source", "name", "images", "labels", "path", "subsample",
                 "holdout", "blobs"},
             "dataset");
  maybe(j, "source", ds.source);
  maybe(j, "name", ds.name);
  maybe(j, "images", ds.images);
  maybe(j, "labels", ds.labels);
  maybe(j, "path", ds.path);
  maybe(j, "subsample", ds.subsample);
  maybe(j, "holdout", ds.holdout);
  if (j.contains("blobs")) {
    const auto& b = j.at("blobs");
    check_keys(b, {"n", "d", "classes", "spread"}, "dataset.blobs");
    maybe(b, "n", ds.blobs.n);
    maybe(b, "d", ds.blobs.d);
    maybe(b, "classes", ds.blobs.classes);
    maybe(b, "spread", ds.blobs.spread);
  }
  if (ds.source != "blobs" && ds.source != "idx" && ds.source != "cifar" &&
      ds.source != "csv")
    throw config_error("dataset.source must be one of blobs|idx|cifar|csv");
}

inline BaselineSpec parse_baseline_spec(const json& j) {
  check_keys(j, {"kind", "epsilon", "delta", "delta2", "proj_dim", "noise",
                 "bits", "flip", "pdp_eps_lo", "pdp_eps_hi"},
             "baselines[]");
  if (!j.contains("kind")) throw config_error("baseline entry missing 'kind'");
  BaselineSpec spec;
  try {
    spec = make_baseline(parse_baseline(j.at("kind").get<std::string>()));
  } catch (const std::invalid_argument& e) {
    throw config_error(e.what());
  }
  maybe(j, "epsilon", spec.epsilon);
  maybe(j, "delta", spec.delta);
  maybe(j, "delta2", spec.delta2);
  maybe(j, "proj_dim", spec.proj_dim);
  maybe(j, "noise", spec.noise);
  maybe(j, "bits", spec.bits);
  maybe(j, "flip", spec.flip);
  maybe(j, "pdp_eps_lo", spec.pdp_eps_lo);
  maybe(j, "pdp_eps_hi", spec.pdp_eps_hi);
  return spec;
}

}  // namespace detail

/// Parses and validates a JSON experiment config; unknown keys are errors.
inline ExperimentConfig parse_config(const nlohmann::json& j) {
  using detail::check_keys;
  using detail::maybe;
  check_keys(j, {"version", "dataset", "tau_grid", "budget", "fit", "metrics",
                 "trials", "base_seed", "out_dir", "baselines",
                 "compare_epsilons", "ablation_tau", "sensitivity"},
             "config");
  ExperimentConfig cfg;
  if (!j.contains("version")) throw config_error("config missing 'version'");
  cfg.version = j.at("version").get<int>();

  if (j.contains("dataset")) detail::parse_dataset(j.at("dataset"), cfg.dataset);
  maybe(j, "tau_grid", cfg.tau_grid);
  if (j.contains("budget")) {
    const auto& b = j.at("budget");
    check_keys(b, {"eps_min", "eps_max", "delta", "delta2", "alpha",
                   "adaptive_alpha"},
               "budget");
    maybe(b, "eps_min", cfg.budget.eps_min);
    maybe(b, "eps_max", cfg.budget.eps_max);
    maybe(b, "delta", cfg.budget.delta);
    maybe(b, "delta2", cfg.budget.delta2);
    maybe(b, "alpha", cfg.budget.alpha);
    maybe(b, "adaptive_alpha", cfg.budget.adaptive_alpha);
  }
  if (j.contains("fit")) {
    const auto& f = j.at("fit");
    check_keys(f, {"l2", "max_epochs", "tol", "lr"}, "fit");
    maybe(f, "l2", cfg.fit.l2);
    maybe(f, "max_epochs", cfg.fit.max_epochs);
    maybe(f, "tol", cfg.fit.tol);
    maybe(f, "lr", cfg.fit.lr);
  }
  if (j.contains("metrics")) {
    const auto& m = j.at("metrics");
    check_keys(m, {"k_list", "sample_cap", "pair_budget"}, "metrics");
    maybe(m, "k_list", cfg.metrics.k_list);
    maybe(m, "sample_cap", cfg.metrics.sample_cap);
    maybe(m, "pair_budget", cfg.metrics.pair_budget);
  }
  maybe(j, "trials", cfg.trials);
  maybe(j, "base_seed", cfg.base_seed);
  maybe(j, "out_dir", cfg.out_dir);
  if (j.contains("baselines"))
    for (const auto& b : j.at("baselines"))
      cfg.baselines.push_back(detail::parse_baseline_spec(b));
  maybe(j, "compare_epsilons", cfg.compare_epsilons);
  maybe(j, "ablation_tau", cfg.ablation_tau);
  if (j.contains("sensitivity")) {
    const auto& s = j.at("sensitivity");
    check_keys(s, {"eps_min_grid", "eps_max_grid", "clip_grid"}, "sensitivity");
    maybe(s, "eps_min_grid", cfg.sensitivity.eps_min_grid);
    maybe(s, "eps_max_grid", cfg.sensitivity.eps_max_grid);
    maybe(s, "clip_grid", cfg.sensitivity.clip_grid);
  }
  cfg.validate();
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error(path + ": cannot open config");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw config_error(path + ": " + e.what());
  }
  try {
    return parse_config(j);
  } catch (const nlohmann::json::exception& e) {
    throw config_error(path + ": " + e.what());
  }
}

/// Interprets the CLI --dataset value: "blobs", a CSV file, a CIFAR batch
/// (.bin), or a directory holding an IDX train pair.
inline DatasetSpec resolve_dataset_flag(const std::string& value) {
  DatasetSpec ds;
  if (value == "blobs") {
    ds.source = "blobs";
    ds.name = "blobs";
    return ds;
  }
  auto ends_with = [&](const std::string& suffix) {
    return value.size() >= suffix.size() &&
           value.compare(value.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  if (ends_with(".csv")) {
    ds.source = "csv";
    ds.path = value;
    ds.name = "csv";
    return ds;
  }
  if (ends_with(".bin")) {
    ds.source = "cifar";
    ds.path = value;
    ds.name = "cifar10";
    return ds;
  }
  ds.source = "idx";
  ds.images = value + "/train-images-idx3-ubyte";
  ds.labels = value + "/train-labels-idx1-ubyte";
  const auto base = std::filesystem::path(value).filename().string();
  ds.name = base.empty() ? "idx" : base;
  return ds;
}

/// Loads the configured source and carves it into (members, holdout), both
/// drawn by one uniform subsample so they are disjoint.
inline std::pair<RawDataset, RawDataset> load_member_holdout(
    const DatasetSpec& spec, std::uint64_t base_seed) {
  RawDataset full;
  if (spec.source == "blobs") {
    const int want = (spec.subsample > 0 ? spec.subsample : spec.blobs.n) +
                     spec.holdout;
    full = synthesize_blobs(want, spec.blobs.d, spec.blobs.classes,
                            spec.blobs.spread, seed_stream(base_seed, 0xB0B));
  } else if (spec.source == "idx") {
    full = load_idx(spec.images, spec.labels, spec.name.empty() ? "idx" : spec.name);
  } else if (spec.source == "cifar") {
    full = load_cifar_batch(spec.path, spec.name.empty() ? "cifar10" : spec.name);
  } else if (spec.source == "csv") {
    full = load_csv(spec.path, spec.name.empty() ? "csv" : spec.name);
  } else {
    throw config_error("unknown dataset source '" + spec.source + "'");
  }
  if (!spec.name.empty()) full.name = spec.name;

  int members = spec.subsample > 0 ? spec.subsample : full.n() - spec.holdout;
  if (members <= 0) throw data_error(full.name + ": no member rows left");
  if (members + spec.holdout > full.n())
    throw data_error(full.name + ": subsample + holdout (" +
                     std::to_string(members + spec.holdout) + ") exceeds n = " +
                     std::to_string(full.n()));

  const RawDataset drawn =
      subsample(full, members + spec.holdout, seed_stream(base_seed, 0xD5A));
  RawDataset member_ds, holdout_ds;
  member_ds.name = holdout_ds.name = drawn.name;
  member_ds.num_classes = holdout_ds.num_classes = drawn.num_classes;
  member_ds.features = drawn.features.topRows(members);
  member_ds.labels.assign(drawn.labels.begin(), drawn.labels.begin() + members);
  holdout_ds.features = drawn.features.bottomRows(spec.holdout);
  holdout_ds.labels.assign(drawn.labels.begin() + members, drawn.labels.end());
  return {member_ds, holdout_ds};
}

}  // namespace tadp
