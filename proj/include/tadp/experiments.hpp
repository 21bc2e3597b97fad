#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "tadp/attacks.hpp"
#include "tadp/baselines.hpp"
#include "tadp/config.hpp"
#include "tadp/csv.hpp"
#include "tadp/mechanism.hpp"
#include "tadp/metrics.hpp"
#include "tadp/stats.hpp"
#include "tadp/theory.hpp"

namespace tadp {

/// One (dataset, method, tau, seed) evaluation.
struct TrialResult {
  std::string dataset;
  std::string method;
  double tau = std::nan("");      // nan for methods without a trust level
  double epsilon = std::nan("");  // nan for non-DP methods
  double sigma = std::nan("");
  std::uint64_t seed = 0;
  double accuracy = 0.0, f1 = 0.0;
  AttackReport attack;
  std::vector<double> knn;  // aligned with the configured k list
  double spearman_rho = 0.0;
  bool spearman_degenerate = false;
  double wall_seconds = 0.0;  // mechanism + attack time only
};

struct AggregateRow {
  std::string dataset, method;
  double tau = std::nan(""), epsilon = std::nan(""), sigma = std::nan("");
  int trials = 0;
  std::vector<double> mean, stddev;  // aligned with SweepTable::metric_names()
};

/// Raw trial rows in canonical order plus their per-cell aggregation.
struct SweepTable {
  std::vector<int> k_list{5, 10, 20};
  std::vector<TrialResult> rows;

  std::vector<std::string> metric_names() const {
    std::vector<std::string> names{"accuracy", "f1",         "mia",
                                   "aia",      "recon",      "overall",
                                   "reliability"};
    for (int k : k_list) names.push_back("knn_overlap@" + std::to_string(k));
    names.push_back("spearman_rho");
    names.push_back("wall_time_seconds");
    return names;
  }

  std::vector<double> metric_values(const TrialResult& r) const {
    std::vector<double> v{r.accuracy,       r.f1,
                          r.attack.priv_mia, r.attack.priv_aia,
                          r.attack.priv_recon, r.attack.overall,
                          r.attack.reliability};
    for (std::size_t i = 0; i < k_list.size(); ++i)
      v.push_back(i < r.knn.size() ? r.knn[i] : std::nan(""));
    v.push_back(r.spearman_rho);
    v.push_back(r.wall_seconds);
    return v;
  }

  void sort_canonical() {
    auto key_num = [](double x) { return std::isnan(x) ? -1e300 : x; };
    std::stable_sort(rows.begin(), rows.end(),
                     [&](const TrialResult& a, const TrialResult& b) {
                       if (a.dataset != b.dataset) return a.dataset < b.dataset;
                       if (a.method != b.method) return a.method < b.method;
                       if (key_num(a.tau) != key_num(b.tau))
                         return key_num(a.tau) < key_num(b.tau);
                       if (key_num(a.epsilon) != key_num(b.epsilon))
                         return key_num(a.epsilon) < key_num(b.epsilon);
                       return a.seed < b.seed;
                     });
  }

  std::string raw_header() const {
    std::string h = "dataset,method,tau,epsilon,sigma,seed,accuracy,f1," +
                    AttackReport::csv_header();
    for (int k : k_list) h += ",knn_overlap@" + std::to_string(k);
    h += ",spearman_rho,wall_time_seconds";
    return h;
  }

  std::string raw_row(const TrialResult& r) const {
    std::string line = r.dataset + "," + r.method + "," + csv_num(r.tau) + "," +
                       csv_num(r.epsilon) + "," + csv_num(r.sigma) + "," +
                       csv_num(r.seed) + "," + csv_num(r.accuracy) + "," +
                       csv_num(r.f1) + "," + r.attack.csv_row();
    for (std::size_t i = 0; i < k_list.size(); ++i)
      line += "," + csv_num(i < r.knn.size() ? r.knn[i] : std::nan(""));
    line += "," + csv_num(r.spearman_rho) + "," + csv_num(r.wall_seconds);
    return line;
  }

  void write_raw_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw data_error(path + ": cannot write");
    out << raw_header() << "\n";
    for (const auto& r : rows) out << raw_row(r) << "\n";
  }

  /// Per (dataset, method, tau, epsilon) mean and n-1 standard deviation.
  std::vector<AggregateRow> aggregate() const {
    std::vector<AggregateRow> groups;
    auto same_cell = [](const TrialResult& r, const AggregateRow& g) {
      auto eq = [](double a, double b) {
        return (std::isnan(a) && std::isnan(b)) || a == b;
      };
      return r.dataset == g.dataset && r.method == g.method && eq(r.tau, g.tau) &&
             eq(r.epsilon, g.epsilon);
    };
    std::vector<std::vector<std::vector<double>>> samples;  // group -> metric -> values
    const std::size_t n_metrics = metric_names().size();
    for (const auto& r : rows) {
      if (groups.empty() || !same_cell(r, groups.back())) {
        AggregateRow g;
        g.dataset = r.dataset;
        g.method = r.method;
        g.tau = r.tau;
        g.epsilon = r.epsilon;
        g.sigma = r.sigma;
        groups.push_back(g);
        samples.emplace_back(n_metrics);
      }
      groups.back().trials += 1;
      const auto vals = metric_values(r);
      for (std::size_t m = 0; m < n_metrics; ++m) samples.back()[m].push_back(vals[m]);
    }
    for (std::size_t g = 0; g < groups.size(); ++g) {
      for (std::size_t m = 0; m < n_metrics; ++m) {
        const auto& v = samples[g][m];
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        const double sd = v.size() > 1 ? std::sqrt(ss / (static_cast<double>(v.size()) - 1.0)) : 0.0;
        groups[g].mean.push_back(mean);
        groups[g].stddev.push_back(sd);
      }
    }
    return groups;
  }

  void write_aggregated_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw data_error(path + ": cannot write");
    out << "dataset,method,tau,epsilon,sigma,trials";
    for (const auto& name : metric_names()) out << "," << name << "_mean," << name << "_std";
    out << "\n";
    for (const auto& g : aggregate()) {
      out << g.dataset << "," << g.method << "," << csv_num(g.tau) << ","
          << csv_num(g.epsilon) << "," << csv_num(g.sigma) << "," << g.trials;
      for (std::size_t m = 0; m < g.mean.size(); ++m)
        out << "," << csv_num(g.mean[m]) << "," << csv_num(g.stddev[m]);
      out << "\n";
    }
  }
};

// ---------------------------------------------------------------------------
// Cell evaluation.
// ---------------------------------------------------------------------------

namespace detail {

struct CellMethod {
  enum class Type { tadp, baseline, noise_only, embedding_only, adaptive } type =
      Type::tadp;
  std::string name = "tadp_rme";
  double tau = 0.0;
  BaselineSpec baseline;
};

// Seed roles; every stream is derived from base_seed + trial only, so noise
// is shared across tau values and methods within a trial (common random
// numbers) and per-record-budget mechanisms are invariant to the matched
// epsilon by construction.
enum : std::uint64_t {
  kStreamMechanism = 1,
  kStreamAttack = 2,
  kStreamSplits = 3,
  kStreamKnn = 4,
  kStreamSpearman = 5,
  kStreamAdaptiveTau = 6,
  kStreamProbe = 7,
};

inline Matrix perturb_adaptive(const Matrix& X, double tau_center,
                               const BudgetConfig& budget, Rng& tau_rng,
                               Rng& noise_rng) {
  Matrix Y = X;
  for (Eigen::Index i = 0; i < Y.rows(); ++i) {
    const double tau_i =
        std::clamp(tau_rng.uniform(tau_center - 0.1, tau_center + 0.1), 0.0, 1.0);
    const double eps_i = trust_budget(TrustScore(tau_i), budget);
    const double s = noise_sigma(eps_i, budget.delta, budget.delta2);
    for (Eigen::Index j = 0; j < Y.cols(); ++j) Y(i, j) += s * noise_rng.gaussian();
  }
  return Y;
}

inline TrialResult evaluate_cell(const RawDataset& members,
                                 const RawDataset& holdout,
                                 const CellMethod& method,
                                 const BudgetConfig& budget, FitConfig fit,
                                 const MetricParams& metrics,
                                 std::uint64_t trial_seed) {
  using Clock = std::chrono::steady_clock;
  const Matrix Xc = clip_rows(members.features, budget.delta2);
  const Matrix Xhc = clip_rows(holdout.features, budget.delta2);

  TrialResult r;
  r.dataset = members.name;
  r.method = method.name;
  r.seed = trial_seed;
  fit.seed = seed_stream(trial_seed, kStreamSplits);

  Rng mech_rng(seed_stream(trial_seed, kStreamMechanism));
  Matrix Z, Zh;
  const auto t_mech_0 = Clock::now();
  switch (method.type) {
    case CellMethod::Type::tadp: {
      const TrustScore t(method.tau);
      const auto prot = protect(Xc, t, budget, mech_rng);
      Z = prot.Z;
      Zh = protect(Xhc, t, budget, mech_rng).Z;
      r.tau = method.tau;
      r.epsilon = prot.epsilon;
      r.sigma = prot.sigma;
      break;
    }
    case CellMethod::Type::noise_only: {
      r.tau = method.tau;
      r.epsilon = trust_budget(TrustScore(method.tau), budget);
      r.sigma = noise_sigma(r.epsilon, budget.delta, budget.delta2);
      Z = gaussian_perturb(Xc, r.sigma, mech_rng);
      Zh = gaussian_perturb(Xhc, r.sigma, mech_rng);
      break;
    }
    case CellMethod::Type::embedding_only: {
      r.tau = method.tau;
      r.epsilon = std::numeric_limits<double>::infinity();
      r.sigma = 0.0;
      Z = rme_embed(Xc, budget.effective_alpha(method.tau));
      Zh = rme_embed(Xhc, budget.effective_alpha(method.tau));
      break;
    }
    case CellMethod::Type::adaptive: {
      r.tau = method.tau;
      r.epsilon = trust_budget(TrustScore(method.tau), budget);
      r.sigma = noise_sigma(r.epsilon, budget.delta, budget.delta2);
      Rng tau_rng(seed_stream(trial_seed, kStreamAdaptiveTau));
      const double alpha = budget.effective_alpha(method.tau);
      Z = rme_embed(perturb_adaptive(Xc, method.tau, budget, tau_rng, mech_rng), alpha);
      Zh = rme_embed(perturb_adaptive(Xhc, method.tau, budget, tau_rng, mech_rng), alpha);
      break;
    }
    case CellMethod::Type::baseline: {
      Z = apply_baseline(method.baseline, Xc, mech_rng);
      Zh = apply_baseline(method.baseline, Xhc, mech_rng);
      switch (method.baseline.kind) {
        case BaselineKind::gaussian_dp:
          r.epsilon = method.baseline.epsilon;
          r.sigma = noise_sigma(method.baseline.epsilon, method.baseline.delta,
                                method.baseline.delta2);
          break;
        case BaselineKind::laplace_dp:
        case BaselineKind::personalized_dp:
          r.epsilon = method.baseline.epsilon;
          break;
        default:
          break;  // non-DP baselines carry no budget
      }
      break;
    }
  }
  const auto t_mech_1 = Clock::now();

  Rng attack_rng(seed_stream(trial_seed, kStreamAttack));
  const auto t_att_0 = Clock::now();
  r.attack = full_attack_suite(Z, Zh, Xc, members.labels, members.num_classes,
                               fit, attack_rng);
  const auto t_att_1 = Clock::now();
  r.wall_seconds = std::chrono::duration<double>(t_mech_1 - t_mech_0).count() +
                   std::chrono::duration<double>(t_att_1 - t_att_0).count();

  FitConfig probe_fit = fit;
  probe_fit.seed = seed_stream(trial_seed, kStreamProbe);
  std::tie(r.accuracy, r.f1) = probe_utility(Z, members.labels, probe_fit);
  r.knn = knn_overlap_multi(Xc, Z, metrics.k_list, metrics.sample_cap,
                            seed_stream(trial_seed, kStreamKnn));
  const auto sp = spearman_distance_corr(Xc, Z, metrics.pair_budget,
                                         seed_stream(trial_seed, kStreamSpearman));
  r.spearman_rho = sp.rho;
  r.spearman_degenerate = sp.degenerate;
  return r;
}

// Runs the task list in canonical order; on failure, flushes completed rows
// to raw.csv before propagating.
inline SweepTable run_cells(const ExperimentConfig& cfg,
                            const RawDataset& members, const RawDataset& holdout,
                            const std::vector<CellMethod>& methods,
                            const BudgetConfig* budget_override = nullptr) {
  SweepTable table;
  table.k_list = cfg.metrics.k_list;
  const BudgetConfig& budget = budget_override ? *budget_override : cfg.budget;
  try {
    for (const auto& method : methods)
      for (int trial = 0; trial < cfg.trials; ++trial)
        table.rows.push_back(evaluate_cell(members, holdout, method, budget,
                                           cfg.fit, cfg.metrics,
                                           cfg.base_seed + static_cast<std::uint64_t>(trial)));
  } catch (...) {
    if (!cfg.out_dir.empty()) {
      std::filesystem::create_directories(cfg.out_dir);
      table.sort_canonical();
      table.write_raw_csv(cfg.out_dir + "/raw.csv");
    }
    throw;
  }
  table.sort_canonical();
  return table;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Experiment drivers.
// ---------------------------------------------------------------------------

/// Pareto rows: one (tau, mean accuracy, mean overall privacy) point per tau
/// with a non-domination flag.
struct ParetoPoint {
  std::string dataset;
  double tau = 0.0, mean_accuracy = 0.0, mean_priv_overall = 0.0;
  bool non_dominated = true;
};

inline std::vector<ParetoPoint> pareto_points(const SweepTable& table) {
  std::vector<ParetoPoint> pts;
  const auto names = table.metric_names();
  for (const auto& g : table.aggregate()) {
    if (std::isnan(g.tau)) continue;
    ParetoPoint p;
    p.dataset = g.dataset;
    p.tau = g.tau;
    for (std::size_t m = 0; m < names.size(); ++m) {
      if (names[m] == "accuracy") p.mean_accuracy = g.mean[m];
      if (names[m] == "overall") p.mean_priv_overall = g.mean[m];
    }
    pts.push_back(p);
  }
  std::sort(pts.begin(), pts.end(), [](const ParetoPoint& a, const ParetoPoint& b) {
    return a.dataset != b.dataset ? a.dataset < b.dataset : a.tau < b.tau;
  });
  for (auto& p : pts)
    for (const auto& q : pts) {
      if (&p == &q || p.dataset != q.dataset) continue;
      const bool weakly_better = q.mean_accuracy >= p.mean_accuracy &&
                                 q.mean_priv_overall >= p.mean_priv_overall;
      const bool strictly = q.mean_accuracy > p.mean_accuracy ||
                            q.mean_priv_overall > p.mean_priv_overall;
      if (weakly_better && strictly) p.non_dominated = false;
    }
  return pts;
}

inline void emit_pareto(const SweepTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw data_error(path + ": cannot write");
  out << "dataset,tau,mean_accuracy,mean_priv_overall,non_dominated\n";
  for (const auto& p : pareto_points(table))
    out << p.dataset << "," << csv_num(p.tau) << "," << csv_num(p.mean_accuracy)
        << "," << csv_num(p.mean_priv_overall) << "," << (p.non_dominated ? 1 : 0)
        << "\n";
}

inline void write_standard_outputs(const SweepTable& table,
                                   const std::string& out_dir,
                                   bool with_pareto = false) {
  if (out_dir.empty()) return;
  std::filesystem::create_directories(out_dir);
  table.write_raw_csv(out_dir + "/raw.csv");
  table.write_aggregated_csv(out_dir + "/aggregated.csv");
  if (with_pareto) emit_pareto(table, out_dir + "/pareto.csv");
}

/// Trust sweep: the full mechanism across cfg.tau_grid x trials.
inline SweepTable run_tradeoff_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto [members, holdout] = load_member_holdout(cfg.dataset, cfg.base_seed);
  std::vector<detail::CellMethod> methods;
  for (double tau : cfg.tau_grid) {
    detail::CellMethod m;
    m.type = detail::CellMethod::Type::tadp;
    m.name = "tadp_rme";
    m.tau = tau;
    methods.push_back(m);
  }
  auto table = detail::run_cells(cfg, members, holdout, methods);
  write_standard_outputs(table, cfg.out_dir, /*with_pareto=*/true);
  return table;
}

/// Baseline comparison at matched budgets: DP baselines at each epsilon in
/// cfg.compare_epsilons, the trust mechanism at the tau hitting the same
/// epsilon, and non-DP baselines at their defaults.
inline SweepTable run_baseline_comparison(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto [members, holdout] = load_member_holdout(cfg.dataset, cfg.base_seed);

  std::vector<BaselineSpec> dp_kinds, non_dp;
  const std::vector<BaselineSpec>& pool =
      cfg.baselines.empty()
          ? std::vector<BaselineSpec>{make_baseline(BaselineKind::gaussian_dp),
                                      make_baseline(BaselineKind::laplace_dp),
                                      make_baseline(BaselineKind::personalized_dp),
                                      make_baseline(BaselineKind::random_projection),
                                      make_baseline(BaselineKind::additive_noise),
                                      make_baseline(BaselineKind::lsh),
                                      make_baseline(BaselineKind::binary_encoding),
                                      make_baseline(BaselineKind::reconstruction_resistant)}
          : cfg.baselines;
  for (const auto& b : pool) {
    const bool is_dp = b.kind == BaselineKind::gaussian_dp ||
                       b.kind == BaselineKind::laplace_dp ||
                       b.kind == BaselineKind::personalized_dp;
    (is_dp ? dp_kinds : non_dp).push_back(b);
  }

  std::vector<detail::CellMethod> methods;
  for (double eps : cfg.compare_epsilons) {
    for (auto spec : dp_kinds) {
      spec.epsilon = eps;
      spec.delta = cfg.budget.delta;
      spec.delta2 = cfg.budget.delta2;
      detail::CellMethod m;
      m.type = detail::CellMethod::Type::baseline;
      m.name = baseline_name(spec.kind);
      m.baseline = spec;
      methods.push_back(m);
    }
    detail::CellMethod m;
    m.type = detail::CellMethod::Type::tadp;
    m.name = "tadp_rme";
    m.tau = std::clamp((cfg.budget.eps_max - eps) /
                           std::max(1e-300, cfg.budget.eps_max - cfg.budget.eps_min),
                       0.0, 1.0);
    methods.push_back(m);
  }
  for (const auto& spec : non_dp) {
    detail::CellMethod m;
    m.type = detail::CellMethod::Type::baseline;
    m.name = baseline_name(spec.kind);
    m.baseline = spec;
    methods.push_back(m);
  }

  auto table = detail::run_cells(cfg, members, holdout, methods);
  write_standard_outputs(table, cfg.out_dir);
  return table;
}

/// Component ablation at cfg.ablation_tau: noise only, embedding only, the
/// fixed-trust pipeline, and the per-record adaptive pipeline.
inline SweepTable run_ablation(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto [members, holdout] = load_member_holdout(cfg.dataset, cfg.base_seed);
  std::vector<detail::CellMethod> methods(4);
  methods[0].type = detail::CellMethod::Type::noise_only;
  methods[0].name = "noise_only";
  methods[1].type = detail::CellMethod::Type::embedding_only;
  methods[1].name = "embedding_only";
  methods[2].type = detail::CellMethod::Type::tadp;
  methods[2].name = "fixed_tau";
  methods[3].type = detail::CellMethod::Type::adaptive;
  methods[3].name = "adaptive";
  for (auto& m : methods) m.tau = cfg.ablation_tau;

  auto table = detail::run_cells(cfg, members, holdout, methods);
  write_standard_outputs(table, cfg.out_dir);
  return table;
}

/// One-at-a-time parameter sensitivity around the base budget at
/// cfg.ablation_tau; the clip grid moves the sensitivity and clip radius
/// together.
inline SweepTable run_sensitivity(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto [members, holdout] = load_member_holdout(cfg.dataset, cfg.base_seed);

  SweepTable table;
  table.k_list = cfg.metrics.k_list;
  auto run_variant = [&](const std::string& label, const BudgetConfig& budget) {
    detail::CellMethod m;
    m.type = detail::CellMethod::Type::tadp;
    m.name = label;
    m.tau = cfg.ablation_tau;
    ExperimentConfig sub = cfg;
    sub.out_dir.clear();
    const auto part = detail::run_cells(sub, members, holdout, {m}, &budget);
    table.rows.insert(table.rows.end(), part.rows.begin(), part.rows.end());
  };

  for (double v : cfg.sensitivity.eps_min_grid) {
    BudgetConfig b = cfg.budget;
    b.eps_min = v;
    run_variant("eps_min=" + csv_num(v), b);
  }
  for (double v : cfg.sensitivity.eps_max_grid) {
    BudgetConfig b = cfg.budget;
    b.eps_max = v;
    run_variant("eps_max=" + csv_num(v), b);
  }
  for (double v : cfg.sensitivity.clip_grid) {
    BudgetConfig b = cfg.budget;
    b.delta2 = v;
    run_variant("clip=" + csv_num(v), b);
  }
  table.sort_canonical();
  write_standard_outputs(table, cfg.out_dir);
  return table;
}

/// Analytic curves for the distinguishability and partial-knowledge figures.
inline void write_theory_curves(const std::string& path, int kl_dim = 1,
                                int recovery_max_d = 20, int R = 2) {
  std::ofstream out(path);
  if (!out) throw data_error(path + ": cannot write");
  out << "curve,x,param_a,param_b,value\n";
  for (int i = 1; i < 1000; ++i) {
    const double r = i / 1000.0;
    out << "kl_lower_bound," << csv_num(r) << "," << kl_dim << ",,"
        << csv_num(kl_lower_bound(r, kl_dim)) << "\n";
  }
  for (const double frac : {0.0, 0.25, 0.5, 0.75, 0.9})
    for (int d = 1; d <= recovery_max_d; ++d)
      out << "recovery_probability," << d << "," << csv_num(frac) << "," << R
          << "," << csv_num(recovery_probability(d, frac, R)) << "\n";
}

}  // namespace tadp
