#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <mutex>
#include <vector>

#include "fracdens/density.hpp"
#include "fracdens/stats.hpp"

namespace fracdens {

namespace streams {
constexpr uint64_t kOuterNoise = 1;
constexpr uint64_t kBridge = 2;
constexpr uint64_t kSimulate = 3;
}  // namespace streams

// ---------------------------------------------------------------------------
// Conditional density p_T(ell; y): exact Gaussian prefactor times the mean
// Girsanov weight over Wiener-Liouville bridge draws with x = y - ell(T).
// The centered bridge draws are shared across the whole y-list (common random
// numbers), only the mean shift and the weights differ per y.
// ---------------------------------------------------------------------------
inline std::vector<DensityEstimate> conditional_density_batch(
    const ModelSpec& m, const SampledPath& ell, const std::vector<Eigen::VectorXd>& ys, int n_paths,
    uint64_t seed, uint64_t replica = 0, int workers = 1, const ExactBridgeSampler* sampler = nullptr,
    const GirsanovEvaluator* evaluator = nullptr) {
  if (n_paths < 2) throw std::invalid_argument("conditional_density: n_paths must be >= 2");
  const Grid& grid = ell.grid;
  if (!(grid.t_end() > 0.0) || std::abs(grid.t0) > 1e-12)
    throw std::invalid_argument("conditional_density: ell must live on [0, T], T > 0");
  std::optional<ExactBridgeSampler> local_sampler;
  if (!sampler) {
    local_sampler.emplace(grid, m.hurst);
    sampler = &*local_sampler;
  }
  std::optional<GirsanovEvaluator> local_eval;
  if (!evaluator) {
    local_eval.emplace(m, grid);
    evaluator = &*local_eval;
  }

  const int n_y = static_cast<int>(ys.size());
  const Eigen::VectorXd ell_t = ell.at(grid.n_steps);
  std::vector<double> prefactor(n_y);
  std::vector<Eigen::VectorXd> xs(n_y);
  for (int i = 0; i < n_y; ++i) {
    prefactor[i] = liouville_endpoint_density(ell_t, ys[i], grid.t_end(), m);
    xs[i] = ys[i] - ell_t;
  }

  Eigen::MatrixXd weights(n_paths, n_y);
  std::vector<char> clamped(n_paths, 0);
  parallel_for(n_paths, workers, [&](int p) {
    Eigen::MatrixXd centered = sampler->sample_centered(seed, stream_id(streams::kBridge, replica, p), m.dimension);
    Eigen::MatrixXd shifted(centered.rows(), centered.cols());
    for (int i = 0; i < n_y; ++i) {
      shifted = centered;
      sampler->add_mean(shifted, xs[i]);
      double lw = evaluator->log_weight(ell, shifted);
      if (lw > 700.0) {
        lw = 700.0;
        clamped[p] = 1;
      }
      weights(p, i) = std::exp(lw);
    }
  });

  std::vector<DensityEstimate> out(n_y);
  long n_clamped = std::count(clamped.begin(), clamped.end(), char(1));
  for (int i = 0; i < n_y; ++i) {
    double sum = 0.0, max_w = 0.0;
    for (int p = 0; p < n_paths; ++p) {
      sum += weights(p, i);
      max_w = std::max(max_w, weights(p, i));
    }
    double mean = sum / n_paths;
    double ss = 0.0, sum_sq = 0.0;
    for (int p = 0; p < n_paths; ++p) {
      double d = weights(p, i) - mean;
      ss += d * d;
      sum_sq += weights(p, i) * weights(p, i);
    }
    DensityEstimate& e = out[i];
    e.value = prefactor[i] * mean;
    e.stderr_ = prefactor[i] * std::sqrt(ss / (n_paths - 1) / n_paths);
    e.n_paths = n_paths;
    e.diagnostics.weight_ess = sum_sq > 0.0 ? sum * sum / sum_sq : 0.0;
    e.diagnostics.max_weight_share = sum > 0.0 ? max_w / sum : 0.0;
    e.diagnostics.low_ess = e.diagnostics.weight_ess < 10.0;
    e.diagnostics.clamped_weights = n_clamped;
    e.diagnostics.factorization_jittered = sampler->jittered();
  }
  return out;
}

inline DensityEstimate conditional_density(const ModelSpec& m, const ConditioningPath& ell,
                                           const Eigen::VectorXd& y, int n_paths, uint64_t seed,
                                           int workers = 1) {
  return conditional_density_batch(m, ell.ell, {y}, n_paths, seed, 0, workers)[0];
}

// ---------------------------------------------------------------------------
// History-augmented engine shared by the transition, Chapman-Kolmogorov and
// stationary estimators: outer draws provide a conditioning path
// ell = z + sigma * (history field), inner Monte Carlo provides p_T(ell; y).
// ---------------------------------------------------------------------------

struct HistoryParams {
  double t_hor = 1.0;    // conditional horizon T0
  double dt_hor = 1.0 / 128;
  double t_sim = 0.0;    // outer Euler horizon (0: condition on the raw past)
  double dt_sim = 1.0 / 64;
  double t_past = 0.0;   // 0 -> 100 * t_hor
  double dt_seam = 0.0;  // 0 -> dt_hor / 4
  int n_outer = 200;
  int n_inner = 1000;
  int workers = 1;

  double effective_t_past() const { return t_past > 0.0 ? t_past : 100.0 * t_hor; }
  double effective_dt_seam() const { return dt_seam > 0.0 ? dt_seam : dt_hor / 4.0; }
};

struct BurnDiagnostics {
  std::vector<double> times;
  std::vector<double> running_mean;  // |Y_t| averaged over replicas
  std::vector<double> running_var;
};

struct HistoryEngineResult {
  std::vector<DensityEstimate> per_y;
  Eigen::MatrixXd replica_values;  // (n_outer x n_y), for nested-error analysis
  BurnDiagnostics burn;
  bool contraction_warn = false;
};

inline HistoryEngineResult history_conditional_density(const ModelSpec& m, const Eigen::VectorXd& y0,
                                                       const std::vector<Eigen::VectorXd>& ys,
                                                       const HistoryParams& p, uint64_t seed) {
  const int nc = m.dimension;
  const double t_past = p.effective_t_past();
  PastSpec past{t_past, p.effective_dt_seam(), 16, false};
  auto past_blocks = make_past_blocks(past);
  Grid h_grid = make_grid(0.0, p.t_hor, p.dt_hor);

  const bool simulate = p.t_sim > 0.0;
  Grid sim_grid = simulate ? make_grid(0.0, p.t_sim, p.dt_sim) : Grid(0.0, p.dt_hor, 1);

  // weight matrices shared by every replica
  HistoryWeights ph_sim = simulate ? HistoryWeights(m.hurst, past_blocks, sim_grid, 0.0, sim_grid)
                                   : HistoryWeights(m.hurst, past_blocks, sim_grid, 0.0, h_grid);
  std::optional<HistoryWeights> hist_at_base;
  std::optional<LiouvilleWeights> lw_sim;
  if (simulate) {
    hist_at_base.emplace(m.hurst, past_blocks, sim_grid, p.t_sim, h_grid);
    lw_sim.emplace(m.hurst, sim_grid.dt, sim_grid.n_steps);
  }
  ExactBridgeSampler sampler(h_grid, m.hurst);
  GirsanovEvaluator evaluator(m, h_grid);

  const int n_y = static_cast<int>(ys.size());
  HistoryEngineResult out;
  out.replica_values.resize(p.n_outer, n_y);

  // burn-in checkpoints
  const int n_checks = simulate ? 9 : 0;
  Eigen::MatrixXd check_sum = Eigen::MatrixXd::Zero(std::max(n_checks, 1), 2);
  std::vector<int> check_nodes;
  for (int i = 1; i <= n_checks; ++i) check_nodes.push_back(sim_grid.n_steps * i / n_checks);
  std::mutex check_mutex;

  parallel_for(p.n_outer, p.workers, [&](int r) {
    auto w = sample_two_sided_wiener(past, sim_grid, seed, stream_id(streams::kOuterNoise, r), nc);
    SampledPath ell(h_grid, nc);
    if (simulate) {
      SampledPath hist0 = ph_sim.evaluate(w);
      Eigen::MatrixXd inno;
      lw_sim->apply(w.future_increments, inno);
      SampledPath fbm(sim_grid, Eigen::MatrixXd(hist0.values + inno));
      SampledPath y_path = euler_solve(m, fbm, y0);
      Eigen::VectorXd z = y_path.at(sim_grid.n_steps);
      SampledPath hist = hist_at_base->evaluate(w);
      for (int k = 0; k < h_grid.n_nodes(); ++k)
        ell.values.row(k) = z.transpose() + (m.sigma * hist.values.row(k).transpose()).transpose();
      std::lock_guard<std::mutex> lock(check_mutex);
      for (int i = 0; i < n_checks; ++i) {
        double norm = y_path.at(check_nodes[i]).norm();
        check_sum(i, 0) += norm;
        check_sum(i, 1) += norm * norm;
      }
    } else {
      SampledPath hist = ph_sim.evaluate(w);
      for (int k = 0; k < h_grid.n_nodes(); ++k)
        ell.values.row(k) = y0.transpose() + (m.sigma * hist.values.row(k).transpose()).transpose();
    }
    auto inner = conditional_density_batch(m, ell, ys, p.n_inner, seed, static_cast<uint64_t>(r), 1,
                                           &sampler, &evaluator);
    for (int i = 0; i < n_y; ++i) out.replica_values(r, i) = inner[i].value;
  });

  const double tail_var = truncation_tail_variance(m.hurst, p.t_sim, p.t_hor, t_past);
  out.per_y.resize(n_y);
  for (int i = 0; i < n_y; ++i) {
    MeanVar mv;
    for (int r = 0; r < p.n_outer; ++r) mv.add(out.replica_values(r, i));
    DensityEstimate& e = out.per_y[i];
    e.value = mv.mean;
    e.stderr_ = mv.stderr_mean();
    e.n_paths = static_cast<long>(p.n_outer) * p.n_inner;
    e.diagnostics.factorization_jittered = sampler.jittered();
    e.diagnostics.truncation_tail_var = tail_var;
    e.diagnostics.weight_ess = static_cast<double>(p.n_outer);
  }
  if (simulate) {
    for (int i = 0; i < n_checks; ++i) {
      double mean = check_sum(i, 0) / p.n_outer;
      out.burn.times.push_back(sim_grid.node(check_nodes[i]));
      out.burn.running_mean.push_back(mean);
      out.burn.running_var.push_back(check_sum(i, 1) / p.n_outer - mean * mean);
    }
  }
  return out;
}

// p_t(y0; y): outer draws of the Wiener past, ell = y0 + sigma P^H w.
inline std::vector<DensityEstimate> transition_density_batch(const ModelSpec& m, const Eigen::VectorXd& y0,
                                                             const std::vector<Eigen::VectorXd>& ys, double t,
                                                             HistoryParams p, uint64_t seed) {
  if (!(t > 0.0)) throw std::invalid_argument("transition_density: t must be > 0");
  p.t_hor = t;
  p.t_sim = 0.0;
  return history_conditional_density(m, y0, ys, p, seed).per_y;
}

inline DensityEstimate transition_density(const ModelSpec& m, const Eigen::VectorXd& y0,
                                          const Eigen::VectorXd& y, double t, HistoryParams p, uint64_t seed) {
  return transition_density_batch(m, y0, {y}, t, p, seed)[0];
}

// p_inf(y): burn in from 0 under a fresh two-sided path, condition on
// (Y_burn, history at t_burn), average the conditional densities.
inline HistoryEngineResult stationary_density_batch(const ModelSpec& m, const std::vector<Eigen::VectorXd>& ys,
                                                    double t0_hor, double t_burn, HistoryParams p,
                                                    uint64_t seed) {
  if (!(t_burn > 0.0)) throw std::invalid_argument("stationary_density: t_burn must be > 0");
  p.t_hor = t0_hor;
  p.t_sim = t_burn;
  auto fit = check_off_diagonal_contraction(m.drift, m.lambda, 2000, 5.0);
  auto out = history_conditional_density(m, Eigen::VectorXd::Zero(m.dimension), ys, p, seed);
  out.contraction_warn = !(fit.kappa_est > 0.0);
  return out;
}

inline DensityEstimate stationary_density(const ModelSpec& m, const Eigen::VectorXd& y, double t0_hor,
                                          double t_burn, HistoryParams p, uint64_t seed) {
  return stationary_density_batch(m, {y}, t0_hor, t_burn, p, seed).per_y[0];
}

// ---------------------------------------------------------------------------
// Parametric sweep with common random numbers across lambda, plus central
// finite differences of the density in lambda.
// ---------------------------------------------------------------------------

struct SweepCell {
  double lambda;
  double y;
  DensityEstimate est;
};

struct SweepDerivative {
  double lambda;
  double y;
  double dp_dlambda;
  double stderr_;
};

struct SweepResult {
  std::vector<SweepCell> cells;
  std::vector<SweepDerivative> derivatives;
};

inline SweepResult parametric_stationary_sweep(const ModelSpec& base, const std::vector<double>& lambda_grid,
                                               const std::vector<double>& y_grid, double t0_hor, double t_burn,
                                               const HistoryParams& p, uint64_t seed) {
  if (base.drift.kind != DriftKind::parametric_linear)
    throw std::invalid_argument("parametric_stationary_sweep: drift must be parametric_linear");
  std::vector<Eigen::VectorXd> ys;
  for (double y : y_grid) ys.push_back(Eigen::VectorXd::Constant(base.dimension, y));

  SweepResult out;
  std::vector<std::vector<DensityEstimate>> table;
  for (double lam : lambda_grid) {
    ModelSpec m = base;
    m.lambda = Eigen::VectorXd::Constant(base.dimension, lam);
    auto ests = stationary_density_batch(m, ys, t0_hor, t_burn, p, seed).per_y;  // same seed: CRN
    for (size_t i = 0; i < y_grid.size(); ++i) out.cells.push_back({lam, y_grid[i], ests[i]});
    table.push_back(std::move(ests));
  }
  for (size_t l = 1; l + 1 < lambda_grid.size(); ++l) {
    double dl = lambda_grid[l + 1] - lambda_grid[l - 1];
    for (size_t i = 0; i < y_grid.size(); ++i) {
      double d = (table[l + 1][i].value - table[l - 1][i].value) / dl;
      double se = std::sqrt(std::pow(table[l + 1][i].stderr_, 2) + std::pow(table[l - 1][i].stderr_, 2)) / dl;
      out.derivatives.push_back({lambda_grid[l], y_grid[i], d, se});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Averaged coefficients of the slow-fast system: trapezoid quadrature of
// f(x,.) and g(x,.) against the estimated stationary density of the frozen
// fast process, normalized by the quadrature mass.
// ---------------------------------------------------------------------------

struct AveragedRow {
  double x;
  double f_bar;
  double g_bar;
  double mass;
};

inline double trapezoid(const std::vector<double>& y, const std::vector<double>& v) {
  double acc = 0.0;
  for (size_t i = 0; i + 1 < y.size(); ++i) acc += 0.5 * (v[i] + v[i + 1]) * (y[i + 1] - y[i]);
  return acc;
}

inline std::vector<AveragedRow> averaged_coefficients(
    const std::function<double(double, double)>& f, const std::function<double(double, double)>& g,
    const std::function<ModelSpec(double)>& fast_at, const std::vector<double>& x_grid,
    std::vector<double> y_grid, double t0_hor, double t_burn, const HistoryParams& p, uint64_t seed) {
  std::vector<AveragedRow> out;
  for (double x : x_grid) {
    ModelSpec fast = fast_at(x);
    std::vector<double> grid = y_grid;
    for (int attempt = 0;; ++attempt) {
      std::vector<Eigen::VectorXd> ys;
      for (double y : grid) ys.push_back(Eigen::VectorXd::Constant(1, y));
      auto ests = stationary_density_batch(fast, ys, t0_hor, t_burn, p, seed).per_y;
      std::vector<double> dens(grid.size());
      for (size_t i = 0; i < grid.size(); ++i) dens[i] = ests[i].value;
      double mass = trapezoid(grid, dens);
      if (std::abs(mass - 1.0) <= 0.05) {
        std::vector<double> fv(grid.size()), gv(grid.size());
        for (size_t i = 0; i < grid.size(); ++i) {
          fv[i] = f(x, grid[i]) * dens[i];
          gv[i] = g(x, grid[i]) * dens[i];
        }
        out.push_back({x, trapezoid(grid, fv) / mass, trapezoid(grid, gv) / mass, mass});
        break;
      }
      if (attempt >= 1)
        throw std::runtime_error("averaged_coefficients: quadrature mass off by > 5% after widening");
      // widen the y-grid once and retry
      double lo = grid.front() * 1.6, hi = grid.back() * 1.6;
      size_t n = grid.size();
      for (size_t i = 0; i < n; ++i) grid[i] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    }
  }
  return out;
}

}  // namespace fracdens
