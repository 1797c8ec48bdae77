#pragma once

#include <iomanip>
#include <json.hpp>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fracdens/estimators.hpp"

namespace fracdens {

enum class Verdict { pass, fail, warn };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::warn: return "warn";
  }
  return "?";
}

// Experiment result: the verdict is derived from the stated thresholds only,
// and the inputs echo suffices to reproduce the run.
struct ExperimentReport {
  std::string name;
  std::map<std::string, std::string> inputs;
  std::map<std::string, double> metrics;
  Verdict verdict = Verdict::fail;
  std::vector<std::string> artifacts;
  std::vector<std::string> notes;
};

inline nlohmann::json report_json(const ExperimentReport& r) {
  nlohmann::json j;
  j["name"] = r.name;
  j["verdict"] = verdict_name(r.verdict);
  j["inputs"] = r.inputs;
  j["metrics"] = r.metrics;
  j["artifacts"] = r.artifacts;
  j["notes"] = r.notes;
  return j;
}

namespace validate_detail {

inline void echo(ExperimentReport& r, const std::string& key, double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  r.inputs[key] = os.str();
}

inline double fou_rate(const ModelSpec& m) {
  if (m.drift.kind == DriftKind::linear) return m.drift.rate(0, 0);
  if (m.drift.kind == DriftKind::parametric_linear && m.lambda) return (*m.lambda)(0);
  throw std::invalid_argument("experiment: model must have a linear drift for the exact target");
}

}  // namespace validate_detail

// ---------------------------------------------------------------------------
// Fractional Chapman-Kolmogorov: p_{t+s}(y0; y) vs E[ p_s(Y_t + sigma B^t; y) ].
// ---------------------------------------------------------------------------

struct CkConfig {
  double t = 0.5;
  double s = 0.5;
  std::vector<double> y_list{-1.0, -0.5, 0.0, 0.5, 1.0};
  HistoryParams params;  // t_hor/dt_hor used for the inner horizon
};

inline ExperimentReport check_chapman_kolmogorov(const ModelSpec& m, const Eigen::VectorXd& y0,
                                                 const CkConfig& cfg, uint64_t seed) {
  ExperimentReport rep;
  rep.name = "chapman_kolmogorov";
  validate_detail::echo(rep, "t", cfg.t);
  validate_detail::echo(rep, "s", cfg.s);
  validate_detail::echo(rep, "seed", static_cast<double>(seed));
  rep.inputs["drift"] = drift_kind_name(m.drift.kind);
  validate_detail::echo(rep, "hurst", m.hurst);

  std::vector<Eigen::VectorXd> ys;
  for (double y : cfg.y_list) ys.push_back(Eigen::VectorXd::Constant(m.dimension, y));

  HistoryParams lhs_p = cfg.params;
  lhs_p.t_hor = cfg.t + cfg.s;
  auto lhs = transition_density_batch(m, y0, ys, cfg.t + cfg.s, lhs_p, seed);

  HistoryParams rhs_p = cfg.params;
  rhs_p.t_hor = cfg.s;
  rhs_p.t_sim = cfg.t;
  auto rhs = history_conditional_density(m, y0, ys, rhs_p, seed ^ 0x5bd1e995u).per_y;

  bool ok = true;
  double worst_z = 0.0;
  for (size_t i = 0; i < ys.size(); ++i) {
    double diff = std::abs(lhs[i].value - rhs[i].value);
    double se = std::sqrt(lhs[i].stderr_ * lhs[i].stderr_ + rhs[i].stderr_ * rhs[i].stderr_);
    double z = se > 0.0 ? diff / se : (diff > 0.0 ? 1e9 : 0.0);
    worst_z = std::max(worst_z, z);
    std::string tag = "y" + std::to_string(i);
    rep.metrics["lhs_" + tag] = lhs[i].value;
    rep.metrics["rhs_" + tag] = rhs[i].value;
    rep.metrics["z_" + tag] = z;
    if (z > 3.0) ok = false;
  }
  rep.metrics["worst_z"] = worst_z;
  rep.verdict = ok ? Verdict::pass : Verdict::fail;
  return rep;
}

// ---------------------------------------------------------------------------
// Gaussian sandwich for the stationary density: strict positivity plus a
// feasible pair of bounding parabolas over the sampled grid (with 3 stderr
// slack per point). The fitted decay rate is exported so oracle models can be
// checked against their exact tail constant.
// ---------------------------------------------------------------------------

struct GaussianBoundsConfig {
  std::vector<double> y_grid;
  double t0 = 1.0;
  double t_burn = 20.0;
  HistoryParams params;
};

inline ExperimentReport check_gaussian_bounds_stationary(const ModelSpec& m, const GaussianBoundsConfig& cfg,
                                                         uint64_t seed) {
  ExperimentReport rep;
  rep.name = "gaussian_bounds_stationary";
  rep.inputs["drift"] = drift_kind_name(m.drift.kind);
  validate_detail::echo(rep, "hurst", m.hurst);
  validate_detail::echo(rep, "t_burn", cfg.t_burn);
  validate_detail::echo(rep, "seed", static_cast<double>(seed));

  std::vector<Eigen::VectorXd> ys;
  for (double y : cfg.y_grid) ys.push_back(Eigen::VectorXd::Constant(m.dimension, y));
  auto res = stationary_density_batch(m, ys, cfg.t0, cfg.t_burn, cfg.params, seed);

  bool positive = true;
  std::vector<double> ysq, logp, log_lo, log_hi;
  for (size_t i = 0; i < ys.size(); ++i) {
    const auto& e = res.per_y[i];
    if (!(e.value > 0.0)) positive = false;
    rep.metrics["p_y" + std::to_string(i)] = e.value;
    rep.metrics["se_y" + std::to_string(i)] = e.stderr_;
    if (e.value > 0.0) {
      ysq.push_back(cfg.y_grid[i] * cfg.y_grid[i] * m.dimension);
      logp.push_back(std::log(e.value));
      log_hi.push_back(std::log(e.value + 3.0 * e.stderr_));
      double lo = e.value - 3.0 * e.stderr_;
      log_lo.push_back(std::log(std::max(lo, 1e-300)));
    }
  }
  rep.verdict = Verdict::fail;
  if (positive && ysq.size() >= 3) {
    // the decay constant comes from the tail of the sampled range (the
    // density may be multimodal in the bulk)
    double max_sq = *std::max_element(ysq.begin(), ysq.end());
    std::vector<double> tx, ty;
    for (size_t i = 0; i < ysq.size(); ++i)
      if (ysq[i] >= 0.2 * max_sq) {
        tx.push_back(ysq[i]);
        ty.push_back(logp[i]);
      }
    auto [icpt, slope] = fit_line(tx, ty);
    double c_fit = -slope;
    rep.metrics["c_fit"] = c_fit;
    rep.metrics["logC_fit"] = icpt;
    // feasibility with 3 stderr slack: lower parabola below p+3se, upper above p-3se
    double log_c1 = 1e300, log_c2 = -1e300;
    for (size_t i = 0; i < ysq.size(); ++i) {
      log_c1 = std::min(log_c1, log_hi[i] + c_fit * ysq[i]);
      log_c2 = std::max(log_c2, log_lo[i] + c_fit * ysq[i]);
    }
    rep.metrics["logC1"] = log_c1;
    rep.metrics["logC2"] = log_c2;
    bool feasible = c_fit > 0.0 && log_c1 > -1e300 && log_c2 < 1e300;
    rep.verdict = feasible ? Verdict::pass : Verdict::fail;
  }
  rep.metrics["all_positive"] = positive ? 1.0 : 0.0;
  if (res.contraction_warn) {
    rep.notes.push_back("contraction check did not certify kappa > 0");
    if (rep.verdict == Verdict::pass) rep.verdict = Verdict::warn;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Non-stationary sandwich: joint feasibility of the t^{-nH}-scaled bounds with
// constants shared across y0 in K and t in t_list.
// ---------------------------------------------------------------------------

struct NonstatConfig {
  std::vector<double> y0_list{-1.0, 0.0, 1.0};
  std::vector<double> t_list{0.25, 0.5, 1.0};
  std::vector<double> offsets{0.0, 0.7, 1.4, 2.1};  // in units of t^H
  HistoryParams params;
};

inline ExperimentReport check_nonstationary_bounds(const ModelSpec& m, const NonstatConfig& cfg, uint64_t seed) {
  ExperimentReport rep;
  rep.name = "nonstationary_bounds";
  rep.inputs["drift"] = drift_kind_name(m.drift.kind);
  validate_detail::echo(rep, "hurst", m.hurst);
  validate_detail::echo(rep, "seed", static_cast<double>(seed));

  const double n_h = m.dimension * m.hurst;
  bool positive = true;
  std::vector<double> u_all, logp_all, lo_all, hi_all;
  double diag_min = 1e300, diag_max = -1e300;
  int cell = 0;
  for (double y0v : cfg.y0_list) {
    Eigen::VectorXd y0 = Eigen::VectorXd::Constant(m.dimension, y0v);
    for (double t : cfg.t_list) {
      HistoryParams p = cfg.params;
      p.t_hor = t;
      std::vector<Eigen::VectorXd> ys;
      for (double off : cfg.offsets) ys.push_back(Eigen::VectorXd::Constant(m.dimension, y0v + off * std::pow(t, m.hurst)));
      auto ests = transition_density_batch(m, y0, ys, t, p, seed + cell);
      for (size_t i = 0; i < ys.size(); ++i) {
        const auto& e = ests[i];
        if (!(e.value > 0.0)) {
          positive = false;
          continue;
        }
        double u = (ys[i] - y0).squaredNorm() / std::pow(t, 2.0 * m.hurst);
        double scaled_log = std::log(e.value) + n_h * std::log(t);
        u_all.push_back(u);
        logp_all.push_back(scaled_log);
        hi_all.push_back(std::log(e.value + 3.0 * e.stderr_) + n_h * std::log(t));
        lo_all.push_back(std::log(std::max(e.value - 3.0 * e.stderr_, 1e-300)) + n_h * std::log(t));
        if (cfg.offsets[i] == 0.0) {
          double diag = std::pow(t, n_h) * e.value;
          diag_min = std::min(diag_min, diag);
          diag_max = std::max(diag_max, diag);
        }
      }
      ++cell;
    }
  }
  rep.metrics["all_positive"] = positive ? 1.0 : 0.0;
  rep.metrics["diag_scaled_min"] = diag_min;
  rep.metrics["diag_scaled_max"] = diag_max;
  rep.verdict = Verdict::fail;
  if (positive && u_all.size() >= 4) {
    auto [icpt, slope] = fit_line(u_all, logp_all);
    double c_fit = -slope;
    double log_c1 = 1e300, log_c2 = -1e300;
    for (size_t i = 0; i < u_all.size(); ++i) {
      log_c1 = std::min(log_c1, hi_all[i] + c_fit * u_all[i]);
      log_c2 = std::max(log_c2, lo_all[i] + c_fit * u_all[i]);
    }
    rep.metrics["c_fit"] = c_fit;
    rep.metrics["logC_fit"] = icpt;
    rep.metrics["logC1"] = log_c1;
    rep.metrics["logC2"] = log_c2;
    rep.verdict = (c_fit > 0.0 && diag_min > 0.0) ? Verdict::pass : Verdict::fail;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// TV convergence toward the stationary law, with exact Gaussian targets for
// linear drifts. Binned on 256 cells over +-6 stationary deviations; the
// verdict requires the TV sequence to decrease up to the binomial noise of
// the histogram.
// ---------------------------------------------------------------------------

struct TvConfig {
  std::vector<double> t_list{1.0, 2.0, 4.0, 8.0};
  int n_paths = 20000;
  double dt = 1.0 / 32;
  double t_past = 50.0;
  double dt_seam = 1.0 / 128;
  double y0_in_std = 3.0;  // start at y0 = this many stationary deviations
  int bins = 256;
  int workers = 1;
};

inline ExperimentReport check_tv_convergence(const ModelSpec& m, const TvConfig& cfg, uint64_t seed) {
  ExperimentReport rep;
  rep.name = "tv_convergence";
  rep.inputs["drift"] = drift_kind_name(m.drift.kind);
  validate_detail::echo(rep, "hurst", m.hurst);
  validate_detail::echo(rep, "n_paths", cfg.n_paths);
  validate_detail::echo(rep, "seed", static_cast<double>(seed));
  if (m.dimension != 1) throw std::invalid_argument("check_tv_convergence: 1-d models only");

  const double lambda = validate_detail::fou_rate(m);
  const double std_inf = std::sqrt(fou_stationary_variance(lambda, m.sigma, m.hurst).cov(0, 0));
  const double y0 = cfg.y0_in_std * std_inf;
  const double t_max = cfg.t_list.back();
  Grid g = make_grid(0.0, t_max, cfg.dt);
  PastSpec past{cfg.t_past, cfg.dt_seam, 16, false};

  std::vector<int> nodes;
  for (double t : cfg.t_list) nodes.push_back(static_cast<int>(std::llround(t / cfg.dt)));
  Eigen::MatrixXd marginals(cfg.n_paths, nodes.size());

  auto past_blocks = make_past_blocks(past);
  HistoryWeights ph(m.hurst, past_blocks, g, 0.0, g);
  LiouvilleWeights lw(m.hurst, g.dt, g.n_steps);
  parallel_for(cfg.n_paths, cfg.workers, [&](int i) {
    auto w = sample_two_sided_wiener(past, g, seed, stream_id(streams::kSimulate, 0, i), 1);
    Eigen::MatrixXd inno;
    lw.apply(w.future_increments, inno);
    SampledPath fbm(g, Eigen::MatrixXd(ph.evaluate(w).values + inno));
    auto y = euler_solve(m, fbm, Eigen::VectorXd::Constant(1, y0));
    for (size_t k = 0; k < nodes.size(); ++k) marginals(i, k) = y.values(nodes[k], 0);
  });

  // exact target masses per bin
  const double lo = -6.0 * std_inf, hi = 6.0 * std_inf;
  const double bw = (hi - lo) / cfg.bins;
  std::vector<double> target(cfg.bins);
  auto phi = [&](double x) { return 0.5 * std::erfc(-x / (std_inf * std::sqrt(2.0))); };
  double noise = 0.0;
  for (int b = 0; b < cfg.bins; ++b) {
    target[b] = phi(lo + (b + 1) * bw) - phi(lo + b * bw);
    noise += 0.5 * std::sqrt(2.0 * target[b] * (1.0 - target[b]) / (M_PI * cfg.n_paths));
  }
  double tail_mass = phi(lo) + (1.0 - phi(hi));

  std::vector<double> tvs;
  for (size_t k = 0; k < nodes.size(); ++k) {
    std::vector<long> counts(cfg.bins, 0);
    long outside = 0;
    for (int i = 0; i < cfg.n_paths; ++i) {
      double y = marginals(i, k);
      if (y < lo || y >= hi) {
        ++outside;
        continue;
      }
      ++counts[static_cast<int>((y - lo) / bw)];
    }
    double tv = std::abs(static_cast<double>(outside) / cfg.n_paths - tail_mass);
    for (int b = 0; b < cfg.bins; ++b)
      tv += std::abs(static_cast<double>(counts[b]) / cfg.n_paths - target[b]);
    tvs.push_back(0.5 * tv);
    rep.metrics["tv_t" + std::to_string(k)] = tvs.back();
  }
  rep.metrics["noise_slack"] = noise;
  bool ok = true;
  for (size_t k = 0; k + 1 < tvs.size(); ++k)
    if (tvs[k + 1] > tvs[k] + noise) ok = false;
  rep.verdict = ok ? Verdict::pass : Verdict::fail;
  return rep;
}

// ---------------------------------------------------------------------------
// Averaging experiment: the slow-fast system against the effective equation
// with coefficients averaged against the estimated stationary density of the
// fast process, driven by the same slow noise.
// ---------------------------------------------------------------------------

struct AveragingConfig {
  std::vector<double> eps_list{0.1, 0.03, 0.01};
  double alpha = 0.5;
  double hurst_slow = 0.75;
  double hurst_fast = 0.6;
  double fast_rate = 1.0;
  double t_hor = 1.0;
  double dt = 1.0 / 256;
  int n_rep = 8;
  double x0 = 0.2;
  double y0_fast = 0.0;
  double t_past = 20.0;
  HistoryParams fast_params;  // for the stationary estimate of the fast process
  int workers = 1;
};

inline ExperimentReport check_averaging(const AveragingConfig& cfg, uint64_t seed) {
  ExperimentReport rep;
  rep.name = "averaging";
  validate_detail::echo(rep, "hurst_slow", cfg.hurst_slow);
  validate_detail::echo(rep, "hurst_fast", cfg.hurst_fast);
  validate_detail::echo(rep, "alpha", cfg.alpha);
  validate_detail::echo(rep, "seed", static_cast<double>(seed));

  const Eigen::MatrixXd i1 = Eigen::MatrixXd::Identity(1, 1);
  auto f = [](double x, double y) { return -x + y; };
  auto gfun = [](double, double) { return 1.0; };
  auto fast_at = [&](double) { return ModelSpec(DriftSpec::linear_rate(cfg.fast_rate), i1, cfg.hurst_fast); };

  // averaged coefficient table on an x-grid wide enough for the trajectories
  double v = fou_stationary_variance(cfg.fast_rate, i1, cfg.hurst_fast).var_factor;
  std::vector<double> y_grid;
  for (int i = 0; i <= 32; ++i) y_grid.push_back((-4.5 + 9.0 * i / 32.0) * std::sqrt(v));
  std::vector<double> x_grid{-2.0, -1.0, 0.0, 1.0, 2.0};
  auto table = averaged_coefficients(f, gfun, fast_at, x_grid, y_grid, 1.0, 16.0 / cfg.fast_rate,
                                     cfg.fast_params, seed);
  auto interp = [&](const std::vector<AveragedRow>& rows, double x, bool use_f) {
    if (x <= rows.front().x) return use_f ? rows.front().f_bar : rows.front().g_bar;
    if (x >= rows.back().x) return use_f ? rows.back().f_bar : rows.back().g_bar;
    for (size_t i = 0; i + 1 < rows.size(); ++i) {
      if (x <= rows[i + 1].x) {
        double w = (x - rows[i].x) / (rows[i + 1].x - rows[i].x);
        double a = use_f ? rows[i].f_bar : rows[i].g_bar;
        double b = use_f ? rows[i + 1].f_bar : rows[i + 1].g_bar;
        return (1.0 - w) * a + w * b;
      }
    }
    return use_f ? rows.back().f_bar : rows.back().g_bar;
  };

  SlowSpec slow;
  slow.f = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    return Eigen::VectorXd::Constant(1, f(x(0), y(0)));
  };
  slow.g = [&](const Eigen::VectorXd&) { return Eigen::MatrixXd::Identity(1, 1); };
  ModelSpec fast = fast_at(0.0);

  Grid g = make_grid(0.0, cfg.t_hor, cfg.dt);
  PastSpec past{cfg.t_past, cfg.dt / 4.0, 16, false};

  std::map<double, MeanVar> sup_dist, holder_dist;
  for (int rep_i = 0; rep_i < cfg.n_rep; ++rep_i) {
    auto wb = sample_two_sided_wiener(past, g, seed, stream_id(5, rep_i, 0), 1);
    auto wh = sample_two_sided_wiener(past, g, seed, stream_id(5, rep_i, 1), 1);
    auto slow_noise = fbm_mandelbrot(wb, cfg.hurst_slow);
    auto fast_noise = fbm_mandelbrot(wh, cfg.hurst_fast);

    // effective equation with the same driving B
    Eigen::VectorXd xbar = Eigen::VectorXd::Constant(1, cfg.x0);
    std::vector<double> xbar_path{cfg.x0};
    for (int k = 0; k < g.n_steps; ++k) {
      double db = slow_noise.values(k + 1, 0) - slow_noise.values(k, 0);
      xbar(0) += interp(table, xbar(0), true) * g.dt + interp(table, xbar(0), false) * db;
      xbar_path.push_back(xbar(0));
    }

    for (double eps : cfg.eps_list) {
      auto res = slow_fast_solve(slow, fast, eps, slow_noise, fast_noise,
                                 Eigen::VectorXd::Constant(1, cfg.x0),
                                 Eigen::VectorXd::Constant(1, cfg.y0_fast));
      std::vector<double> diff(g.n_nodes());
      double sup = 0.0;
      for (int k = 0; k <= g.n_steps; ++k) {
        diff[k] = res.x_path.values(k, 0) - xbar_path[k];
        sup = std::max(sup, std::abs(diff[k]));
      }
      sup_dist[eps].add(sup);
      holder_dist[eps].add(holder_seminorm(diff, g.dt, cfg.alpha));
    }
  }

  bool ok = true;
  double prev_sup = 1e300, prev_hold = 1e300;
  for (double eps : cfg.eps_list) {
    double s = sup_dist[eps].mean, h = holder_dist[eps].mean;
    rep.metrics["sup_eps_" + std::to_string(eps)] = s;
    rep.metrics["holder_eps_" + std::to_string(eps)] = h;
    if (s > prev_sup || h > prev_hold) ok = false;
    prev_sup = s;
    prev_hold = h;
  }
  rep.verdict = ok ? Verdict::pass : Verdict::fail;
  return rep;
}

}  // namespace fracdens
