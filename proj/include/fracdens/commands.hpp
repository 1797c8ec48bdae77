#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>

#include "fracdens/config.hpp"
#include "fracdens/csv.hpp"
#include "fracdens/estimators.hpp"
#include "fracdens/validate.hpp"

namespace fracdens {

namespace cmd_detail {

inline std::string out_dir(const RunConfig& cfg) {
  std::string dir = cfg.get_str("out", "out");
  std::filesystem::create_directories(dir);
  return dir;
}

inline double drift_parameter(const ModelSpec& m) {
  switch (m.drift.kind) {
    case DriftKind::zero: return 0.0;
    case DriftKind::linear: return m.drift.rate(0, 0);
    case DriftKind::tanh_well: return m.drift.tanh_a;
    case DriftKind::sign: return m.drift.sign_scale;
    case DriftKind::parametric_linear: return m.lambda ? (*m.lambda)(0) : 0.0;
  }
  return 0.0;
}

inline std::string flags_of(const DensityDiagnostics& d) {
  std::string out;
  auto add = [&](const char* f) {
    if (!out.empty()) out += "|";
    out += f;
  };
  if (d.low_ess) add("low_ess");
  if (d.clamped_weights > 0) add("clamped");
  if (d.factorization_jittered) add("jittered");
  return out.empty() ? "-" : out;
}

inline void write_estimates_csv(const std::string& path, const RunConfig& cfg, const ModelSpec& m,
                                const std::vector<double>& y_list, double t_hor,
                                const std::vector<DensityEstimate>& ests) {
  CsvWriter w(path, cfg.echo(),
              {"hurst", "drift", "lambda", "y", "T", "value", "stderr", "n_paths", "ess", "flags"});
  for (size_t i = 0; i < y_list.size(); ++i) {
    std::ostringstream row;
    row << std::setprecision(17);
    row << m.hurst << "," << drift_kind_name(m.drift.kind) << "," << drift_parameter(m) << "," << y_list[i]
        << "," << t_hor << "," << ests[i].value << "," << ests[i].stderr_ << "," << ests[i].n_paths << ","
        << ests[i].diagnostics.weight_ess << "," << flags_of(ests[i].diagnostics);
    w.row(std::vector<std::string>{row.str()});
  }
}

inline HistoryParams history_params(const RunConfig& cfg) {
  HistoryParams p;
  p.t_hor = cfg.get_num("est.T0", cfg.get_num("est.T", 1.0));
  p.dt_hor = cfg.get_num("est.dt", 1.0 / 128);
  p.dt_sim = cfg.get_num("est.dt_sim", 1.0 / 64);
  p.t_past = cfg.get_num("est.t_past", 0.0);
  p.dt_seam = cfg.get_num("est.dt_seam", 0.0);
  p.n_outer = static_cast<int>(cfg.get_int("est.n_outer", 200));
  p.n_inner = static_cast<int>(cfg.get_int("est.n_inner", 500));
  p.workers = static_cast<int>(cfg.get_int("workers", 1));
  return p;
}

}  // namespace cmd_detail

// simulate: emit noise or SDE paths as CSV, one file per path index.
inline int cmd_simulate(const RunConfig& cfg) {
  ModelSpec m = build_model(cfg);
  const uint64_t seed = static_cast<uint64_t>(cfg.get_int("seed", 1));
  const double t_hor = cfg.get_num("sim.t", 1.0);
  const double dt = cfg.get_num("sim.dt", 1.0 / 128);
  const double t_past = cfg.get_num("sim.t_past", 0.0);
  const long n_paths = cfg.get_int("sim.paths", 1);
  const std::string kind = cfg.get_str("sim.kind", "fbm");
  const std::string dir = cmd_detail::out_dir(cfg);

  Grid g = make_grid(0.0, t_hor, dt);
  PastSpec past{t_past, dt / 4.0, 16, false};
  for (long i = 0; i < n_paths; ++i) {
    auto w = sample_two_sided_wiener(past, g, seed, stream_id(streams::kSimulate, 0, i), m.dimension);
    SampledPath path(g, m.dimension);
    if (kind == "wiener") {
      for (int k = 0; k < g.n_steps; ++k)
        path.values.row(k + 1) = path.values.row(k) + w.future_increments.row(k);
    } else if (kind == "liouville") {
      path = liouville_from_wiener(w, m.hurst);
    } else if (kind == "fbm") {
      path = fbm_mandelbrot(w, m.hurst).as_path();
    } else if (kind == "sde") {
      auto noise = fbm_mandelbrot(w, m.hurst);
      Eigen::VectorXd y0 = Eigen::VectorXd::Constant(m.dimension, cfg.get_num("sim.y0", 0.0));
      path = euler_solve(m, noise.as_path(), y0);
    } else if (kind == "bridge") {
      Eigen::VectorXd x = Eigen::VectorXd::Constant(m.dimension, cfg.get_num("sim.x", 1.0));
      auto b = sample_bridge_exact(BridgeEndpoint(x, t_hor), g, m.hurst, seed,
                                   stream_id(streams::kBridge, 0, i));
      path = SampledPath(g, b.x_values);
    } else {
      throw std::invalid_argument("config: field 'sim.kind' unknown kind '" + kind + "'");
    }
    write_path_csv(dir + "/path_" + std::to_string(i) + ".csv", path, cfg.echo());
  }
  return 0;
}

// density: conditional density at a y-list for a constant or history-augmented
// conditioning path.
inline int cmd_density(const RunConfig& cfg) {
  ModelSpec m = build_model(cfg);
  const uint64_t seed = static_cast<uint64_t>(cfg.get_int("seed", 1));
  auto y_list = cfg.get_list("y.list");
  if (y_list.empty()) throw std::invalid_argument("config: missing required key 'y.list'");
  const double t_hor = cfg.get_num("est.T", 1.0);
  const double dt = cfg.get_num("est.dt", 1.0 / 128);
  const int n_paths = static_cast<int>(cfg.get_int("est.n_paths", 10000));
  const int workers = static_cast<int>(cfg.get_int("workers", 1));
  const double y0 = cfg.get_num("y0", 0.0);
  const std::string mode = cfg.get_str("ell.mode", "constant");

  Grid g = make_grid(0.0, t_hor, dt);
  SampledPath ell(g, m.dimension);
  if (mode == "constant") {
    ell = make_constant_ell(Eigen::VectorXd::Constant(m.dimension, y0), g).ell;
  } else if (mode == "history") {
    double t_past = cfg.get_num("est.t_past", 100.0 * t_hor);
    PastSpec past{t_past, dt / 4.0, 16, false};
    auto w = sample_two_sided_wiener(past, Grid(0.0, dt, 1), seed, stream_id(streams::kOuterNoise, 0), m.dimension);
    auto blocks = make_past_blocks(past);
    HistoryWeights ph(m.hurst, blocks, Grid(0.0, dt, 1), 0.0, g);
    auto hist = ph.evaluate(w);
    for (int k = 0; k < g.n_nodes(); ++k)
      ell.values.row(k) = Eigen::RowVectorXd::Constant(m.dimension, y0) +
                          (m.sigma * hist.values.row(k).transpose()).transpose();
  } else {
    throw std::invalid_argument("config: field 'ell.mode' must be constant|history");
  }

  std::vector<Eigen::VectorXd> ys;
  for (double y : y_list) ys.push_back(Eigen::VectorXd::Constant(m.dimension, y));
  auto ests = conditional_density_batch(m, ell, ys, n_paths, seed, 0, workers);
  cmd_detail::write_estimates_csv(cmd_detail::out_dir(cfg) + "/density.csv", cfg, m, y_list, t_hor, ests);
  return 0;
}

inline int cmd_transition(const RunConfig& cfg) {
  ModelSpec m = build_model(cfg);
  const uint64_t seed = static_cast<uint64_t>(cfg.get_int("seed", 1));
  auto y_list = cfg.get_list("y.list");
  if (y_list.empty()) throw std::invalid_argument("config: missing required key 'y.list'");
  const double t = cfg.get_num("est.T", 1.0);
  HistoryParams p = cmd_detail::history_params(cfg);
  p.t_hor = t;
  Eigen::VectorXd y0 = Eigen::VectorXd::Constant(m.dimension, cfg.get_num("y0", 0.0));
  std::vector<Eigen::VectorXd> ys;
  for (double y : y_list) ys.push_back(Eigen::VectorXd::Constant(m.dimension, y));
  auto ests = transition_density_batch(m, y0, ys, t, p, seed);
  cmd_detail::write_estimates_csv(cmd_detail::out_dir(cfg) + "/transition.csv", cfg, m, y_list, t, ests);
  return 0;
}

inline int cmd_stationary(const RunConfig& cfg) {
  ModelSpec m = build_model(cfg);
  const uint64_t seed = static_cast<uint64_t>(cfg.get_int("seed", 1));
  auto y_list = cfg.get_list("y.list");
  if (y_list.empty()) throw std::invalid_argument("config: missing required key 'y.list'");
  HistoryParams p = cmd_detail::history_params(cfg);
  const double t0 = cfg.get_num("est.T0", 1.0);
  const double t_burn = cfg.get_num("est.t_burn", 20.0);
  std::vector<Eigen::VectorXd> ys;
  for (double y : y_list) ys.push_back(Eigen::VectorXd::Constant(m.dimension, y));
  auto res = stationary_density_batch(m, ys, t0, t_burn, p, seed);
  const std::string dir = cmd_detail::out_dir(cfg);
  cmd_detail::write_estimates_csv(dir + "/stationary.csv", cfg, m, y_list, t0, res.per_y);
  CsvWriter burn(dir + "/burn_in.csv", cfg.echo(), {"t", "mean_abs", "var"});
  for (size_t i = 0; i < res.burn.times.size(); ++i)
    burn.row(std::vector<double>{res.burn.times[i], res.burn.running_mean[i], res.burn.running_var[i]});
  if (res.contraction_warn) std::cerr << "warning: contraction check did not certify kappa > 0\n";
  return 0;
}

inline int cmd_sweep(const RunConfig& cfg) {
  ModelSpec m = build_model(cfg);
  if (m.drift.kind != DriftKind::parametric_linear)
    throw std::invalid_argument("config: sweep requires model.drift=parametric_linear");
  const uint64_t seed = static_cast<uint64_t>(cfg.get_int("seed", 1));
  auto lambda_grid = cfg.get_list("lambda.list");
  auto y_list = cfg.get_list("y.list");
  if (lambda_grid.empty()) throw std::invalid_argument("config: missing required key 'lambda.list'");
  if (y_list.empty()) throw std::invalid_argument("config: missing required key 'y.list'");
  HistoryParams p = cmd_detail::history_params(cfg);
  const double t0 = cfg.get_num("est.T0", 1.0);
  const double t_burn = cfg.get_num("est.t_burn", 20.0);
  auto sweep = parametric_stationary_sweep(m, lambda_grid, y_list, t0, t_burn, p, seed);

  const std::string dir = cmd_detail::out_dir(cfg);
  CsvWriter w(dir + "/sweep.csv", cfg.echo(),
              {"lambda", "y", "value", "stderr", "n_paths", "ess", "flags"});
  for (const auto& c : sweep.cells) {
    std::ostringstream row;
    row << std::setprecision(17) << c.lambda << "," << c.y << "," << c.est.value << "," << c.est.stderr_
        << "," << c.est.n_paths << "," << c.est.diagnostics.weight_ess << ","
        << cmd_detail::flags_of(c.est.diagnostics);
    w.row(std::vector<std::string>{row.str()});
  }
  CsvWriter d(dir + "/sweep_derivatives.csv", cfg.echo(), {"lambda", "y", "dp_dlambda", "stderr"});
  for (const auto& c : sweep.derivatives)
    d.row(std::vector<double>{c.lambda, c.y, c.dp_dlambda, c.stderr_});
  return 0;
}

inline int cmd_averaging(const RunConfig& cfg) {
  const uint64_t seed = static_cast<uint64_t>(cfg.get_int("seed", 1));
  AveragingConfig acfg;
  if (cfg.has("eps.list")) acfg.eps_list = cfg.get_list("eps.list");
  acfg.alpha = cfg.get_num("exp.alpha", 0.5);
  acfg.hurst_slow = cfg.get_num("exp.hurst_slow", 0.75);
  acfg.hurst_fast = cfg.get_num("exp.hurst_fast", 0.6);
  acfg.dt = cfg.get_num("sim.dt", 1.0 / 256);
  acfg.n_rep = static_cast<int>(cfg.get_int("exp.n_rep", 8));
  acfg.fast_params = cmd_detail::history_params(cfg);
  acfg.workers = static_cast<int>(cfg.get_int("workers", 1));
  auto rep = check_averaging(acfg, seed);
  rep.inputs["config"] = cfg.echo();

  const std::string dir = cmd_detail::out_dir(cfg);
  {
    CsvWriter metrics(dir + "/averaging_metrics.csv", cfg.echo(), {"metric", "value"});
    for (const auto& [k, v] : rep.metrics) {
      std::ostringstream row;
      row << std::setprecision(17) << k << "," << v;
      metrics.row(std::vector<std::string>{row.str()});
    }
    rep.artifacts.push_back("averaging_metrics.csv");
  }
  std::ofstream out(dir + "/averaging_report.json");
  out << report_json(rep).dump(2) << "\n";
  std::cout << rep.name << ": " << verdict_name(rep.verdict) << "\n";
  return rep.verdict == Verdict::fail ? 1 : 0;
}

inline const std::vector<std::string>& known_experiments() {
  static const std::vector<std::string> names{"chapman_kolmogorov", "gaussian_bounds", "nonstationary_bounds",
                                              "tv_convergence", "averaging"};
  return names;
}

// validate: run one named experiment; exit 0 on pass/warn, 1 on fail, 2 on an
// unknown experiment name.
inline int cmd_validate(const std::string& experiment, const RunConfig& cfg) {
  const uint64_t seed = static_cast<uint64_t>(cfg.get_int("seed", 1));
  ExperimentReport rep;
  if (experiment == "chapman_kolmogorov") {
    ModelSpec m = build_model(cfg);
    CkConfig c;
    c.t = cfg.get_num("exp.t", 0.5);
    c.s = cfg.get_num("exp.s", 0.5);
    if (cfg.has("y.list")) c.y_list = cfg.get_list("y.list");
    c.params = cmd_detail::history_params(cfg);
    rep = check_chapman_kolmogorov(m, Eigen::VectorXd::Constant(m.dimension, cfg.get_num("y0", 0.0)), c, seed);
  } else if (experiment == "gaussian_bounds") {
    ModelSpec m = build_model(cfg);
    GaussianBoundsConfig c;
    c.y_grid = cfg.get_list("y.list");
    if (c.y_grid.empty()) c.y_grid = {-2.0, -1.0, 0.0, 1.0, 2.0};
    c.t0 = cfg.get_num("est.T0", 1.0);
    c.t_burn = cfg.get_num("est.t_burn", 20.0);
    c.params = cmd_detail::history_params(cfg);
    rep = check_gaussian_bounds_stationary(m, c, seed);
  } else if (experiment == "nonstationary_bounds") {
    ModelSpec m = build_model(cfg);
    NonstatConfig c;
    if (cfg.has("y0.list")) c.y0_list = cfg.get_list("y0.list");
    if (cfg.has("t.list")) c.t_list = cfg.get_list("t.list");
    c.params = cmd_detail::history_params(cfg);
    rep = check_nonstationary_bounds(m, c, seed);
  } else if (experiment == "tv_convergence") {
    ModelSpec m = build_model(cfg);
    TvConfig c;
    if (cfg.has("t.list")) c.t_list = cfg.get_list("t.list");
    c.n_paths = static_cast<int>(cfg.get_int("est.n_paths", 20000));
    c.dt = cfg.get_num("sim.dt", 1.0 / 32);
    c.workers = static_cast<int>(cfg.get_int("workers", 1));
    rep = check_tv_convergence(m, c, seed);
  } else if (experiment == "averaging") {
    return cmd_averaging(cfg);
  } else {
    std::cerr << "unknown experiment '" << experiment << "'; known:";
    for (const auto& n : known_experiments()) std::cerr << " " << n;
    std::cerr << "\n";
    return 2;
  }
  rep.inputs["config"] = cfg.echo();
  const std::string dir = cmd_detail::out_dir(cfg);
  {
    CsvWriter metrics(dir + "/" + experiment + "_metrics.csv", cfg.echo(), {"metric", "value"});
    for (const auto& [k, v] : rep.metrics) {
      std::ostringstream row;
      row << std::setprecision(17) << k << "," << v;
      metrics.row(std::vector<std::string>{row.str()});
    }
    rep.artifacts.push_back(experiment + "_metrics.csv");
  }
  std::ofstream out(dir + "/" + experiment + "_report.json");
  out << report_json(rep).dump(2) << "\n";
  std::cout << rep.name << ": " << verdict_name(rep.verdict) << "\n";
  return rep.verdict == Verdict::fail ? 1 : 0;
}

}  // namespace fracdens
