// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// fail. An optional CLI-binary path comes first on the command line; criterion
// numbers may follow to run a subset.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "fracdens/commands.hpp"
#include "fracdens/estimators.hpp"
#include "fracdens/frac_calc.hpp"
#include "fracdens/validate.hpp"

using namespace fracdens;
namespace fs = std::filesystem;

namespace {

const Eigen::MatrixXd kI1 = Eigen::MatrixXd::Identity(1, 1);
std::string g_cli_path;

Eigen::VectorXd vec1(double v) { return Eigen::VectorXd::Constant(1, v); }

double normal_pdf(double y, double mean, double var) {
  return std::exp(-0.5 * (y - mean) * (y - mean) / var) / std::sqrt(2.0 * M_PI * var);
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " FAILED[" << what << "]";
    }
  }
};

SampledFunction sample_fn(const Grid& g, const std::function<double(double)>& f) {
  SampledFunction out(g, 1);
  for (int k = 0; k < g.n_nodes(); ++k) out.values(k, 0) = f(g.node(k));
  return out;
}

// --------------------------------------------------------------------------
// 1. Fractional-calculus inversion at dt = 1e-3, orders {0.2, 0.5, 0.8}.
// --------------------------------------------------------------------------
Outcome criterion_inversion() {
  Outcome out;
  std::vector<std::function<double(double)>> fns = {[](double t) { return t; },
                                                    [](double t) { return std::sin(t); }};
  for (double alpha : {0.2, 0.5, 0.8}) {
    for (size_t fi = 0; fi < fns.size(); ++fi) {
      std::vector<double> log_dt, log_err;
      double err_fine = 0.0;
      for (int n : {250, 500, 1000}) {
        Grid g(0.0, 1.0 / n, n);
        auto f = sample_fn(g, fns[fi]);
        auto back = frac_op(frac_op(f, FracOrder(alpha)), FracOrder(-alpha));
        double err = (back.values - f.values).cwiseAbs().maxCoeff();
        log_dt.push_back(std::log(1.0 / n));
        log_err.push_back(std::log(err));
        err_fine = err;
      }
      auto [icpt, order] = fit_line(log_dt, log_err);
      (void)icpt;
      out.detail << " a=" << alpha << (fi == 0 ? "/t" : "/sin") << " err=" << err_fine
                 << " order=" << order;
      out.require(err_fine <= 5e-3, "sup error <= 5e-3");
      // first-order scheme; 0.995 allows the fit resolution around 1.0
      out.require(order >= 0.995, "convergence order >= 1");
    }
  }
  return out;
}

// --------------------------------------------------------------------------
// 2. Noise calibration: Var(B_1) at T_past = 100 over 1e5 draws, KS vs the
//    exact-covariance sampler at t = 1.
// --------------------------------------------------------------------------
Outcome criterion_noise() {
  Outcome out;
  const int n_var = 100000, n_ks = 10000;
  for (double hurst : {0.25, 0.5, 0.75}) {
    const double dt_fut = hurst < 0.5 ? 1.0 / 2048 : 1.0 / 512;
    const double dt_seam = hurst < 0.5 ? 1.0 / 8192 : 1.0 / 2048;
    Grid fut = make_grid(0.0, 1.0, dt_fut);
    PastSpec past{100.0, dt_seam, 16, false};
    auto blocks = make_past_blocks(past);
    Grid one(0.0, 1.0, 1);
    HistoryWeights hw(hurst, blocks, fut, 0.0, one);
    LiouvilleWeights lw(hurst, dt_fut, fut.n_steps);
    std::vector<double> rev(fut.n_steps);
    for (int j = 0; j < fut.n_steps; ++j) rev[j] = lw.a[fut.n_steps - j];

    MeanVar mv;
    std::vector<double> mvn_draws;
    mvn_draws.reserve(n_ks);
    for (int i = 0; i < n_var; ++i) {
      auto w = sample_two_sided_wiener(past, fut, 1000 + static_cast<int>(hurst * 100), i);
      double b1 = hw.evaluate(w).values(1, 0);
      const double* dw = w.future_increments.col(0).data();
      double inno = 0.0;
      for (int j = 0; j < fut.n_steps; ++j) inno += rev[j] * dw[j];
      b1 += lw.coeff * inno;
      mv.add(b1 * b1);
      if (i < n_ks) mvn_draws.push_back(b1);
    }
    // the truncated tail of the MvN integral removes a computable amount of
    // variance (noticeable for H > 1/2); the tolerance carries that bound
    double tail_bias = truncation_tail_variance(hurst, 0.0, 1.0, 100.0);
    double err = std::abs(mv.mean - 1.0);
    out.detail << " H=" << hurst << " var=" << mv.mean << " tail=" << tail_bias
               << " z=" << std::max(0.0, err - tail_bias) / mv.stderr_mean();
    out.require(err <= 3.0 * mv.stderr_mean() + tail_bias, "Var(B_1) within 3 stderr + tail bound of 1");

    FbmExactSampler exact(one, hurst);
    std::vector<double> exact_draws;
    exact_draws.reserve(n_ks);
    for (int i = 0; i < n_ks; ++i) exact_draws.push_back(exact.sample(7, i).values(1, 0));
    double pval = ks_two_sample_pvalue(mvn_draws, exact_draws);
    out.detail << " ks_p=" << pval;
    out.require(pval > 0.01, "KS vs exact sampler");
  }
  return out;
}

// --------------------------------------------------------------------------
// 3. Bridge correctness: pinning, endpoint rate, marginal agreement.
// --------------------------------------------------------------------------
Outcome criterion_bridge() {
  Outcome out;
  for (double hurst : {0.3, 0.5, 0.7}) {
    BridgeEndpoint ep(vec1(1.0), 1.0);
    Grid g = make_grid(0.0, 1.0, 1.0 / 256);

    double worst_pin = 0.0;
    for (int i = 0; i < 200; ++i) {
      auto p = sample_bridge_sde(ep, g, hurst, 11, i);
      worst_pin = std::max(worst_pin, std::abs(endpoint_functional(p, hurst)(0) - 1.0));
    }
    out.detail << " H=" << hurst << " pin=" << worst_pin;
    out.require(worst_pin <= 1e-9, "sde endpoint pinned to machine precision");

    // exact-conditioning endpoint error behaves like dt^{H ^ 1/2}
    std::vector<double> log_dt, log_err;
    for (int n : {64, 128, 256}) {
      Grid gn(0.0, 1.0 / n, n);
      ExactBridgeSampler s(gn, hurst);
      MeanVar mv;
      for (int i = 0; i < 300; ++i)
        mv.add(std::abs(endpoint_functional(s.sample(ep, 500 + n, i), hurst)(0) - 1.0));
      log_dt.push_back(std::log(1.0 / n));
      log_err.push_back(std::log(mv.mean));
    }
    auto [icpt2, rate] = fit_line(log_dt, log_err);
    (void)icpt2;
    double err_fine = std::exp(log_err[2]);
    out.detail << " rate=" << rate << " err=" << err_fine;
    if (err_fine > 1e-6) {  // at H = 1/2 the functional is pinned up to jitter
      out.require(log_err[2] < log_err[0], "endpoint error decreases with dt");
      out.require(rate >= 0.5 * std::min(hurst, 0.5), "measured endpoint rate");
    }

    // marginal agreement of the two samplers at T/2 on 1e4 paths
    ExactBridgeSampler s(g, hurst);
    const int n_paths = 10000, mid = g.n_steps / 2;
    MeanVar me, ms;
    for (int i = 0; i < n_paths; ++i) {
      me.add(s.sample(ep, 21, i).x_values(mid, 0));
      ms.add(sample_bridge_sde(ep, g, hurst, 22, i).x_values(mid, 0));
    }
    double z_mean = std::abs(me.mean - ms.mean) /
                    std::sqrt(std::pow(me.stderr_mean(), 2) + std::pow(ms.stderr_mean(), 2));
    double se_var = std::sqrt(2.0 / (n_paths - 1)) * std::sqrt(2.0) *
                    std::max(me.variance(), ms.variance());
    double z_var = std::abs(me.variance() - ms.variance()) / se_var;
    out.detail << " z_mean=" << z_mean << " z_var=" << z_var;
    out.require(z_mean <= 3.0, "mid-time mean agreement");
    out.require(z_var <= 3.0, "mid-time variance agreement");
  }
  return out;
}

// --------------------------------------------------------------------------
// 4. Zero-drift exactness and unit mass.
// --------------------------------------------------------------------------
Outcome criterion_zero_drift() {
  Outcome out;
  for (double hurst : {0.3, 0.7}) {
    Grid g = make_grid(0.0, 1.0, 1.0 / 128);
    ModelSpec m(DriftSpec::zero(), kI1, hurst);
    auto ell = make_constant_ell(vec1(0.2), g);
    auto est = conditional_density(m, ell, vec1(0.9), 16, 3);
    bool exact = est.value == liouville_endpoint_density(vec1(0.2), vec1(0.9), 1.0, m);
    out.require(exact, "value equals the exact gaussian");
    out.require(est.stderr_ == 0.0, "stderr is exactly zero");

    const double sd = std::sqrt(liouville_endpoint_variance(hurst, 1.0));
    std::vector<double> ygrid;
    std::vector<Eigen::VectorXd> ys;
    const int n = 1600;
    for (int i = 0; i <= n; ++i) {
      double y = 0.2 - 8.0 * sd + 16.0 * sd * i / n;
      ygrid.push_back(y);
      ys.push_back(vec1(y));
    }
    auto ests = conditional_density_batch(m, ell.ell, ys, 2, 3);
    std::vector<double> dens;
    for (auto& e : ests) dens.push_back(e.value);
    double mass = trapezoid(ygrid, dens);
    out.detail << " H=" << hurst << " mass=" << mass;
    out.require(std::abs(mass - 1.0) <= 1e-4, "mass within 1e-4 of 1");
  }
  return out;
}

// --------------------------------------------------------------------------
// 5. fOU conditional and transition densities against quadrature oracles.
// --------------------------------------------------------------------------
Outcome criterion_fou_density() {
  Outcome out;
  const double y0 = 0.5;
  for (double hurst : {0.3, 0.5, 0.7}) {
    ModelSpec m(DriftSpec::linear_rate(1.0), kI1, hurst);
    // grid chosen so the O(dt) weight bias sits below the Monte Carlo
    // resolution of 1e4 paths even at the +-2 tail points
    Grid g = make_grid(0.0, 1.0, hurst < 0.5 ? 1.0 / 512 : 1.0 / 1024);
    auto ell = make_constant_ell(vec1(y0), g);
    const double mean = std::exp(-1.0) * y0;
    const double var = liouville_linear_endpoint_variance(1.0, hurst, 1.0);

    std::vector<double> ylist{0.0, 1.0, -1.0, 2.0, -2.0};
    std::vector<Eigen::VectorXd> ys;
    for (double y : ylist) ys.push_back(vec1(y));
    auto ests = conditional_density_batch(m, ell.ell, ys, 10000, 97);
    double worst_z = 0.0;
    int mode_idx = 0;
    for (size_t i = 0; i < ylist.size(); ++i) {
      double oracle = normal_pdf(ylist[i], mean, var);
      worst_z = std::max(worst_z, std::abs(ests[i].value - oracle) / ests[i].stderr_);
      if (std::abs(ylist[i] - mean) < std::abs(ylist[mode_idx] - mean)) mode_idx = static_cast<int>(i);
    }
    double mode_rel = std::abs(ests[mode_idx].value - normal_pdf(ylist[mode_idx], mean, var)) /
                      normal_pdf(ylist[mode_idx], mean, var);
    out.detail << " H=" << hurst << " cond_z=" << worst_z << " mode_rel=" << mode_rel;
    out.require(worst_z <= 3.0, "conditional within 3 stderr");
    out.require(mode_rel <= 0.05, "relative error at the mode <= 5%");

    // transition against the exact fOU moments
    HistoryParams p;
    p.dt_hor = 1.0 / 512;
    p.n_outer = 192;
    p.n_inner = 96;
    auto mom = fou_exact_moments(1.0, kI1, hurst, 1.0);
    double tmean = mom.mean_factor * y0;
    std::vector<Eigen::VectorXd> tys{vec1(tmean), vec1(tmean + 1.0), vec1(tmean - 1.0)};
    auto tests = transition_density_batch(m, vec1(y0), tys, 1.0, p, 57);
    double tz = 0.0;
    for (size_t i = 0; i < tys.size(); ++i) {
      double oracle = normal_pdf(tys[i](0), tmean, mom.var_factor);
      tz = std::max(tz, std::abs(tests[i].value - oracle) / tests[i].stderr_);
    }
    out.detail << " trans_z=" << tz;
    out.require(tz <= 3.0, "transition within 3 stderr");
  }
  return out;
}

// --------------------------------------------------------------------------
// 6. Stationary density: fOU accuracy plus sandwich feasibility for fOU and
//    tanh_well at H in {0.3, 0.7}.
// --------------------------------------------------------------------------
Outcome criterion_stationary() {
  Outcome out;
  HistoryParams p;
  p.dt_hor = 1.0 / 128;
  p.dt_sim = 1.0 / 32;
  p.n_outer = 200;  // replicas
  p.n_inner = 512;
  for (double hurst : {0.3, 0.7}) {
    ModelSpec m(DriftSpec::linear_rate(1.0), kI1, hurst);
    double v = fou_stationary_variance(1.0, kI1, hurst).var_factor;
    double sd = std::sqrt(v);
    std::vector<Eigen::VectorXd> ys;
    std::vector<double> ylist{0.0, sd, -sd, 2.0 * sd, -2.0 * sd};
    for (double y : ylist) ys.push_back(vec1(y));
    auto res = stationary_density_batch(m, ys, 1.0, 20.0, p, 71);
    double worst = 0.0;
    bool positive = true;
    for (size_t i = 0; i < ylist.size(); ++i) {
      double oracle = normal_pdf(ylist[i], 0.0, v);
      // tolerance: 3 stderr plus a documented 4% budget for the Euler grid
      // and the truncated past
      double tol = 3.0 * res.per_y[i].stderr_ + 0.04 * oracle;
      worst = std::max(worst, std::abs(res.per_y[i].value - oracle) / tol);
      positive = positive && res.per_y[i].value > 0.0;
    }
    out.detail << " H=" << hurst << " fou_worst=" << worst;
    out.require(worst <= 1.0, "fOU stationary within 3 stderr + bias budget");
    out.require(positive, "strict positivity");

    GaussianBoundsConfig gb;
    gb.params = p;
    gb.params.n_outer = 128;
    gb.params.n_inner = 256;
    gb.t_burn = 20.0;
    for (double k : {-2.0, -1.0, 0.0, 1.0, 2.0}) gb.y_grid.push_back(k * sd);
    auto rep = check_gaussian_bounds_stationary(m, gb, 72);
    out.require(rep.verdict == Verdict::pass, "fOU sandwich feasibility");

    GaussianBoundsConfig tb;
    tb.params = gb.params;
    tb.t_burn = 20.0;
    tb.y_grid = {-6.0, -4.0, -2.0, 0.0, 2.0, 4.0, 6.0};
    ModelSpec th(DriftSpec::tanh_well(2.0), kI1, hurst);
    auto trep = check_gaussian_bounds_stationary(th, tb, 73);
    out.detail << " tanh_verdict=" << verdict_name(trep.verdict);
    out.require(trep.verdict == Verdict::pass, "tanh_well sandwich feasibility");
  }
  return out;
}

// --------------------------------------------------------------------------
// 7. Fractional Chapman-Kolmogorov at (t, s) = (0.5, 0.5).
// --------------------------------------------------------------------------
Outcome criterion_chapman() {
  Outcome out;
  for (double hurst : {0.5, 0.7}) {
    for (int which : {0, 1}) {
      ModelSpec m = which == 0 ? ModelSpec(DriftSpec::linear_rate(1.0), kI1, hurst)
                               : ModelSpec(DriftSpec::tanh_well(1.5), kI1, hurst);
      CkConfig cfg;
      cfg.t = 0.5;
      cfg.s = 0.5;
      cfg.y_list = {-1.0, -0.5, 0.0, 0.5, 1.0};
      cfg.params.dt_hor = 1.0 / 128;
      cfg.params.dt_sim = 1.0 / 64;
      cfg.params.n_outer = 1200;
      cfg.params.n_inner = 128;
      auto rep = check_chapman_kolmogorov(m, vec1(0.3), cfg, 83 + which);
      out.detail << " H=" << hurst << "/" << drift_kind_name(m.drift.kind)
                 << " worst_z=" << rep.metrics.at("worst_z");
      out.require(rep.verdict == Verdict::pass, "CK agreement within 3 combined stderr");
    }
  }
  return out;
}

// --------------------------------------------------------------------------
// 8. Non-stationary sandwich for the fOU at H in {0.3, 0.7}.
// --------------------------------------------------------------------------
Outcome criterion_nonstationary() {
  Outcome out;
  for (double hurst : {0.3, 0.7}) {
    ModelSpec m(DriftSpec::linear_rate(1.0), kI1, hurst);
    NonstatConfig cfg;
    cfg.y0_list = {-1.0, 0.0, 1.0};
    cfg.t_list = {0.25, 0.5, 1.0};
    cfg.params.dt_hor = 1.0 / 128;
    cfg.params.n_outer = 500;
    cfg.params.n_inner = 128;
    auto rep = check_nonstationary_bounds(m, cfg, 91);
    out.detail << " H=" << hurst << " c_fit=" << rep.metrics.at("c_fit")
               << " diag=[" << rep.metrics.at("diag_scaled_min") << ","
               << rep.metrics.at("diag_scaled_max") << "]";
    out.require(rep.verdict == Verdict::pass, "joint feasibility");
    out.require(rep.metrics.at("diag_scaled_min") > 0.0, "on-diagonal lower bound");
  }
  return out;
}

// --------------------------------------------------------------------------
// 9. Parameter smoothness: finite differences vs the analytic derivative of
//    the oracle density, plus CRN continuity.
// --------------------------------------------------------------------------
Outcome criterion_smoothness() {
  Outcome out;
  const double hurst = 0.7;
  ModelSpec base(DriftSpec::parametric_linear(1), kI1, hurst);
  base.lambda = Eigen::VectorXd::Constant(1, 1.0);
  HistoryParams p;
  p.dt_hor = 1.0 / 128;
  p.dt_sim = 1.0 / 32;
  p.n_outer = 200;
  p.n_inner = 384;

  auto sweep = parametric_stationary_sweep(base, {0.8, 1.0, 1.2}, {0.0}, 1.0, 20.0, p, 111);
  double fd = sweep.derivatives.at(0).dp_dlambda;
  double fd_se = sweep.derivatives.at(0).stderr_;

  // oracle: v(lambda) by quadrature; the scaling v = v1 lambda^{-2H} gives
  // dp/dlambda (0) = p(0) H / lambda at lambda = 1
  double v1 = fou_stationary_variance(1.0, kI1, hurst).var_factor;
  double v08 = fou_stationary_variance(0.8, kI1, hurst).var_factor;
  double v12 = fou_stationary_variance(1.2, kI1, hurst).var_factor;
  bool scaling_ok = std::abs(v08 - v1 * std::pow(0.8, -2.0 * hurst)) < 1e-6 &&
                    std::abs(v12 - v1 * std::pow(1.2, -2.0 * hurst)) < 1e-6;
  out.require(scaling_ok, "oracle variance scaling");
  // central difference of the oracle itself over the same stencil removes the
  // h^2 truncation mismatch
  double oracle_fd = (normal_pdf(0.0, 0.0, v12) - normal_pdf(0.0, 0.0, v08)) / 0.4;
  double z = std::abs(fd - oracle_fd) / fd_se;
  out.detail << " fd=" << fd << " oracle=" << oracle_fd << " z=" << z;
  out.require(z <= 3.0, "finite difference within 3 propagated stderr");

  // CRN continuity in lambda
  auto run = [&](double lam) {
    ModelSpec m = base;
    m.lambda = Eigen::VectorXd::Constant(1, lam);
    HistoryParams q = p;
    q.n_outer = 96;
    q.n_inner = 192;
    return stationary_density(m, vec1(0.0), 1.0, 20.0, q, 112).value;
  };
  double p0 = run(1.0);
  double g1 = std::abs(run(1.2) - p0);
  double g2 = std::abs(run(1.1) - p0);
  double g3 = std::abs(run(1.05) - p0);
  out.detail << " gaps=" << g1 << ">" << g2 << ">" << g3;
  out.require(g2 < g1 && g3 < g2, "CRN lambda-continuity trend");
  return out;
}

// --------------------------------------------------------------------------
// 10. Averaging: sup-norm and 1/2-Hoelder distances decrease over eps.
// --------------------------------------------------------------------------
Outcome criterion_averaging() {
  Outcome out;
  AveragingConfig cfg;
  cfg.eps_list = {0.1, 0.03, 0.01};
  cfg.alpha = 0.5;
  cfg.hurst_slow = 0.75;
  cfg.hurst_fast = 0.6;
  cfg.dt = 1.0 / 512;
  cfg.n_rep = 8;
  cfg.fast_params.dt_hor = 1.0 / 64;
  cfg.fast_params.dt_sim = 1.0 / 32;
  cfg.fast_params.n_outer = 64;
  cfg.fast_params.n_inner = 192;
  auto rep = check_averaging(cfg, 121);
  for (double eps : cfg.eps_list)
    out.detail << " sup(" << eps << ")=" << rep.metrics.at("sup_eps_" + std::to_string(eps));
  out.require(rep.verdict == Verdict::pass, "distances decrease monotonically");
  return out;
}

// --------------------------------------------------------------------------
// 11. CLI determinism: bitwise reruns, worker-count independence.
// --------------------------------------------------------------------------
Outcome criterion_determinism() {
  Outcome out;
  if (g_cli_path.empty() || !fs::exists(g_cli_path)) {
    out.require(false, "cli binary path not provided");
    return out;
  }
  fs::path dir = fs::temp_directory_path() / "fracdens_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto run = [&](const std::string& args) {
    std::string cmd = g_cli_path + " " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str());
  };
  auto slurp = [&](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };

  std::string dens = "--set model.drift=linear --set model.rate=1 --set model.hurst=0.3 "
                     "--set y.list=0,0.5,1 --set est.n_paths=512 --set est.dt=0.015625 --seed 4";
  out.require(run("density " + dens + " --out " + (dir / "a").string()) == 0, "density run");
  out.require(run("density " + dens + " --out " + (dir / "b").string()) == 0, "density rerun");
  out.require(run("density " + dens + " --workers 2 --out " + (dir / "c").string()) == 0, "density workers=2");
  std::string da = slurp(dir / "a" / "density.csv");
  out.require(!da.empty() && da == slurp(dir / "b" / "density.csv"), "density rerun bitwise");
  out.require(da == slurp(dir / "c" / "density.csv"), "density workers bitwise");

  std::string sim = "--set sim.kind=fbm --set model.hurst=0.7 --set sim.dt=0.0078125 --set sim.t_past=10 --seed 6";
  out.require(run("simulate " + sim + " --out " + (dir / "s1").string()) == 0, "simulate run");
  out.require(run("simulate " + sim + " --out " + (dir / "s2").string()) == 0, "simulate rerun");
  out.require(slurp(dir / "s1" / "path_0.csv") == slurp(dir / "s2" / "path_0.csv"), "simulate bitwise");

  std::string val = "validate tv_convergence --set model.drift=linear --set model.rate=1 "
                    "--set model.hurst=0.7 --set est.n_paths=2000 --seed 8";
  out.require(run(val + " --out " + (dir / "v1").string()) == 0, "validate run");
  out.require(run(val + " --workers 2 --out " + (dir / "v2").string()) == 0, "validate workers=2");
  out.require(slurp(dir / "v1" / "tv_convergence_report.json") ==
                  slurp(dir / "v2" / "tv_convergence_report.json"),
              "validate report bitwise");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  struct Entry {
    int num;
    const char* name;
    std::function<Outcome()> fn;
  };
  std::vector<Entry> entries = {
      {1, "fractional inversion", criterion_inversion},
      {2, "noise calibration", criterion_noise},
      {3, "bridge correctness", criterion_bridge},
      {4, "zero-drift exactness", criterion_zero_drift},
      {5, "fOU conditional/transition density", criterion_fou_density},
      {6, "stationary density and sandwich", criterion_stationary},
      {7, "fractional chapman-kolmogorov", criterion_chapman},
      {8, "non-stationary sandwich", criterion_nonstationary},
      {9, "parameter smoothness", criterion_smoothness},
      {10, "averaging", criterion_averaging},
      {11, "determinism", criterion_determinism},
  };

  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg.find_first_not_of("0123456789") == std::string::npos)
      selected.push_back(std::stoi(arg));
    else
      g_cli_path = arg;
  }

  bool all_pass = true;
  for (auto& e : entries) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), e.num) == selected.end()) continue;
    auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = e.fn();
    } catch (const std::exception& ex) {
      out.pass = false;
      out.detail << " exception: " << ex.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (out.pass ? "[PASS]" : "[FAIL]") << " criterion " << e.num << " (" << e.name << ", "
              << std::fixed << std::setprecision(1) << secs << "s):" << out.detail.str() << "\n"
              << std::defaultfloat;
    all_pass = all_pass && out.pass;
  }
  std::cout << (all_pass ? "ACCEPTANCE: ALL PASS" : "ACCEPTANCE: FAILURES PRESENT") << "\n";
  return all_pass ? 0 : 1;
}
