#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

#include "fracdens/grid.hpp"
#include "fracdens/noise.hpp"
#include "fracdens/rng.hpp"

namespace fracdens {

enum class DriftKind { zero, linear, tanh_well, sign, parametric_linear };

inline const char* drift_kind_name(DriftKind k) {
  switch (k) {
    case DriftKind::zero: return "zero";
    case DriftKind::linear: return "linear";
    case DriftKind::tanh_well: return "tanh_well";
    case DriftKind::sign: return "sign";
    case DriftKind::parametric_linear: return "parametric_linear";
  }
  return "?";
}

// Drift catalog. linear holds a rate matrix (b = -rate*y); tanh_well is
// b = -y + a*tanh(y) componentwise; sign is b = -scale*sign(y) with
// sign(0) = 0; parametric_linear reads componentwise rates from lambda.
struct DriftSpec {
  DriftKind kind = DriftKind::zero;
  int dimension = 1;
  Eigen::MatrixXd rate;   // linear
  double tanh_a = 0.0;    // tanh_well
  double sign_scale = 1.0;

  static DriftSpec zero(int n = 1) { return DriftSpec{DriftKind::zero, n, {}, 0.0, 0.0}; }
  static DriftSpec linear(Eigen::MatrixXd m) {
    DriftSpec d;
    d.kind = DriftKind::linear;
    d.dimension = static_cast<int>(m.rows());
    d.rate = std::move(m);
    return d;
  }
  static DriftSpec linear_rate(double lambda, int n = 1) {
    return linear(lambda * Eigen::MatrixXd::Identity(n, n));
  }
  static DriftSpec tanh_well(double a, int n = 1) { return DriftSpec{DriftKind::tanh_well, n, {}, a, 0.0}; }
  static DriftSpec sign(double scale, int n = 1) { return DriftSpec{DriftKind::sign, n, {}, 0.0, scale}; }
  static DriftSpec parametric_linear(int n = 1) { return DriftSpec{DriftKind::parametric_linear, n, {}, 0.0, 0.0}; }

  bool needs_lambda() const { return kind == DriftKind::parametric_linear; }
};

inline Eigen::VectorXd drift_eval(const DriftSpec& d, const std::optional<Eigen::VectorXd>& lambda,
                                  const Eigen::VectorXd& y) {
  switch (d.kind) {
    case DriftKind::zero:
      return Eigen::VectorXd::Zero(y.size());
    case DriftKind::linear:
      return -(d.rate * y);
    case DriftKind::tanh_well:
      return -y + d.tanh_a * y.array().tanh().matrix();
    case DriftKind::sign: {
      Eigen::VectorXd out(y.size());
      for (int i = 0; i < y.size(); ++i) out(i) = y(i) > 0.0 ? -d.sign_scale : (y(i) < 0.0 ? d.sign_scale : 0.0);
      return out;
    }
    case DriftKind::parametric_linear: {
      if (!lambda) throw std::invalid_argument("drift_eval: parametric drift called without lambda");
      return -(lambda->array() * y.array()).matrix();
    }
  }
  throw std::logic_error("drift_eval: unknown kind");
}

// Problem instance of the additive-noise SDE dY = b(Y) dt + sigma dB^H.
struct ModelSpec {
  DriftSpec drift;
  Eigen::MatrixXd sigma;
  double hurst = 0.5;
  int dimension = 1;
  std::optional<Eigen::VectorXd> lambda;

  ModelSpec() = default;
  ModelSpec(DriftSpec d, Eigen::MatrixXd s, double h)
      : drift(std::move(d)), sigma(std::move(s)), hurst(h), dimension(static_cast<int>(sigma.rows())) {
    validate();
  }

  void validate() const {
    if (!(hurst > 0.0 && hurst < 1.0)) throw std::invalid_argument("ModelSpec: hurst must lie in (0,1)");
    if (sigma.rows() != sigma.cols()) throw std::invalid_argument("ModelSpec: sigma must be square");
    Eigen::FullPivLU<Eigen::MatrixXd> lu(sigma);
    if (!lu.isInvertible()) throw std::invalid_argument("ModelSpec: sigma must be invertible");
    if (drift.kind == DriftKind::sign && hurst >= 0.5)
      throw std::invalid_argument("ModelSpec: sign drift is only admissible for hurst < 1/2");
  }

  Eigen::VectorXd b(const Eigen::VectorXd& y) const { return drift_eval(drift, lambda, y); }
  Eigen::MatrixXd sigma_inv() const { return sigma.inverse(); }
  double sigma_condition() const {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sigma);
    return svd.singularValues()(0) / svd.singularValues()(svd.singularValues().size() - 1);
  }
};

// Fits the smallest envelope <b(y)-b(z), y-z> <= C - kappa |y-z|^2 over sampled
// pairs: least-squares slope, then the intercept shifted up until no sampled
// pair violates the bound.
struct ContractionFit {
  double c_est = 0.0;
  double kappa_est = 0.0;
  int violations = 0;  // of a user-supplied (C, kappa), if given
};

inline ContractionFit check_off_diagonal_contraction(const DriftSpec& d,
                                                     const std::optional<Eigen::VectorXd>& lambda,
                                                     int sample_count, double radius, uint64_t seed = 1234,
                                                     const std::optional<std::pair<double, double>>& supplied = {}) {
  if (sample_count < 1) throw std::invalid_argument("check_off_diagonal_contraction: sample_count >= 1");
  RngStream rng(seed, stream_id(0xC0));
  const int n = d.dimension;
  std::vector<double> s(sample_count), dd(sample_count);
  for (int i = 0; i < sample_count; ++i) {
    Eigen::VectorXd y(n), z(n);
    for (int j = 0; j < n; ++j) {
      y(j) = radius * (2.0 * rng.next_uniform() - 1.0);
      z(j) = radius * (2.0 * rng.next_uniform() - 1.0);
    }
    Eigen::VectorXd diff = y - z;
    s[i] = diff.squaredNorm();
    dd[i] = (drift_eval(d, lambda, y) - drift_eval(d, lambda, z)).dot(diff);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < sample_count; ++i) {
    sx += s[i];
    sy += dd[i];
    sxx += s[i] * s[i];
    sxy += s[i] * dd[i];
  }
  double denom = sample_count * sxx - sx * sx;
  double slope = denom != 0.0 ? (sample_count * sxy - sx * sy) / denom : 0.0;
  double icpt = (sy - slope * sx) / sample_count;
  ContractionFit fit;
  fit.kappa_est = std::max(0.0, -slope);
  double worst = -1e300;
  for (int i = 0; i < sample_count; ++i) worst = std::max(worst, dd[i] + fit.kappa_est * s[i]);
  fit.c_est = std::max(worst, icpt);
  if (supplied) {
    for (int i = 0; i < sample_count; ++i)
      if (dd[i] > supplied->first - supplied->second * s[i] + 1e-12) ++fit.violations;
  }
  return fit;
}

// Explicit Euler: Y_{k+1} = Y_k + b(Y_k) dt + sigma (driving_{k+1} - driving_k).
// Kept first order deliberately; the drift may be merely measurable.
inline SampledPath euler_solve(const ModelSpec& m, const SampledPath& driving, const Eigen::VectorXd& y0) {
  const Grid& g = driving.grid;
  if (driving.n_comp() != m.dimension) throw std::invalid_argument("euler_solve: driving dimension mismatch");
  SampledPath out(g, m.dimension);
  Eigen::VectorXd y = y0;
  out.values.row(0) = y.transpose();
  for (int k = 0; k < g.n_steps; ++k) {
    y += m.b(y) * g.dt;
    y += m.sigma * (driving.values.row(k + 1) - driving.values.row(k)).transpose();
    if (!y.allFinite()) throw std::runtime_error("euler_solve: non-finite state at step " + std::to_string(k + 1));
    out.values.row(k + 1) = y.transpose();
  }
  return out;
}

// Conditional evolution Phi_t = ell(t) + int_0^t b(Phi_s) ds + sigma B~_t,
// same recursion as euler_solve with the ell increments added in.
inline SampledPath conditional_evolution(const ModelSpec& m, const SampledPath& ell, const SampledPath& liouville) {
  require_same_grid(ell.grid, liouville.grid, "conditional_evolution");
  const Grid& g = ell.grid;
  SampledPath out(g, m.dimension);
  Eigen::VectorXd y = ell.at(0);
  out.values.row(0) = y.transpose();
  for (int k = 0; k < g.n_steps; ++k) {
    y += m.b(y) * g.dt;
    y += (ell.values.row(k + 1) - ell.values.row(k)).transpose();
    y += m.sigma * (liouville.values.row(k + 1) - liouville.values.row(k)).transpose();
    if (!y.allFinite())
      throw std::runtime_error("conditional_evolution: non-finite state at step " + std::to_string(k + 1));
    out.values.row(k + 1) = y.transpose();
  }
  return out;
}

// Slow-fast system: X stepped with a left-point Young scheme against the slow
// fBm (H > 1/2), Y with drift b/eps and noise scaled by eps^{-Hhat}.
struct SlowSpec {
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)> f;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> g;  // depends on x only
};

struct SlowFastResult {
  SampledPath x_path;
  SampledPath y_path;
};

inline SlowFastResult slow_fast_solve(const SlowSpec& slow, const ModelSpec& fast, double eps,
                                      const FbmPath& slow_noise, const FbmPath& fast_noise,
                                      const Eigen::VectorXd& x0, const Eigen::VectorXd& y0) {
  if (!(eps > 0.0)) throw std::invalid_argument("slow_fast_solve: eps must be > 0");
  if (!(slow_noise.hurst > 0.5)) throw std::invalid_argument("slow_fast_solve: slow noise needs hurst > 1/2");
  const double hurst_hat = fast_noise.hurst;
  require_same_grid(slow_noise.grid, fast_noise.grid, "slow_fast_solve");
  const Grid& g = slow_noise.grid;
  SlowFastResult out{SampledPath(g, static_cast<int>(x0.size())), SampledPath(g, static_cast<int>(y0.size()))};
  Eigen::VectorXd x = x0, y = y0;
  out.x_path.values.row(0) = x.transpose();
  out.y_path.values.row(0) = y.transpose();
  const double fast_noise_scale = std::pow(eps, -hurst_hat);
  for (int k = 0; k < g.n_steps; ++k) {
    Eigen::VectorXd db = (slow_noise.values.row(k + 1) - slow_noise.values.row(k)).transpose();
    Eigen::VectorXd dbh = (fast_noise.values.row(k + 1) - fast_noise.values.row(k)).transpose();
    Eigen::VectorXd xn = x + slow.f(x, y) * g.dt + slow.g(x) * db;
    y += fast.b(y) * (g.dt / eps) + fast_noise_scale * (fast.sigma * dbh);
    x = xn;
    if (!x.allFinite() || !y.allFinite())
      throw std::runtime_error("slow_fast_solve: non-finite state at step " + std::to_string(k + 1));
    out.x_path.values.row(k + 1) = x.transpose();
    out.y_path.values.row(k + 1) = y.transpose();
  }
  return out;
}

}  // namespace fracdens
