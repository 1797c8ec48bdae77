#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "fracdens/grid.hpp"
#include "fracdens/linalg.hpp"
#include "fracdens/noise.hpp"
#include "fracdens/rng.hpp"

namespace fracdens {

struct BridgeEndpoint {
  Eigen::VectorXd x;  // target of the Liouville endpoint functional; x = y - ell(T)
  double t_hor;

  BridgeEndpoint(Eigen::VectorXd x_, double t) : x(std::move(x_)), t_hor(t) {
    if (!(t_hor > 0.0)) throw std::invalid_argument("BridgeEndpoint: T must be > 0");
  }
};

enum class BridgeMethod { exact_conditioning, sde };

struct BridgePath {
  Grid grid;
  Eigen::MatrixXd x_values;                       // (n_nodes x n), X_0 = 0
  std::optional<Eigen::MatrixXd> dw_increments;   // (n_steps x n), SDE sampler only
  BridgeMethod method = BridgeMethod::exact_conditioning;
};

// Cov(W_t, B~_T) per component, in closed form.
inline double bridge_cross_cov(double t, double t_hor, double hurst) {
  const double c = alpha_h(hurst);
  const double p = hurst + 0.5;
  return c / p * (std::pow(t_hor, p) - std::pow(t_hor - t, p));
}

// ---------------------------------------------------------------------------
// Exact Gaussian conditioning. (W_{t_1},...,W_{t_N}, B~_T) is jointly Gaussian
// with Cov(W_s, W_t) = min(s,t), Cov(W_t, B~_T) = r(t) above and
// Var(B~_T) = alpha_H^2 T^{2H} / (2H). The conditional mean is linear in x and
// the conditional covariance is x-independent, so one factorization serves
// every endpoint and every path.
// ---------------------------------------------------------------------------
class ExactBridgeSampler {
 public:
  ExactBridgeSampler(const Grid& grid, double hurst) : grid_(grid), hurst_(hurst) {
    if (std::abs(grid.t0) > 1e-12) throw std::invalid_argument("ExactBridgeSampler: grid must start at 0");
    const int n = grid.n_steps;
    const double t_hor = grid.t_end();
    v_endpoint_ = liouville_endpoint_variance(hurst, t_hor);
    mean_coeff_.resize(n);
    Eigen::VectorXd r(n);
    for (int i = 0; i < n; ++i) {
      r(i) = bridge_cross_cov(grid.node(i + 1), t_hor, hurst);
      mean_coeff_(i) = r(i) / v_endpoint_;
    }
    Eigen::MatrixXd k(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        k(i, j) = std::min(grid.node(i + 1), grid.node(j + 1)) - r(i) * r(j) / v_endpoint_;
    cond_cov_ = k;
    chol_ = chol_with_jitter(std::move(k));
  }

  const Grid& grid() const { return grid_; }
  double hurst() const { return hurst_; }
  double endpoint_variance() const { return v_endpoint_; }
  const Eigen::VectorXd& mean_coeff() const { return mean_coeff_; }
  const Eigen::MatrixXd& conditional_cov() const { return cond_cov_; }
  bool jittered() const { return chol_.jittered; }

  // centered draw (x = 0); the mean shift is added separately so one set of
  // draws serves a whole y-list
  Eigen::MatrixXd sample_centered(uint64_t seed, uint64_t stream, int n_comp) const {
    RngStream rng(seed, stream);
    const int n = grid_.n_steps;
    Eigen::MatrixXd vals = Eigen::MatrixXd::Zero(n + 1, n_comp);
    Eigen::VectorXd z(n);
    for (int c = 0; c < n_comp; ++c) {
      for (int i = 0; i < n; ++i) z(i) = rng.next_normal();
      vals.col(c).tail(n) = chol_.L * z;
    }
    return vals;
  }

  void add_mean(Eigen::MatrixXd& centered, const Eigen::VectorXd& x) const {
    for (int c = 0; c < centered.cols(); ++c) centered.col(c).tail(grid_.n_steps) += mean_coeff_ * x(c);
  }

  BridgePath sample(const BridgeEndpoint& ep, uint64_t seed, uint64_t stream) const {
    Eigen::MatrixXd vals = sample_centered(seed, stream, static_cast<int>(ep.x.size()));
    add_mean(vals, ep.x);
    return BridgePath{grid_, std::move(vals), std::nullopt, BridgeMethod::exact_conditioning};
  }

 private:
  Grid grid_;
  double hurst_;
  double v_endpoint_;
  Eigen::VectorXd mean_coeff_;
  Eigen::MatrixXd cond_cov_;
  CholFactor chol_;
};

inline BridgePath sample_bridge_exact(const BridgeEndpoint& ep, const Grid& grid, double hurst,
                                      uint64_t seed, uint64_t stream) {
  if (std::abs(grid.t_end() - ep.t_hor) > 1e-9) throw std::invalid_argument("sample_bridge_exact: grid/T mismatch");
  return ExactBridgeSampler(grid, hurst).sample(ep, seed, stream);
}

// Liouville endpoint functional of a bridge path: alpha_H * sum of exact
// kernel averages of (T-s)^{H-1/2} against the path increments.
inline Eigen::VectorXd endpoint_functional(const BridgePath& p, double hurst) {
  const int n = p.grid.n_steps;
  LiouvilleWeights lw(hurst, p.grid.dt, n);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(p.x_values.cols());
  for (int c = 0; c < p.x_values.cols(); ++c) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) acc += lw.a[n - j] * (p.x_values(j + 1, c) - p.x_values(j, c));
    out(c) = lw.coeff * acc;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Path-dependent SDE sampler:
//   dX_t = (2H/c_H) (T-t)^{H-1/2} ( x/T^{2H} - c_H int_0^t (T-s)^{-H-1/2} dW_s ) dt + dW_t.
// The outer kernel is integrated exactly per step; the inner singular
// integral is accumulated with exact subinterval averages. The final step is
// replaced by exact pinning of the endpoint functional. X, K and W are
// updated side by side so X = K + W holds bitwise.
// ---------------------------------------------------------------------------

namespace bridge_detail {

// avg of (T-s)^{-H-1/2} over [s0,s1]; needs s1 < T
inline double inner_kernel_avg(double t_hor, double s0, double s1, double hurst) {
  if (hurst == 0.5) return std::log((t_hor - s0) / (t_hor - s1)) / (s1 - s0);
  const double q = 0.5 - hurst;
  return (std::pow(t_hor - s0, q) - std::pow(t_hor - s1, q)) / (q * (s1 - s0));
}

struct SdeCoeffs {
  std::vector<double> outer_avg;  // avg of (T-t)^{H-1/2} per step
  std::vector<double> inner_avg;  // avg of (T-s)^{-H-1/2} per step, last unused
  double inv_t2h;

  SdeCoeffs(const Grid& g, double hurst) {
    const double t_hor = g.t_end();
    const int n = g.n_steps;
    outer_avg.resize(n);
    inner_avg.assign(n, 0.0);
    for (int j = 0; j < n; ++j) outer_avg[j] = kernel_avg(t_hor, g.node(j), g.node(j + 1), hurst);
    for (int j = 0; j + 1 < n; ++j) inner_avg[j] = inner_kernel_avg(t_hor, g.node(j), g.node(j + 1), hurst);
    inv_t2h = std::pow(t_hor, -2.0 * hurst);
  }
};

}  // namespace bridge_detail

inline BridgePath sample_bridge_sde(const BridgeEndpoint& ep, const Grid& grid, double hurst,
                                    uint64_t seed, uint64_t stream,
                                    const Eigen::MatrixXd* dw_override = nullptr) {
  if (std::abs(grid.t0) > 1e-12 || std::abs(grid.t_end() - ep.t_hor) > 1e-9)
    throw std::invalid_argument("sample_bridge_sde: grid must span [0,T]");
  const int n = grid.n_steps;
  const int nc = static_cast<int>(ep.x.size());
  const double c = alpha_h(hurst);
  const double dt = grid.dt;
  bridge_detail::SdeCoeffs coef(grid, hurst);
  LiouvilleWeights lw(hurst, dt, n);

  Eigen::MatrixXd dw(n, nc);
  if (dw_override) {
    if (dw_override->rows() != n || dw_override->cols() != nc)
      throw std::invalid_argument("sample_bridge_sde: dw_override shape mismatch");
    dw = *dw_override;
  } else {
    RngStream rng(seed, stream);
    const double s = std::sqrt(dt);
    for (int cc = 0; cc < nc; ++cc)
      for (int i = 0; i < n; ++i) dw(i, cc) = s * rng.next_normal();
  }

  Eigen::MatrixXd x_vals = Eigen::MatrixXd::Zero(n + 1, nc);
  for (int cc = 0; cc < nc; ++cc) {
    double k_acc = 0.0, w_acc = 0.0, h_acc = 0.0;
    double pin_acc = 0.0;  // partial endpoint functional
    for (int j = 0; j < n; ++j) {
      double drift = (2.0 * hurst / c) * coef.outer_avg[j] * (ep.x(cc) * coef.inv_t2h - c * h_acc);
      if (j == n - 1) {
        // exact pinning: solve the last increment from the endpoint functional
        double dx = (ep.x(cc) / lw.coeff - pin_acc) / lw.a[1];
        dw(j, cc) = dx - drift * dt;
      }
      k_acc += drift * dt;
      w_acc += dw(j, cc);
      if (j < n - 1) h_acc += coef.inner_avg[j] * dw(j, cc);
      x_vals(j + 1, cc) = k_acc + w_acc;
      pin_acc += lw.a[n - j] * (x_vals(j + 1, cc) - x_vals(j, cc));
    }
  }
  return BridgePath{grid, std::move(x_vals), dw, BridgeMethod::sde};
}

// Finite-variation part K^x of the SDE bridge, rebuilt from the stored
// increments with the same quadrature conventions; X = K + W bitwise.
inline SampledPath bridge_drift_k(const BridgeEndpoint& ep, const Grid& grid,
                                  const BridgePath& p, double hurst) {
  if (!p.dw_increments) throw std::invalid_argument("bridge_drift_k: path has no driving increments");
  const Eigen::MatrixXd& dw = *p.dw_increments;
  const int n = grid.n_steps;
  const int nc = static_cast<int>(dw.cols());
  const double c = alpha_h(hurst);
  const double dt = grid.dt;
  bridge_detail::SdeCoeffs coef(grid, hurst);
  SampledPath out(grid, nc);
  for (int cc = 0; cc < nc; ++cc) {
    double k_acc = 0.0, h_acc = 0.0;
    for (int j = 0; j < n; ++j) {
      double drift = (2.0 * hurst / c) * coef.outer_avg[j] * (ep.x(cc) * coef.inv_t2h - c * h_acc);
      k_acc += drift * dt;
      if (j < n - 1) h_acc += coef.inner_avg[j] * dw(j, cc);
      out.values(j + 1, cc) = k_acc;
    }
  }
  return out;
}

}  // namespace fracdens
