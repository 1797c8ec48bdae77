#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "fracdens/bridge.hpp"
#include "fracdens/frac_calc.hpp"
#include "fracdens/fou.hpp"
#include "fracdens/parallel.hpp"
#include "fracdens/sde.hpp"

namespace fracdens {

// Conditioning function ell for the conditional evolution: either a constant
// (deterministic start) or a history-augmented path z + sigma * (past field).
enum class EllOrigin { constant, history_augmented };

struct ConditioningPath {
  SampledPath ell;
  EllOrigin origin = EllOrigin::constant;
};

inline ConditioningPath make_constant_ell(const Eigen::VectorXd& y0, const Grid& grid) {
  ConditioningPath out{SampledPath(grid, static_cast<int>(y0.size())), EllOrigin::constant};
  for (int k = 0; k < grid.n_nodes(); ++k) out.ell.values.row(k) = y0.transpose();
  return out;
}

struct DensityDiagnostics {
  double weight_ess = 0.0;
  double max_weight_share = 0.0;
  bool low_ess = false;
  long clamped_weights = 0;
  bool factorization_jittered = false;
  double truncation_tail_var = 0.0;
};

struct DensityEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  long n_paths = 0;
  DensityDiagnostics diagnostics;
};

// Normalization of the inverse Liouville map: W = kappa_H I^{1/2-H} B~ with
// kappa_H = 1 / (alpha_H Gamma(H+1/2)). This is the coefficient the Girsanov
// drift carries; it is 1 at H = 1/2.
inline double girsanov_kappa(double hurst) {
  return 1.0 / (alpha_h(hurst) * std::tgamma(hurst + 0.5));
}

// Exact Gaussian density of ell(T) + sigma B~_T at y (the estimator's
// prefactor): N(ell(T), V_T sigma sigma^T) with V_T = alpha_H^2 T^{2H} / (2H).
inline double liouville_endpoint_density(const Eigen::VectorXd& ell_t, const Eigen::VectorXd& y, double t_hor,
                                         const ModelSpec& m) {
  if (!(t_hor > 0.0)) throw std::invalid_argument("liouville_endpoint_density: T must be > 0");
  const double v = liouville_endpoint_variance(m.hurst, t_hor);
  const int n = m.dimension;
  Eigen::VectorXd z = m.sigma_inv() * (y - ell_t);
  double det = std::abs(m.sigma.determinant());
  return std::pow(2.0 * M_PI * v, -0.5 * n) / det * std::exp(-0.5 * z.squaredNorm() / v);
}

// ---------------------------------------------------------------------------
// Girsanov weight machinery.
//
// The drift functional along a bridge path X is
//   L_t = kappa_H ( I^{1/2-H} G )(t),   G_s = sigma^{-1} b( ell_s + sigma B~[X]_s ),
// where B~[X] is the Liouville functional of X (kernel coefficient alpha_H).
// G(0) is generally nonzero, so G splits into its initial value plus a part
// vanishing at 0: the constant maps to the closed form
// kappa G(0) t^{1/2-H} / Gamma(3/2-H), singular at 0 when H > 1/2, while
// the vanishing part goes through the product-integration operators. The
// singular component is deterministic given ell, so it enters the Ito sums
// through exact interval averages; the stochastic part is evaluated at left
// points.
// ---------------------------------------------------------------------------
class GirsanovEvaluator {
 public:
  GirsanovEvaluator(const ModelSpec& m, const Grid& grid)
      : model_(m),
        grid_(grid),
        kappa_(girsanov_kappa(m.hurst)),
        sigma_inv_(m.sigma_inv()),
        lw_(m.hurst, grid.dt, grid.n_steps),
        sing_exp_(m.hurst - 0.5) {
    const int n = grid.n_steps;
    const double a = sing_exp_;  // L_sing ~ t^{-a} / Gamma(1-a)
    const double g1a = std::tgamma(1.0 - a);
    sing_node_.resize(n + 1);
    sing_avg_.resize(n);
    sing_node_[0] = 0.0;  // unused; node-0 handling goes through sing_avg_[0]
    for (int k = 1; k <= n; ++k) sing_node_[k] = std::pow(grid.node(k), -a) / g1a;
    const double one_ma = 1.0 - a;
    for (int j = 0; j < n; ++j) {
      double t0 = grid.node(j), t1 = grid.node(j + 1);
      sing_avg_[j] = (std::pow(t1, one_ma) - std::pow(t0, one_ma)) / (one_ma * grid.dt * g1a);
    }
    sing_sq_integral_ = std::pow(grid.t_end(), 1.0 - 2.0 * a) / ((1.0 - 2.0 * a) * g1a * g1a);
    if (m.hurst < 0.5) {
      rl_int_.emplace(0.5 - m.hurst, grid.dt, n);
    } else if (m.hurst > 0.5) {
      rl_der_.emplace(m.hurst - 0.5, grid.dt, n);
    }
  }

  const Grid& grid() const { return grid_; }
  const ModelSpec& model() const { return model_; }

  // G_s = sigma^{-1} b(ell_s + sigma B~[X]_s) at every node
  Eigen::MatrixXd drift_along(const SampledPath& ell, const Eigen::MatrixXd& x_vals) const {
    const int nodes = grid_.n_nodes();
    const int nc = model_.dimension;
    Eigen::MatrixXd dincr(grid_.n_steps, nc);
    for (int j = 0; j < grid_.n_steps; ++j) dincr.row(j) = x_vals.row(j + 1) - x_vals.row(j);
    Eigen::MatrixXd liouville;
    lw_.apply(dincr, liouville);
    Eigen::MatrixXd g(nodes, nc);
    for (int k = 0; k < nodes; ++k) {
      Eigen::VectorXd phi = ell.values.row(k).transpose() + model_.sigma * liouville.row(k).transpose();
      g.row(k) = (sigma_inv_ * model_.b(phi)).transpose();
    }
    return g;
  }

  // vanishing part through the fractional operator; returns R with R(0) = 0
  Eigen::MatrixXd regular_part(const Eigen::MatrixXd& g) const {
    Eigen::MatrixXd reg = g.rowwise() - g.row(0);
    if (model_.hurst == 0.5) return reg;
    const int n = grid_.n_steps;
    const int nc = static_cast<int>(g.cols());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n + 1, nc);
    if (rl_int_) {
      for (int c = 0; c < nc; ++c) {
        const double* fv = reg.col(c).data();
        double* ov = out.col(c).data();
        for (int k = 1; k <= n; ++k) {
          double acc = 0.0;
          for (int j = 0; j < k; ++j) {
            int lag = k - j;
            acc += fv[j] * rl_int_->P[lag] + (fv[j + 1] - fv[j]) * rl_int_->Q[lag];
          }
          ov[k] = acc;
        }
      }
    } else {
      for (int c = 0; c < nc; ++c) {
        const double* fv = reg.col(c).data();
        double* ov = out.col(c).data();
        for (int k = 1; k <= n; ++k) {
          double acc = 0.0;
          for (int j = 0; j < k; ++j)
            acc += (fv[j + 1] - fv[j]) / grid_.dt * (rl_der_->R[k - j] - rl_der_->R[k - j - 1]);
          ov[k] = acc;
        }
      }
    }
    return out;
  }

  // log of the Doleans-Dade exponential along the path
  double log_weight(const SampledPath& ell, const Eigen::MatrixXd& x_vals) const {
    if (model_.drift.kind == DriftKind::zero) return 0.0;
    const int n = grid_.n_steps;
    const int nc = model_.dimension;
    Eigen::MatrixXd g = drift_along(ell, x_vals);
    Eigen::MatrixXd reg = regular_part(g);
    Eigen::RowVectorXd g0 = g.row(0);

    double ito = 0.0, cross = 0.0, reg_sq = 0.0;
    for (int j = 0; j < n; ++j) {
      Eigen::RowVectorXd l_hat = kappa_ * (g0 * sing_avg_[j] + reg.row(j));
      ito += l_hat.dot(x_vals.row(j + 1) - x_vals.row(j));
      cross += sing_avg_[j] * g0.dot(reg.row(j));
      reg_sq += reg.row(j).squaredNorm();
    }
    (void)nc;
    // int |L|^2 dt: exact square of the singular component, left-point sums
    // for the cross and regular parts
    double quad = kappa_ * kappa_ *
                  (g0.squaredNorm() * sing_sq_integral_ + (2.0 * cross + reg_sq) * grid_.dt);
    return ito - 0.5 * quad;
  }

  // node values of the drift functional L (node 0 carries the first-interval
  // average of the singular component; the scheme's finite stand-in)
  SampledPath frak_l_path(const SampledPath& ell, const Eigen::MatrixXd& x_vals) const {
    Eigen::MatrixXd g = drift_along(ell, x_vals);
    Eigen::MatrixXd reg = regular_part(g);
    Eigen::RowVectorXd g0 = g.row(0);
    SampledPath out(grid_, model_.dimension);
    out.values.row(0) = kappa_ * (g0 * sing_avg_[0] + reg.row(0));
    for (int k = 1; k <= grid_.n_steps; ++k)
      out.values.row(k) = kappa_ * (g0 * sing_node_[k] + reg.row(k));
    if (!out.values.allFinite()) throw std::runtime_error("frak_l: non-finite values");
    return out;
  }

 private:
  ModelSpec model_;
  Grid grid_;
  double kappa_;
  Eigen::MatrixXd sigma_inv_;
  LiouvilleWeights lw_;
  double sing_exp_;
  std::vector<double> sing_node_, sing_avg_;
  double sing_sq_integral_;
  std::optional<RlIntegralWeights> rl_int_;
  std::optional<RlDerivativeWeights> rl_der_;
};

inline SampledPath frak_l(const ModelSpec& m, const SampledPath& ell, const BridgePath& bridge) {
  require_same_grid(ell.grid, bridge.grid, "frak_l");
  return GirsanovEvaluator(m, bridge.grid).frak_l_path(ell, bridge.x_values);
}

inline double girsanov_weight(const ModelSpec& m, const SampledPath& ell, const BridgePath& bridge,
                              bool* clamped = nullptr) {
  require_same_grid(ell.grid, bridge.grid, "girsanov_weight");
  double lw = GirsanovEvaluator(m, bridge.grid).log_weight(ell, bridge.x_values);
  if (clamped) *clamped = false;
  if (lw > 700.0) {
    lw = 700.0;
    if (clamped) *clamped = true;
  }
  return std::exp(lw);
}

}  // namespace fracdens
