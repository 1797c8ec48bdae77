#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fracdens/grid.hpp"

namespace fracdens {

// Order of a Riemann-Liouville operator. alpha in (-1,1); positive orders are
// fractional integrals, negative orders fractional derivatives, 0 the identity.
struct FracOrder {
  double alpha = 0.0;
  explicit FracOrder(double a) : alpha(a) {
    if (!(a > -1.0 && a < 1.0)) throw std::invalid_argument("FracOrder: alpha must lie in (-1,1)");
  }
};

// Product-integration scheme: f is interpolated piecewise linearly and the
// kernel (t-s)^{alpha-1}/Gamma(alpha) is integrated exactly on each
// subinterval. The weights depend only on the lag m = k - j, so application is
// a lower-triangular Toeplitz matvec.
struct RlIntegralWeights {
  double alpha;
  double dt;
  // contribution of segment j to node k (m = k - j >= 1): f_j * P[m] + (f_{j+1} - f_j) * Q[m]
  std::vector<double> P, Q;

  RlIntegralWeights(double alpha_, double dt_, int n_steps) : alpha(alpha_), dt(dt_), P(n_steps + 1), Q(n_steps + 1) {
    const double ga = std::tgamma(alpha);
    for (int m = 1; m <= n_steps; ++m) {
      double b = m * dt, a = (m - 1) * dt;
      double pa = std::pow(a, alpha), pb = std::pow(b, alpha);
      double pa1 = std::pow(a, alpha + 1.0), pb1 = std::pow(b, alpha + 1.0);
      P[m] = (pb - pa) / (alpha * ga);
      Q[m] = (b * (pb - pa) / alpha - (pb1 - pa1) / (alpha + 1.0)) / (dt * ga);
    }
  }
};

// Exact derivative of the closed-form I^{1-alpha} of the piecewise-linear
// interpolant. After integrating by parts (f(0)=0) only the segment slopes
// survive: out(t_k) = sum_j m_j [(t_k-t_j)^{1-a} - (t_k-t_{j+1})^{1-a}] / Gamma(2-a).
struct RlDerivativeWeights {
  double alpha;
  double dt;
  std::vector<double> R;  // indexed by lag m >= 0; segment j contributes slope_j * (R[k-j] - R[k-j-1])

  RlDerivativeWeights(double alpha_, double dt_, int n_steps) : alpha(alpha_), dt(dt_), R(n_steps + 1) {
    const double g2a = std::tgamma(2.0 - alpha);
    for (int m = 0; m <= n_steps; ++m) R[m] = std::pow(m * dt, 1.0 - alpha) / g2a;
  }
};

namespace detail {

inline void check_anchored(const SampledFunction& f, const char* where) {
  if (std::abs(f.grid.t0) > 1e-12) throw std::invalid_argument(std::string(where) + ": grid must start at t0 = 0");
  if (f.values.rows() == 0) throw std::invalid_argument(std::string(where) + ": empty function");
}

}  // namespace detail

inline SampledFunction rl_integral(const SampledFunction& f, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("rl_integral: alpha must lie in (0,1)");
  detail::check_anchored(f, "rl_integral");
  const int N = f.grid.n_steps;
  RlIntegralWeights w(alpha, f.grid.dt, N);
  SampledFunction out(f.grid, f.n_comp());
  for (int c = 0; c < f.n_comp(); ++c) {
    const double* fv = f.values.col(c).data();
    double* ov = out.values.col(c).data();
    for (int k = 1; k <= N; ++k) {
      double acc = 0.0;
      for (int j = 0; j < k; ++j) {
        int m = k - j;
        acc += fv[j] * w.P[m] + (fv[j + 1] - fv[j]) * w.Q[m];
      }
      ov[k] = acc;
    }
  }
  return out;
}

inline SampledFunction rl_derivative(const SampledFunction& f, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("rl_derivative: alpha must lie in (0,1)");
  detail::check_anchored(f, "rl_derivative");
  const double scale = 1.0 + f.values.cwiseAbs().maxCoeff();
  for (int c = 0; c < f.n_comp(); ++c) {
    if (std::abs(f.values(0, c)) > 1e-9 * scale)
      throw std::invalid_argument("rl_derivative: f(0) must vanish (offset not subtracted)");
  }
  const int N = f.grid.n_steps;
  const double dt = f.grid.dt;
  RlDerivativeWeights w(alpha, dt, N);
  SampledFunction out(f.grid, f.n_comp());
  for (int c = 0; c < f.n_comp(); ++c) {
    const double* fv = f.values.col(c).data();
    double* ov = out.values.col(c).data();
    for (int k = 1; k <= N; ++k) {
      double acc = 0.0;
      for (int j = 0; j < k; ++j) {
        double slope = (fv[j + 1] - fv[j]) / dt;
        acc += slope * (w.R[k - j] - w.R[k - j - 1]);
      }
      ov[k] = acc;
    }
    ov[0] = 0.0;  // scheme limit from the first subinterval
  }
  return out;
}

inline SampledFunction frac_op(const SampledFunction& f, const FracOrder& order) {
  if (order.alpha > 0.0) return rl_integral(f, order.alpha);
  if (order.alpha < 0.0) return rl_derivative(f, -order.alpha);
  return f;
}

}  // namespace fracdens
