#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace fracdens {

// Gauss-Legendre nodes/weights on [-1,1], computed by Newton iteration on the
// Legendre polynomial and cached per order.
struct GaussLegendre {
  std::vector<double> x, w;

  explicit GaussLegendre(int n) : x(n), w(n) {
    for (int i = 0; i < n; ++i) {
      double xi = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = xi;
        for (int k = 2; k <= n; ++k) {
          double p2 = ((2.0 * k - 1.0) * xi * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        double dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
        double dx = p1 / dp;
        xi -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      double p0 = 1.0, p1 = xi;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * xi * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
      x[i] = xi;
      w[i] = 2.0 / ((1.0 - xi * xi) * dp * dp);
    }
  }
};

inline const GaussLegendre& gl32() {
  static const GaussLegendre g(32);
  return g;
}

template <typename F>
double gl_integrate(const F& f, double a, double b, const GaussLegendre& g = gl32()) {
  double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (size_t i = 0; i < g.x.size(); ++i) s += g.w[i] * f(c + h * g.x[i]);
  return s * h;
}

// Integrate f over [a,b] with panels graded geometrically toward the endpoint
// `sing` (which must be a or b). Handles algebraic endpoint singularities of
// integrable order.
template <typename F>
double integrate_graded(const F& f, double a, double b, double sing, int levels = 40,
                        const GaussLegendre& g = gl32()) {
  if (!(b > a)) return 0.0;
  double len = b - a;
  double total = 0.0;
  if (sing <= a) {
    // panels [a + len*2^-(k+1), a + len*2^-k]
    for (int k = 0; k < levels; ++k) {
      double hi = a + len * std::pow(0.5, k);
      double lo = a + len * std::pow(0.5, k + 1);
      total += gl_integrate(f, lo, hi, g);
    }
  } else if (sing >= b) {
    for (int k = 0; k < levels; ++k) {
      double lo = b - len * std::pow(0.5, k);
      double hi = b - len * std::pow(0.5, k + 1);
      total += gl_integrate(f, lo, hi, g);
    }
  } else {
    throw std::invalid_argument("integrate_graded: singularity must be an endpoint");
  }
  return total;
}

// Trapezoid refinement with one Richardson step; returns the extrapolated
// value and an error estimate from the last two levels.
template <typename F>
double trapezoid_richardson(const F& f, double a, double b, int n0, int levels, double* err_est = nullptr) {
  auto trap = [&](int n) {
    double h = (b - a) / n;
    double s = 0.5 * (f(a) + f(b));
    for (int i = 1; i < n; ++i) s += f(a + i * h);
    return s * h;
  };
  double prev = trap(n0), prev_rich = prev;
  double value = prev;
  for (int l = 1; l <= levels; ++l) {
    double cur = trap(n0 << l);
    double rich = (4.0 * cur - prev) / 3.0;
    if (err_est) *err_est = std::abs(rich - prev_rich);
    value = rich;
    prev = cur;
    prev_rich = rich;
  }
  return value;
}

}  // namespace fracdens
