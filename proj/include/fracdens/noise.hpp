#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "fracdens/grid.hpp"
#include "fracdens/linalg.hpp"
#include "fracdens/quadrature.hpp"
#include "fracdens/rng.hpp"

namespace fracdens {

// Normalization making the Mandelbrot-van Ness kernel integral an fBm with
// E|B_t - B_s|^2 = |t-s|^{2H} per component.
inline double alpha_h(double hurst) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw std::invalid_argument("alpha_h: hurst must lie in (0,1)");
  return std::sqrt(2.0 * hurst * std::tgamma(1.5 - hurst) /
                   (std::tgamma(hurst + 0.5) * std::tgamma(2.0 - 2.0 * hurst)));
}

struct HurstConstants {
  double hurst;
  double alpha_h;            // MvN normalization
  double kernel_coeff;       // coefficient of the forward (Liouville) kernel; = alpha_h
  double endpoint_var_coeff; // Var(B~_T)/T^{2H} per component = alpha_h^2/(2H)

  explicit HurstConstants(double h)
      : hurst(h),
        alpha_h(fracdens::alpha_h(h)),
        kernel_coeff(alpha_h),
        endpoint_var_coeff(alpha_h * alpha_h / (2.0 * h)) {}
};

// Var(B~_T) per sigma-transformed component.
inline double liouville_endpoint_variance(double hurst, double t_hor) {
  HurstConstants c(hurst);
  return c.endpoint_var_coeff * std::pow(t_hor, 2.0 * hurst);
}

// Exact average of (a-u)^{H-1/2} over u in [u0,u1], u1 <= a. Finite for every
// H in (0,1) even when the endpoint value diverges (H < 1/2, u1 = a).
inline double kernel_avg(double a, double u0, double u1, double hurst) {
  const double p = hurst + 0.5;
  return (std::pow(a - u0, p) - std::pow(a - u1, p)) / (p * (u1 - u0));
}

// ---------------------------------------------------------------------------
// Two-sided Wiener path.
//
// The infinite past is truncated at -T_past and represented as a sequence of
// contiguous uniform blocks, refined geometrically toward the origin where the
// history kernels are steep. A single block recovers a plain uniform past.
// Increments are i.i.d. N(0, dt*I) within each block; everything downstream
// consumes them only through exact kernel averages, so the block layout is a
// resolution choice, not a model change.
// ---------------------------------------------------------------------------

struct PastSpec {
  double t_past = 0.0;      // truncation depth (>= 0)
  double dt_seam = 0.0;     // finest step, adjacent to u = 0
  int per_level = 16;       // intervals per refinement level
  bool uniform = false;     // single block at dt_seam covering [-t_past, 0]
};

// Blocks ordered from the seam outward; each grid runs over negative times.
inline std::vector<Grid> make_past_blocks(const PastSpec& spec) {
  std::vector<Grid> blocks;
  if (spec.t_past <= 0.0) return blocks;
  if (!(spec.dt_seam > 0.0)) throw std::invalid_argument("PastSpec: dt_seam must be > 0");
  if (spec.uniform) {
    int n = static_cast<int>(std::ceil(spec.t_past / spec.dt_seam - 1e-12));
    blocks.emplace_back(-spec.t_past, spec.t_past / n, n);
    return blocks;
  }
  double depth = 0.0;
  double dt = spec.dt_seam;
  while (depth < spec.t_past - 1e-12) {
    double len = spec.per_level * dt;
    if (depth + len >= spec.t_past - 1e-12) {
      double rem = spec.t_past - depth;
      int n = std::max(1, static_cast<int>(std::ceil(rem / dt - 1e-12)));
      blocks.emplace_back(-spec.t_past, rem / n, n);
      depth = spec.t_past;
    } else {
      blocks.emplace_back(-(depth + len), dt, spec.per_level);
      depth += len;
    }
    dt *= 2.0;
  }
  return blocks;
}

struct TwoSidedWienerPath {
  std::vector<Grid> past_blocks;                  // seam -> far past
  std::vector<Eigen::MatrixXd> past_increments;   // per block: (n_steps x n_comp)
  Grid future;                                    // over [0, T_hor]
  Eigen::MatrixXd future_increments;              // (n_steps x n_comp)
  uint64_t seed = 0;
  uint64_t stream = 0;

  int n_comp() const { return static_cast<int>(future_increments.cols()); }
  double t_past() const { return past_blocks.empty() ? 0.0 : -past_blocks.back().t0; }
};

inline TwoSidedWienerPath sample_two_sided_wiener(const PastSpec& past, const Grid& future,
                                                  uint64_t seed, uint64_t stream, int n_comp = 1) {
  if (std::abs(future.t0) > 1e-12) throw std::invalid_argument("sample_two_sided_wiener: future grid must start at 0");
  TwoSidedWienerPath w;
  w.past_blocks = make_past_blocks(past);
  w.future = future;
  w.seed = seed;
  w.stream = stream;
  RngStream rng(seed, stream);
  const double sf = std::sqrt(future.dt);
  w.future_increments.resize(future.n_steps, n_comp);
  for (int c = 0; c < n_comp; ++c)
    for (int i = 0; i < future.n_steps; ++i) w.future_increments(i, c) = sf * rng.next_normal();
  for (const Grid& b : w.past_blocks) {
    Eigen::MatrixXd inc(b.n_steps, n_comp);
    const double sb = std::sqrt(b.dt);
    for (int c = 0; c < n_comp; ++c)
      for (int i = 0; i < b.n_steps; ++i) inc(i, c) = sb * rng.next_normal();
    w.past_increments.push_back(std::move(inc));
  }
  return w;
}

// Uniform-past convenience; dt must divide both spans evenly.
inline TwoSidedWienerPath sample_two_sided_wiener(double t_past, double t_hor, double dt,
                                                  uint64_t seed, uint64_t stream, int n_comp = 1) {
  Grid future = make_grid(0.0, t_hor, dt);
  PastSpec past;
  if (t_past > 0.0) {
    double steps = t_past / dt;
    if (std::abs(steps - std::llround(steps)) > 1e-9 * std::max(1.0, steps))
      throw std::invalid_argument("sample_two_sided_wiener: dt does not divide T_past evenly");
    past = PastSpec{t_past, dt, 0, true};
  }
  return sample_two_sided_wiener(past, future, seed, stream, n_comp);
}

// ---------------------------------------------------------------------------
// Liouville (innovation) process B~_t = alpha_H int_0^t (t-u)^{H-1/2} dW_u.
// On a uniform grid the exact kernel averages depend only on the lag, so the
// weights form one vector.
// ---------------------------------------------------------------------------

struct LiouvilleWeights {
  double coeff;            // alpha_H
  double dt;
  std::vector<double> a;   // a[m], m >= 1: weight of increment j in node k, m = k - j

  LiouvilleWeights(double hurst, double dt_, int n_steps) : coeff(alpha_h(hurst)), dt(dt_), a(n_steps + 1) {
    const double p = hurst + 0.5;
    for (int m = 1; m <= n_steps; ++m)
      a[m] = (std::pow(m * dt, p) - std::pow((m - 1) * dt, p)) / (p * dt);
  }

  // values(k) = coeff * sum_{j<k} a[k-j] * dincr(j), per column.
  void apply(const Eigen::MatrixXd& dincr, Eigen::MatrixXd& out) const {
    const int n = static_cast<int>(dincr.rows());
    out.setZero(n + 1, dincr.cols());
    for (int c = 0; c < dincr.cols(); ++c) {
      const double* dw = dincr.col(c).data();
      double* ov = out.col(c).data();
      for (int k = 1; k <= n; ++k) {
        double acc = 0.0;
        for (int j = 0; j < k; ++j) acc += a[k - j] * dw[j];
        ov[k] = coeff * acc;
      }
    }
  }
};

inline SampledPath liouville_from_wiener(const TwoSidedWienerPath& w, double hurst) {
  LiouvilleWeights lw(hurst, w.future.dt, w.future.n_steps);
  SampledPath out(w.future, w.n_comp());
  lw.apply(w.future_increments, out.values);
  return out;
}

// ---------------------------------------------------------------------------
// History process. B^t(h) collects every increment of W before t_base through
// the kernel difference (t_base + h - u)^{H-1/2} - (t_base - u)^{H-1/2},
// averaged exactly per subinterval. Weight matrices are dense (h-node x
// subinterval) and reusable across paths on the same grids.
// ---------------------------------------------------------------------------

struct HistoryWeights {
  double coeff;
  Grid h_grid;
  std::vector<Eigen::MatrixXd> past_w;  // per past block: (n_h x block steps)
  Eigen::MatrixXd fut_w;                // (n_h x fut_used)
  int fut_used = 0;

  HistoryWeights(double hurst, const std::vector<Grid>& past_blocks, const Grid& future,
                 double t_base, const Grid& h_grid_)
      : coeff(alpha_h(hurst)), h_grid(h_grid_) {
    if (std::abs(h_grid.t0) > 1e-12) throw std::invalid_argument("HistoryWeights: h grid must start at 0");
    const int nh = h_grid.n_nodes();
    auto fill = [&](Eigen::MatrixXd& m, const Grid& g, int cols) {
      m.resize(nh, cols);
      for (int j = 0; j < cols; ++j) {
        double u0 = g.node(j), u1 = g.node(j + 1);
        double base = kernel_avg(t_base, u0, u1, hurst);
        for (int i = 0; i < nh; ++i) {
          double h = h_grid.node(i);
          m(i, j) = (h == 0.0) ? 0.0 : kernel_avg(t_base + h, u0, u1, hurst) - base;
        }
      }
    };
    for (const Grid& b : past_blocks) {
      Eigen::MatrixXd m;
      fill(m, b, b.n_steps);
      past_w.push_back(std::move(m));
    }
    double steps = t_base / future.dt;
    fut_used = static_cast<int>(std::llround(steps));
    if (std::abs(steps - fut_used) > 1e-9 * std::max(1.0, steps))
      throw std::invalid_argument("HistoryWeights: t_base must be a future grid node");
    if (fut_used > 0) fill(fut_w, future, fut_used);
  }

  SampledPath evaluate(const TwoSidedWienerPath& w) const {
    SampledPath out(h_grid, w.n_comp());
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(h_grid.n_nodes(), w.n_comp());
    for (size_t b = 0; b < past_w.size(); ++b) acc.noalias() += past_w[b] * w.past_increments[b];
    if (fut_used > 0) acc.noalias() += fut_w * w.future_increments.topRows(fut_used);
    out.values = coeff * acc;
    return out;
  }
};

inline SampledPath history_process(const TwoSidedWienerPath& w, double hurst, double t_base, const Grid& h_grid) {
  if (t_base < -1e-12 || t_base > w.future.t_end() + 1e-12)
    throw std::invalid_argument("history_process: t_base outside the path's coverage");
  HistoryWeights hw(hurst, w.past_blocks, w.future, t_base, h_grid);
  return hw.evaluate(w);
}

// P^H w: the history seen from t = 0, i.e. the part of the future fBm
// determined by the Wiener past. Alias of history_process so both code paths
// are literally the same.
inline SampledPath p_h_operator(const TwoSidedWienerPath& w, double hurst, const Grid& grid) {
  return history_process(w, hurst, 0.0, grid);
}

// Variance per component lost to the past truncation at -T_past, for the
// history kernel anchored at t_base and horizon h. Reported alongside
// history-dependent estimates.
inline double truncation_tail_variance(double hurst, double t_base, double h, double t_past) {
  if (h <= 0.0) return 0.0;
  const double c = alpha_h(hurst);
  auto k2 = [&](double v) {
    double d = std::pow(t_base + h + v, hurst - 0.5) - std::pow(t_base + v, hurst - 0.5);
    return d * d;
  };
  // integrand decays like v^{2H-3}; geometric panels out to a far cutoff plus
  // an analytic remainder bound
  const double v_far = std::max(1e6, 1e4 * (t_past + t_base + h));
  double total = 0.0;
  double lo = t_past;
  while (lo < v_far) {
    double hi = std::min(2.0 * lo + 1.0, v_far);
    total += gl_integrate(k2, lo, hi);
    lo = hi;
  }
  double rem = std::pow(hurst - 0.5, 2) * h * h * std::pow(v_far, 2.0 * hurst - 2.0) / (2.0 - 2.0 * hurst);
  return c * c * (total + rem);
}

// ---------------------------------------------------------------------------
// fBm samplers.
// ---------------------------------------------------------------------------

struct FbmPath {
  Grid grid;
  Eigen::MatrixXd values;  // (n_nodes x n_comp), value 0 at t = 0
  double hurst;

  SampledPath as_path() const { return SampledPath(grid, values); }
};

// Mandelbrot-van Ness: B(t) = history-from-0 + Liouville part, both from the
// same two-sided Wiener path.
inline FbmPath fbm_mandelbrot(const TwoSidedWienerPath& w, double hurst) {
  SampledPath hist = p_h_operator(w, hurst, w.future);
  SampledPath inno = liouville_from_wiener(w, hurst);
  FbmPath out{w.future, hist.values + inno.values, hurst};
  return out;
}

// Exact marginal fBm covariance on the grid nodes 1..N (node 0 is pinned at 0).
inline Eigen::MatrixXd fbm_exact_covariance(const Grid& grid, double hurst) {
  const int n = grid.n_steps;
  Eigen::MatrixXd k(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = grid.node(i + 1), t = grid.node(j + 1);
      k(i, j) = 0.5 * (std::pow(s, 2.0 * hurst) + std::pow(t, 2.0 * hurst) -
                       std::pow(std::abs(t - s), 2.0 * hurst));
    }
  return k;
}

// Sampler with the exact grid covariance, via a dense factorization shared
// across draws. Oracle for validating fbm_mandelbrot.
struct FbmExactSampler {
  Grid grid;
  double hurst;
  CholFactor chol;

  FbmExactSampler(const Grid& g, double h) : grid(g), hurst(h), chol(chol_with_jitter(fbm_exact_covariance(g, h))) {
    if (std::abs(g.t0) > 1e-12) throw std::invalid_argument("FbmExactSampler: grid must start at 0");
  }

  FbmPath sample(uint64_t seed, uint64_t stream, int n_comp = 1) const {
    RngStream rng(seed, stream);
    FbmPath out{grid, Eigen::MatrixXd::Zero(grid.n_nodes(), n_comp), hurst};
    Eigen::VectorXd z(grid.n_steps);
    for (int c = 0; c < n_comp; ++c) {
      for (int i = 0; i < grid.n_steps; ++i) z(i) = rng.next_normal();
      out.values.col(c).tail(grid.n_steps) = chol.L * z;
    }
    return out;
  }
};

inline FbmPath fbm_exact(const Grid& grid, double hurst, uint64_t seed, uint64_t stream, int n_comp = 1) {
  return FbmExactSampler(grid, hurst).sample(seed, stream, n_comp);
}

}  // namespace fracdens
