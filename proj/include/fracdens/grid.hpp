#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracdens {

// Uniform time grid: nodes t0 + k*dt for k = 0..n_steps.
struct Grid {
  double t0 = 0.0;
  double dt = 0.0;
  int n_steps = 0;

  Grid() = default;
  Grid(double t0_, double dt_, int n_steps_) : t0(t0_), dt(dt_), n_steps(n_steps_) {
    if (!(dt > 0.0)) throw std::invalid_argument("Grid: dt must be > 0");
    if (n_steps < 1) throw std::invalid_argument("Grid: n_steps must be >= 1");
  }

  int n_nodes() const { return n_steps + 1; }
  double node(int k) const { return t0 + k * dt; }
  double t_end() const { return t0 + n_steps * dt; }
  double span() const { return n_steps * dt; }

  bool operator==(const Grid& o) const {
    return t0 == o.t0 && dt == o.dt && n_steps == o.n_steps;
  }
};

inline Grid make_grid(double t0, double t1, double dt) {
  double len = t1 - t0;
  if (!(dt > 0.0) || !(len > 0.0)) throw std::invalid_argument("make_grid: bad interval or dt");
  double steps = len / dt;
  int n = static_cast<int>(std::llround(steps));
  if (n < 1 || std::abs(steps - n) > 1e-9 * std::max(1.0, steps))
    throw std::invalid_argument("make_grid: dt does not divide interval evenly");
  return Grid(t0, dt, n);
}

// R^n-valued function sampled on a uniform grid. values is (n_nodes x n_comp),
// column-major so each component is contiguous over time.
struct SampledPath {
  Grid grid;
  Eigen::MatrixXd values;

  SampledPath() = default;
  SampledPath(const Grid& g, int n_comp) : grid(g), values(Eigen::MatrixXd::Zero(g.n_nodes(), n_comp)) {}
  SampledPath(const Grid& g, Eigen::MatrixXd v) : grid(g), values(std::move(v)) {
    if (values.rows() != grid.n_nodes())
      throw std::invalid_argument("SampledPath: values.rows() != grid.n_nodes()");
  }

  int n_comp() const { return static_cast<int>(values.cols()); }
  int n_nodes() const { return grid.n_nodes(); }
  Eigen::VectorXd at(int k) const { return values.row(k).transpose(); }
};

// The fractional-calculus module operates on the same representation.
using SampledFunction = SampledPath;

inline void require_same_grid(const Grid& a, const Grid& b, const char* where) {
  if (!(a == b)) throw std::invalid_argument(std::string(where) + ": grid mismatch");
}

}  // namespace fracdens
