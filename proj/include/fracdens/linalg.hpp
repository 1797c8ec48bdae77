#pragma once

#include <Eigen/Dense>

namespace fracdens {

struct CholFactor {
  Eigen::MatrixXd L;
  bool jittered = false;
};

// Cholesky with the jitter fallback policy: on failure add 1e-12*(trace/N)*I
// once and refactor. Callers surface `jittered` in their diagnostics.
inline CholFactor chol_with_jitter(Eigen::MatrixXd m) {
  CholFactor out;
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() == Eigen::Success) {
    out.L = llt.matrixL();
    return out;
  }
  const double jitter = 1e-12 * (m.trace() / static_cast<double>(m.rows()));
  m.diagonal().array() += jitter;
  Eigen::LLT<Eigen::MatrixXd> llt2(m);
  if (llt2.info() != Eigen::Success) throw std::runtime_error("chol_with_jitter: factorization failed after jitter");
  out.L = llt2.matrixL();
  out.jittered = true;
  return out;
}

}  // namespace fracdens
