#pragma once

#include <vector>

#include "qgraph/potential.hpp"

namespace qgraph {

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    x[i] = -t;
    x[n - 1 - i] = t;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
}

// Negative-bound-state count of the half-line Dirichlet operator -d^2/dx^2 + Q
// with Q = -Q_- <= 0 compactly supported: the number of eigenvalues > 1 of the
// Birman-Schwinger kernel Q_-^{1/2}(x) min(x,t) Q_-^{1/2}(t), discretized by a
// symmetrized Nystrom method on Gauss-Legendre nodes.
inline int birman_schwinger_count(const EdgePotential& q, int n_quad = 200) {
  const int m = q.dim() > 0 ? q.dim() : 1;
  if (q.is_zero()) return 0;
  const double r = q.support_end();
  if (!(r > 0.0)) return 0;
  std::vector<double> gx, gw;
  gauss_legendre(n_quad, gx, gw);
  std::vector<double> x(n_quad), w(n_quad);
  for (int i = 0; i < n_quad; ++i) {
    x[i] = 0.5 * r * (gx[i] + 1.0);
    w[i] = 0.5 * r * gw[i];
  }
  std::vector<Matrix> sq(n_quad);
  for (int i = 0; i < n_quad; ++i) {
    Matrix qv = q.eval(x[i]);
    if (positive_part(qv).norm() > 1e-10 * std::max(1.0, qv.norm()))
      throw NotNegativePotential("potential has a positive part");
    Matrix qm = negative_part(qv);
    Eigen::SelfAdjointEigenSolver<Matrix> es(qm);
    RealVector lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    sq[i] = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
  }
  Matrix b = Matrix::Zero(n_quad * m, n_quad * m);
  for (int i = 0; i < n_quad; ++i)
    for (int j = 0; j < n_quad; ++j)
      b.block(i * m, j * m, m, m) =
          std::sqrt(w[i]) * std::min(x[i], x[j]) * std::sqrt(w[j]) * (sq[i] * sq[j]);
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(b), Eigen::EigenvaluesOnly);
  int count = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) > 1.0) ++count;
  return count;
}

}  // namespace qgraph
