#pragma once

#include "qgraph/graph.hpp"
#include "qgraph/weyl.hpp"

namespace qgraph {

// Stationary scattering matrix of the delta-coupled star relative to the
// decoupled Dirichlet operator:
//   S(lambda) = I + (i / (2 sqrt(lambda))) (N1*)^{-1} ((alpha0 - K)^{-1} (x) E) N1^{-1}
// with E the all-ones p1 x p1 matrix, N1 the block-diagonal lead factor, and
// K the sum of the edge Weyl functions at the hub.

enum class KSum {
  all_edges,   // leads + finite edges (DN value); matches the Schur complement
  leads_only   // literal lead-only sum
};

struct ScatteringResult {
  double lambda = 0.0;
  Matrix S;
  double unitarity_defect = 0.0;
  Matrix K_lambda;
  Matrix N1_block;
};

inline void require_star(const MetricGraph& g) {
  if (!g.is_star() || g.leads.empty())
    throw DimensionMismatch("operation requires a star graph with >= 1 lead");
}

inline Matrix k_matrix(const MetricGraph& g, const SpectralPoint& z,
                       KSum sum = KSum::all_edges, double rel_tol = 1e-10) {
  require_star(g);
  Matrix k = Matrix::Zero(g.m, g.m);
  for (const auto& lead : g.leads) k += lead_weyl(lead.potential, z, rel_tol).m;
  if (sum == KSum::all_edges) {
    for (const auto& e : g.finite_edges) {
      try {
        k += finite_edge_weyl_dn(e.potential, e.length, z, rel_tol);
      } catch (const NeumannTripletPole&) {
        throw PoleHit("spectral point is a pole of a finite-edge Weyl function");
      }
    }
  }
  return k;
}

inline Matrix k_matrix(const MetricGraph& g, double lambda, KSum sum = KSum::all_edges,
                       double rel_tol = 1e-10) {
  if (!(lambda > 0.0)) throw OutOfRange("k_matrix needs lambda > 0");
  return k_matrix(g, SpectralPoint::lambda_plus_i0(lambda), sum, rel_tol);
}

inline Matrix n1_block(const MetricGraph& g, double lambda, double rel_tol = 1e-10) {
  require_star(g);
  if (!(lambda > 0.0)) throw OutOfRange("n1_block needs lambda > 0");
  const int m = g.m;
  Matrix out = Matrix::Zero(g.p1() * m, g.p1() * m);
  for (int j = 0; j < g.p1(); ++j)
    out.block(j * m, j * m, m, m) =
        n1(g.leads[j].potential, SpectralPoint::lambda_plus_i0(lambda), rel_tol);
  return out;
}

inline ScatteringResult scattering_matrix(const MetricGraph& g, double lambda,
                                          KSum sum = KSum::all_edges,
                                          double rel_tol = 1e-10) {
  require_star(g);
  if (!(lambda > 0.0)) throw OutOfRange("scattering_matrix needs lambda > 0");
  const int m = g.m;
  const int p1 = g.p1();
  const auto zb = SpectralPoint::lambda_plus_i0(lambda);

  std::vector<Matrix> n1s(p1), n1inv(p1);
  for (int j = 0; j < p1; ++j) {
    n1s[j] = n1(g.leads[j].potential, zb, rel_tol);
    if (!(scaled_condition(n1s[j], 0.5 / std::sqrt(lambda)) < 1e10))
      throw NearSingularN1("N1(lambda) numerically singular");
    n1inv[j] = n1s[j].partialPivLu().inverse();
  }
  Matrix k = k_matrix(g, zb, sum, rel_tol);
  Matrix ak = g.alpha[0] - k;
  if (!(scaled_condition(ak, std::max(1.0, k.norm())) < 1e12))
    throw SingularAlphaMinusK("alpha(0) - K(lambda) numerically singular");
  Matrix ak_inv = ak.partialPivLu().inverse();

  const cd pref = cd(0.0, 1.0) / (2.0 * std::sqrt(lambda));
  ScatteringResult out;
  out.lambda = lambda;
  out.K_lambda = std::move(k);
  out.S = Matrix::Identity(p1 * m, p1 * m);
  out.N1_block = Matrix::Zero(p1 * m, p1 * m);
  for (int j = 0; j < p1; ++j) {
    out.N1_block.block(j * m, j * m, m, m) = n1s[j];
    for (int kk = 0; kk < p1; ++kk)
      out.S.block(j * m, kk * m, m, m) +=
          pref * (n1inv[j].adjoint() * ak_inv * n1inv[kk]);
  }
  out.unitarity_defect =
      (out.S.adjoint() * out.S - Matrix::Identity(p1 * m, p1 * m)).norm();
  return out;
}

// One-lead star: S = I + (i / (2 sqrt(lambda))) (N1 (alpha0 - N1^{-1} N2) N1*)^{-1}.
inline Matrix scattering_one_lead(const EdgePotential& lead, const Matrix& alpha0,
                                  double lambda, double rel_tol = 1e-10) {
  if (!(lambda > 0.0)) throw OutOfRange("scattering_one_lead needs lambda > 0");
  if (!is_hermitian(alpha0)) throw NonHermitianMatrix("alpha0 not Hermitian");
  auto nm = lead_n_matrices(lead, SpectralPoint::lambda_plus_i0(lambda), rel_tol);
  Matrix mw = nm.n1.partialPivLu().solve(nm.n2);
  Matrix factor = nm.n1 * (alpha0 - mw) * nm.n1.adjoint();
  double fscale = nm.n1.norm() * nm.n1.norm() * std::max(1.0, alpha0.norm() + mw.norm());
  if (!(scaled_condition(factor, fscale) < 1e12))
    throw SingularFactor("N1 (alpha0 - M) N1* numerically singular");
  const cd pref = cd(0.0, 1.0) / (2.0 * std::sqrt(lambda));
  return Matrix::Identity(alpha0.rows(), alpha0.cols()) +
         pref * factor.partialPivLu().inverse();
}

// Scalar star with p1 identical leads and Kirchhoff coupling:
//   S = I - 2i Im(m(lambda)) / (p1 m(lambda)) E.
inline Matrix scattering_scalar_equal(int p1, const EdgePotential& lead, double lambda,
                                      double rel_tol = 1e-10) {
  if (p1 < 1) throw OutOfRange("need p1 >= 1");
  if (lead.dim() != 1) throw DimensionMismatch("scalar formula needs m = 1");
  if (!(lambda > 0.0)) throw OutOfRange("needs lambda > 0");
  cd mw = lead_weyl(lead, SpectralPoint::lambda_plus_i0(lambda), rel_tol).m(0, 0);
  if (std::abs(mw) < 1e-14) throw ZeroWeylValue("lead Weyl value vanishes");
  cd factor = cd(0.0, 2.0) * mw.imag() / (static_cast<double>(p1) * mw);
  Matrix e = Matrix::Ones(p1, p1);
  return Matrix::Identity(p1, p1) - factor * e;
}

// Perturbation determinant of the pair (delta-coupled, Dirichlet): the
// Schur complement reduces det(C_hat - D_hat M(.)) to det(alpha0 - K(.)) with
// z-independent factors cancelling in the ratio.
inline cd perturbation_determinant(const MetricGraph& g, const SpectralPoint& zeta,
                                   const SpectralPoint& z, KSum sum = KSum::all_edges,
                                   double rel_tol = 1e-10) {
  require_star(g);
  Matrix num = g.alpha[0] - k_matrix(g, z, sum, rel_tol);
  Matrix den = g.alpha[0] - k_matrix(g, zeta, sum, rel_tol);
  Eigen::PartialPivLU<Matrix> lu(den);
  cd d = lu.determinant();
  if (std::abs(d) < 1e-300 || !(scaled_condition(den, std::max(1.0, num.norm())) < 1e12))
    throw SingularAtZeta("alpha(0) - K(zeta) numerically singular");
  return num.partialPivLu().determinant() / d;
}

}  // namespace qgraph
