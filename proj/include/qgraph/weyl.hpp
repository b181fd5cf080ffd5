#pragma once

#include <functional>

#include "qgraph/graph.hpp"
#include "qgraph/ode.hpp"

namespace qgraph {

// Titchmarsh-Weyl data for a single lead [0,inf):
//   N1(z) = (2i sqrt z)^{-1} (I + int_0^inf e^{i t sqrt z} Q(t) S(t,z) dt)
//   N2(z) = I/2 - (2i sqrt z)^{-1} int_0^inf e^{i t sqrt z} Q(t) C(t,z) dt
//   M(z)  = N1(z)^{-1} N2(z)
// The improper integrals are carried as extra quadrature state of the
// fundamental-system solve, truncated where the potential tail is negligible.

struct LeadNMatrices {
  Matrix n1, n2;
};

inline LeadNMatrices lead_n_matrices(const EdgePotential& q, const SpectralPoint& z,
                                     double rel_tol = 1e-10) {
  if (z.z == cd(0.0, 0.0)) throw ZeroSpectralPoint("Weyl data undefined at z = 0");
  const int m = q.dim() > 0 ? q.dim() : 1;
  const cd sz = sqrt_branch(z);
  const cd pref = 1.0 / (cd(0.0, 2.0) * sz);
  const Matrix id = Matrix::Identity(m, m);
  if (q.is_zero()) return {pref * id, 0.5 * id};
  if (!q.is_L1())
    throw IntegralNotConverged("lead potential is not integrable");
  const double r = q.effective_support(0.1 * rel_tol);
  if (q.tail_norm(r) > 1e4 * rel_tol)
    throw IntegralNotConverged("potential tail too heavy for requested tolerance");
  auto fs = fundamental_system(q, z, r, rel_tol, /*with_lead_integrals=*/true);
  Matrix n1 = pref * (id + fs.lead_integral_S());
  Matrix n2 = 0.5 * id - pref * fs.lead_integral_C();
  return {std::move(n1), std::move(n2)};
}

inline Matrix n1(const EdgePotential& q, const SpectralPoint& z, double rel_tol = 1e-10) {
  return lead_n_matrices(q, z, rel_tol).n1;
}

inline Matrix n2(const EdgePotential& q, const SpectralPoint& z, double rel_tol = 1e-10) {
  return lead_n_matrices(q, z, rel_tol).n2;
}

struct LeadWeylResult {
  Matrix m;        // Weyl function value
  Matrix n1, n2;   // factors, M = n1^{-1} n2
  double cond_n1 = 0.0;
};

inline LeadWeylResult lead_weyl(const EdgePotential& q, const SpectralPoint& z,
                                double rel_tol = 1e-10) {
  auto nm = lead_n_matrices(q, z, rel_tol);
  LeadWeylResult out;
  out.cond_n1 = scaled_condition(nm.n1, std::max(1e-3, nm.n2.norm()));
  if (!(out.cond_n1 < 1e10))
    throw NearSingularN1("N1(z) numerically singular (cond > 1e10)");
  out.m = nm.n1.partialPivLu().solve(nm.n2);
  out.n1 = std::move(nm.n1);
  out.n2 = std::move(nm.n2);
  return out;
}

// Boundary value Im M(lambda + i0) = (4 sqrt(lambda))^{-1} (N1* N1)^{-1}.
inline Matrix im_lead_weyl_boundary(const EdgePotential& q, double lambda,
                                    double rel_tol = 1e-10) {
  if (!(lambda > 0.0)) throw OutOfRange("boundary value needs lambda > 0");
  auto nm = lead_n_matrices(q, SpectralPoint::lambda_plus_i0(lambda), rel_tol);
  Matrix g = nm.n1.adjoint() * nm.n1;
  return (1.0 / (4.0 * std::sqrt(lambda))) * g.partialPivLu().inverse();
}

// 2m x 2m Weyl block of a finite edge of length l with Dirichlet boundary
// triplet at both ends, blocks indexed (left end, right end):
//   M11 = -S^{-1} C,  M12 = S^{-1},  M21 = (S(l, conj z)^*)^{-1},  M22 = -S' S^{-1}
// all evaluated at x = l.
struct EdgeWeylBlocks {
  Matrix m11, m12, m21, m22;
  double cond = 0.0;  // condition number of the inverted factor S(l,z)

  Matrix full() const {
    const int m = static_cast<int>(m11.rows());
    Matrix out(2 * m, 2 * m);
    out.topLeftCorner(m, m) = m11;
    out.topRightCorner(m, m) = m12;
    out.bottomLeftCorner(m, m) = m21;
    out.bottomRightCorner(m, m) = m22;
    return out;
  }
};

inline EdgeWeylBlocks finite_edge_weyl_dirichlet(const EdgePotential& q, double length,
                                                 const SpectralPoint& z,
                                                 double rel_tol = 1e-10) {
  if (!(length > 0.0)) throw NonpositiveLength("edge length must be positive");
  auto fs = fundamental_system(q, z, length, rel_tol);
  auto s = fs.at(length);
  EdgeWeylBlocks b;
  double scale = std::max({1.0, s.C.norm(), s.S.norm(), s.Sp.norm()});
  b.cond = scaled_condition(s.S, scale);
  if (!(b.cond < 1e10))
    throw DirichletEigenvalueHit("z is (near) a Dirichlet eigenvalue of the edge");
  Matrix s_inv = s.S.partialPivLu().inverse();
  b.m11 = -s_inv * s.C;
  b.m12 = s_inv;
  b.m22 = -s.Sp * s_inv;
  if (z.boundary || z.z.imag() == 0.0) {
    b.m21 = s.S.adjoint().partialPivLu().inverse();
  } else {
    auto fsc = fundamental_system(q, z.conj(), length, rel_tol);
    b.m21 = fsc.at(length).S.adjoint().partialPivLu().inverse();
  }
  return b;
}

// m x m Weyl function of a finite edge with Dirichlet data at 0 and Neumann
// data at l: M(z) = -C'(l,z) C(l,z)^{-1}.
inline Matrix finite_edge_weyl_dn(const EdgePotential& q, double length,
                                  const SpectralPoint& z, double rel_tol = 1e-10,
                                  double* cond_out = nullptr) {
  if (!(length > 0.0)) throw NonpositiveLength("edge length must be positive");
  auto fs = fundamental_system(q, z, length, rel_tol);
  auto s = fs.at(length);
  double cond =
      scaled_condition(s.C, std::max({1.0, s.S.norm(), s.Cp.norm(), s.Sp.norm()}));
  if (cond_out) *cond_out = cond;
  if (!(cond < 1e10))
    throw NeumannTripletPole("z is (near) a pole of the Dirichlet-to-Neumann block");
  return -s.Cp * s.C.partialPivLu().inverse();
}

// Limit M(0) = lim_{eps -> 0+} M(-eps) by Richardson extrapolation in
// s = sqrt(eps): the lead Weyl function is analytic in sqrt(z) near 0, so the
// expansion is in powers of s and a ratio-2 tableau in s (eps_k = eps0 4^{-k})
// eliminates one power per column.
struct WeylAtZero {
  Matrix value;
  double error_estimate = 0.0;
};

inline WeylAtZero weyl_at_zero(const std::function<Matrix(double)>& m_of_minus_eps,
                               double eps0 = 1e-2, int levels = 4) {
  if (levels < 2 || levels > 8) throw OutOfRange("extrapolation levels in [2,8]");
  std::vector<Matrix> row(levels);
  double eps = eps0;
  for (int k = 0; k < levels; ++k, eps *= 0.25) row[k] = m_of_minus_eps(eps);
  double scale = std::max(1.0, row.back().norm());
  std::vector<double> col_err;
  for (int j = 1; j < levels; ++j) {
    double w = std::pow(2.0, j);
    for (int k = 0; k + j < levels; ++k)
      row[k] = (w * row[k + 1] - row[k]) / (w - 1.0);
    col_err.push_back((row[0] - row[1]).norm());
  }
  WeylAtZero out;
  out.value = row[0];
  // estimate from the last eliminated correction
  out.error_estimate = col_err.back();
  if (col_err.size() >= 2 && col_err.back() > 10.0 * col_err.front() &&
      col_err.back() > 1e-6 * scale)
    throw ExtrapolationDiverged("Richardson tableau diverging near z = 0");
  return out;
}

enum class TripletChoice { dirichlet_edges, dn_edges };

// Block-diagonal Weyl function of the decoupled (fully Dirichlet) direct sum:
// one m x m block per lead, then per finite edge either the 2m x 2m Dirichlet
// block or the m x m Dirichlet-to-Neumann block.
inline Matrix direct_sum_weyl(const MetricGraph& g, const SpectralPoint& z,
                              TripletChoice triplet = TripletChoice::dirichlet_edges,
                              double rel_tol = 1e-10) {
  const int m = g.m;
  const int edge_block = triplet == TripletChoice::dirichlet_edges ? 2 * m : m;
  const int n = g.p1() * m + g.p2() * edge_block;
  Matrix out = Matrix::Zero(n, n);
  int off = 0;
  for (const auto& lead : g.leads) {
    out.block(off, off, m, m) = lead_weyl(lead.potential, z, rel_tol).m;
    off += m;
  }
  for (const auto& e : g.finite_edges) {
    if (triplet == TripletChoice::dirichlet_edges)
      out.block(off, off, 2 * m, 2 * m) =
          finite_edge_weyl_dirichlet(e.potential, e.length, z, rel_tol).full();
    else
      out.block(off, off, m, m) = finite_edge_weyl_dn(e.potential, e.length, z, rel_tol);
    off += edge_block;
  }
  return out;
}

}  // namespace qgraph
