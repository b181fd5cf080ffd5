#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <vector>

#include "qgraph/graph.hpp"

namespace qgraph {

// Galerkin oracle: P1 finite elements on the quadratic form
//   t[f] = int |f'|^2 + int <Q f, f> + sum_v <alpha(v) f(v), f(v)>
// with vertex continuity imposed by degree-of-freedom sharing (m unknowns
// per vertex) and leads truncated at L_trunc with a Dirichlet far end.

struct DiscretizationParams {
  double h = 1e-3;
  double L_trunc = 50.0;
  double inertia_tol = 1e-9;
};

enum class FormMode {
  delta,      // continuity at vertices + alpha(v) coupling terms
  dirichlet,  // all vertex values clamped to zero (decoupled edges)
  neumann     // endpoints free and unshared, no alpha terms
};

using SparseH = Eigen::SparseMatrix<cd>;

struct FormMatrices {
  SparseH A_form;
  SparseH M_mass;
  int n = 0;
};

namespace detail {

struct EdgeMesh {
  const EdgePotential* q = nullptr;
  double len = 0.0;
  int n_elem = 0;
  // global dof index of node j (0..n_elem), or -1 for a clamped node
  std::vector<int> node_dof;
};

inline void add_block(std::vector<Eigen::Triplet<cd>>& trip, int row0, int col0,
                      const Matrix& b) {
  for (int i = 0; i < b.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j)
      if (b(i, j) != cd(0.0, 0.0)) trip.emplace_back(row0 + i, col0 + j, b(i, j));
}

}  // namespace detail

inline FormMatrices fem_assemble(const MetricGraph& g, const DiscretizationParams& p,
                                 FormMode mode = FormMode::delta) {
  if (!(p.h > 0.0) || !(p.L_trunc >= 10.0))
    throw OutOfRange("discretization parameters out of range");
  const int m = g.m;
  double min_len = p.L_trunc;
  for (const auto& e : g.finite_edges) min_len = std::min(min_len, e.length);
  if (p.h > min_len / 4.0) throw MeshTooCoarse("mesh width exceeds min edge length / 4");

  // dof numbering: shared vertex dofs first (delta mode only), then edge
  // interiors and, where applicable, unshared endpoints
  int next = 0;
  std::vector<int> vertex_dof(g.vertex_count(), -1);
  if (mode == FormMode::delta)
    for (int v = 0; v < g.vertex_count(); ++v) {
      vertex_dof[v] = next;
      next += m;
    }

  std::vector<detail::EdgeMesh> meshes;
  auto add_edge = [&](const EdgePotential& q, double len, int v_from, int v_to) {
    detail::EdgeMesh em;
    em.q = &q;
    em.len = len;
    em.n_elem = std::max(4, static_cast<int>(std::ceil(len / p.h)));
    em.node_dof.assign(em.n_elem + 1, -1);
    if (mode == FormMode::delta) {
      em.node_dof[0] = vertex_dof[v_from];
      if (v_to >= 0) em.node_dof[em.n_elem] = vertex_dof[v_to];
    } else if (mode == FormMode::neumann) {
      em.node_dof[0] = next;
      next += m;
      if (v_to >= 0) {
        em.node_dof[em.n_elem] = next;
        next += m;
      }
    }
    for (int j = 1; j < em.n_elem; ++j) {
      em.node_dof[j] = next;
      next += m;
    }
    meshes.push_back(std::move(em));
  };
  for (const auto& l : g.leads) add_edge(l.potential, p.L_trunc, l.attach_vertex, -1);
  for (const auto& e : g.finite_edges) add_edge(e.potential, e.length, e.from, e.to);

  std::vector<Eigen::Triplet<cd>> ta, tm;
  const Matrix id = Matrix::Identity(m, m);
  // 3-point Gauss on [-1,1]
  const double gx[3] = {-std::sqrt(3.0 / 5.0), 0.0, std::sqrt(3.0 / 5.0)};
  const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

  for (const auto& em : meshes) {
    const double hl = em.len / em.n_elem;
    const double q_end = em.q->support_end();
    for (int el = 0; el < em.n_elem; ++el) {
      const double x0 = el * hl, x1 = x0 + hl;
      const int d0 = em.node_dof[el], d1 = em.node_dof[el + 1];
      // element potential term int phi_a phi_b Q
      Matrix qp[2][2] = {{Matrix::Zero(m, m), Matrix::Zero(m, m)},
                         {Matrix::Zero(m, m), Matrix::Zero(m, m)}};
      if (!em.q->is_zero() && x0 < q_end) {
        for (int gp = 0; gp < 3; ++gp) {
          double x = 0.5 * (x0 + x1) + 0.5 * hl * gx[gp];
          double phi0 = (x1 - x) / hl, phi1 = (x - x0) / hl;
          Matrix qv = 0.5 * hl * gw[gp] * em.q->eval(x);
          qp[0][0] += phi0 * phi0 * qv;
          qp[0][1] += phi0 * phi1 * qv;
          qp[1][0] += phi1 * phi0 * qv;
          qp[1][1] += phi1 * phi1 * qv;
        }
      }
      const double k = 1.0 / hl;
      const double mm[2][2] = {{hl / 3.0, hl / 6.0}, {hl / 6.0, hl / 3.0}};
      const double kk[2][2] = {{k, -k}, {-k, k}};
      const int dof[2] = {d0, d1};
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          if (dof[a] < 0 || dof[b] < 0) continue;
          detail::add_block(ta, dof[a], dof[b], kk[a][b] * id + qp[a][b]);
          detail::add_block(tm, dof[a], dof[b], mm[a][b] * id);
        }
    }
  }
  if (mode == FormMode::delta)
    for (int v = 0; v < g.vertex_count(); ++v)
      detail::add_block(ta, vertex_dof[v], vertex_dof[v], g.alpha[v]);

  FormMatrices fm;
  fm.n = next;
  fm.A_form.resize(next, next);
  fm.M_mass.resize(next, next);
  fm.A_form.setFromTriplets(ta.begin(), ta.end());
  fm.M_mass.setFromTriplets(tm.begin(), tm.end());
  return fm;
}

// #{pencil eigenvalues < sigma} = negative inertia of A - sigma M (Sylvester,
// M positive definite), counted from the sparse LDL* diagonal.
inline int pencil_count_below(const FormMatrices& fm, double sigma) {
  SparseH shifted = fm.A_form - cd(sigma) * fm.M_mass;
  Eigen::SimplicialLDLT<SparseH, Eigen::Lower> ldlt;
  double nudge = 0.0;
  for (int attempt = 0; attempt < 4; ++attempt) {
    ldlt.compute(attempt == 0 ? shifted
                              : SparseH(fm.A_form - cd(sigma + nudge) * fm.M_mass));
    if (ldlt.info() == Eigen::Success) break;
    // factorization hit a zero pivot: nudge the shift off the eigenvalue
    nudge = (nudge == 0.0 ? 1e-12 : nudge * 100.0) * std::max(1.0, std::abs(sigma));
  }
  if (ldlt.info() != Eigen::Success) throw SolverFailure("sparse LDL* failed");
  int neg = 0;
  auto d = ldlt.vectorD();
  for (Eigen::Index i = 0; i < d.size(); ++i)
    if (d(i).real() < 0.0) ++neg;
  return neg;
}

inline int kappa_count_once(const MetricGraph& g, const DiscretizationParams& p,
                            FormMode mode = FormMode::delta) {
  return pencil_count_below(fem_assemble(g, p, mode), 0.0);
}

// kappa with one mesh-refinement confirmation (h -> h/2, L -> 2L).
inline int kappa_oracle(const MetricGraph& g, const DiscretizationParams& p,
                        FormMode mode = FormMode::delta) {
  int base = kappa_count_once(g, p, mode);
  DiscretizationParams fine = p;
  fine.h = p.h / 2.0;
  fine.L_trunc = 2.0 * p.L_trunc;
  int refined = kappa_count_once(g, fine, mode);
  if (base != refined)
    throw CountUnstable("negative count changed under mesh refinement");
  return base;
}

// k smallest pencil eigenvalues by bisection on the counting function.
inline std::vector<double> eigen_bottom(const MetricGraph& g,
                                        const DiscretizationParams& p, int k,
                                        FormMode mode = FormMode::delta,
                                        double tol = 1e-8) {
  FormMatrices fm = fem_assemble(g, p, mode);
  if (k < 1 || k > fm.n) throw OutOfRange("eigen_bottom: k out of range");
  double lo = -1.0, hi = 1.0;
  while (pencil_count_below(fm, lo) > 0) lo *= 2.0;
  while (pencil_count_below(fm, hi) < k) hi *= 2.0;
  std::vector<double> out;
  double left = lo;
  for (int j = 1; j <= k; ++j) {
    double a = left, b = hi;
    while (b - a > tol * std::max(1.0, std::abs(a) + std::abs(b))) {
      double mid = 0.5 * (a + b);
      if (pencil_count_below(fm, mid) >= j)
        b = mid;
      else
        a = mid;
    }
    out.push_back(0.5 * (a + b));
    left = a;  // eigenvalues are ascending
  }
  return out;
}

// Theorem-hypothesis check: the fully decoupled Dirichlet realization is
// nonnegative.  Returns (verified, smallest-eigenvalue estimate).
inline std::pair<bool, double> nonnegativity_check(const MetricGraph& g,
                                                   const DiscretizationParams& p) {
  FormMatrices fm = fem_assemble(g, p, FormMode::dirichlet);
  int neg = pencil_count_below(fm, 0.0);
  double est;
  if (neg > 0) {
    est = eigen_bottom(g, p, 1, FormMode::dirichlet).front();
    return {est >= -10.0 * p.inertia_tol, est};
  }
  // nonnegative: report a (crude) bottom estimate
  double hi = 1.0;
  while (pencil_count_below(fm, hi) < 1) hi *= 2.0;
  double a = 0.0, b = hi;
  for (int it = 0; it < 40 && b - a > 1e-10 * std::max(1.0, b); ++it) {
    double mid = 0.5 * (a + b);
    if (pencil_count_below(fm, mid) >= 1)
      b = mid;
    else
      a = mid;
  }
  est = 0.5 * (a + b);
  return {est >= -10.0 * p.inertia_tol, est};
}

}  // namespace qgraph
