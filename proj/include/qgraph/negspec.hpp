#pragma once

#include <optional>

#include "qgraph/fem.hpp"
#include "qgraph/weyl.hpp"

namespace qgraph {

// Negative-eigenvalue count of the coupled operator: kappa_- equals the
// negative inertia of the finite Hermitian matrix T built from the vertex
// couplings and the Weyl-function limits M(0) of the decoupled edges.

struct KappaReport {
  std::optional<int> kappa_weyl;
  std::optional<int> kappa_oracle;
  std::optional<int> bargmann_bound;
  std::optional<int> alpha_sum_bound;
  std::optional<Matrix> T;
  int boundary_eigenvalue_count = 0;
  bool nonnegativity_verified = false;
};

struct WeylZeroData {
  std::vector<Matrix> lead_m0;          // m x m limit per lead
  std::vector<EdgeWeylBlocks> edge_m0;  // 2m x 2m limit per finite edge
  bool nonnegativity_verified = false;
};

inline WeylZeroData weyl_zero_data(const MetricGraph& g, double rel_tol = 1e-10,
                                   double eps0 = 1e-2, int levels = 4) {
  WeylZeroData d;
  for (const auto& lead : g.leads) {
    if (lead.potential.is_zero()) {
      d.lead_m0.push_back(Matrix::Zero(g.m, g.m));
      continue;
    }
    auto r = weyl_at_zero(
        [&](double eps) {
          return lead_weyl(lead.potential, SpectralPoint::interior(cd(-eps, 0.0)),
                           rel_tol)
              .m;
        },
        eps0, levels);
    d.lead_m0.push_back(std::move(r.value));
  }
  for (const auto& e : g.finite_edges) {
    if (e.potential.is_zero()) {
      // closed form: M(0) = -(1/l) [[I,-I],[-I,I]]
      EdgeWeylBlocks b;
      Matrix a = Matrix::Identity(g.m, g.m) / e.length;
      b.m11 = -a;
      b.m12 = a;
      b.m21 = a;
      b.m22 = -a;
      d.edge_m0.push_back(std::move(b));
      continue;
    }
    auto r = weyl_at_zero(
        [&](double eps) {
          return finite_edge_weyl_dirichlet(e.potential, e.length,
                                            SpectralPoint::interior(cd(-eps, 0.0)),
                                            rel_tol)
              .full();
        },
        eps0, levels);
    EdgeWeylBlocks b;
    const int m = g.m;
    b.m11 = r.value.topLeftCorner(m, m);
    b.m12 = r.value.topRightCorner(m, m);
    b.m21 = r.value.bottomLeftCorner(m, m);
    b.m22 = r.value.bottomRightCorner(m, m);
    d.edge_m0.push_back(std::move(b));
  }
  return d;
}

// T is (p2+1)m x (p2+1)m with the coupling data on the block diagonal and the
// edge off-diagonal blocks only in the first block row/column.
inline Matrix assemble_T(const MetricGraph& g, const WeylZeroData& d,
                         bool waive_nonnegativity = false) {
  if (!d.nonnegativity_verified && !waive_nonnegativity)
    throw NonnegativityNotEstablished(
        "decoupled Dirichlet operator not verified nonnegative");
  if (static_cast<int>(d.lead_m0.size()) != g.p1() ||
      static_cast<int>(d.edge_m0.size()) != g.p2())
    throw MissingBlock("Weyl limit blocks missing for some edges");
  const int m = g.m;
  const int n = (g.p2() + 1) * m;
  Matrix t = Matrix::Zero(n, n);
  Matrix hub = g.alpha[0];
  for (const auto& l : d.lead_m0) hub -= l;
  for (int k = 0; k < g.p2(); ++k) {
    const auto& b = d.edge_m0[k];
    hub -= b.m11;
    t.block(0, (k + 1) * m, m, m) = -b.m12;
    t.block((k + 1) * m, 0, m, m) = -b.m21;
    t.block((k + 1) * m, (k + 1) * m, m, m) = g.alpha[k + 1] - b.m22;
  }
  t.block(0, 0, m, m) = hub;
  return hermitize(t);
}

// Zero-potential specialization: with a_k = I/|e_k|,
//   T1(0,0) = alpha(0) + sum a_k,  T1(0,k) = T1(k,0) = -a_k,
//   T1(k,k) = alpha(v_k) + a_k.
inline Matrix assemble_T1(const MetricGraph& g) {
  if (!g.all_potentials_zero())
    throw NonzeroPotential("closed-form matrix requires zero potentials");
  const int m = g.m;
  const int n = (g.p2() + 1) * m;
  Matrix t = Matrix::Zero(n, n);
  Matrix hub = g.alpha[0];
  for (int k = 0; k < g.p2(); ++k) {
    Matrix a = Matrix::Identity(m, m) / g.finite_edges[k].length;
    hub += a;
    t.block(0, (k + 1) * m, m, m) = -a;
    t.block((k + 1) * m, 0, m, m) = -a;
    t.block((k + 1) * m, (k + 1) * m, m, m) = g.alpha[k + 1] + a;
  }
  t.block(0, 0, m, m) = hub;
  return t;
}

// Bargmann-type bound: sum_e floor(int_e x tr(Q_{e,-}) dx) + m |V|.
inline int bargmann_bound(const MetricGraph& g) {
  auto edge_integral = [&](const EdgePotential& q) -> double {
    if (q.is_zero()) return 0.0;
    if (!q.is_xL1()) throw IntegralNotConverged("x Q not integrable on an edge");
    std::vector<double> nodes = q.breakpoints();
    if (nodes.size() < 2) nodes = {0.0, q.support_end()};
    const bool piecewise = q.kind() == EdgePotential::Kind::constant ||
                           q.kind() == EdgePotential::Kind::piecewise_constant;
    double total = 0.0;
    for (size_t i = 0; i + 1 < nodes.size(); ++i) {
      const double a = nodes[i], b = nodes[i + 1];
      if (piecewise) {
        // constant on the piece: int_a^b x dx times the pointwise trace
        total += negative_part(q.eval(0.5 * (a + b))).real().trace() *
                 0.5 * (b * b - a * a);
        continue;
      }
      const int n = 128;
      const double h = (b - a) / n;
      double s = 0.0;
      for (int j = 0; j <= n; ++j) {
        double x = a + j * h;
        double f = x * negative_part(q.eval(x)).real().trace();
        s += (j == 0 || j == n) ? f : (j % 2 ? 4.0 * f : 2.0 * f);
      }
      total += s * h / 3.0;
    }
    return total;
  };
  auto snapped_floor = [](double v) {
    double r = std::round(v);
    if (std::abs(v - r) < 1e-7 * std::max(1.0, std::abs(v))) return static_cast<int>(r);
    return static_cast<int>(std::floor(v));
  };
  int bound = g.m * (g.p2() + 1);
  for (const auto& l : g.leads) bound += snapped_floor(edge_integral(l.potential));
  for (const auto& e : g.finite_edges) bound += snapped_floor(edge_integral(e.potential));
  return bound;
}

inline int alpha_sum_bound(const MetricGraph& g, int kappa_kirchhoff) {
  int s = kappa_kirchhoff;
  for (const auto& a : g.alpha) s += kappa_minus(a);
  return s;
}

struct KappaOptions {
  bool run_weyl = true;
  bool run_oracle = false;
  bool waive_nonnegativity = false;
  bool compute_bounds = true;
  double rel_tol = 1e-10;
  DiscretizationParams disc;
};

inline KappaReport kappa_star(const MetricGraph& g, const KappaOptions& opt = {}) {
  auto issues = validate(g);
  if (!issues.empty()) throw DimensionMismatch("invalid graph: " + issues.front());
  KappaReport rep;

  bool nonneg;
  if (g.all_potentials_zero()) {
    nonneg = true;  // Dirichlet pieces of the free operator are nonnegative
  } else {
    nonneg = nonnegativity_check(g, opt.disc).first;
  }
  rep.nonnegativity_verified = nonneg;

  if (opt.run_weyl && (nonneg || opt.waive_nonnegativity)) {
    WeylZeroData d = weyl_zero_data(g, opt.rel_tol);
    d.nonnegativity_verified = nonneg;
    Matrix t = assemble_T(g, d, opt.waive_nonnegativity);
    auto [neg, boundary] = kappa_minus_matrix(t, opt.disc.inertia_tol);
    rep.T = std::move(t);
    rep.kappa_weyl = neg;
    rep.boundary_eigenvalue_count = boundary;
  }

  if (opt.run_oracle) {
    rep.kappa_oracle = kappa_oracle(g, opt.disc);
    if (opt.compute_bounds) {
      MetricGraph kir = g;
      for (auto& a : kir.alpha) a.setZero();
      rep.alpha_sum_bound = alpha_sum_bound(g, kappa_oracle(kir, opt.disc));
    }
  }

  if (opt.compute_bounds) {
    bool xl1 = true;
    for (const auto& l : g.leads) xl1 = xl1 && l.potential.is_xL1();
    for (const auto& e : g.finite_edges) xl1 = xl1 && e.potential.is_xL1();
    if (xl1) rep.bargmann_bound = bargmann_bound(g);
  }
  return rep;
}

}  // namespace qgraph
