#pragma once

#include <string>
#include <vector>

#include "qgraph/matrix.hpp"
#include "qgraph/potential.hpp"

namespace qgraph {

// Edge-local coordinates: every edge is parameterized from its vertex of
// attachment at 0 (leads over [0,inf), finite edges over [0,|e|] running
// from `from` to `to`).  All derivative/orientation conventions are fixed
// here once; downstream modules never re-handle orientation.
struct LeadEdge {
  int attach_vertex = 0;
  EdgePotential potential;
};

struct FiniteEdge {
  int from = 0;
  int to = 0;
  double length = 0.0;
  EdgePotential potential;
};

// Immutable after construction; safe to share read-only across threads.
struct MetricGraph {
  int m = 1;
  int central_vertex = 0;
  std::vector<Matrix> alpha;  // one Hermitian m x m coupling per vertex
  std::vector<LeadEdge> leads;
  std::vector<FiniteEdge> finite_edges;

  int p1() const { return static_cast<int>(leads.size()); }
  int p2() const { return static_cast<int>(finite_edges.size()); }
  int p() const { return p1() + p2(); }
  int vertex_count() const { return static_cast<int>(alpha.size()); }

  // Star: every lead attaches at the hub and finite edge k runs from the
  // hub to the distinct outer vertex k.
  bool is_star() const {
    if (central_vertex != 0) return false;
    for (const auto& l : leads)
      if (l.attach_vertex != 0) return false;
    for (int k = 0; k < p2(); ++k)
      if (finite_edges[k].from != 0 || finite_edges[k].to != k + 1) return false;
    return vertex_count() == p2() + 1;
  }

  bool all_potentials_zero() const {
    for (const auto& l : leads)
      if (!l.potential.is_zero()) return false;
    for (const auto& e : finite_edges)
      if (!e.potential.is_zero()) return false;
    return true;
  }
};

inline std::vector<std::string> validate(const MetricGraph& g) {
  std::vector<std::string> issues;
  if (g.m < 1) issues.push_back("matrix dimension m must be positive");
  if (g.leads.empty()) issues.push_back("graph has no leads (must be noncompact)");
  if (g.alpha.empty()) issues.push_back("no vertex couplings");
  for (size_t v = 0; v < g.alpha.size(); ++v) {
    const Matrix& a = g.alpha[v];
    if (a.rows() != g.m || a.cols() != g.m)
      issues.push_back("alpha(v" + std::to_string(v) + ") has wrong dimension");
    else if (!is_hermitian(a))
      issues.push_back("alpha(v" + std::to_string(v) + ") is not Hermitian");
  }
  for (size_t k = 0; k < g.finite_edges.size(); ++k) {
    const auto& e = g.finite_edges[k];
    if (!(e.length > 0.0) || !std::isfinite(e.length))
      issues.push_back("finite edge " + std::to_string(k) + " has nonpositive length");
    if (e.potential.dim() != g.m)
      issues.push_back("finite edge " + std::to_string(k) + " potential dimension mismatch");
    if (e.length > 0.0 &&
        e.potential.support_end() > e.length + 1e-12 * std::max(1.0, e.length))
      issues.push_back("finite edge " + std::to_string(k) +
                       " potential support exceeds edge length");
    if (e.from < 0 || e.from >= g.vertex_count() || e.to < 0 || e.to >= g.vertex_count())
      issues.push_back("finite edge " + std::to_string(k) + " references unknown vertex");
  }
  for (size_t j = 0; j < g.leads.size(); ++j) {
    const auto& l = g.leads[j];
    if (l.potential.dim() != g.m)
      issues.push_back("lead " + std::to_string(j) + " potential dimension mismatch");
    if (l.attach_vertex < 0 || l.attach_vertex >= g.vertex_count())
      issues.push_back("lead " + std::to_string(j) + " references unknown vertex");
  }
  return issues;
}

// Star graph with hub v0: p1 leads plus p2 finite edges to outer vertices
// v1..vp2.  coupling holds alpha(v0), alpha(v1), ..., alpha(vp2).
inline MetricGraph build_star(int m, std::vector<EdgePotential> lead_potentials,
                              std::vector<std::pair<double, EdgePotential>> finite,
                              std::vector<Matrix> coupling) {
  if (lead_potentials.empty()) throw EmptyLeads("star graph needs at least one lead");
  if (static_cast<int>(coupling.size()) != static_cast<int>(finite.size()) + 1)
    throw DimensionMismatch("coupling must provide alpha for v0 and each outer vertex");
  MetricGraph g;
  g.m = m;
  for (auto& a : coupling) {
    if (a.rows() != m || a.cols() != m)
      throw DimensionMismatch("coupling matrix dimension mismatch");
    if (!is_hermitian(a)) throw NonHermitianMatrix("vertex coupling not Hermitian");
    g.alpha.push_back(std::move(a));
  }
  for (auto& lp : lead_potentials) {
    if (lp.dim() != m) throw DimensionMismatch("lead potential dimension mismatch");
    g.leads.push_back({0, std::move(lp)});
  }
  int k = 1;
  for (auto& [len, pot] : finite) {
    if (!(len > 0.0) || !std::isfinite(len))
      throw NonpositiveLength("finite edge length must be positive");
    if (pot.dim() != m) throw DimensionMismatch("edge potential dimension mismatch");
    g.finite_edges.push_back({0, k++, len, std::move(pot)});
  }
  return g;
}

// Line with delta interactions at x0 < ... < xN: two leads (-inf,x0) and
// (xN,inf) plus N finite edges; the given whole-line potential is restricted
// to each edge in edge-local coordinates.
inline MetricGraph build_line_with_deltas(int m, const std::vector<double>& points,
                                          std::vector<Matrix> strengths,
                                          const EdgePotential& potential) {
  if (points.empty()) throw UnsortedPoints("need at least one interaction point");
  if (points.size() != strengths.size())
    throw DimensionMismatch("points/strengths size mismatch");
  for (size_t i = 0; i + 1 < points.size(); ++i)
    if (!(points[i] < points[i + 1]))
      throw UnsortedPoints("interaction points must be strictly increasing");
  MetricGraph g;
  g.m = m;
  for (auto& a : strengths) {
    if (a.rows() != m || a.cols() != m)
      throw DimensionMismatch("strength matrix dimension mismatch");
    if (!is_hermitian(a)) throw NonHermitianMatrix("delta strength not Hermitian");
    g.alpha.push_back(std::move(a));
  }
  // left lead runs from x0 towards -inf, right lead from xN towards +inf
  g.leads.push_back({0, potential.restrict_affine(points.front(), -1, std::nullopt)});
  g.leads.push_back({static_cast<int>(points.size()) - 1,
                     potential.restrict_affine(points.back(), +1, std::nullopt)});
  for (size_t i = 0; i + 1 < points.size(); ++i) {
    double len = points[i + 1] - points[i];
    g.finite_edges.push_back({static_cast<int>(i), static_cast<int>(i) + 1, len,
                              potential.restrict_affine(points[i], +1, len)});
  }
  return g;
}

}  // namespace qgraph
