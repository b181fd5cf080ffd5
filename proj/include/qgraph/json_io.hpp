#pragma once

#include <climits>
#include <fstream>
#include <map>
#include <string>
#include <tuple>

#include <json.hpp>

#include "qgraph/graph.hpp"

namespace qgraph {

using ordered_json = nlohmann::ordered_json;

// JSON encoding conventions:
//   complex matrix  -> nested arrays of [re, im] pairs, row-major
//   potential       -> {"kind": ..., kind-specific fields}
//   graph document  -> {"m", "vertices":[{"id","alpha"}],
//                       "edges":[{"id","kind","from","to","length","potential"}]}
// with one hub vertex referenced as "from" by every edge.

inline ordered_json matrix_to_json(const Matrix& a) {
  ordered_json rows = ordered_json::array();
  for (int i = 0; i < a.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (int j = 0; j < a.cols(); ++j)
      row.push_back(ordered_json::array({a(i, j).real(), a(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const ordered_json& j) {
  if (!j.is_array() || j.empty()) throw DimensionMismatch("matrix: expected array of rows");
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j.at(0).size());
  Matrix a(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const auto& row = j.at(i);
    if (static_cast<int>(row.size()) != cols)
      throw DimensionMismatch("matrix: ragged rows");
    for (int k = 0; k < cols; ++k) {
      const auto& cell = row.at(k);
      if (!cell.is_array() || cell.size() != 2)
        throw DimensionMismatch("matrix entry: expected [re, im]");
      a(i, k) = cd(cell.at(0).get<double>(), cell.at(1).get<double>());
    }
  }
  return a;
}

inline ordered_json potential_to_json(const EdgePotential& q) {
  ordered_json j;
  switch (q.kind()) {
    case EdgePotential::Kind::zero:
      j["kind"] = "zero";
      j["m"] = q.dim();
      break;
    case EdgePotential::Kind::constant:
      j["kind"] = "constant";
      j["value"] = matrix_to_json(q.eval(0.0));
      j["support_end"] = q.support_end();
      break;
    case EdgePotential::Kind::piecewise_constant: {
      j["kind"] = "piecewise_constant";
      auto breaks = q.breakpoints();
      j["breaks"] = breaks;
      ordered_json vals = ordered_json::array();
      for (size_t i = 0; i + 1 < breaks.size(); ++i)
        vals.push_back(matrix_to_json(q.eval(0.5 * (breaks[i] + breaks[i + 1]))));
      j["values"] = std::move(vals);
      break;
    }
    case EdgePotential::Kind::gaussian_bumps: {
      j["kind"] = "gaussian_bumps";
      ordered_json bumps = ordered_json::array();
      for (const auto& b : q.bumps()) {
        ordered_json jb;
        jb["center"] = b.center;
        jb["width"] = b.width;
        jb["amplitude"] = matrix_to_json(b.amplitude);
        bumps.push_back(std::move(jb));
      }
      j["bumps"] = std::move(bumps);
      break;
    }
    case EdgePotential::Kind::sampled: {
      j["kind"] = "sampled";
      j["x"] = q.sample_grid();
      ordered_json vals = ordered_json::array();
      for (const auto& v : q.sample_values()) vals.push_back(matrix_to_json(v));
      j["values"] = std::move(vals);
      break;
    }
  }
  return j;
}

inline EdgePotential potential_from_json(const ordered_json& j, int m) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "zero") return EdgePotential::zero(m);
  if (kind == "constant")
    return EdgePotential::constant(matrix_from_json(j.at("value")),
                                   j.at("support_end").get<double>());
  if (kind == "piecewise_constant") {
    std::vector<double> breaks = j.at("breaks").get<std::vector<double>>();
    std::vector<Matrix> values;
    for (const auto& v : j.at("values")) values.push_back(matrix_from_json(v));
    return EdgePotential::piecewise_constant(std::move(breaks), std::move(values));
  }
  if (kind == "gaussian_bumps") {
    std::vector<EdgePotential::Bump> bumps;
    for (const auto& b : j.at("bumps"))
      bumps.push_back({b.at("center").get<double>(), b.at("width").get<double>(),
                       matrix_from_json(b.at("amplitude"))});
    return EdgePotential::gaussian_bumps(std::move(bumps));
  }
  if (kind == "sampled") {
    std::vector<double> x = j.at("x").get<std::vector<double>>();
    std::vector<Matrix> values;
    for (const auto& v : j.at("values")) values.push_back(matrix_from_json(v));
    return EdgePotential::sampled(std::move(x), std::move(values));
  }
  throw DimensionMismatch("unknown potential kind: " + kind);
}

// Canonical serialization: hub first, vertex ids 0..p2, edge ids in order
// (leads then finite edges).  Reparsing reproduces the graph bit-exactly.
inline ordered_json graph_to_json(const MetricGraph& g) {
  ordered_json j;
  j["m"] = g.m;
  ordered_json verts = ordered_json::array();
  for (int v = 0; v < g.vertex_count(); ++v) {
    ordered_json jv;
    jv["id"] = v;
    jv["alpha"] = matrix_to_json(g.alpha[v]);
    verts.push_back(std::move(jv));
  }
  j["vertices"] = std::move(verts);
  ordered_json edges = ordered_json::array();
  int eid = 0;
  for (const auto& l : g.leads) {
    ordered_json je;
    je["id"] = eid++;
    je["kind"] = "lead";
    je["from"] = l.attach_vertex;
    je["potential"] = potential_to_json(l.potential);
    edges.push_back(std::move(je));
  }
  for (const auto& e : g.finite_edges) {
    ordered_json je;
    je["id"] = eid++;
    je["kind"] = "finite";
    je["from"] = e.from;
    je["to"] = e.to;
    je["length"] = e.length;
    je["potential"] = potential_to_json(e.potential);
    edges.push_back(std::move(je));
  }
  j["edges"] = std::move(edges);
  return j;
}

inline MetricGraph graph_from_json(const ordered_json& j) {
  MetricGraph g;
  g.m = j.at("m").get<int>();
  if (g.m < 1) throw DimensionMismatch("m must be a positive integer");

  std::map<int, int> vid_to_index;  // ordered: deterministic
  std::vector<ordered_json> valpha;
  for (const auto& jv : j.at("vertices")) {
    int id = jv.at("id").get<int>();
    if (vid_to_index.count(id)) throw DimensionMismatch("duplicate vertex id");
    vid_to_index[id] = -1;
    valpha.push_back(jv);
  }

  // the hub is the unique vertex every edge references as "from"
  int hub_id = INT_MIN;
  for (const auto& je : j.at("edges")) {
    int from = je.at("from").get<int>();
    if (!vid_to_index.count(from)) throw DimensionMismatch("edge references unknown vertex");
    if (hub_id == INT_MIN) hub_id = from;
    if (from != hub_id)
      throw DimensionMismatch("all edges must attach to a single hub vertex");
  }
  if (hub_id == INT_MIN) throw EmptyLeads("graph has no edges");

  // index assignment: hub = 0, outer vertices in finite-edge order
  vid_to_index[hub_id] = 0;
  int next_index = 1;
  std::vector<std::tuple<int, double, ordered_json>> finite;  // to-id, length, potential
  std::vector<ordered_json> lead_pots;
  for (const auto& je : j.at("edges")) {
    const std::string kind = je.at("kind").get<std::string>();
    if (kind == "lead") {
      lead_pots.push_back(je.at("potential"));
    } else if (kind == "finite") {
      int to = je.at("to").get<int>();
      if (!vid_to_index.count(to)) throw DimensionMismatch("edge references unknown vertex");
      if (to == hub_id || vid_to_index[to] != -1)
        throw DimensionMismatch("finite edges must go to distinct outer vertices");
      vid_to_index[to] = next_index++;
      finite.emplace_back(to, je.at("length").get<double>(), je.at("potential"));
    } else {
      throw DimensionMismatch("unknown edge kind: " + kind);
    }
  }

  g.alpha.assign(next_index, Matrix());
  for (const auto& jv : valpha) {
    int idx = vid_to_index.at(jv.at("id").get<int>());
    if (idx < 0) throw DimensionMismatch("vertex not referenced by any edge");
    Matrix a = matrix_from_json(jv.at("alpha"));
    if (a.rows() != g.m || a.cols() != g.m)
      throw DimensionMismatch("alpha dimension mismatch");
    if (!is_hermitian(a)) throw NonHermitianMatrix("alpha not Hermitian");
    g.alpha[idx] = std::move(a);
  }
  for (const auto& a : g.alpha)
    if (a.rows() == 0) throw DimensionMismatch("missing alpha for a referenced vertex");

  for (const auto& jp : lead_pots) g.leads.push_back({0, potential_from_json(jp, g.m)});
  if (g.leads.empty()) throw EmptyLeads("graph must have at least one lead");
  int k = 1;
  for (auto& [to, len, jp] : finite) {
    if (!(len > 0.0)) throw NonpositiveLength("finite edge length must be positive");
    g.finite_edges.push_back({0, k++, len, potential_from_json(jp, g.m)});
  }
  return g;
}

inline MetricGraph load_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw OutOfRange("cannot open graph file: " + path);
  ordered_json j = ordered_json::parse(in);
  return graph_from_json(j);
}

}  // namespace qgraph
