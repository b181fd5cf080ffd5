#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <random>

#include "qgraph/json_io.hpp"

using namespace qgraph;

namespace {
Matrix scalar(double v) {
  Matrix a(1, 1);
  a << v;
  return a;
}
}  // namespace

TEST_CASE("matrix round trip is bit exact") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  Matrix a(3, 2);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j) a(i, j) = cd(u(rng), u(rng));
  a(0, 0) = cd(1.0 / 3.0, -1e-17);  // non-representable decimal + denormal-ish
  ordered_json j = matrix_to_json(a);
  // through text, as the CLI does
  ordered_json j2 = ordered_json::parse(j.dump());
  Matrix b = matrix_from_json(j2);
  REQUIRE(b.rows() == 3);
  REQUIRE(b.cols() == 2);
  for (int i = 0; i < 3; ++i)
    for (int jj = 0; jj < 2; ++jj) {
      CHECK(a(i, jj).real() == b(i, jj).real());
      CHECK(a(i, jj).imag() == b(i, jj).imag());
    }
}

TEST_CASE("matrix parse rejections") {
  CHECK_THROWS_AS(matrix_from_json(ordered_json::parse("[]")), DimensionMismatch);
  CHECK_THROWS_AS(matrix_from_json(ordered_json::parse("[[[1,0],[2,0]],[[3,0]]]")),
                  DimensionMismatch);
  CHECK_THROWS_AS(matrix_from_json(ordered_json::parse("[[[1,0,0]]]")),
                  DimensionMismatch);
  CHECK_THROWS_AS(matrix_from_json(ordered_json::parse("[[1]]")), DimensionMismatch);
}

TEST_CASE("every potential kind survives a round trip") {
  std::vector<EdgePotential> pots;
  pots.push_back(EdgePotential::zero(2));
  pots.push_back(EdgePotential::constant(scalar(-1.5), 0.75));
  pots.push_back(EdgePotential::piecewise_constant({0.0, 0.3, 1.1},
                                                   {scalar(2.0), scalar(-0.5)}));
  Matrix amp(2, 2);
  amp << 1.0, cd(0.2, 0.3), cd(0.2, -0.3), -0.5;
  pots.push_back(EdgePotential::gaussian_bumps({{0.7, 0.25, amp}, {1.9, 0.5, -amp}}));
  pots.push_back(EdgePotential::sampled({0.0, 0.5, 1.5},
                                        {scalar(0.0), scalar(1.0), scalar(0.25)}));
  for (const auto& q : pots) {
    ordered_json j = ordered_json::parse(potential_to_json(q).dump());
    EdgePotential r = potential_from_json(j, q.dim());
    CHECK(r.kind() == q.kind());
    CHECK(r.dim() == q.dim());
    CHECK(r.support_end() == q.support_end());
    for (double x = 0.0; x < 2.5; x += 0.13)
      CHECK((r.eval(x) - q.eval(x)).norm() == 0.0);
  }
}

TEST_CASE("graph document round trip preserves the graph") {
  Matrix a0(2, 2), a1(2, 2);
  a0 << -1.0, cd(0.0, 0.5), cd(0.0, -0.5), 2.0;
  a1 << 3.0, 0.0, 0.0, -0.25;
  auto g = build_star(
      2,
      {EdgePotential::zero(2), EdgePotential::constant(0.5 * a1.real().cast<cd>(), 1.0)},
      {{0.8, EdgePotential::zero(2)}}, {a0, a1});
  ordered_json j = ordered_json::parse(graph_to_json(g).dump());
  MetricGraph r = graph_from_json(j);
  CHECK(r.m == g.m);
  CHECK(r.p1() == g.p1());
  CHECK(r.p2() == g.p2());
  CHECK(r.is_star());
  for (int v = 0; v < g.vertex_count(); ++v)
    CHECK((r.alpha[v] - g.alpha[v]).norm() == 0.0);
  CHECK(r.finite_edges[0].length == g.finite_edges[0].length);
  for (double x = 0.0; x < 2.0; x += 0.21)
    CHECK((r.leads[1].potential.eval(x) - g.leads[1].potential.eval(x)).norm() == 0.0);
  // canonical form is a fixed point of serialize-parse-serialize
  CHECK(graph_to_json(r).dump() == graph_to_json(g).dump());
}

TEST_CASE("hub inference accepts arbitrary vertex ids") {
  const char* doc = R"({
    "m": 1,
    "vertices": [{"id": 7, "alpha": [[[0,0]]]}, {"id": 3, "alpha": [[[1,0]]]}],
    "edges": [
      {"id": 0, "kind": "lead", "from": 7, "potential": {"kind": "zero", "m": 1}},
      {"id": 1, "kind": "finite", "from": 7, "to": 3, "length": 2.0,
       "potential": {"kind": "zero", "m": 1}}
    ]
  })";
  MetricGraph g = graph_from_json(ordered_json::parse(doc));
  CHECK(g.is_star());
  CHECK(g.alpha[0](0, 0) == cd(0.0, 0.0));   // hub (id 7) mapped to index 0
  CHECK(g.alpha[1](0, 0) == cd(1.0, 0.0));   // outer vertex (id 3) to index 1
  CHECK(g.finite_edges[0].length == 2.0);
}

TEST_CASE("graph parse rejections") {
  auto parse = [](const std::string& s) { return graph_from_json(ordered_json::parse(s)); };
  const std::string zero_pot = R"({"kind": "zero", "m": 1})";
  const std::string av = R"([[[0,0]]])";

  // duplicate vertex id
  CHECK_THROWS_AS(parse(R"({"m":1,"vertices":[{"id":0,"alpha":)" + av +
                        R"(},{"id":0,"alpha":)" + av + R"(}],"edges":[
      {"id":0,"kind":"lead","from":0,"potential":)" + zero_pot + "}]}"),
                  DimensionMismatch);
  // edge references unknown vertex
  CHECK_THROWS_AS(parse(R"({"m":1,"vertices":[{"id":0,"alpha":)" + av +
                        R"(}],"edges":[
      {"id":0,"kind":"lead","from":9,"potential":)" + zero_pot + "}]}"),
                  DimensionMismatch);
  // two hubs
  CHECK_THROWS_AS(parse(R"({"m":1,"vertices":[{"id":0,"alpha":)" + av +
                        R"(},{"id":1,"alpha":)" + av + R"(}],"edges":[
      {"id":0,"kind":"lead","from":0,"potential":)" + zero_pot + R"(},
      {"id":1,"kind":"lead","from":1,"potential":)" + zero_pot + "}]}"),
                  DimensionMismatch);
  // no leads
  CHECK_THROWS_AS(parse(R"({"m":1,"vertices":[{"id":0,"alpha":)" + av +
                        R"(},{"id":1,"alpha":)" + av + R"(}],"edges":[
      {"id":0,"kind":"finite","from":0,"to":1,"length":1.0,"potential":)" +
                        zero_pot + "}]}"),
                  EmptyLeads);
  // nonpositive length
  CHECK_THROWS_AS(parse(R"({"m":1,"vertices":[{"id":0,"alpha":)" + av +
                        R"(},{"id":1,"alpha":)" + av + R"(}],"edges":[
      {"id":0,"kind":"lead","from":0,"potential":)" + zero_pot + R"(},
      {"id":1,"kind":"finite","from":0,"to":1,"length":-1.0,"potential":)" +
                        zero_pot + "}]}"),
                  NonpositiveLength);
  // unknown edge kind
  CHECK_THROWS_AS(parse(R"({"m":1,"vertices":[{"id":0,"alpha":)" + av +
                        R"(}],"edges":[
      {"id":0,"kind":"loop","from":0,"potential":)" + zero_pot + "}]}"),
                  DimensionMismatch);
  // non-Hermitian alpha
  CHECK_THROWS_AS(parse(R"({"m":1,"vertices":[{"id":0,"alpha":[[[0,1]]]}],"edges":[
      {"id":0,"kind":"lead","from":0,"potential":)" + zero_pot + "}]}"),
                  NonHermitianMatrix);
}

TEST_CASE("graph file loading") {
  auto g = build_star(1, {EdgePotential::zero(1)}, {}, {scalar(0.5)});
  std::string path = "/tmp/qgraph_test_roundtrip.json";
  {
    std::ofstream out(path);
    out << graph_to_json(g).dump(2);
  }
  MetricGraph r = load_graph_file(path);
  CHECK(r.p1() == 1);
  CHECK(r.alpha[0](0, 0) == cd(0.5, 0.0));
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_graph_file("/tmp/definitely_missing_qgraph.json"), OutOfRange);
}
