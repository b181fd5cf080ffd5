#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "qgraph/negspec.hpp"

using namespace qgraph;

namespace {
Matrix scalar(double v) {
  Matrix a(1, 1);
  a << v;
  return a;
}

Matrix random_hermitian(std::mt19937& rng, int m, double span) {
  std::uniform_real_distribution<double> u(-span, span);
  Matrix a(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a(i, j) = cd(u(rng), u(rng));
  return hermitize(a);
}
}  // namespace

TEST_CASE("worked example: two unit edges with strong couplings has no bound states") {
  // star with two leads merged into the hub coupling: alpha(0) = 1,
  // two finite edges of length 1 with alpha(v1) = 5, alpha(v2) = 6;
  // T1 = [[1+2, -1, -1], [-1, 5+1, 0], [-1, 0, 6+1]] after ordering, here
  // assembled directly and the count must be zero
  auto g = build_star(1, {EdgePotential::zero(1)},
                      {{1.0, EdgePotential::zero(1)}, {0.5, EdgePotential::zero(1)}},
                      {scalar(-1.0), scalar(6.0), scalar(-1.0)});
  Matrix t1 = assemble_T1(g);
  Matrix expect(3, 3);
  expect << -1.0 + 1.0 + 2.0, -1.0, -2.0,
            -1.0, 6.0 + 1.0, 0.0,
            -2.0, 0.0, -1.0 + 2.0;
  CHECK((t1 - expect).norm() < 1e-14);
}

TEST_CASE("known 4x4 coupling matrix has no negative eigenvalues") {
  Matrix t(4, 4);
  t << 1, 0, -2, 0,
       0, 7, 0, -2,
       -2, 0, 8, 0,
       0, -2, 0, 1;
  auto [neg, boundary] = kappa_minus_matrix(t);
  CHECK(neg == 0);
  CHECK(boundary == 0);
  // produced by an m=2 star with one finite edge of length 1/2 and diagonal
  // couplings alpha(0) = diag(-1,5), alpha(v1) = diag(6,-1)
  Matrix a0 = Matrix::Zero(2, 2), a1 = Matrix::Zero(2, 2);
  a0.diagonal() << -1.0, 5.0;
  a1.diagonal() << 6.0, -1.0;
  auto g = build_star(2, {EdgePotential::zero(2)}, {{0.5, EdgePotential::zero(2)}},
                      {a0, a1});
  CHECK((assemble_T1(g) - t).norm() < 1e-14);
}

TEST_CASE("attractive point coupling on the line binds one state") {
  Matrix t(2, 2);
  t << 1, -2, -2, 1;  // eigenvalues 3 and -1
  CHECK(kappa_minus(t) == 1);
  auto g = build_star(1, {EdgePotential::zero(1)}, {{0.5, EdgePotential::zero(1)}},
                      {scalar(-1.0), scalar(-1.0)});
  CHECK((assemble_T1(g) - t).norm() < 1e-14);
  auto rep = kappa_star(g);
  REQUIRE(rep.kappa_weyl.has_value());
  CHECK(*rep.kappa_weyl == 1);
  CHECK(rep.boundary_eigenvalue_count == 0);
}

TEST_CASE("general assembly reduces to the closed form for zero potentials") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    int m = 1 + trial % 2;
    int p2 = 1 + trial % 3;
    std::uniform_real_distribution<double> ul(0.3, 2.0);
    std::vector<std::pair<double, EdgePotential>> fin;
    std::vector<Matrix> coupling = {random_hermitian(rng, m, 3.0)};
    for (int k = 0; k < p2; ++k) {
      fin.push_back({ul(rng), EdgePotential::zero(m)});
      coupling.push_back(random_hermitian(rng, m, 3.0));
    }
    auto g = build_star(m, {EdgePotential::zero(m), EdgePotential::zero(m)}, fin,
                        coupling);
    WeylZeroData d = weyl_zero_data(g);
    d.nonnegativity_verified = true;
    Matrix t = assemble_T(g, d);
    Matrix t1 = assemble_T1(g);
    CHECK((t - t1).norm() < 1e-12 * std::max(1.0, t1.norm()));
  }
}

TEST_CASE("no finite edges: T collapses to the hub coupling") {
  Matrix a0(2, 2);
  a0 << -1.0, cd(0.0, 0.5), cd(0.0, -0.5), 2.0;
  auto g = build_star(2, {EdgePotential::zero(2), EdgePotential::zero(2)}, {}, {a0});
  WeylZeroData d = weyl_zero_data(g);
  d.nonnegativity_verified = true;
  Matrix t = assemble_T(g, d);
  CHECK((t - a0).norm() < 1e-14);
  auto rep = kappa_star(g);
  CHECK(*rep.kappa_weyl == kappa_minus(a0));
}

TEST_CASE("count is at most the total negative inertia of the couplings") {
  std::mt19937 rng(17);
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    int m = 1 + trial % 2;
    int p2 = trial % 3;
    std::uniform_real_distribution<double> ul(0.2, 3.0);
    std::vector<std::pair<double, EdgePotential>> fin;
    std::vector<Matrix> coupling = {random_hermitian(rng, m, 4.0)};
    for (int k = 0; k < p2; ++k) {
      fin.push_back({ul(rng), EdgePotential::zero(m)});
      coupling.push_back(random_hermitian(rng, m, 4.0));
    }
    auto g = build_star(m, {EdgePotential::zero(m)}, fin, coupling);
    Matrix t1 = assemble_T1(g);
    auto [neg, boundary] = kappa_minus_matrix(t1);
    if (boundary > 0) continue;  // skip draws on the inertia boundary
    ++checked;
    int alpha_total = 0;
    for (const auto& a : g.alpha) alpha_total += kappa_minus(a);
    CHECK(neg <= alpha_total);
    CHECK(neg <= (p2 + 1) * m);  // dimension bound on the count
  }
  CHECK(checked >= 90);
}

TEST_CASE("inertia is invariant under unitary congruence") {
  std::mt19937 rng(29);
  Matrix t = random_hermitian(rng, 4, 2.0);
  auto [neg, boundary] = kappa_minus_matrix(t);
  Matrix a = random_hermitian(rng, 4, 1.0);
  Matrix u = Eigen::SelfAdjointEigenSolver<Matrix>(a).eigenvectors();
  auto [neg2, b2] = kappa_minus_matrix(hermitize(u.adjoint() * t * u));
  CHECK(neg == neg2);
  CHECK(boundary == b2);
}

TEST_CASE("one finite edge splits by Schur complement") {
  // for p2 = 1, kappa_-(T1) = kappa_-(a1 + 1/l) + kappa_-(schur) whenever
  // a1 + 1/l is invertible
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> ua(-3.0, 3.0), ul(0.3, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    double a0 = ua(rng), a1 = ua(rng), l = ul(rng);
    double d = a1 + 1.0 / l;
    if (std::abs(d) < 1e-6) continue;
    auto g = build_star(1, {EdgePotential::zero(1)}, {{l, EdgePotential::zero(1)}},
                        {scalar(a0), scalar(a1)});
    Matrix t1 = assemble_T1(g);
    double schur = (a0 + 1.0 / l) - (1.0 / (l * l)) / d;
    int expect = (d < 0 ? 1 : 0) + (schur < 0 ? 1 : 0);
    if (std::abs(schur) < 1e-9) continue;
    CHECK(kappa_minus(t1) == expect);
  }
}

TEST_CASE("spectral shift bound from the potentials") {
  SECTION("zero potentials give just the vertex-count term") {
    auto g = build_star(1, {EdgePotential::zero(1)},
                        {{1.0, EdgePotential::zero(1)}, {2.0, EdgePotential::zero(1)}},
                        {scalar(0.0), scalar(0.0), scalar(0.0)});
    CHECK(bargmann_bound(g) == 3);  // m (p2 + 1)
  }
  SECTION("attractive well on the lead adds its first moment") {
    // int_0^1 x * 5 dx = 2.5 -> floor 2, plus m |V| = 1
    auto g = build_star(1, {EdgePotential::constant(scalar(-5.0), 1.0)}, {},
                        {scalar(0.0)});
    CHECK(bargmann_bound(g) == 3);
  }
  SECTION("only the negative part of a matrix potential counts") {
    Matrix amp = Matrix::Zero(2, 2);
    amp.diagonal() << -6.0, 6.0;  // tr Q_- = 6 pointwise
    auto g = build_star(2, {EdgePotential::constant(amp, 1.0)}, {},
                        {Matrix::Zero(2, 2)});
    // int_0^1 x * 6 dx = 3 exactly, snapped; plus m |V| = 2
    CHECK(bargmann_bound(g) == 5);
  }
}

TEST_CASE("coupling-inertia bound evaluates on the worked examples") {
  auto g1 = build_star(1, {EdgePotential::zero(1)},
                       {{0.5, EdgePotential::zero(1)}, {0.5, EdgePotential::zero(1)}},
                       {scalar(-3.0), scalar(6.0), scalar(-1.0)});
  CHECK(alpha_sum_bound(g1, 0) == 2);
  auto g2 = build_star(1, {EdgePotential::zero(1)}, {{0.5, EdgePotential::zero(1)}},
                       {scalar(-1.0), scalar(-1.0)});
  CHECK(alpha_sum_bound(g2, 0) == 2);
}

TEST_CASE("full report on a star with a potential well") {
  // a shallow well (depth below pi^2/4) keeps the decoupled Dirichlet
  // operator nonnegative, so the finite-matrix route applies
  auto g = build_star(1, {EdgePotential::constant(scalar(-1.0), 1.0)},
                      {{1.0, EdgePotential::zero(1)}}, {scalar(0.0), scalar(0.0)});
  KappaOptions opt;
  opt.run_oracle = true;
  auto rep = kappa_star(g, opt);
  REQUIRE(rep.kappa_weyl.has_value());
  REQUIRE(rep.kappa_oracle.has_value());
  CHECK(*rep.kappa_weyl == *rep.kappa_oracle);
  REQUIRE(rep.bargmann_bound.has_value());
  CHECK(*rep.kappa_weyl <= *rep.bargmann_bound);
  REQUIRE(rep.alpha_sum_bound.has_value());
  CHECK(*rep.kappa_weyl <= *rep.alpha_sum_bound);
}

TEST_CASE("assembly preconditions") {
  auto g = build_star(1, {EdgePotential::constant(scalar(-5.0), 1.0)}, {},
                      {scalar(0.0)});
  WeylZeroData d = weyl_zero_data(g);
  CHECK_THROWS_AS(assemble_T(g, d), NonnegativityNotEstablished);
  CHECK_NOTHROW(assemble_T(g, d, /*waive_nonnegativity=*/true));
  d.nonnegativity_verified = true;
  d.lead_m0.clear();
  CHECK_THROWS_AS(assemble_T(g, d), MissingBlock);
  CHECK_THROWS_AS(assemble_T1(g), NonzeroPotential);
}
