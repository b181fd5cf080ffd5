#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "qgraph/scattering.hpp"

using namespace qgraph;

namespace {
Matrix scalar(double v) {
  Matrix a(1, 1);
  a << v;
  return a;
}

MetricGraph free_star(int p1) {
  std::vector<EdgePotential> leads(p1, EdgePotential::zero(1));
  return build_star(1, std::move(leads), {}, {scalar(0.0)});
}

EdgePotential bump(double center, double width, double amp) {
  return EdgePotential::gaussian_bumps({{center, width, scalar(amp)}});
}
}  // namespace

TEST_CASE("free star with Kirchhoff coupling: S = I - (2/p1) E") {
  for (int p1 : {2, 3, 5}) {
    auto g = free_star(p1);
    for (double lambda : {0.7, 4.0}) {
      auto r = scattering_matrix(g, lambda);
      Matrix expect = Matrix::Identity(p1, p1) -
                      (2.0 / p1) * Matrix::Ones(p1, p1);
      CHECK((r.S - expect).norm() < 1e-10);
      CHECK(r.unitarity_defect < 1e-10);
      // K = p1 * i sqrt(lambda)
      CHECK(std::abs(r.K_lambda(0, 0) -
                     cd(0.0, p1 * std::sqrt(lambda))) < 1e-10);
    }
  }
}

TEST_CASE("single free lead reflects with amplitude -1 at Kirchhoff coupling") {
  auto g = free_star(1);
  auto r = scattering_matrix(g, 2.0);
  CHECK(std::abs(r.S(0, 0) - cd(-1.0, 0.0)) < 1e-10);
  Matrix s1 = scattering_one_lead(EdgePotential::zero(1), scalar(0.0), 2.0);
  CHECK(std::abs(s1(0, 0) - cd(-1.0, 0.0)) < 1e-10);
}

TEST_CASE("strong coupling approaches the Dirichlet limit S -> I") {
  Matrix s = scattering_one_lead(EdgePotential::zero(1), scalar(1e6), 4.0);
  CHECK((s - Matrix::Identity(1, 1)).norm() < 1e-4);
}

TEST_CASE("one-lead formula agrees with the general assembly") {
  auto q = bump(1.0, 0.4, -1.2);
  auto g = build_star(1, {q}, {}, {scalar(0.7)});
  for (double lambda : {0.5, 3.1}) {
    auto gen = scattering_matrix(g, lambda);
    Matrix one = scattering_one_lead(q, scalar(0.7), lambda);
    CHECK((gen.S - one).norm() < 1e-9);
  }
}

TEST_CASE("identical scalar leads match the reduced closed form") {
  auto q = bump(0.8, 0.3, 0.9);
  for (int p1 : {2, 4}) {
    std::vector<EdgePotential> leads(p1, q);
    auto g = build_star(1, std::move(leads), {}, {scalar(0.0)});
    for (double lambda : {1.3, 5.0}) {
      auto gen = scattering_matrix(g, lambda);
      Matrix red = scattering_scalar_equal(p1, q, lambda);
      CHECK((gen.S - red).norm() < 1e-8);
    }
  }
}

TEST_CASE("unitarity on the continuous spectrum") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> uc(0.3, 2.0), uw(0.2, 0.6), ua(-1.0, 1.0);
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<EdgePotential> leads;
    for (int j = 0; j < 2; ++j) leads.push_back(bump(uc(rng), uw(rng), ua(rng)));
    auto g = build_star(1, std::move(leads), {{1.0, bump(0.4, 0.1, ua(rng))}},
                        {scalar(ua(rng)), scalar(ua(rng))});
    for (double lambda : {0.9, 2.7, 6.4}) {
      try {
        auto r = scattering_matrix(g, lambda);
        CHECK(r.unitarity_defect < 1e-7);
      } catch (const PoleHit&) {
        // admissible: lambda landed on a pole of a finite-edge block
      }
    }
  }
}

TEST_CASE("S - I has rank at most m") {
  // the correction is a rank-m perturbation regardless of the lead count
  auto g = free_star(4);
  auto r = scattering_matrix(g, 1.7);
  Eigen::JacobiSVD<Matrix> svd(r.S - Matrix::Identity(4, 4));
  int rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > 1e-10 * svd.singularValues()(0)) ++rank;
  CHECK(rank <= 1);

  Matrix a0 = Matrix::Zero(2, 2);
  std::vector<EdgePotential> leads(3, EdgePotential::zero(2));
  auto g2 = build_star(2, std::move(leads), {}, {a0});
  auto r2 = scattering_matrix(g2, 1.7);
  Eigen::JacobiSVD<Matrix> svd2(r2.S - Matrix::Identity(6, 6));
  int rank2 = 0;
  for (Eigen::Index i = 0; i < svd2.singularValues().size(); ++i)
    if (svd2.singularValues()(i) > 1e-10 * svd2.singularValues()(0)) ++rank2;
  CHECK(rank2 <= 2);
}

TEST_CASE("hub Weyl sum on closed forms") {
  // two free leads + free edge of length 1 at lambda = 1:
  // K = 2 i sqrt(lambda) + tan(sqrt(lambda) l)
  auto g = build_star(1, {EdgePotential::zero(1), EdgePotential::zero(1)},
                      {{1.0, EdgePotential::zero(1)}},
                      {scalar(0.0), scalar(0.0)});
  Matrix k = k_matrix(g, 1.0);
  CHECK(std::abs(k(0, 0) - cd(std::tan(1.0), 2.0)) < 1e-9);
  Matrix kl = k_matrix(g, 1.0, KSum::leads_only);
  CHECK(std::abs(kl(0, 0) - cd(0.0, 2.0)) < 1e-9);
  // the finite-edge DN pole at lambda = (pi/2)^2 surfaces as PoleHit
  CHECK_THROWS_AS(k_matrix(g, M_PI * M_PI / 4.0), PoleHit);
}

TEST_CASE("relative determinant of the coupled and decoupled pair") {
  SECTION("coincident points give exactly one") {
    auto g = free_star(2);
    auto z = SpectralPoint::interior(cd(-1.0, 0.5));
    CHECK(std::abs(perturbation_determinant(g, z, z) - cd(1.0, 0.0)) < 1e-12);
  }
  SECTION("free one-lead star at z = -4, zeta = -1") {
    // det(alpha0 - K) = -i sqrt(z) = sqrt(|z|) below the spectrum
    auto g = free_star(1);
    cd d = perturbation_determinant(g, SpectralPoint::interior(cd(-1.0, 0.0)),
                                    SpectralPoint::interior(cd(-4.0, 0.0)));
    CHECK(std::abs(d - cd(2.0, 0.0)) < 1e-10);
  }
  SECTION("cocycle identity over three points") {
    auto g = build_star(1, {bump(1.0, 0.5, -0.8)}, {{0.7, EdgePotential::zero(1)}},
                        {scalar(0.4), scalar(-0.2)});
    auto za = SpectralPoint::interior(cd(-1.0, 0.0));
    auto zb = SpectralPoint::interior(cd(-2.5, 0.6));
    auto zc = SpectralPoint::interior(cd(0.5, 1.2));
    cd ab = perturbation_determinant(g, za, zb);
    cd bc = perturbation_determinant(g, zb, zc);
    cd ac = perturbation_determinant(g, za, zc);
    CHECK(std::abs(ab * bc - ac) < 1e-8 * std::abs(ac));
  }
}

TEST_CASE("argument preconditions") {
  auto g = free_star(2);
  CHECK_THROWS_AS(scattering_matrix(g, -1.0), OutOfRange);
  CHECK_THROWS_AS(scattering_matrix(g, 0.0), OutOfRange);
  CHECK_THROWS_AS(scattering_scalar_equal(0, EdgePotential::zero(1), 1.0), OutOfRange);
  MetricGraph notstar = g;
  notstar.leads[1].attach_vertex = 5;
  CHECK_THROWS_AS(scattering_matrix(notstar, 1.0), DimensionMismatch);
}
