#include "doctest.h"
#include "oracles.hpp"

#include "pairsim/adiabatic_prep.hpp"
#include "pairsim/errors.hpp"
#include "pairsim/exact_evolution.hpp"
#include "pairsim/pipeline.hpp"

#include <chrono>
#include <numbers>
#include <random>

using namespace pairsim;
using std::numbers::pi;

namespace {

// Characteristic polynomial of the h1 sector matrix pi*[[0,a,b],[a,50,c],[b,c,100]]
// in units of pi: lambda^3 - tr lambda^2 + (sum of 2x2 minors) lambda - det.
std::array<double, 3> h1_sector_roots() {
  const double a = 224, b = 50, c = -311, d1 = 0, d2 = 50, d3 = 100;
  const double tr = d1 + d2 + d3;
  const double minors = (d1 * d2 - a * a) + (d1 * d3 - b * b) + (d2 * d3 - c * c);
  const double det = d1 * (d2 * d3 - c * c) - a * (a * d3 - c * b) + b * (a * c - d2 * b);
  auto r = oracle::cubic_roots(-tr, minors, -det);
  for (double& x : r) x *= pi;
  return r;
}

}  // namespace

TEST_CASE("eigendecompose diagonal input") {
  Eigen::Vector3d d(0, 50 * pi, 100 * pi);
  const auto eig = eigendecompose(d.asDiagonal().toDenseMatrix().cast<Complex>());
  for (int i = 0; i < 3; ++i) CHECK(eig.values(i) == doctest::Approx(d(i)));
}

TEST_CASE("h1 sector eigenvalues against the closed-form cubic") {
  const auto roots = h1_sector_roots();
  const auto eig = sector_eigensystem(preset("h1").model, 2);
  for (int i = 0; i < 3; ++i) CHECK(eig.values(i) == doctest::Approx(roots[i]).epsilon(1e-10));
  CHECK(eig.values(0) / pi == doctest::Approx(-354.196).epsilon(1e-5));
  CHECK(eig.values(2) / pi == doctest::Approx(423.464).epsilon(1e-5));
}

TEST_CASE("h2 sector eigenvalues at convention factor 1") {
  auto m = preset("h2").model;
  m.convention_factor = 1.0;
  const double root = std::sqrt(50.0 * 50.0 + 4 * 224.0 * 224.0);
  const auto eig = sector_eigensystem(m, 2);
  CHECK(eig.values(0) == doctest::Approx(pi * (50 - root) / 2).epsilon(1e-12));
  CHECK(eig.values(1) == doctest::Approx(pi * 100).epsilon(1e-12));
  CHECK(eig.values(2) == doctest::Approx(pi * (50 + root) / 2).epsilon(1e-12));
}

TEST_CASE("sector_gap examples") {
  const auto roots = h1_sector_roots();
  const double g1 = sector_gap(preset("h1").model, 2);
  CHECK(g1 == doctest::Approx(roots[1] - roots[0]).epsilon(1e-10));
  CHECK(g1 / (2 * pi) == doctest::Approx(217.4643).epsilon(1e-6));

  auto free = preset("h1").model;
  free.coupling.setZero();
  CHECK(sector_gap(free, 2) == doctest::Approx(50 * pi));

  // Factor 2 doubles every sector entry: gap = 2 * pi * sqrt(100^2 + 4 * 448^2) / 2.
  const double h2_gap = sector_gap(preset("h2").model, 2, 2);
  CHECK(h2_gap == doctest::Approx(pi * std::sqrt(100.0 * 100.0 + 4 * 448.0 * 448.0)).epsilon(1e-12));

  CHECK_THROWS_AS(sector_gap(preset("h1").model, 0), ParameterError);
  CHECK_THROWS_AS(sector_gap(preset("h1").model, 2, 3), ParameterError);
}

TEST_CASE("propagator basics") {
  std::mt19937_64 rng(3);
  const oracle::M h = oracle::random_hermitian(8, rng);
  CHECK((propagator(h, 0.0) - Operator::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-12);

  const Operator z = realize({1, {{1.0, {{1, Pauli::Z}}}}});
  CHECK((propagator(z, pi) + Operator::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);

  const Operator u = propagator(h, 0.3) * propagator(h, 0.45);
  CHECK((u - propagator(h, 0.75)).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((propagator(h, 0.75) - oracle::expm_minus_i(h, 0.75)).cwiseAbs().maxCoeff() < 1e-9);

  Operator bad = h;
  bad(0, 1) += Complex(0.5, 0);
  CHECK_THROWS_AS(propagator(bad, 1.0), ContractViolation);
}

TEST_CASE("evolve") {
  const auto s = basis_state("0");
  CHECK((evolve(s, Operator::Identity(2, 2)) - s).norm() == 0.0);
  const Operator x = realize({1, {{1.0, {{1, Pauli::X}}}}});
  CHECK(std::abs(evolve(s, x)(1) - Complex(1)) < 1e-15);

  std::mt19937_64 rng(11);
  const Operator u = propagator(oracle::random_hermitian(8, rng), 0.37);
  StateVector psi = oracle::random_state(8, rng);
  for (int i = 0; i < 10000; ++i) psi = evolve(psi, u);
  CHECK(std::abs(psi.norm() - 1.0) < 1e-8);
}

TEST_CASE("reachable_gap") {
  const auto m = preset("h1").model;
  const auto eig = sector_eigensystem(m, 2);
  const StateVector e1 = eig.vectors.col(1);
  const auto r = reachable_gap(m, 2, e1);
  CHECK(r.level == 1);
  CHECK(r.gap == doctest::Approx(eig.values(1) - eig.values(0)));

  const StateVector g = eig.vectors.col(0);
  CHECK_THROWS_AS(reachable_gap(m, 2, g), NoReachableState);

  const auto h2 = preset("h2");
  const auto prepared = prepare(h2.model, basis_state("011"), AdiabaticSchedule{});
  const auto r2 = reachable_gap(h2.model, 2, prepared);
  CHECK(r2.level == 2);
  CHECK(r2.gap / (2 * pi) == doctest::Approx(450.7815).epsilon(1e-6));
}

TEST_CASE("reachable_gap merges degenerate levels") {
  // nu all equal and V = 0: the 2-pair sector is threefold degenerate.
  PairingModel flat{3, {10.0, 10.0, 10.0}, Eigen::MatrixXd::Zero(3, 3), 1.0};
  const StateVector psi = basis_state("011");
  CHECK_THROWS_AS(reachable_gap(flat, 2, psi), NoReachableState);
}

TEST_CASE("spectral invariants") {
  std::mt19937_64 rng(5);
  const oracle::M h = oracle::random_hermitian(8, rng);
  const auto eig = eigendecompose(h);
  CHECK(eig.values.sum() == doctest::Approx(h.trace().real()).epsilon(1e-9));

  const StateVector psi = oracle::random_state(8, rng);
  const double e0 = (psi.adjoint() * h * psi)(0).real();
  for (double t : {0.1, 1.0, 7.5}) {
    const StateVector pt = evolve(psi, propagator(h, t));
    CHECK((pt.adjoint() * h * pt)(0).real() == doctest::Approx(e0).epsilon(1e-9));
  }

  const auto m = preset("h1").model;
  const Operator hp = realize(build_hamiltonian(m, Part::Full));
  const auto sector_weights = [](const StateVector& v) {
    std::array<double, 4> w{};
    for (Eigen::Index i = 0; i < v.size(); ++i) w[hamming_weight(i)] += std::norm(v(i));
    return w;
  };
  const auto before = sector_weights(psi);
  const auto after = sector_weights(evolve(psi, propagator(hp, 0.013)));
  for (int k = 0; k < 4; ++k) CHECK(std::abs(before[k] - after[k]) < 1e-10);

  const double c = 123.4;
  const Operator hs = restrict_to(hp, sector_basis(3, 2)) + c * Operator::Identity(3, 3);
  const auto es = eigendecompose(hs);
  CHECK(es.values(1) - es.values(0) == doctest::Approx(sector_gap(m, 2)).epsilon(1e-12));
}

TEST_CASE("h1 gap is computed well under a millisecond") {
  const auto m = preset("h1").model;
  const auto start = std::chrono::steady_clock::now();
  double g = 0;
  for (int i = 0; i < 100; ++i) g += sector_gap(m, 2);
  const double each = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / 100;
  CHECK(g > 0);
  CHECK(each < 1e-3);
}
