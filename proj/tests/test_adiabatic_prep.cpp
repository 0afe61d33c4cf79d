#include "doctest.h"

#include "pairsim/adiabatic_prep.hpp"
#include "pairsim/errors.hpp"
#include "pairsim/exact_evolution.hpp"
#include "pairsim/pipeline.hpp"

#include <numbers>
#include <sstream>

using namespace pairsim;

namespace {

double ground_population(const PairingModel& m, const StateVector& psi) {
  const auto eig = sector_eigensystem(m, 2);
  return std::norm(eig.vectors.col(0).dot(psi));
}

std::array<double, 4> sector_weights(const StateVector& v) {
  std::array<double, 4> w{};
  for (Eigen::Index i = 0; i < v.size(); ++i) w[hamming_weight(i)] += std::norm(v(i));
  return w;
}

}  // namespace

TEST_CASE("zero-length schedule returns the initial state") {
  const auto m = preset("h1").model;
  const auto init = basis_state("011");
  const auto out = prepare(m, init, {4, 0.0, ExactEvolver{}});
  CHECK(fidelity(out, init) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("slow schedule reaches the ground state") {
  const auto m = preset("h1").model;
  const auto out = prepare(m, basis_state("011"), {200, 0.02, ExactEvolver{}});
  CHECK(ground_population(m, out) >= 0.99);
}

TEST_CASE("quasiadiabatic h1 preparation") {
  const auto m = preset("h1").model;
  const auto out = prepare(m, basis_state("011"), {4, 1.0 / 700.0, ExactEvolver{}});
  const auto eig = sector_eigensystem(m, 2);
  const double g = std::norm(eig.vectors.col(0).dot(out));
  const double e1 = std::norm(eig.vectors.col(1).dot(out));
  CHECK(g + e1 >= 0.9);
  CHECK(e1 >= 0.02);
  // Frozen from the exact evolver: G = 0.353, E1 = 0.589.
  CHECK(g == doctest::Approx(0.353).epsilon(0.01));
  CHECK(e1 == doctest::Approx(0.589).epsilon(0.01));
}

TEST_CASE("population_report") {
  const auto m = preset("h1").model;
  const Operator h = realize(build_hamiltonian(m, Part::Full));
  const auto eig = sector_eigensystem(m, 2);
  const StateVector g = eig.vectors.col(0);
  const auto full = eigendecompose(h);

  auto report = population_report(g, h);
  REQUIRE(report.size() == 8);
  double total = 0;
  for (const auto& l : report) total += l.population;
  CHECK(total == doctest::Approx(1.0));
  const auto top = std::max_element(report.begin(), report.end(),
                                    [](auto& a, auto& b) { return a.population < b.population; });
  CHECK(top->population == doctest::Approx(1.0));
  CHECK(top->energy == doctest::Approx(eig.values(0)));

  const StateVector mix = (eig.vectors.col(0) + eig.vectors.col(1)) / std::sqrt(2.0);
  report = population_report(mix, h);
  int halves = 0;
  for (const auto& l : report) halves += std::abs(l.population - 0.5) < 1e-9;
  CHECK(halves == 2);

  std::ostringstream os;
  write_population_csv(os, report);
  CHECK(os.str().rfind("eigenindex,energy_rad_per_s,population\n", 0) == 0);
}

TEST_CASE("h2 preparation leaves the decoupled level empty") {
  const auto m = preset("h2").model;
  const auto out = prepare(m, basis_state("011"), {4, 1.0 / 700.0, ExactEvolver{}});
  // The decoupled sector eigenstate is |110> (energy 2 * 100 pi at factor 2).
  CHECK(std::norm(out(6)) < 1e-6);
  const auto eig = sector_eigensystem(m, 2);
  CHECK(std::norm(eig.vectors.col(1).dot(out)) < 1e-6);
}

TEST_CASE("exact preparation conserves norm and sectors") {
  const auto m = preset("h1").model;
  StateVector init = StateVector::Zero(8);
  init(3) = 0.6;
  init(1) = Complex(0, 0.8);
  const auto out = prepare(m, init, {4, 1.0 / 700.0, ExactEvolver{}});
  CHECK(std::abs(out.norm() - 1.0) < 1e-10);
  const auto a = sector_weights(init), b = sector_weights(out);
  for (int k = 0; k < 4; ++k) CHECK(std::abs(a[k] - b[k]) < 1e-10);
}

TEST_CASE("ground population grows with S") {
  const auto m = preset("h1").model;
  double prev = -1;
  for (int S : {4, 8, 16, 32, 64}) {
    const double g = ground_population(m, prepare(m, basis_state("011"), {S, 1.0 / 700.0, ExactEvolver{}}));
    CHECK(g >= prev - 0.02);
    prev = g;
  }
}

TEST_CASE("uncoupled model keeps the eigenstate") {
  auto m = preset("h1").model;
  m.coupling.setZero();
  const auto init = basis_state("011");
  CHECK(fidelity(prepare(m, init, {4, 1.0 / 700.0, ExactEvolver{}}), init) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Trotter evolver tracks the exact one") {
  const auto m = preset("h1").model;
  const auto init = basis_state("011");
  const auto exact = prepare(m, init, {4, 1.0 / 700.0, ExactEvolver{}});
  const auto trot = prepare(m, init, {4, 1.0 / 700.0, TrotterEvolver{8}});
  CHECK(fidelity(exact, trot) > 0.99);
}

TEST_CASE("prepare_with_report") {
  const auto m = preset("h1").model;
  const auto rep = prepare_with_report(m, basis_state("011"), {4, 1.0 / 700.0, ExactEvolver{}});
  CHECK(rep.wall_time == doctest::Approx(5.0 / 700.0));
  CHECK(rep.min_gap > 0);
  CHECK(rep.warnings.empty() == (rep.min_gap >= 1.0 / (4 * (1.0 / 700.0))));

  CHECK(dominant_sector(basis_state("011"), 3) == 2);
  CHECK(adiabatic_model(m, 2, 4).coupling(0, 1) == doctest::Approx(m.coupling(0, 1) / 2));
  CHECK_THROWS_AS((AdiabaticSchedule{0, 1.0, ExactEvolver{}}.validate()), ParameterError);
  CHECK_THROWS_AS((AdiabaticSchedule{4, -1.0, ExactEvolver{}}.validate()), ParameterError);
}
