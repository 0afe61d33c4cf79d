#include "doctest.h"
#include "oracles.hpp"

#include "pairsim/errors.hpp"
#include "pairsim/hamiltonian.hpp"
#include "pairsim/pipeline.hpp"

#include <numbers>
#include <random>

using namespace pairsim;
using std::numbers::pi;

namespace {

PairingModel h1() { return preset("h1").model; }
PairingModel h2() { return preset("h2").model; }

PauliSum random_sum(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coeff(-3.0, 3.0);
  std::uniform_int_distribution<int> letter(0, 3);
  PauliSum s{n, {}};
  for (int t = 0; t < 5; ++t) {
    PauliTerm term{coeff(rng), {}};
    for (int q = 1; q <= n; ++q) {
      const int l = letter(rng);
      if (l > 0) term.factors[q] = static_cast<Pauli>("XYZ"[l - 1]);
    }
    s.terms.push_back(term);
  }
  return s;
}

oracle::M oracle_realize(const PauliSum& s) {
  oracle::M out = oracle::M::Zero(1 << s.n, 1 << s.n);
  for (const auto& term : s.terms) {
    std::string str(s.n, 'I');
    for (auto [q, p] : term.factors) str[q - 1] = static_cast<char>(p);
    out += term.coeff * oracle::pauli_string(str);
  }
  return out;
}

}  // namespace

TEST_CASE("pairing_to_qubit folds the diagonal coupling into nu") {
  FermionicPairingInput zero{3, {0, 0, 0}, Eigen::MatrixXd::Zero(3, 3)};
  CHECK(pairing_to_qubit(zero).nu == std::vector<double>{0, 0, 0});

  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(2, 2);
  v(0, 0) = 2 * pi * 10;
  v(1, 1) = 2 * pi * 20;
  const auto m = pairing_to_qubit({2, {2 * pi * 100, 0}, v});
  CHECK(m.nu[0] == doctest::Approx(2 * pi * 110));
  CHECK(m.nu[1] == doctest::Approx(2 * pi * 20));

  Eigen::MatrixXd off(2, 2);
  off << 0, 5, 5, 0;
  const auto same = pairing_to_qubit({2, {1.5, -2.5}, off});
  CHECK(same.nu == std::vector<double>{1.5, -2.5});
  CHECK(same.v(1, 2) == 5);
}

TEST_CASE("build_hamiltonian H0 on one qubit") {
  PairingModel m{1, {2 * pi * 100}, Eigen::MatrixXd::Zero(1, 1), 1.0};
  const auto h = build_hamiltonian(m, Part::H0);
  REQUIRE(h.terms.size() == 1);
  CHECK(h.terms[0].coeff == doctest::Approx(-pi * 100));
  CHECK(h.terms[0].factors.at(1) == Pauli::Z);
}

TEST_CASE("h1 sector matrix matches brute-force projection") {
  const Operator full = realize(build_hamiltonian(h1(), Part::Full));
  const auto basis = sector_basis(3, 2);
  const Operator sec = restrict_to(full, basis);
  Eigen::Matrix3d expected;
  expected << 0, 224, 50, 224, 50, -311, 50, -311, 100;
  expected *= pi;
  CHECK((sec - expected.cast<Complex>()).cwiseAbs().maxCoeff() < 1e-9);

  const oracle::M ref = oracle::pairing(3, h1().nu, h1().coupling, 1.0);
  CHECK((full - ref).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("adiabatic endpoints") {
  const auto m = h1();
  const auto h0 = build_hamiltonian(m, Part::H0);
  const auto ad0 = build_hamiltonian(m, AdiabaticPart{0, 4});
  CHECK((realize(h0) - realize(ad0)).cwiseAbs().maxCoeff() < 1e-12);
  const auto adS = realize(build_hamiltonian(m, AdiabaticPart{4, 4}));
  CHECK((adS - realize(build_hamiltonian(m, Part::Full))).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(build_hamiltonian(m, AdiabaticPart{5, 4}), ParameterError);
}

TEST_CASE("build_nmr_zz") {
  Eigen::MatrixXd j2(2, 2);
  j2 << 0, 224, 224, 0;
  const auto zz = build_nmr_zz(j2);
  REQUIRE(zz.terms.size() == 1);
  CHECK(zz.terms[0].coeff == doctest::Approx(112 * pi));

  CHECK(build_nmr_zz(Eigen::MatrixXd::Zero(3, 3)).terms.empty());

  const auto three = build_nmr_zz(preset("h1").machine.j_hz);
  REQUIRE(three.terms.size() == 3);
  std::vector<double> c;
  for (const auto& t : three.terms) c.push_back(t.coeff / pi);
  std::sort(c.begin(), c.end());
  CHECK(c[0] == doctest::Approx(-155.5));
  CHECK(c[1] == doctest::Approx(25));
  CHECK(c[2] == doctest::Approx(112));
}

TEST_CASE("realize small cases") {
  const Operator z = realize({1, {{1.0, {{1, Pauli::Z}}}}});
  CHECK(z(0, 0) == Complex(1));
  CHECK(z(1, 1) == Complex(-1));

  const Operator xx = realize({2, {{1.0, {{1, Pauli::X}, {2, Pauli::X}}}}});
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(std::abs(xx(i, j) - Complex(i + j == 3 ? 1 : 0)) < 1e-15);

  const Operator h = realize({1, {{-pi * 100, {{1, Pauli::Z}}}}});
  CHECK(h(0, 0).real() == doctest::Approx(-pi * 100));
  CHECK(h(1, 1).real() == doctest::Approx(pi * 100));
}

TEST_CASE("realize agrees with Kronecker products and is linear") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = random_sum(3, rng);
    const auto b = random_sum(3, rng);
    CHECK((realize(a) - oracle_realize(a)).cwiseAbs().maxCoeff() < 1e-12);
    const Operator lhs = realize(a.scaled(0.7) + b.scaled(-1.3));
    const Operator rhs = 0.7 * realize(a) - 1.3 * realize(b);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("sector_basis") {
  CHECK(sector_basis(3, 2) == std::vector<std::size_t>{3, 5, 6});
  CHECK(sector_basis(3, 0) == std::vector<std::size_t>{0});
  CHECK(sector_basis(4, 2).size() == 6);
  CHECK_THROWS_AS(sector_basis(3, 4), ParameterError);
}

TEST_CASE("pairing Hamiltonian invariants") {
  for (const auto& m : {h1(), h2()}) {
    const Operator h = realize(build_hamiltonian(m, Part::Full));
    const Operator n = pair_number_operator(3);
    CHECK((h * n - n * h).cwiseAbs().maxCoeff() < 1e-10);

    const Operator parts = realize(build_hamiltonian(m, Part::H0)) +
                           realize(build_hamiltonian(m, Part::HXX)) +
                           realize(build_hamiltonian(m, Part::HYY));
    CHECK((h - parts).cwiseAbs().maxCoeff() < 1e-12);

    PairingModel doubled = m;
    doubled.convention_factor *= 2;
    const Operator h2x = realize(build_hamiltonian(doubled, Part::Full));
    CHECK((h2x - 2.0 * h).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("basis_state ordering and validation") {
  const auto s = basis_state("011");
  CHECK(s.size() == 8);
  CHECK(s(3) == Complex(1));
  CHECK(hamming_weight(6) == 2);
  CHECK_THROWS_AS(basis_state("01a"), ParameterError);
}

TEST_CASE("model validation") {
  PairingModel bad{3, {1, 2}, Eigen::MatrixXd::Zero(3, 3), 1.0};
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  Eigen::MatrixXd asym = Eigen::MatrixXd::Zero(3, 3);
  asym(0, 1) = 1;
  PairingModel nonsym{3, {1, 2, 3}, asym, 1.0};
  CHECK_THROWS_AS(nonsym.validate(), ParameterError);
  PairingModel big{kMaxDenseQubits + 1, std::vector<double>(kMaxDenseQubits + 1, 0.0),
                   Eigen::MatrixXd::Zero(kMaxDenseQubits + 1, kMaxDenseQubits + 1), 1.0};
  CHECK_THROWS_AS(realize(build_hamiltonian(big, Part::H0)), CapacityError);
}
