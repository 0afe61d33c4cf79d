#include "pairsim/hamiltonian.hpp"

#include "pairsim/errors.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <string>

namespace pairsim {
namespace {

bool all_finite(const RealMatrix& m) { return m.allFinite(); }

bool is_symmetric(const RealMatrix& m) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale;
}

void check_qubits(int n) {
  if (n < 1) throw ParameterError("qubit count must be >= 1");
  if (n > kMaxDenseQubits)
    throw CapacityError("dense realization limited to " + std::to_string(kMaxDenseQubits) +
                        " qubits, got " + std::to_string(n));
}

}  // namespace

void PairingModel::validate() const {
  if (n < 1) throw ParameterError("pairing model needs n >= 1");
  if (static_cast<int>(nu.size()) != n)
    throw ParameterError("nu has " + std::to_string(nu.size()) + " entries, expected " +
                         std::to_string(n));
  if (coupling.rows() != n || coupling.cols() != n)
    throw ParameterError("coupling matrix must be n x n");
  for (double x : nu)
    if (!std::isfinite(x)) throw ParameterError("nu contains a non-finite entry");
  if (!all_finite(coupling)) throw ParameterError("coupling contains a non-finite entry");
  if (!is_symmetric(coupling)) throw ParameterError("coupling matrix is not symmetric");
  if (!(convention_factor > 0.0) || !std::isfinite(convention_factor))
    throw ParameterError("convention_factor must be positive");
}

PairingModel pairing_to_qubit(const FermionicPairingInput& input) {
  if (static_cast<int>(input.epsilon.size()) != input.n || input.coupling.rows() != input.n ||
      input.coupling.cols() != input.n)
    throw ParameterError("epsilon and V dimensions disagree with n");
  if (!all_finite(input.coupling) || !is_symmetric(input.coupling))
    throw ParameterError("fermionic V must be finite and symmetric");

  PairingModel model;
  model.n = input.n;
  model.nu.resize(input.n);
  for (int m = 0; m < input.n; ++m) model.nu[m] = input.epsilon[m] + input.coupling(m, m);
  model.coupling = input.coupling;
  model.coupling.diagonal().setZero();
  model.convention_factor = 1.0;
  model.validate();
  return model;
}

PauliSum& PauliSum::operator+=(const PauliSum& other) {
  if (other.n != n) throw ParameterError("adding Pauli sums over different qubit counts");
  terms.insert(terms.end(), other.terms.begin(), other.terms.end());
  return *this;
}

PauliSum PauliSum::scaled(double factor) const {
  PauliSum out = *this;
  for (auto& t : out.terms) t.coeff *= factor;
  return out;
}

PauliSum operator+(PauliSum a, const PauliSum& b) {
  a += b;
  return a;
}

namespace {

PauliSum onsite_part(const PairingModel& model) {
  PauliSum h{model.n, {}};
  for (int m = 1; m <= model.n; ++m)
    h.terms.push_back({-0.5 * model.nu[m - 1] * model.convention_factor, {{m, Pauli::Z}}});
  return h;
}

PauliSum hopping_part(const PairingModel& model, Pauli axis) {
  PauliSum h{model.n, {}};
  for (int m = 1; m <= model.n; ++m)
    for (int l = m + 1; l <= model.n; ++l) {
      const double v = model.v(m, l);
      if (v == 0.0) continue;
      h.terms.push_back({0.5 * v * model.convention_factor, {{m, axis}, {l, axis}}});
    }
  return h;
}

}  // namespace

PauliSum build_hamiltonian(const PairingModel& model, HamiltonianPart part) {
  model.validate();
  if (const auto* p = std::get_if<Part>(&part)) {
    switch (*p) {
      case Part::H0:
        return onsite_part(model);
      case Part::HXX:
        return hopping_part(model, Pauli::X);
      case Part::HYY:
        return hopping_part(model, Pauli::Y);
      case Part::Full:
        return onsite_part(model) + hopping_part(model, Pauli::X) + hopping_part(model, Pauli::Y);
    }
  }
  const auto& ad = std::get<AdiabaticPart>(part);
  if (ad.S == 0) throw ParameterError("adiabatic schedule needs S > 0");
  if (ad.S < 0 || ad.s < 0 || ad.s > ad.S)
    throw ParameterError("adiabatic step s must satisfy 0 <= s <= S");
  const double lambda = static_cast<double>(ad.s) / ad.S;
  PauliSum h = onsite_part(model).scaled(1.0 - lambda);
  if (lambda > 0.0) h += build_hamiltonian(model, Part::Full).scaled(lambda);
  return h;
}

PauliSum build_nmr_zz(const RealMatrix& j_hz) {
  const int n = static_cast<int>(j_hz.rows());
  if (j_hz.cols() != n) throw ParameterError("J matrix must be square");
  if (!all_finite(j_hz) || !is_symmetric(j_hz)) throw ParameterError("J matrix must be symmetric");
  for (int i = 0; i < n; ++i)
    if (j_hz(i, i) != 0.0) throw ParameterError("J matrix must have zero diagonal");
  PauliSum h{n, {}};
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) {
      const double jij = j_hz(i - 1, j - 1);
      if (jij == 0.0) continue;
      h.terms.push_back({0.5 * std::numbers::pi * jij, {{i, Pauli::Z}, {j, Pauli::Z}}});
    }
  return h;
}

Operator realize(const PauliSum& op) {
  check_qubits(op.n);
  const std::size_t dim = std::size_t{1} << op.n;
  Operator out = Operator::Zero(dim, dim);
  const Complex i{0.0, 1.0};
  for (const auto& term : op.terms) {
    std::size_t flip = 0;
    for (const auto& [q, p] : term.factors) {
      if (q < 1 || q > op.n) throw ParameterError("Pauli factor on qubit outside 1..n");
      if (p != Pauli::Z) flip |= std::size_t{1} << (op.n - q);
    }
    // A Pauli string maps |b> to phase(b) |b ^ flip>.
    for (std::size_t b = 0; b < dim; ++b) {
      Complex phase = term.coeff;
      for (const auto& [q, p] : term.factors) {
        const bool one = (b >> (op.n - q)) & 1u;
        if (p == Pauli::Z && one) phase = -phase;
        if (p == Pauli::Y) phase *= one ? -i : i;
      }
      out(b ^ flip, b) += phase;
    }
  }
  return out;
}

int hamming_weight(std::size_t index) { return std::popcount(index); }

std::vector<std::size_t> sector_basis(int n, int pairs) {
  check_qubits(n);
  if (pairs < 0 || pairs > n)
    throw ParameterError("pair count " + std::to_string(pairs) + " outside 0..n");
  std::vector<std::size_t> out;
  for (std::size_t b = 0; b < (std::size_t{1} << n); ++b)
    if (hamming_weight(b) == pairs) out.push_back(b);
  return out;
}

Operator pair_number_operator(int n) {
  check_qubits(n);
  const std::size_t dim = std::size_t{1} << n;
  Operator out = Operator::Zero(dim, dim);
  for (std::size_t b = 0; b < dim; ++b) out(b, b) = static_cast<double>(hamming_weight(b));
  return out;
}

Operator restrict_to(const Operator& op, std::span<const std::size_t> basis) {
  const auto d = static_cast<Eigen::Index>(basis.size());
  Operator out(d, d);
  for (Eigen::Index r = 0; r < d; ++r)
    for (Eigen::Index c = 0; c < d; ++c) out(r, c) = op(basis[r], basis[c]);
  return out;
}

StateVector basis_state(std::string_view bits) {
  const int n = static_cast<int>(bits.size());
  check_qubits(n);
  std::size_t index = 0;
  for (char ch : bits) {
    if (ch != '0' && ch != '1') throw ParameterError("basis state must be a 0/1 string");
    index = (index << 1) | static_cast<std::size_t>(ch == '1');
  }
  StateVector psi = StateVector::Zero(std::size_t{1} << n);
  psi(index) = 1.0;
  return psi;
}

}  // namespace pairsim
