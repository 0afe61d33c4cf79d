#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <map>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace pairsim {

using Complex = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;

// Conventions: hbar = 1, energies in rad/s, Z|0> = +|0>, qubit 1 is the most
// significant bit of a basis index (|011> is index 3 for n = 3).
inline constexpr int kMaxDenseQubits = 12;

/// Qubit form of a pairing model: H = sum_m (nu_m/2)(-Z_m)
///   + sum_{m<l} (V_ml/2)(X_m X_l + Y_m Y_l), all scaled by convention_factor.
struct PairingModel {
  int n = 0;
  std::vector<double> nu;  // on-site energies, rad/s
  RealMatrix coupling;     // V_ml, rad/s; symmetric, diagonal unused
  double convention_factor = 1.0;

  void validate() const;
  double v(int m, int l) const { return coupling(m - 1, l - 1); }
};

/// Fermionic parameters (epsilon_m, V_ml including V_mm).
struct FermionicPairingInput {
  int n = 0;
  std::vector<double> epsilon;
  RealMatrix coupling;
};

PairingModel pairing_to_qubit(const FermionicPairingInput& input);

enum class Pauli : char { X = 'X', Y = 'Y', Z = 'Z' };

struct PauliTerm {
  double coeff = 0.0;
  std::map<int, Pauli> factors;  // 1-based qubit -> Pauli
};

struct PauliSum {
  int n = 0;
  std::vector<PauliTerm> terms;

  PauliSum& operator+=(const PauliSum& other);
  PauliSum scaled(double factor) const;
};

PauliSum operator+(PauliSum a, const PauliSum& b);

enum class Part { H0, HXX, HYY, Full };

/// H_ad(s) = (1 - s/S) H0 + (s/S) Full.
struct AdiabaticPart {
  int s = 0;
  int S = 1;
};

using HamiltonianPart = std::variant<Part, AdiabaticPart>;

PauliSum build_hamiltonian(const PairingModel& model, HamiltonianPart part);

/// Scalar coupling sum_{i<j} (pi/2) J_ij Z_i Z_j with J in Hz; result in rad/s.
PauliSum build_nmr_zz(const RealMatrix& j_hz);

/// Dense 2^n x 2^n matrix of a Pauli sum.
Operator realize(const PauliSum& op);

/// Basis indices of Hamming weight `pairs`, ascending.
std::vector<std::size_t> sector_basis(int n, int pairs);

/// N = sum_m (I - Z_m)/2.
Operator pair_number_operator(int n);

/// Principal submatrix on the given basis indices.
Operator restrict_to(const Operator& op, std::span<const std::size_t> basis);

/// Computational basis state from a bitstring like "011" (qubit 1 first).
StateVector basis_state(std::string_view bits);

int hamming_weight(std::size_t index);

}  // namespace pairsim
