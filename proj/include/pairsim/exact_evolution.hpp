#pragma once

#include "pairsim/hamiltonian.hpp"

#include <Eigen/Dense>

namespace pairsim {

struct EigenSystem {
  Eigen::VectorXd values;  // ascending, rad/s
  Operator vectors;        // orthonormal columns
};

/// Throws ContractViolation unless H is Hermitian to ~1e-10 relative.
void require_hermitian(const Operator& h);

EigenSystem eigendecompose(const Operator& h);

/// Gap E_level - E_ground of H_pair restricted to the given pair sector.
/// level = 1 is the first excited state.
double sector_gap(const PairingModel& model, int pairs, int level = 1);

/// Sector eigensystem of H_pair; vectors are embedded back into the full space.
EigenSystem sector_eigensystem(const PairingModel& model, int pairs);

/// exp(-i H t).
Operator propagator(const Operator& h, double t);

/// exp(-i H t) from a precomputed eigensystem.
Operator propagator(const EigenSystem& eig, double t);

StateVector evolve(const StateVector& state, const Operator& u);

struct ReachableGap {
  int level = 0;          // sector eigenindex k >= 1
  double gap = 0.0;       // E_k - E_G, rad/s
  double population = 0;  // |<E_k|psi>|^2 (summed over a degenerate level)
};

inline constexpr double kDefaultPopulationFloor = 0.02;

/// Lowest excited sector level whose population in `prepared` reaches the
/// floor. Levels within 1e-8 relative of each other are merged.
ReachableGap reachable_gap(const PairingModel& model, int pairs, const StateVector& prepared,
                           double population_floor = kDefaultPopulationFloor);

/// |<a|b>|^2 for normalized vectors.
double fidelity(const StateVector& a, const StateVector& b);

/// Max-entry distance between two operators modulo a global phase:
/// max |A - e^{i phi} B| with phi fitted from tr(B^dag A).
double phase_insensitive_distance(const Operator& a, const Operator& b);

}  // namespace pairsim
