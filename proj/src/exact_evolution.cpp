#include "pairsim/exact_evolution.hpp"

#include "pairsim/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace pairsim {

void require_hermitian(const Operator& h) {
  if (h.rows() != h.cols()) throw ContractViolation("operator is not square");
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  const double asym = (h - h.adjoint()).cwiseAbs().maxCoeff();
  if (!(asym <= 1e-10 * scale))
    throw ContractViolation("operator is not Hermitian (max |H - H^dag| = " +
                            std::to_string(asym) + ")");
}

EigenSystem eigendecompose(const Operator& h) {
  require_hermitian(h);
  // Symmetrize so the solver sees an exactly Hermitian input.
  const Operator sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<Operator> solver(sym);
  if (solver.info() != Eigen::Success) throw ContractViolation("eigensolver failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

EigenSystem sector_eigensystem(const PairingModel& model, int pairs) {
  const Operator h = realize(build_hamiltonian(model, Part::Full));
  const auto basis = sector_basis(model.n, pairs);
  const EigenSystem local = eigendecompose(restrict_to(h, basis));
  EigenSystem out;
  out.values = local.values;
  out.vectors = Operator::Zero(h.rows(), static_cast<Eigen::Index>(basis.size()));
  for (std::size_t r = 0; r < basis.size(); ++r)
    out.vectors.row(static_cast<Eigen::Index>(basis[r])) = local.vectors.row(r);
  return out;
}

double sector_gap(const PairingModel& model, int pairs, int level) {
  const auto basis = sector_basis(model.n, pairs);
  if (level < 0 || level >= static_cast<int>(basis.size()))
    throw ParameterError("gap level " + std::to_string(level) + " outside sector of dimension " +
                         std::to_string(basis.size()));
  const Operator h = realize(build_hamiltonian(model, Part::Full));
  const EigenSystem eig = eigendecompose(restrict_to(h, basis));
  return eig.values(level) - eig.values(0);
}

Operator propagator(const EigenSystem& eig, double t) {
  const Eigen::VectorXcd phases =
      (eig.values.cast<Complex>() * Complex(0.0, -t)).array().exp().matrix();
  return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

Operator propagator(const Operator& h, double t) { return propagator(eigendecompose(h), t); }

StateVector evolve(const StateVector& state, const Operator& u) {
  if (u.cols() != state.size() || u.rows() != u.cols())
    throw ParameterError("state and operator dimensions differ");
  return u * state;
}

ReachableGap reachable_gap(const PairingModel& model, int pairs, const StateVector& prepared,
                           double population_floor) {
  if (!(population_floor > 0.0 && population_floor < 1.0))
    throw ParameterError("population floor must lie in (0, 1)");
  const EigenSystem eig = sector_eigensystem(model, pairs);
  if (prepared.size() != eig.vectors.rows()) throw ParameterError("state dimension mismatch");
  if (std::abs(prepared.norm() - 1.0) > 1e-8) throw ParameterError("prepared state not normalized");

  const Eigen::VectorXd pops = (eig.vectors.adjoint() * prepared).cwiseAbs2();
  const auto d = eig.values.size();
  const double scale = std::max(1.0, eig.values.cwiseAbs().maxCoeff());
  auto same_level = [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(eig.values(a) - eig.values(b)) <= 1e-8 * scale;
  };

  // Skip everything degenerate with the ground level.
  Eigen::Index k = 1;
  while (k < d && same_level(k, 0)) ++k;
  while (k < d) {
    Eigen::Index end = k;
    double pop = 0.0;
    while (end < d && same_level(end, k)) pop += pops(end++);
    if (pop >= population_floor)
      return {static_cast<int>(k), eig.values(k) - eig.values(0), pop};
    k = end;
  }
  throw NoReachableState("no excited sector level carries population >= " +
                         std::to_string(population_floor));
}

double fidelity(const StateVector& a, const StateVector& b) { return std::norm(a.dot(b)); }

double phase_insensitive_distance(const Operator& a, const Operator& b) {
  const Complex overlap = (b.adjoint() * a).trace();
  const Complex phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : Complex(1.0);
  return (a - phase * b).cwiseAbs().maxCoeff();
}

}  // namespace pairsim
