#pragma once

#include "pairsim/hamiltonian.hpp"
#include "pairsim/nmr_machine.hpp"
#include "pairsim/trotter_plan.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace pairsim {

/// Exact exponentials of H0, H_XX and H_YY.
struct IdealRealizer {};

/// Compiled pulse programs simulated on an NMR machine.
struct NmrRealizer {
  Method method = Method::W1;
  SpinSystem machine;
  PulseMode mode = PulseMode::Delta;
};

using Realizer = std::variant<IdealRealizer, NmrRealizer>;

/// (prod_j exp(-i H_j t/k))^k, leftmost factor applied last.
Operator first_order_step(std::span<const Operator> parts, double t, int k);

/// One Trotterized step V(t0) of H_pair.
Operator wbl_step(const PairingModel& model, const TrotterPlan& plan, const Realizer& realizer);

/// Unitary per step together with the physical time it consumes.
struct Stepper {
  Operator unitary;
  double t0 = 0.0;             // simulated time per step, s
  double wall_per_step = 0.0;  // s
  std::vector<std::string> warnings;
};

/// Ideal steps take wall time t0; NMR steps take the program's wall time.
Stepper make_stepper(const PairingModel& model, const TrotterPlan& plan, const Realizer& realizer);

/// Spectral norm ||U - V||.
double trotter_error(const Operator& u_exact, const Operator& v);

struct ConvergenceRow {
  double t0 = 0.0;
  int k = 1;
  double error = 0.0;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;  // t0-major, in input order
  std::optional<double> t0_exponent;  // p in error ~ t0^p at k = k_list.front()
  std::optional<double> k_exponent;   // q in error ~ k^-q at t0 = t0_list.front()
};

/// Errors of wbl_step against exp(-i H_pair t0) over the t0 x k grid.
ConvergenceTable convergence_sweep(const PairingModel& model, std::span<const double> t0_list,
                                   std::span<const int> k_list, const Realizer& realizer,
                                   TrotterOrder order = TrotterOrder::Wbl3);

/// Slope of log(y) against log(x) by unweighted least squares. Points with
/// y below `floor` are dropped; throws ParameterError with fewer than 2 left.
double fit_power_law(std::span<const double> x, std::span<const double> y, double floor = 1e-12);

void write_convergence_csv(std::ostream& os, const ConvergenceTable& table);

}  // namespace pairsim
