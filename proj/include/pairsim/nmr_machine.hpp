#pragma once

#include "pairsim/hamiltonian.hpp"
#include "pairsim/trotter_plan.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace pairsim {

/// Liquid-state NMR register: always-on scalar couplings plus RF control.
struct SpinSystem {
  int n = 0;
  RealMatrix j_hz;         // symmetric, zero diagonal
  double t_pi = 20e-6;     // duration of a pi pulse, s
  std::vector<double> t2;  // per-spin dephasing time, s

  void validate() const;
};

struct Delay {
  double duration = 0.0;  // s
};

/// R_phi(theta) = exp[+i (theta/2)(X cos phi + Y sin phi)] on every target spin.
/// An `ideal` pulse is always applied instantaneously and takes no wall time.
struct RfPulse {
  std::vector<int> targets;  // 1-based spins
  double phase = 0.0;        // rad
  double angle = 0.0;        // rad, in (-2pi, 2pi]
  bool ideal = false;
};

using PulseEvent = std::variant<Delay, RfPulse>;

struct PulseProgram {
  std::vector<PulseEvent> events;
  double t_pi = 0.0;  // pi-pulse length used for RF durations
  std::vector<std::string> warnings;

  double rf_duration(const RfPulse& rf) const;
  double wall_time() const;
  std::size_t rf_count() const;
  PulseProgram& append(const PulseProgram& other);
};

enum class Method { W1, W2 };
enum class PulseMode { Delta, Finite };
enum class CouplingAxis { XX, YY };

using CouplingPair = std::pair<int, int>;

/// U0(t) = exp(+i sum_m nu_m t Z_m / 2) as per-spin composite z rotations.
PulseProgram compile_u0(const PairingModel& model, double t, double t_pi = 0.0);

/// U_XX(t) or U_YY(t) from the scalar coupling sandwiched between pi/2
/// rotations. Spins outside every target pair are decoupled with a pi echo.
/// Empty `targets` selects every pair with nonzero V.
PulseProgram compile_uxxyy(const PairingModel& model, CouplingAxis axis, double t,
                           const SpinSystem& machine, std::vector<CouplingPair> targets = {});

/// Shortens each delay by (t_pi / 2pi)(theta_1 + theta_2) of its flanking
/// pulses, clamping at zero with a warning.
PulseProgram apply_w2_compensation(PulseProgram program);

/// [U0(tau/2) UXX(tau/2) UYY(tau) UXX(tau/2) U0(tau/2)]^k with tau = t0/k.
PulseProgram compile_wbl_step(const PairingModel& model, const TrotterPlan& plan, Method method,
                              const SpinSystem& machine);

/// Propagator of a whole program under H_nmr(t).
Operator program_unitary(const PulseProgram& program, const SpinSystem& machine, PulseMode mode);

struct SimulationResult {
  StateVector state;
  double wall_time = 0.0;
};

SimulationResult simulate_program(const PulseProgram& program, const SpinSystem& machine,
                                  const StateVector& init, PulseMode mode);

/// exp(-wall_time / T2) of the observed spin.
double damping_factor(double wall_time, const SpinSystem& machine, int observed_spin);

/// exp[+i (theta/2)(X cos phi + Y sin phi)] on each target spin.
Operator ideal_rotation(int n, const RfPulse& rf);

void write_program(std::ostream& os, const PulseProgram& program);
std::string to_text(const PulseProgram& program);
/// Parses the line format; throws LoadError on malformed input or WALL mismatch.
PulseProgram read_program(std::istream& is, std::optional<double> t_pi = std::nullopt);
PulseProgram parse_program(const std::string& text, std::optional<double> t_pi = std::nullopt);

}  // namespace pairsim
