#include "pairsim/nmr_machine.hpp"

#include "pairsim/errors.hpp"
#include "pairsim/exact_evolution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

namespace pairsim {
namespace {

constexpr double kPi = std::numbers::pi;

// Rotation angles only matter modulo 2pi up to a sign, which is a global phase.
double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * kPi);
  return a <= -kPi ? a + 2.0 * kPi : a;
}

std::vector<int> all_spins(int n) {
  std::vector<int> v(n);
  for (int i = 0; i < n; ++i) v[i] = i + 1;
  return v;
}

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void SpinSystem::validate() const {
  if (n < 1) throw ParameterError("spin system needs n >= 1");
  if (j_hz.rows() != n || j_hz.cols() != n) throw ParameterError("J must be n x n");
  build_nmr_zz(j_hz);  // symmetry and zero-diagonal checks
  if (!(t_pi >= 0.0) || !std::isfinite(t_pi)) throw ParameterError("t_pi must be >= 0");
  if (static_cast<int>(t2.size()) != n) throw ParameterError("t2 needs one entry per spin");
  for (double x : t2)
    if (!(x > 0.0)) throw ParameterError("t2 entries must be positive");
}

double PulseProgram::rf_duration(const RfPulse& rf) const {
  return rf.ideal ? 0.0 : t_pi * std::abs(rf.angle) / kPi;
}

double PulseProgram::wall_time() const {
  double total = 0.0;
  for (const auto& ev : events) {
    if (const auto* d = std::get_if<Delay>(&ev))
      total += d->duration;
    else
      total += rf_duration(std::get<RfPulse>(ev));
  }
  return total;
}

std::size_t PulseProgram::rf_count() const {
  return static_cast<std::size_t>(std::count_if(events.begin(), events.end(), [](const auto& ev) {
    return std::holds_alternative<RfPulse>(ev);
  }));
}

PulseProgram& PulseProgram::append(const PulseProgram& other) {
  events.insert(events.end(), other.events.begin(), other.events.end());
  warnings.insert(warnings.end(), other.warnings.begin(), other.warnings.end());
  return *this;
}

PulseProgram compile_u0(const PairingModel& model, double t, double t_pi) {
  model.validate();
  if (!(t >= 0.0)) throw ParameterError("U0 duration must be >= 0");
  PulseProgram prog;
  prog.t_pi = t_pi;
  const auto spins = all_spins(model.n);
  // Y(-pi/2) X(alpha) Y(pi/2) is a z rotation by alpha.
  prog.events.push_back(RfPulse{spins, -kPi / 2, kPi / 2});
  for (int m = 1; m <= model.n; ++m) {
    const double alpha = wrap_angle(model.nu[m - 1] * model.convention_factor * t);
    prog.events.push_back(RfPulse{{m}, 0.0, alpha});
  }
  prog.events.push_back(RfPulse{spins, kPi / 2, kPi / 2});
  return prog;
}

PulseProgram compile_uxxyy(const PairingModel& model, CouplingAxis axis, double t,
                           const SpinSystem& machine, std::vector<CouplingPair> targets) {
  model.validate();
  machine.validate();
  if (machine.n != model.n) throw ParameterError("machine and model spin counts differ");
  if (!(t >= 0.0)) throw ParameterError("coupling duration must be >= 0");

  if (targets.empty()) {
    for (int m = 1; m <= model.n; ++m)
      for (int l = m + 1; l <= model.n; ++l)
        if (model.v(m, l) != 0.0) targets.emplace_back(m, l);
  }
  PulseProgram prog;
  prog.t_pi = machine.t_pi;
  if (targets.empty() || t == 0.0) return prog;

  // Every targeted pair must accumulate its angle V_ml t during one shared delay:
  // (pi/2) J_ml d = f V_ml t / 2  =>  d = f V_ml t / (pi J_ml).
  std::set<int> active;
  std::set<CouplingPair> wanted;
  double delay = -1.0;
  for (auto [m, l] : targets) {
    if (m > l) std::swap(m, l);
    if (m < 1 || l > model.n || m == l) throw ParameterError("invalid coupling pair");
    const double v = model.v(m, l) * model.convention_factor;
    if (v == 0.0) throw ParameterError("target pair has zero V");
    const double j = machine.j_hz(m - 1, l - 1);
    if (j == 0.0)
      throw UnrealizableCoupling("spins " + std::to_string(m) + "," + std::to_string(l) +
                                 " have no scalar coupling");
    const double d = v * t / (kPi * j);
    if (d < 0.0) throw CompileError("required coupling delay is negative");
    if (delay < 0.0)
      delay = d;
    else if (std::abs(d - delay) > 1e-9 * std::max(d, delay))
      throw UnrealizableCoupling("target pairs need different coupling delays");
    active.insert(m);
    active.insert(l);
    wanted.insert({m, l});
  }

  std::vector<int> spectators;
  for (int s = 1; s <= model.n; ++s) {
    if (active.contains(s)) continue;
    bool coupled = false;
    for (int a : active) coupled = coupled || machine.j_hz(a - 1, s - 1) != 0.0;
    if (coupled) spectators.push_back(s);
  }
  for (int a : active)
    for (int b : active)
      if (a < b && !wanted.contains({a, b}) && machine.j_hz(a - 1, b - 1) != 0.0)
        throw UnrealizableCoupling("untargeted coupled pair inside the rotated spin set");
  for (std::size_t i = 0; i < spectators.size(); ++i)
    for (std::size_t j = i + 1; j < spectators.size(); ++j)
      if (machine.j_hz(spectators[i] - 1, spectators[j] - 1) != 0.0)
        throw UnrealizableCoupling("coupled spectator spins cannot be refocused together");

  const std::vector<int> rotated(active.begin(), active.end());
  // Basis change P with P Z P^dag = X (XX) or Y (YY); P^dag is applied first.
  const double open_phase = axis == CouplingAxis::XX ? -kPi / 2 : kPi;
  const double close_phase = axis == CouplingAxis::XX ? kPi / 2 : 0.0;
  prog.events.push_back(RfPulse{rotated, open_phase, kPi / 2});
  if (spectators.empty()) {
    prog.events.push_back(Delay{delay});
    prog.events.push_back(RfPulse{rotated, close_phase, kPi / 2});
  } else {
    prog.events.push_back(Delay{delay / 2});
    prog.events.push_back(RfPulse{spectators, 0.0, kPi});
    prog.events.push_back(Delay{delay / 2});
    prog.events.push_back(RfPulse{rotated, close_phase, kPi / 2});
    // R_pi(pi) R_0(pi) = I, so the spectator ends where it started.
    prog.events.push_back(RfPulse{spectators, kPi, kPi});
  }
  return prog;
}

PulseProgram apply_w2_compensation(PulseProgram program) {
  auto flank_angle = [&](std::size_t idx) {
    const auto* rf = std::get_if<RfPulse>(&program.events[idx]);
    return rf && !rf->ideal ? std::abs(rf->angle) : 0.0;
  };
  for (std::size_t i = 0; i < program.events.size(); ++i) {
    auto* d = std::get_if<Delay>(&program.events[i]);
    if (!d || d->duration == 0.0) continue;
    const double before = i > 0 ? flank_angle(i - 1) : 0.0;
    const double after = i + 1 < program.events.size() ? flank_angle(i + 1) : 0.0;
    const double alpha = program.t_pi / (2.0 * kPi) * (before + after);
    if (alpha > d->duration) {
      program.warnings.push_back("W2 clamp: delay " + fmt_double(d->duration) +
                                 " s shorter than alpha " + fmt_double(alpha) + " s");
      d->duration = 0.0;
    } else {
      d->duration -= alpha;
    }
  }
  return program;
}

PulseProgram compile_wbl_step(const PairingModel& model, const TrotterPlan& plan, Method method,
                              const SpinSystem& machine) {
  plan.validate();
  const double tau = plan.t0 / plan.k;
  PulseProgram rep;
  rep.t_pi = machine.t_pi;
  if (plan.order == TrotterOrder::Wbl3) {
    rep.append(compile_u0(model, tau / 2, machine.t_pi));
    rep.append(compile_uxxyy(model, CouplingAxis::XX, tau / 2, machine));
    rep.append(compile_uxxyy(model, CouplingAxis::YY, tau, machine));
    rep.append(compile_uxxyy(model, CouplingAxis::XX, tau / 2, machine));
    rep.append(compile_u0(model, tau / 2, machine.t_pi));
  } else {
    // Operator order U0 UXX UYY, so UYY acts first in time.
    rep.append(compile_uxxyy(model, CouplingAxis::YY, tau, machine));
    rep.append(compile_uxxyy(model, CouplingAxis::XX, tau, machine));
    rep.append(compile_u0(model, tau, machine.t_pi));
  }
  PulseProgram prog;
  prog.t_pi = machine.t_pi;
  for (int r = 0; r < plan.k; ++r) prog.append(rep);
  return method == Method::W2 ? apply_w2_compensation(std::move(prog)) : prog;
}

Operator ideal_rotation(int n, const RfPulse& rf) {
  const double c = std::cos(rf.angle / 2), s = std::sin(rf.angle / 2);
  const Complex off_up = Complex(0.0, s) * std::polar(1.0, -rf.phase);   // <0|R|1>
  const Complex off_down = Complex(0.0, s) * std::polar(1.0, rf.phase);  // <1|R|0>
  const std::size_t dim = std::size_t{1} << n;
  Operator u = Operator::Identity(dim, dim);
  for (int q : rf.targets) {
    if (q < 1 || q > n) throw ParameterError("RF target outside the spin register");
    const std::size_t bit = std::size_t{1} << (n - q);
    Operator next = Operator::Zero(dim, dim);
    for (std::size_t b = 0; b < dim; ++b) {
      const bool one = b & bit;
      next(b, b) = c;
      next(b ^ bit, b) = one ? off_up : off_down;
    }
    u = next * u;
  }
  return u;
}

namespace {

Operator rf_hamiltonian(int n, const RfPulse& rf, double omega1) {
  PauliSum h{n, {}};
  for (int q : rf.targets) {
    h.terms.push_back({0.5 * omega1 * std::cos(rf.phase), {{q, Pauli::X}}});
    h.terms.push_back({0.5 * omega1 * std::sin(rf.phase), {{q, Pauli::Y}}});
  }
  return realize(h);
}

}  // namespace

Operator program_unitary(const PulseProgram& program, const SpinSystem& machine, PulseMode mode) {
  machine.validate();
  const int n = machine.n;
  const Operator hzz = realize(build_nmr_zz(machine.j_hz));
  const Eigen::VectorXd zz_diag = hzz.diagonal().real();
  const auto dim = hzz.rows();
  Operator u = Operator::Identity(dim, dim);
  for (const auto& ev : program.events) {
    if (const auto* d = std::get_if<Delay>(&ev)) {
      const Eigen::VectorXcd ph =
          (zz_diag.cast<Complex>() * Complex(0.0, -d->duration)).array().exp().matrix();
      u = ph.asDiagonal() * u;
      continue;
    }
    const auto& rf = std::get<RfPulse>(ev);
    if (rf.angle == 0.0) continue;
    // A zero-width finite pulse is the instantaneous limit.
    if (mode == PulseMode::Delta || rf.ideal || program.rf_duration(rf) == 0.0) {
      u = ideal_rotation(n, rf) * u;
      continue;
    }
    // Rectangular on-resonance pulse, amplitude calibrated so J = 0 gives R_phi(theta).
    const double duration = program.rf_duration(rf);
    const double omega1 = -rf.angle / duration;
    u = propagator(rf_hamiltonian(n, rf, omega1) + hzz, duration) * u;
  }
  return u;
}

SimulationResult simulate_program(const PulseProgram& program, const SpinSystem& machine,
                                  const StateVector& init, PulseMode mode) {
  const Operator u = program_unitary(program, machine, mode);
  return {evolve(init, u), program.wall_time()};
}

double damping_factor(double wall_time, const SpinSystem& machine, int observed_spin) {
  if (!(wall_time >= 0.0)) throw ParameterError("wall time must be >= 0");
  if (observed_spin < 1 || observed_spin > static_cast<int>(machine.t2.size()))
    throw ParameterError("observed spin outside the register");
  return std::exp(-wall_time / machine.t2[observed_spin - 1]);
}

void write_program(std::ostream& os, const PulseProgram& program) {
  os << "TPI " << fmt_double(program.t_pi) << '\n';
  for (const auto& ev : program.events) {
    if (const auto* d = std::get_if<Delay>(&ev)) {
      os << "DELAY " << fmt_double(d->duration) << '\n';
      continue;
    }
    const auto& rf = std::get<RfPulse>(ev);
    os << "RF ";
    for (std::size_t i = 0; i < rf.targets.size(); ++i) os << (i ? "," : "") << rf.targets[i];
    os << ' ' << fmt_double(rf.phase) << ' ' << fmt_double(rf.angle);
    if (rf.ideal) os << " IDEAL";
    os << '\n';
  }
  os << "WALL " << fmt_double(program.wall_time()) << '\n';
}

std::string to_text(const PulseProgram& program) {
  std::ostringstream os;
  write_program(os, program);
  return os.str();
}

PulseProgram read_program(std::istream& is, std::optional<double> t_pi) {
  PulseProgram prog;
  prog.t_pi = t_pi.value_or(0.0);
  std::optional<double> wall;
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw LoadError("pulse program line " + std::to_string(lineno) + ": " + msg);
  };
  auto number = [&](std::istringstream& ls) {
    std::string tok;
    if (!(ls >> tok)) fail("missing number");
    try {
      std::size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used != tok.size()) fail("bad number '" + tok + "'");
      return v;
    } catch (const std::logic_error&) {
      fail("bad number '" + tok + "'");
    }
    return 0.0;
  };
  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string kind;
    if (!(ls >> kind) || kind.front() == '#') continue;
    if (wall) fail("record after WALL");
    if (kind == "TPI") {
      prog.t_pi = number(ls);
      if (prog.t_pi < 0.0) fail("negative t_pi");
    } else if (kind == "DELAY") {
      const double d = number(ls);
      if (d < 0.0) fail("negative delay");
      prog.events.push_back(Delay{d});
    } else if (kind == "RF") {
      std::string spins;
      if (!(ls >> spins)) fail("missing spin list");
      RfPulse rf;
      std::istringstream ss(spins);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        try {
          rf.targets.push_back(std::stoi(tok));
        } catch (const std::logic_error&) {
          fail("bad spin index '" + tok + "'");
        }
      }
      if (rf.targets.empty()) fail("empty spin list");
      rf.phase = number(ls);
      rf.angle = number(ls);
      if (!(rf.angle > -2.0 * kPi && rf.angle <= 2.0 * kPi)) fail("angle outside (-2pi, 2pi]");
      std::string flag;
      if (ls >> flag) {
        if (flag != "IDEAL") fail("unknown RF flag '" + flag + "'");
        rf.ideal = true;
      }
      prog.events.push_back(rf);
    } else if (kind == "WALL") {
      wall = number(ls);
    } else {
      fail("unknown record '" + kind + "'");
    }
  }
  if (!wall) throw LoadError("pulse program lacks a trailing WALL record");
  if (std::abs(*wall - prog.wall_time()) > 1e-9)
    throw LoadError("WALL " + fmt_double(*wall) + " s disagrees with recomputed " +
                    fmt_double(prog.wall_time()) + " s");
  return prog;
}

PulseProgram parse_program(const std::string& text, std::optional<double> t_pi) {
  std::istringstream is(text);
  return read_program(is, t_pi);
}

}  // namespace pairsim
