#include "pairsim/trotter.hpp"

#include "pairsim/errors.hpp"
#include "pairsim/exact_evolution.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <ostream>

namespace pairsim {

void TrotterPlan::validate() const {
  if (!(t0 > 0.0) || !std::isfinite(t0)) throw ParameterError("plan.t0 must be positive");
  if (k < 1) throw ParameterError("plan.k must be >= 1");
}

Operator first_order_step(std::span<const Operator> parts, double t, int k) {
  if (parts.empty()) throw ParameterError("first-order Trotter step needs at least one part");
  if (k < 1) throw ParameterError("k must be >= 1");
  const auto dim = parts.front().rows();
  Operator slice = Operator::Identity(dim, dim);
  for (const auto& h : parts) {
    if (h.rows() != dim) throw ParameterError("Trotter parts differ in dimension");
    slice = slice * propagator(h, t / k);
  }
  Operator out = Operator::Identity(dim, dim);
  for (int r = 0; r < k; ++r) out = slice * out;
  return out;
}

namespace {

Operator ideal_step(const PairingModel& model, const TrotterPlan& plan) {
  const EigenSystem h0 = eigendecompose(realize(build_hamiltonian(model, Part::H0)));
  const EigenSystem hxx = eigendecompose(realize(build_hamiltonian(model, Part::HXX)));
  const EigenSystem hyy = eigendecompose(realize(build_hamiltonian(model, Part::HYY)));
  const double tau = plan.t0 / plan.k;
  Operator slice;
  if (plan.order == TrotterOrder::Wbl3) {
    const Operator u0 = propagator(h0, tau / 2);
    const Operator uxx = propagator(hxx, tau / 2);
    slice = u0 * uxx * propagator(hyy, tau) * uxx * u0;
  } else {
    slice = propagator(h0, tau) * propagator(hxx, tau) * propagator(hyy, tau);
  }
  Operator out = Operator::Identity(slice.rows(), slice.cols());
  for (int r = 0; r < plan.k; ++r) out = slice * out;
  return out;
}

}  // namespace

Stepper make_stepper(const PairingModel& model, const TrotterPlan& plan, const Realizer& realizer) {
  plan.validate();
  model.validate();
  if (std::holds_alternative<IdealRealizer>(realizer))
    return {ideal_step(model, plan), plan.t0, plan.t0, {}};
  const auto& nmr = std::get<NmrRealizer>(realizer);
  const PulseProgram prog = compile_wbl_step(model, plan, nmr.method, nmr.machine);
  return {program_unitary(prog, nmr.machine, nmr.mode), plan.t0, prog.wall_time(), prog.warnings};
}

Operator wbl_step(const PairingModel& model, const TrotterPlan& plan, const Realizer& realizer) {
  return make_stepper(model, plan, realizer).unitary;
}

double trotter_error(const Operator& u_exact, const Operator& v) {
  if (u_exact.rows() != v.rows() || u_exact.cols() != v.cols())
    throw ParameterError("trotter_error dimension mismatch");
  Eigen::JacobiSVD<Operator> svd(u_exact - v);
  return svd.singularValues()(0);
}

ConvergenceTable convergence_sweep(const PairingModel& model, std::span<const double> t0_list,
                                   std::span<const int> k_list, const Realizer& realizer,
                                   TrotterOrder order) {
  if (t0_list.empty() || k_list.empty()) throw ParameterError("convergence sweep needs values");
  if (t0_list.size() < 2 && k_list.size() < 2)
    throw ParameterError("convergence sweep needs at least 2 points along one axis");
  for (double t : t0_list)
    if (!(t > 0.0)) throw ParameterError("t0 values must be positive");
  for (int k : k_list)
    if (k < 1) throw ParameterError("k values must be >= 1");

  const EigenSystem full = eigendecompose(realize(build_hamiltonian(model, Part::Full)));
  const auto nk = static_cast<long>(k_list.size());
  const long total = static_cast<long>(t0_list.size()) * nk;
  ConvergenceTable table;
  table.rows.resize(total);
  std::vector<std::string> failures(total);

#pragma omp parallel for schedule(dynamic)
  for (long idx = 0; idx < total; ++idx) {
    const double t0 = t0_list[idx / nk];
    const int k = k_list[idx % nk];
    try {
      const Operator v = wbl_step(model, TrotterPlan{t0, k, order}, realizer);
      table.rows[idx] = {t0, k, trotter_error(propagator(full, t0), v)};
    } catch (const std::exception& e) {
      failures[idx] = e.what();
    }
  }
  for (const auto& f : failures)
    if (!f.empty()) throw ParameterError("convergence sweep point failed: " + f);

  if (t0_list.size() >= 2) {
    std::vector<double> x, y;
    for (long i = 0; i < static_cast<long>(t0_list.size()); ++i) {
      x.push_back(table.rows[i * nk].t0);
      y.push_back(table.rows[i * nk].error);
    }
    table.t0_exponent = fit_power_law(x, y);
  }
  if (k_list.size() >= 2) {
    std::vector<double> x, y;
    for (long j = 0; j < nk; ++j) {
      x.push_back(table.rows[j].k);
      y.push_back(table.rows[j].error);
    }
    table.k_exponent = -fit_power_law(x, y);
  }
  return table;
}

double fit_power_law(std::span<const double> x, std::span<const double> y, double floor) {
  if (x.size() != y.size()) throw ParameterError("power-law fit needs paired samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(y[i] > floor) || !(x[i] > 0.0)) continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) throw ParameterError("power-law fit needs at least 2 points above the floor");
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-300) throw ParameterError("power-law fit has degenerate abscissae");
  return (n * sxy - sx * sy) / denom;
}

void write_convergence_csv(std::ostream& os, const ConvergenceTable& table) {
  os << "t0_s,k,error\n";
  os.precision(17);
  for (const auto& r : table.rows) os << r.t0 << ',' << r.k << ',' << r.error << '\n';
}

}  // namespace pairsim
