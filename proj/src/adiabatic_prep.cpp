#include "pairsim/adiabatic_prep.hpp"

#include "pairsim/errors.hpp"

#include <cmath>
#include <limits>
#include <ostream>

namespace pairsim {

void AdiabaticSchedule::validate() const {
  if (S < 1) throw ParameterError("schedule.S must be >= 1");
  if (!(t_ad >= 0.0) || !std::isfinite(t_ad)) throw ParameterError("schedule.t_ad must be >= 0");
  if (const auto* tr = std::get_if<TrotterEvolver>(&evolver); tr && tr->k < 1)
    throw ParameterError("schedule evolver k must be >= 1");
}

PairingModel adiabatic_model(const PairingModel& model, int s, int S) {
  if (S < 1 || s < 0 || s > S) throw ParameterError("adiabatic step s must satisfy 0 <= s <= S");
  PairingModel out = model;
  out.coupling *= static_cast<double>(s) / S;
  return out;
}

int dominant_sector(const StateVector& state, int n) {
  std::vector<double> weight(n + 1, 0.0);
  for (Eigen::Index b = 0; b < state.size(); ++b)
    weight[hamming_weight(static_cast<std::size_t>(b))] += std::norm(state(b));
  int best = 0;
  for (int w = 1; w <= n; ++w)
    if (weight[w] > weight[best]) best = w;
  return best;
}

PreparationReport prepare_with_report(const PairingModel& model, const StateVector& init,
                                      const AdiabaticSchedule& schedule) {
  model.validate();
  schedule.validate();
  if (init.size() != (Eigen::Index{1} << model.n)) throw ParameterError("init state dimension");
  if (std::abs(init.norm() - 1.0) > 1e-10) throw ParameterError("init state not normalized");

  PreparationReport report;
  report.state = init;
  report.min_gap = std::numeric_limits<double>::infinity();
  const int pairs = dominant_sector(init, model.n);
  const bool gap_defined = sector_basis(model.n, pairs).size() >= 2;

  for (int s = 0; s <= schedule.S; ++s) {
    const PairingModel step_model = adiabatic_model(model, s, schedule.S);
    if (gap_defined) report.min_gap = std::min(report.min_gap, sector_gap(step_model, pairs, 1));
    if (schedule.t_ad == 0.0) continue;
    if (std::holds_alternative<ExactEvolver>(schedule.evolver)) {
      const Operator h = realize(build_hamiltonian(model, AdiabaticPart{s, schedule.S}));
      report.state = evolve(report.state, propagator(h, schedule.t_ad));
      report.wall_time += schedule.t_ad;
    } else {
      const auto& tr = std::get<TrotterEvolver>(schedule.evolver);
      const Stepper step =
          make_stepper(step_model, TrotterPlan{schedule.t_ad, tr.k, tr.order}, tr.realizer);
      report.state = evolve(report.state, step.unitary);
      report.wall_time += step.wall_per_step;
      report.warnings.insert(report.warnings.end(), step.warnings.begin(), step.warnings.end());
    }
  }
  const double threshold = 1.0 / (schedule.S * schedule.t_ad);
  if (gap_defined && schedule.t_ad > 0.0 && report.min_gap < threshold)
    report.warnings.push_back("minimum gap along schedule " + std::to_string(report.min_gap) +
                              " rad/s below 1/(S t_ad) = " + std::to_string(threshold) + " rad/s");
  return report;
}

StateVector prepare(const PairingModel& model, const StateVector& init,
                    const AdiabaticSchedule& schedule) {
  return prepare_with_report(model, init, schedule).state;
}

std::vector<LevelPopulation> population_report(const StateVector& state, const Operator& h) {
  if (h.rows() != state.size()) throw ParameterError("state and Hamiltonian dimensions differ");
  const EigenSystem eig = eigendecompose(h);
  const Eigen::VectorXd pops = (eig.vectors.adjoint() * state).cwiseAbs2();
  std::vector<LevelPopulation> out;
  for (Eigen::Index k = 0; k < eig.values.size(); ++k)
    out.push_back({static_cast<int>(k), eig.values(k), pops(k)});
  return out;
}

void write_population_csv(std::ostream& os, const std::vector<LevelPopulation>& report) {
  os << "eigenindex,energy_rad_per_s,population\n";
  os.precision(17);
  for (const auto& r : report) os << r.index << ',' << r.energy << ',' << r.population << '\n';
}

}  // namespace pairsim
