#pragma once

#include "pairsim/exact_evolution.hpp"
#include "pairsim/trotter.hpp"

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace pairsim {

struct ExactEvolver {};

/// Each V_ad(s, t_ad) realized as a Trotter step with k inner repetitions.
struct TrotterEvolver {
  int k = 2;
  TrotterOrder order = TrotterOrder::Wbl3;
  Realizer realizer = IdealRealizer{};
};

using AdiabaticEvolver = std::variant<ExactEvolver, TrotterEvolver>;

struct AdiabaticSchedule {
  int S = 4;
  double t_ad = 1.0 / 700.0;  // s per step
  AdiabaticEvolver evolver = ExactEvolver{};

  void validate() const;
};

/// Model whose H_pair equals H_ad(s) = (1 - s/S) H0 + (s/S) H_pair.
PairingModel adiabatic_model(const PairingModel& model, int s, int S);

/// Applies V_ad(s, t_ad) for s = 0, 1, ..., S in order (S + 1 factors).
StateVector prepare(const PairingModel& model, const StateVector& init,
                    const AdiabaticSchedule& schedule);

struct PreparationReport {
  StateVector state;
  double wall_time = 0.0;  // physical preparation time, s
  double min_gap = 0.0;    // smallest first gap along the schedule, rad/s
  std::vector<std::string> warnings;
};

/// prepare() plus wall time and the small-gap diagnostic: a warning is issued
/// when the smallest sector gap along the schedule drops below 1/(S t_ad).
PreparationReport prepare_with_report(const PairingModel& model, const StateVector& init,
                                      const AdiabaticSchedule& schedule);

struct LevelPopulation {
  int index = 0;
  double energy = 0.0;  // rad/s
  double population = 0.0;
};

/// |<E_k|psi>|^2 over the eigenbasis of H, sorted by energy.
std::vector<LevelPopulation> population_report(const StateVector& state, const Operator& h);

void write_population_csv(std::ostream& os, const std::vector<LevelPopulation>& report);

/// Pair sector carrying most of the state's weight.
int dominant_sector(const StateVector& state, int n);

}  // namespace pairsim
