#pragma once

#include "pairsim/adiabatic_prep.hpp"
#include "pairsim/config.hpp"
#include "pairsim/nmr_machine.hpp"
#include "pairsim/spectroscopy.hpp"
#include "pairsim/trotter.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pairsim {

enum class StepMethod { Ideal, W1, W2 };

std::string to_string(StepMethod m);
std::string to_string(PulseMode m);

/// Everything needed for one prepare -> step -> acquire -> fit run.
struct ExperimentConfig {
  std::string preset;  // empty for a fully custom model
  PairingModel model;
  SpinSystem machine;
  std::string init_bits = "011";
  int schedule_S = 4;
  double schedule_t_ad = 1.0 / 700.0;
  std::string schedule_evolver = "auto";  // auto | exact | trotter | nmr
  TrotterPlan plan;
  StepMethod method = StepMethod::Ideal;
  PulseMode pulse_mode = PulseMode::Delta;
  int Q = 200;
  int observed_spin = 1;
  bool damping = false;
  std::optional<double> seed_omega;  // rad/s; peak pick when absent
  double population_floor = kDefaultPopulationFloor;
  double noise_amplitude = 0.0;
  std::uint64_t noise_seed = 0;

  /// Throws ConfigError naming the offending dotted key.
  void validate() const;
  Realizer realizer() const;
  AdiabaticSchedule schedule() const;
};

std::vector<std::string> preset_names();
/// h1: natural CHFBr2 couplings; h2: single a-b coupling with convention factor 2.
ExperimentConfig preset(std::string_view name);

/// Starts from `preset` (if given) and applies every recognized key.
ExperimentConfig experiment_from(const KeyValueConfig& cfg);

struct RunRecord {
  std::string preset;
  StepMethod method = StepMethod::Ideal;
  PulseMode pulse_mode = PulseMode::Delta;
  TrotterPlan plan;
  int Q = 0;
  double t_pi = 0.0;
  int pairs = 0;

  double delta_exact = 0.0;  // reachable sector gap, rad/s
  int reachable_level = 0;
  double reachable_population = 0.0;
  double first_gap = 0.0;  // E_1 - E_G, rad/s
  double seed_omega = 0.0;
  FitResult fit;
  double epsilon_ft = 0.0;
  double systematic_offset = 0.0;

  double wall_per_step = 0.0;
  double prep_wall_time = 0.0;
  double acquisition_wall_time = 0.0;
  double min_schedule_gap = 0.0;
  std::vector<std::string> warnings;
  std::string failure;  // set when no gap could be extracted; outputs are partial

  TimeSeries series;
  Spectrum spectrum;
  std::vector<LevelPopulation> populations;
};

/// Throws on invalid configuration. A missing peak, a failed fit or an empty
/// excited sector is reported through RunRecord::failure instead.
RunRecord run(const ExperimentConfig& config);

/// Flat JSON record of the fit and its context.
std::string to_json(const RunRecord& record);

/// timeseries.csv, spectrum.csv, populations.csv and fit.json, each written atomically.
void write_run_outputs(const RunRecord& record, const std::string& dir);

struct SweepGrid {
  std::vector<double> t0;
  std::vector<int> k;
  std::vector<double> t_pi;
  std::vector<StepMethod> methods;
  bool hold_epsilon_ft = false;  // co-vary Q so Q t0 stays at its base value

  std::size_t size() const;
};

SweepGrid sweep_grid_from(const KeyValueConfig& cfg);

struct SweepRow {
  double t0 = 0.0;
  int k = 0;
  double t_pi = 0.0;
  StepMethod method = StepMethod::Ideal;
  int Q = 0;
  std::optional<RunRecord> record;
  std::string error;
};

struct SweepResult {
  std::vector<SweepRow> rows;               // input order
  std::optional<double> offset_t0_exponent;  // |offset| ~ t0^p when t0 varies
};

/// Runs every grid point (in parallel); failures are recorded per row.
SweepResult sweep(const ExperimentConfig& base, const SweepGrid& grid);

void write_sweep_csv(std::ostream& os, const SweepResult& result);
std::string sweep_summary_json(const SweepResult& result);

/// Writes `contents` to a temporary sibling and renames it into place.
void write_file_atomically(const std::string& path, const std::string& contents);

}  // namespace pairsim
