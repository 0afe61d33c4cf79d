#include "pairsim/pipeline.hpp"

#include "pairsim/errors.hpp"
#include "pairsim/exact_evolution.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

namespace pairsim {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

StepMethod parse_method(const std::string& key, const std::string& v) {
  if (v == "ideal" || v == "IDEAL") return StepMethod::Ideal;
  if (v == "w1" || v == "W1") return StepMethod::W1;
  if (v == "w2" || v == "W2") return StepMethod::W2;
  throw ConfigError(key, "expected ideal|w1|w2, got '" + v + "'");
}

PulseMode parse_pulse_mode(const std::string& key, const std::string& v) {
  if (v == "delta" || v == "DELTA") return PulseMode::Delta;
  if (v == "finite" || v == "FINITE") return PulseMode::Finite;
  throw ConfigError(key, "expected delta|finite, got '" + v + "'");
}

// Reads `<base>_rad_s` or `<base>_hz` (Hz converted to rad/s); empty if absent.
std::vector<double> frequencies(const KeyValueConfig& cfg, const std::string& base) {
  const bool rad = cfg.has(base + "_rad_s"), hz = cfg.has(base + "_hz");
  if (rad && hz) throw ConfigError(base, "give either _rad_s or _hz, not both");
  if (rad) return cfg.get_doubles(base + "_rad_s");
  auto v = cfg.get_doubles(base + "_hz");
  for (auto& x : v) x *= kTwoPi;
  return v;
}

RealMatrix square(const std::string& key, const std::vector<double>& flat, int n) {
  if (static_cast<int>(flat.size()) != n * n)
    throw ConfigError(key, "expected " + std::to_string(n * n) + " row-major entries");
  RealMatrix m(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) m(r, c) = flat[r * n + c];
  return m;
}

void write_text(const std::string& path, const std::string& text) {
  write_file_atomically(path, text);
}

template <class Fn>
std::string render(Fn&& fn) {
  std::ostringstream os;
  fn(os);
  return os.str();
}

}  // namespace

std::string to_string(StepMethod m) {
  switch (m) {
    case StepMethod::Ideal:
      return "ideal";
    case StepMethod::W1:
      return "w1";
    case StepMethod::W2:
      return "w2";
  }
  return "?";
}

std::string to_string(PulseMode m) { return m == PulseMode::Delta ? "delta" : "finite"; }

void ExperimentConfig::validate() const {
  auto wrap = [](const std::string& field, auto&& fn) {
    try {
      fn();
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(field, e.what());
    }
  };
  wrap("model", [&] { model.validate(); });
  wrap("machine", [&] { machine.validate(); });
  if (machine.n != model.n) throw ConfigError("machine.j_hz", "spin count differs from model.n");
  if (static_cast<int>(init_bits.size()) != model.n)
    throw ConfigError("init.state", "needs one bit per mode");
  wrap("init.state", [&] { basis_state(init_bits); });
  if (!(plan.t0 > 0.0) || !std::isfinite(plan.t0))
    throw ConfigError("plan.t0_s", "must be positive, got " + std::to_string(plan.t0));
  if (plan.k < 1) throw ConfigError("plan.k", "must be >= 1");
  if (schedule_S < 1) throw ConfigError("schedule.S", "must be >= 1");
  if (!(schedule_t_ad >= 0.0)) throw ConfigError("schedule.t_ad_s", "must be >= 0");
  if (schedule_evolver != "auto" && schedule_evolver != "exact" && schedule_evolver != "trotter" &&
      schedule_evolver != "nmr")
    throw ConfigError("schedule.evolver", "expected auto|exact|trotter|nmr");
  if (schedule_evolver == "nmr" && method == StepMethod::Ideal)
    throw ConfigError("schedule.evolver", "nmr preparation needs method w1 or w2");
  if (Q < 8) throw ConfigError("acquire.Q", "must be >= 8 for the fit");
  if (observed_spin < 1 || observed_spin > model.n)
    throw ConfigError("acquire.observed_spin", "outside 1..n");
  if (!(population_floor > 0.0 && population_floor < 1.0))
    throw ConfigError("population_floor", "must lie in (0, 1)");
  if (!(noise_amplitude >= 0.0)) throw ConfigError("noise.amplitude", "must be >= 0");
}

Realizer ExperimentConfig::realizer() const {
  if (method == StepMethod::Ideal) return IdealRealizer{};
  return NmrRealizer{method == StepMethod::W1 ? Method::W1 : Method::W2, machine, pulse_mode};
}

AdiabaticSchedule ExperimentConfig::schedule() const {
  AdiabaticSchedule s;
  s.S = schedule_S;
  s.t_ad = schedule_t_ad;
  std::string kind = schedule_evolver;
  if (kind == "auto") kind = method == StepMethod::Ideal ? "trotter" : "nmr";
  if (kind == "exact")
    s.evolver = ExactEvolver{};
  else if (kind == "trotter")
    s.evolver = TrotterEvolver{plan.k, plan.order, IdealRealizer{}};
  else
    s.evolver = TrotterEvolver{plan.k, plan.order, realizer()};
  return s;
}

std::vector<std::string> preset_names() { return {"h1", "h2"}; }

ExperimentConfig preset(std::string_view name) {
  ExperimentConfig c;
  c.preset = std::string(name);
  // Modes 1, 2, 3 live on H, C, F of 13C-labelled CHFBr2.
  RealMatrix j(3, 3);
  j << 0, 224, 50, 224, 0, -311, 50, -311, 0;
  c.machine = SpinSystem{3, j, 20e-6, {0.25, 0.25, 0.25}};
  c.model.n = 3;
  c.model.nu = {150 * kPi, 100 * kPi, 50 * kPi};
  c.model.coupling = RealMatrix::Zero(3, 3);
  c.init_bits = "011";
  c.schedule_S = 4;
  c.schedule_t_ad = 1.0 / 700.0;
  if (name == "h1") {
    c.model.coupling(0, 1) = c.model.coupling(1, 0) = kPi * 224;
    c.model.coupling(0, 2) = c.model.coupling(2, 0) = kPi * 50;
    c.model.coupling(1, 2) = c.model.coupling(2, 1) = kPi * -311;
    c.model.convention_factor = 1.0;
    c.plan = TrotterPlan{2e-3, 2, TrotterOrder::Wbl3};
    c.Q = 200;
  } else if (name == "h2") {
    c.model.coupling(0, 1) = c.model.coupling(1, 0) = kPi * 224;
    c.model.convention_factor = 2.0;
    c.plan = TrotterPlan{0.5e-3, 2, TrotterOrder::Wbl3};
    c.Q = 200;
  } else {
    throw ConfigError("preset", "unknown preset '" + std::string(name) + "' (h1|h2)");
  }
  return c;
}

ExperimentConfig experiment_from(const KeyValueConfig& cfg) {
  ExperimentConfig c;
  if (const auto p = cfg.get("preset")) c = preset(*p);

  const int n = cfg.get_int("model.n", c.model.n);
  if (n < 1) throw ConfigError("model.n", "must be >= 1");
  if (n != c.model.n) {
    c.model.n = n;
    c.model.nu.assign(n, 0.0);
    c.model.coupling = RealMatrix::Zero(n, n);
  }
  const auto nu = frequencies(cfg, "model.nu");
  const auto eps = frequencies(cfg, "model.epsilon");
  const auto coupling = frequencies(cfg, "model.coupling");
  if (!nu.empty() && !eps.empty())
    throw ConfigError("model.epsilon", "give either nu or epsilon, not both");
  if (!coupling.empty()) c.model.coupling = square("model.coupling", coupling, n);
  if (!nu.empty()) {
    if (static_cast<int>(nu.size()) != n) throw ConfigError("model.nu", "needs n entries");
    c.model.nu = nu;
  }
  if (!eps.empty()) {
    try {
      const double factor = c.model.convention_factor;
      c.model = pairing_to_qubit({n, eps, c.model.coupling});
      c.model.convention_factor = factor;
    } catch (const Error& e) {
      throw ConfigError("model.epsilon", e.what());
    }
  }
  c.model.convention_factor = cfg.get_double("model.convention_factor", c.model.convention_factor);

  if (cfg.has("machine.j_hz") || c.machine.n != n) {
    const auto flat = cfg.get_doubles("machine.j_hz");
    if (flat.empty()) throw ConfigError("machine.j_hz", "required for a custom model size");
    c.machine.n = n;
    c.machine.j_hz = square("machine.j_hz", flat, n);
  }
  c.machine.t_pi = cfg.get_double("machine.t_pi_s", c.machine.t_pi);
  if (cfg.has("machine.t2_s")) {
    auto t2 = cfg.get_doubles("machine.t2_s");
    if (t2.size() == 1) t2.assign(n, t2.front());
    c.machine.t2 = t2;
  } else if (static_cast<int>(c.machine.t2.size()) != n) {
    c.machine.t2.assign(n, 0.25);
  }

  c.init_bits = cfg.get_string("init.state", c.init_bits);
  c.schedule_S = cfg.get_int("schedule.S", c.schedule_S);
  c.schedule_t_ad = cfg.get_double("schedule.t_ad_s", c.schedule_t_ad);
  c.schedule_evolver = cfg.get_string("schedule.evolver", c.schedule_evolver);
  c.plan.t0 = cfg.get_double("plan.t0_s", c.plan.t0);
  c.plan.k = cfg.get_int("plan.k", c.plan.k);
  if (const auto o = cfg.get("plan.order")) {
    if (*o == "wbl3")
      c.plan.order = TrotterOrder::Wbl3;
    else if (*o == "first")
      c.plan.order = TrotterOrder::First;
    else
      throw ConfigError("plan.order", "expected wbl3|first");
  }
  if (const auto m = cfg.get("method")) c.method = parse_method("method", *m);
  if (const auto m = cfg.get("pulse_mode")) c.pulse_mode = parse_pulse_mode("pulse_mode", *m);
  c.Q = cfg.get_int("acquire.Q", c.Q);
  c.observed_spin = cfg.get_int("acquire.observed_spin", c.observed_spin);
  c.damping = cfg.get_bool("acquire.damping", c.damping);
  if (const auto seed = frequencies(cfg, "fit.seed"); !seed.empty()) c.seed_omega = seed.front();
  c.population_floor = cfg.get_double("population_floor", c.population_floor);
  c.noise_amplitude = cfg.get_double("noise.amplitude", c.noise_amplitude);
  c.noise_seed = cfg.get_uint64("noise.seed", c.noise_seed);
  c.validate();
  return c;
}

RunRecord run(const ExperimentConfig& config) {
  config.validate();
  RunRecord rec;
  rec.preset = config.preset;
  rec.method = config.method;
  rec.pulse_mode = config.pulse_mode;
  rec.plan = config.plan;
  rec.Q = config.Q;
  rec.t_pi = config.machine.t_pi;

  const StateVector init = basis_state(config.init_bits);
  rec.pairs = dominant_sector(init, config.model.n);

  const PreparationReport prep = prepare_with_report(config.model, init, config.schedule());
  rec.prep_wall_time = prep.wall_time;
  rec.min_schedule_gap = prep.min_gap;
  rec.warnings = prep.warnings;

  const Stepper stepper = make_stepper(config.model, config.plan, config.realizer());
  rec.wall_per_step = stepper.wall_per_step;
  rec.warnings.insert(rec.warnings.end(), stepper.warnings.begin(), stepper.warnings.end());

  std::optional<Damping> damping;
  if (config.damping) damping = Damping{config.machine.t2[config.observed_spin - 1]};
  rec.series = acquire(prep.state, stepper, config.Q, config.observed_spin, damping);
  rec.acquisition_wall_time = rec.series.wall_times.back();
  if (config.noise_amplitude > 0.0) {
    std::mt19937_64 rng(config.noise_seed);
    std::uniform_real_distribution<double> noise(-config.noise_amplitude, config.noise_amplitude);
    for (auto& v : rec.series.values) v = std::clamp(v + noise(rng), -1.0, 1.0);
  }

  rec.spectrum = dft(rec.series);
  rec.epsilon_ft = epsilon_ft(config.Q, config.plan.t0);
  rec.populations =
      population_report(prep.state, realize(build_hamiltonian(config.model, Part::Full)));
  if (sector_basis(config.model.n, rec.pairs).size() > 1)
    rec.first_gap = sector_gap(config.model, rec.pairs, 1);
  try {
    rec.seed_omega = config.seed_omega ? *config.seed_omega : peak_pick(rec.spectrum, true).omega;
    rec.fit = fit_damped_sinusoid(rec.series, rec.seed_omega);
    const ReachableGap reach =
        reachable_gap(config.model, rec.pairs, prep.state, config.population_floor);
    rec.delta_exact = reach.gap;
    rec.reachable_level = reach.level;
    rec.reachable_population = reach.population;
    rec.systematic_offset = systematic_offset(rec.fit.delta_exp, rec.delta_exact);
  } catch (const NoPeak& e) {
    rec.failure = std::string("no peak: ") + e.what();
  } catch (const FitError& e) {
    rec.failure = std::string("fit: ") + e.what();
  } catch (const NoReachableState& e) {
    rec.failure = std::string("no reachable state: ") + e.what();
  }
  if (!rec.failure.empty()) rec.fit.converged = false;
  return rec;
}

std::string to_json(const RunRecord& r) {
  nlohmann::json j;
  j["preset"] = r.preset;
  j["method"] = to_string(r.method);
  j["pulse_mode"] = to_string(r.pulse_mode);
  j["t0_s"] = r.plan.t0;
  j["k"] = r.plan.k;
  j["Q"] = r.Q;
  j["t_pi_s"] = r.t_pi;
  j["pairs"] = r.pairs;
  j["delta_exact_rad_s"] = r.delta_exact;
  j["delta_exact_over_2pi_hz"] = r.delta_exact / kTwoPi;
  j["reachable_level"] = r.reachable_level;
  j["reachable_population"] = r.reachable_population;
  j["first_gap_rad_s"] = r.first_gap;
  j["seed_rad_s"] = r.seed_omega;
  j["delta_exp_rad_s"] = r.fit.delta_exp;
  j["delta_exp_over_2pi_hz"] = r.fit.delta_exp / kTwoPi;
  j["tau_e_s"] = r.fit.tau_e;  // null when undamped
  j["amplitude"] = r.fit.amplitude;
  j["phase_rad"] = r.fit.phase;
  j["residual_norm"] = r.fit.residual_norm;
  j["converged"] = r.fit.converged;
  j["fit_iterations"] = r.fit.iterations;
  j["epsilon_ft_rad_s"] = r.epsilon_ft;
  j["epsilon_ft_over_2pi_hz"] = r.epsilon_ft / kTwoPi;
  j["systematic_offset_rad_s"] = r.systematic_offset;
  j["systematic_offset_over_2pi_hz"] = r.systematic_offset / kTwoPi;
  j["wall_per_step_s"] = r.wall_per_step;
  j["prep_wall_time_s"] = r.prep_wall_time;
  j["acquisition_wall_time_s"] = r.acquisition_wall_time;
  j["total_wall_time_s"] = r.prep_wall_time + r.acquisition_wall_time;
  j["min_schedule_gap_rad_s"] = r.min_schedule_gap;
  j["warnings"] = r.warnings;
  if (!r.failure.empty()) j["failure"] = r.failure;
  return j.dump(2) + "\n";
}

void write_file_atomically(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out << contents;
    if (!out) throw Error("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

void write_run_outputs(const RunRecord& record, const std::string& dir) {
  const std::filesystem::path base(dir);
  write_text((base / "timeseries.csv").string(),
             render([&](std::ostream& os) { write_series_csv(os, record.series); }));
  write_text((base / "spectrum.csv").string(),
             render([&](std::ostream& os) { write_spectrum_csv(os, record.spectrum); }));
  write_text((base / "populations.csv").string(),
             render([&](std::ostream& os) { write_population_csv(os, record.populations); }));
  write_text((base / "fit.json").string(), to_json(record));
}

std::size_t SweepGrid::size() const {
  auto axis = [](std::size_t s) { return std::max<std::size_t>(s, 1); };
  if (t0.empty() && k.empty() && t_pi.empty() && methods.empty()) return 0;
  return axis(t0.size()) * axis(k.size()) * axis(t_pi.size()) * axis(methods.size());
}

SweepGrid sweep_grid_from(const KeyValueConfig& cfg) {
  SweepGrid g;
  g.t0 = cfg.get_doubles("sweep.t0_s");
  g.k = cfg.get_ints("sweep.k");
  g.t_pi = cfg.get_doubles("sweep.t_pi_s");
  for (const auto& m : cfg.get_strings("sweep.method")) g.methods.push_back(parse_method("sweep.method", m));
  g.hold_epsilon_ft = cfg.get_bool("sweep.hold_eps_ft", false);
  for (double t : g.t0)
    if (!(t > 0.0)) throw ConfigError("sweep.t0_s", "values must be positive");
  for (int k : g.k)
    if (k < 1) throw ConfigError("sweep.k", "values must be >= 1");
  for (double t : g.t_pi)
    if (!(t >= 0.0)) throw ConfigError("sweep.t_pi_s", "values must be >= 0");
  return g;
}

SweepResult sweep(const ExperimentConfig& base, const SweepGrid& grid) {
  if (grid.size() == 0) throw ParameterError("sweep grid is empty");
  const std::vector<double> t0s = grid.t0.empty() ? std::vector<double>{base.plan.t0} : grid.t0;
  const std::vector<int> ks = grid.k.empty() ? std::vector<int>{base.plan.k} : grid.k;
  const std::vector<double> tpis =
      grid.t_pi.empty() ? std::vector<double>{base.machine.t_pi} : grid.t_pi;
  const std::vector<StepMethod> methods =
      grid.methods.empty() ? std::vector<StepMethod>{base.method} : grid.methods;

  SweepResult result;
  for (double t0 : t0s)
    for (int k : ks)
      for (double tp : tpis)
        for (StepMethod m : methods) {
          SweepRow row{t0, k, tp, m, base.Q, std::nullopt, {}};
          if (grid.hold_epsilon_ft)
            row.Q = static_cast<int>(std::lround(base.Q * base.plan.t0 / t0));
          result.rows.push_back(row);
        }

  const auto total = static_cast<long>(result.rows.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < total; ++i) {
    SweepRow& row = result.rows[i];
    ExperimentConfig cfg = base;
    cfg.plan.t0 = row.t0;
    cfg.plan.k = row.k;
    cfg.machine.t_pi = row.t_pi;
    cfg.method = row.method;
    cfg.Q = row.Q;
    try {
      row.record = run(cfg);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  }

  if (t0s.size() >= 2) {
    std::vector<double> x, y;
    for (const auto& row : result.rows)
      if (row.record && row.k == ks.front() && row.t_pi == tpis.front() &&
          row.method == methods.front()) {
        x.push_back(row.t0);
        y.push_back(std::abs(row.record->systematic_offset));
      }
    try {
      result.offset_t0_exponent = fit_power_law(x, y);
    } catch (const ParameterError&) {
    }
  }
  return result;
}

namespace {

std::string csv_quote(std::string text) {
  if (text.empty()) return text;
  std::replace(text.begin(), text.end(), '"', '\'');
  return '"' + text + '"';
}

}  // namespace

void write_sweep_csv(std::ostream& os, const SweepResult& result) {
  os << "t0_s,k,t_pi_s,method,Q,delta_exact_rad_s,delta_exp_rad_s,epsilon_ft_rad_s,"
        "systematic_offset_rad_s,tau_e_s,converged,error\n";
  os.precision(17);
  for (const auto& row : result.rows) {
    os << row.t0 << ',' << row.k << ',' << row.t_pi << ',' << to_string(row.method) << ','
       << row.Q << ',';
    if (row.record) {
      const auto& r = *row.record;
      os << r.delta_exact << ',' << r.fit.delta_exp << ',' << r.epsilon_ft << ','
         << r.systematic_offset << ',' << r.fit.tau_e << ',' << (r.fit.converged ? "true" : "false")
         << ',' << csv_quote(r.failure) << '\n';
    } else {
      os << ",,,,,false," << csv_quote(row.error) << '\n';
    }
  }
}

std::string sweep_summary_json(const SweepResult& result) {
  nlohmann::json j;
  j["points"] = result.rows.size();
  j["failed_points"] = std::count_if(result.rows.begin(), result.rows.end(),
                                     [](const SweepRow& r) { return !r.record; });
  if (result.offset_t0_exponent)
    j["offset_t0_exponent"] = *result.offset_t0_exponent;
  else
    j["offset_t0_exponent"] = nullptr;
  return j.dump(2) + "\n";
}

}  // namespace pairsim
