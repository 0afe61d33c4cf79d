// Batch driver: exact gaps, full pipeline runs, parameter sweeps, resource
// tables and pulse-program dumps.

#include "pairsim/errors.hpp"
#include "pairsim/exact_evolution.hpp"
#include "pairsim/pipeline.hpp"
#include "pairsim/resource_estimator.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <filesystem>
#include <iostream>
#include <numbers>
#include <sstream>

namespace {

using namespace pairsim;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNonConvergence = 3;
constexpr int kExitContract = 4;

struct CommonOptions {
  std::string config_path;
  std::string preset;
  std::string out_dir = "out";
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "key = value configuration file");
  cmd->add_option("--preset", opts.preset, "h1 | h2");
  cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_option("--override", opts.overrides, "key=value (repeatable)");
}

KeyValueConfig load_config(const CommonOptions& opts) {
  KeyValueConfig cfg;
  if (!opts.config_path.empty()) cfg = KeyValueConfig::load(opts.config_path);
  if (!opts.preset.empty()) cfg.set("preset", opts.preset);
  for (const auto& o : opts.overrides) cfg.apply_override(o);
  return cfg;
}

// Keys owned by other subcommands are tolerated so one file can drive them all.
void reject_unknown(const KeyValueConfig& cfg) {
  for (const auto& key : cfg.unused_keys()) {
    if (key.starts_with("sweep.") || key.starts_with("estimate.") || key == "output.dir") continue;
    throw ConfigError(key, "unknown configuration key");
  }
}

std::string out_dir(const KeyValueConfig& cfg, const CommonOptions& opts) {
  return cfg.get_string("output.dir", opts.out_dir);
}

int cmd_presets() {
  for (const auto& name : preset_names()) {
    const auto c = preset(name);
    std::cout << name << ": n=" << c.model.n << " convention_factor=" << c.model.convention_factor
              << " t0=" << c.plan.t0 << " s k=" << c.plan.k << " Q=" << c.Q
              << " init=" << c.init_bits << '\n';
  }
  return kExitOk;
}

int cmd_gap_exact(const CommonOptions& opts) {
  const auto cfg = load_config(opts);
  const auto exp = experiment_from(cfg);
  reject_unknown(cfg);
  const int pairs = cfg.has("gap.pairs") ? cfg.get_int("gap.pairs", 0)
                                         : dominant_sector(basis_state(exp.init_bits), exp.model.n);
  const auto eig = sector_eigensystem(exp.model, pairs);
  nlohmann::json j;
  j["pairs"] = pairs;
  std::vector<double> levels, gaps;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    levels.push_back(eig.values(i));
    gaps.push_back((eig.values(i) - eig.values(0)) / (2 * std::numbers::pi));
  }
  j["energies_rad_s"] = levels;
  j["gaps_over_2pi_hz"] = gaps;
  std::cout << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_run(const CommonOptions& opts) {
  const auto cfg = load_config(opts);
  const auto exp = experiment_from(cfg);
  const auto dir = out_dir(cfg, opts);
  reject_unknown(cfg);
  const RunRecord rec = run(exp);
  write_run_outputs(rec, dir);
  std::cout << to_json(rec);
  if (!rec.failure.empty()) std::cerr << "run failed: " << rec.failure << '\n';
  for (const auto& w : rec.warnings) std::cerr << "warning: " << w << '\n';
  return rec.fit.converged ? kExitOk : kExitNonConvergence;
}

int cmd_sweep(const CommonOptions& opts) {
  const auto cfg = load_config(opts);
  const auto exp = experiment_from(cfg);
  const auto grid = sweep_grid_from(cfg);
  const auto dir = out_dir(cfg, opts);
  const bool per_point = cfg.get_bool("sweep.per_point_outputs", false);
  reject_unknown(cfg);
  if (grid.size() == 0) throw ConfigError("sweep", "grid is empty; set sweep.t0_s, sweep.k, ...");
  const SweepResult result = sweep(exp, grid);
  std::ostringstream csv;
  write_sweep_csv(csv, result);
  write_file_atomically((std::filesystem::path(dir) / "sweep.csv").string(), csv.str());
  write_file_atomically((std::filesystem::path(dir) / "sweep_summary.json").string(),
                        sweep_summary_json(result));
  if (per_point)
    for (std::size_t i = 0; i < result.rows.size(); ++i)
      if (result.rows[i].record)
        write_run_outputs(*result.rows[i].record,
                          (std::filesystem::path(dir) / ("point_" + std::to_string(i))).string());
  std::cout << csv.str() << sweep_summary_json(result);
  return kExitOk;
}

int cmd_estimate(const CommonOptions& opts) {
  const auto cfg = load_config(opts);
  auto n_values = cfg.get_ints("estimate.n");
  auto eps = cfg.get_doubles("estimate.eps_over_delta");
  const double tg = cfg.get_double("estimate.t_g_over_tau", 1e-5);
  const double budget = cfg.get_double("estimate.budget_in_tau", 1.0);
  const auto dir = out_dir(cfg, opts);
  cfg.get("preset");
  reject_unknown(cfg);
  if (n_values.empty()) n_values = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  if (eps.empty()) eps = {1.0, 0.01};
  std::ostringstream csv;
  write_resource_table(csv, n_values, eps, tg, budget);
  write_file_atomically((std::filesystem::path(dir) / "resources.csv").string(), csv.str());
  std::cout << csv.str();
  for (double e : eps)
    std::cout << "# max feasible n at eps/delta=" << e << ": "
              << max_feasible_n(1.0, e, tg, budget) << '\n';
  return kExitOk;
}

int cmd_compile(const CommonOptions& opts) {
  const auto cfg = load_config(opts);
  const auto exp = experiment_from(cfg);
  reject_unknown(cfg);
  if (exp.method == StepMethod::Ideal)
    throw ConfigError("method", "compile needs method w1 or w2");
  const PulseProgram prog = compile_wbl_step(
      exp.model, exp.plan, exp.method == StepMethod::W1 ? Method::W1 : Method::W2, exp.machine);
  for (const auto& w : prog.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << to_text(prog);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pairing-Hamiltonian gap estimation testbed"};
  app.require_subcommand(1);
  CommonOptions opts;
  auto* presets = app.add_subcommand("presets", "list built-in presets");
  auto* gap = app.add_subcommand("gap-exact", "exact sector gaps by diagonalization");
  auto* run_cmd = app.add_subcommand("run", "prepare, step, acquire and fit");
  auto* sweep_cmd = app.add_subcommand("sweep", "run a parameter grid");
  auto* estimate = app.add_subcommand("estimate", "resource-scaling table");
  auto* compile = app.add_subcommand("compile", "dump the pulse program of one step");
  for (auto* cmd : {gap, run_cmd, sweep_cmd, estimate, compile}) add_common(cmd, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*presets) return cmd_presets();
    if (*gap) return cmd_gap_exact(opts);
    if (*run_cmd) return cmd_run(opts);
    if (*sweep_cmd) return cmd_sweep(opts);
    if (*estimate) return cmd_estimate(opts);
    if (*compile) return cmd_compile(opts);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const LoadError& e) {
    std::cerr << "load error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const FitError& e) {
    std::cerr << "fit error: " << e.what() << '\n';
    return kExitNonConvergence;
  } catch (const NoPeak& e) {
    std::cerr << "fit error: " << e.what() << '\n';
    return kExitNonConvergence;
  } catch (const NoReachableState& e) {
    std::cerr << "no reachable state: " << e.what() << '\n';
    return kExitNonConvergence;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitContract;
  }
  return kExitContract;
}
