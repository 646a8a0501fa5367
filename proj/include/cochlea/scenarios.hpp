// Run orchestration: single runs, refinement studies and named scenarios.
#pragma once

#include "cochlea/config.hpp"
#include "cochlea/diagnostics.hpp"
#include "cochlea/output.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace cochlea {

enum ExitCode : int { kExitPass = 0, kExitChecksFailed = 1, kExitConfigError = 2, kExitNumericalAbort = 3 };

/// Runs fn(0..count-1) on a small thread pool.
void parallel_for(int count, const std::function<void(int)>& fn, int threads = 0);

struct SingleRun {
  SimulationTrace trace;
  PeakReport peaks;
  EnergyReport energy;
  InteractionEnergy interaction;
  double min_running_interaction = 0.0;
  double interaction_scale = 0.0;  // max |running interaction| and max membrane energy
  ValidationReport validation;
};

SingleRun run_single(const RunConfig& cfg, bool store_accel_spectra = false);

/// Membrane energy 1/2 int (m vdot^2 + k v^2) dx at every sample.
std::vector<double> membrane_energy_samples(const SimulationTrace& trace, double m);

struct DeltaLadder {
  std::vector<double> deltas;
  std::vector<ModelErrorNorms> entries;
  ErrorNormReport report;
  std::vector<InteractionEnergy> interactions;  // one per delta
  std::vector<double> min_running_interaction;
  std::vector<double> interaction_scale;
  std::vector<double> energy_residuals;
  ConvergenceFit v_norm_fit;  // unsquared ||v - v1||
  bool v_norm_decreasing = false;
};

/// Full-model runs at each delta against the reduced run of the same config.
DeltaLadder delta_ladder(const RunConfig& base, const std::vector<double>& deltas);

struct EnergyLadder {
  std::vector<double> dts;
  std::vector<double> relative_residuals;
  ConvergenceFit fit;
};

EnergyLadder energy_dt_ladder(const RunConfig& base, const std::vector<double>& dts);

struct OtoacousticStudy {
  OtoacousticMetric emission;
  OtoacousticMetric twin;  // same run with rho_field std = 0
  double unstable_fraction = 0.0;
  EnergyReport energy;
  SimulationTrace trace;  // emission run
};

OtoacousticStudy otoacoustic_study(const RunConfig& cfg);

struct OracleSuite {
  double reduced_rel_err = 0.0;           // spectral vs FD reduced at n = 128
  std::vector<std::pair<double, double>> reduced_ladder;  // (h, rel err)
  ConvergenceFit reduced_fit;
  double coupled_rel_err = 0.0;           // spectral vs FD coupled, n = nz = 128, delta = 0.1
  double fd_lambda1 = 0.0;                // FD bottom pressure of sin(pi x), delta = 1
  double spectral_lambda1 = 0.0;
  double steady_state_rel_err = 0.0;
  double rk4_max_err[3] = {0.0, 0.0, 0.0};  // under, critical, over
  SimulationTrace steady_trace;  // passive run behind the envelope comparison
};

/// Smooth test state used by the solver comparisons.
MembraneState oracle_state(int n);

OracleSuite oracle_suite();

/// Commands. Each writes into cfg.out_dir and returns an exit code.
int run_simulate(const RunConfig& cfg, const OutputOptions& opts, std::ostream& log);
int run_converge(const RunConfig& cfg, const std::vector<double>& deltas, const OutputOptions& opts,
                 std::ostream& log);
int run_audit(const RunConfig& cfg, const OutputOptions& opts, std::ostream& log);
int run_scenario(const std::string& name, const std::string& out_dir, const OutputOptions& opts,
                 std::ostream& log);

}  // namespace cochlea
