// Post-processing audits over simulation traces.
#pragma once

#include "cochlea/solver.hpp"

#include <string>
#include <utility>
#include <vector>

namespace cochlea {

/// Membrane energy balance at the final time T:
///   [E(T) - E(0)] + int int r vdot^2 + int int p(x,0,t) vdot - int int vdot N(vdot) = 0.
struct EnergyReport {
  double T = 0.0;
  double membrane_energy = 0.0;  // 1/2 int (m vdot^2 + k v^2) dx at T
  double initial_energy = 0.0;   // same at t = 0 (zero from rest)
  double friction_dissipation = 0.0;
  double fluid_work = 0.0;
  double active_input = 0.0;
  double residual = 0.0;
  double relative_residual = 0.0;
};

EnergyReport energy_audit(const SimulationTrace& trace);

/// Recomputes the time integrals from stored samples only (trapezoid in t).
EnergyTerms energy_terms_from_samples(const SimulationTrace& trace);

struct InteractionEnergy {
  double direct = 0.0;    // int_0^T int_0^1 q(x,0,t) vdot dx dt
  double spectral = 0.0;  // 1/4 sum_n lambda_n(delta) (gamma_n(T)^2 - gamma_n(0)^2)
};

/// Direct value from the per-step accumulator when present, from stored
/// samples otherwise; spectral value from the first and last velocity samples.
InteractionEnergy interaction_energy(const SimulationTrace& trace, double delta);
InteractionEnergy interaction_energy(const SimulationTrace& trace);

/// Direct value by trapezoid quadrature over the stored samples.
double interaction_energy_from_samples(const SimulationTrace& trace);

/// Squared L2 errors between a full-model run and the reduced run, integrated
/// over (0,1) x (0,T) (and over the chamber height for the slab norms).
struct ModelErrorNorms {
  double delta = 0.0;
  double p0_minus_p1 = 0.0;      // ||p0 - p1||^2
  double v_diff = 0.0;           // ||v - v1||^2
  double p0x_minus_p1x = 0.0;    // ||(p0)_x - (p1)_x||^2
  double vdot_diff = 0.0;        // ||vdot - vdot1||^2
  double p_minus_p1_slab = 0.0;  // ||p - p1||^2 over the chamber
  double p0_minus_pbottom = 0.0; // ||p0 - p(.,0)||^2
  double p_minus_p0_slab = 0.0;  // ||p - p0||^2 over the chamber
};

inline const std::vector<std::string>& error_norm_names() {
  static const std::vector<std::string> names = {
      "p0_minus_p1",     "v_diff",           "p0x_minus_p1x",   "vdot_diff",
      "p_minus_p1_slab", "p0_minus_pbottom", "p_minus_p0_slab"};
  return names;
}

double error_norm_value(const ModelErrorNorms& e, const std::string& name);

/// The full trace must carry acceleration spectra; both traces must share the
/// grid and sample times.
ModelErrorNorms model_error_norms(const SimulationTrace& full, const SimulationTrace& reduced);

struct ConvergenceFit {
  double order = 0.0;
  double residual = 0.0;  // RMS of the natural-log residuals
};

ConvergenceFit fit_convergence_order(const std::vector<std::pair<double, double>>& pairs);

struct ErrorNormReport {
  std::vector<ModelErrorNorms> entries;
  std::vector<std::pair<std::string, ConvergenceFit>> fits;
};

ErrorNormReport summarize_error_norms(std::vector<ModelErrorNorms> entries);

struct Peak {
  Eigen::Index index = 0;
  double x = 0.0;
  double height = 0.0;
};

struct PeakReport {
  double window = 0.0;
  Vec x;
  Vec envelope;
  std::vector<Peak> peaks;  // sorted by height, tallest first
  /// (lower peak - deepest dip between the two tallest) / lower peak; 0 with fewer than two peaks.
  double separation = 0.0;
};

/// Local maxima of a nonnegative profile, with zero padding at both ends and
/// plateaus reported at their center.
std::vector<Peak> find_peaks(const Vec& x, const Vec& envelope);
double separation_depth(const Vec& envelope, const std::vector<Peak>& peaks);

PeakReport envelope_and_peaks(const SimulationTrace& trace, double window);
PeakReport peaks_from_envelope(const Vec& x, const Vec& envelope, double window);

/// Sample times inside the trailing window [T - window, T].
std::vector<double> window_times(const SimulationTrace& trace, double window);

double amplification_ratio(const PeakReport& active, const PeakReport& passive);

struct OtoacousticMetric {
  double trailing_rms = 0.0;   // RMS of v over x and the trailing window
  double transient_rms = 0.0;  // largest spatial RMS of v over the run
  double relative = 0.0;       // trailing_rms / transient_rms
};

OtoacousticMetric otoacoustic_metric(const SimulationTrace& trace, double window);

}  // namespace cochlea
