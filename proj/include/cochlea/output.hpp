// File artifacts of a run: CSV tables and the JSON summary.
#pragma once

#include "cochlea/config.hpp"
#include "cochlea/diagnostics.hpp"
#include "cochlea/spectral.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cochlea {

struct Check {
  std::string name;
  bool pass = false;
  double value = 0.0;
  std::string criterion;  // e.g. ">= 1.8"
  bool expected_fail = false;  // the check documents a negative result
};

struct RunSummary {
  std::string status;  // "pass", "fail", "error"
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<Check> checks;
  std::vector<std::pair<std::string, ConvergenceFit>> fits;
  std::vector<std::string> warnings;
  std::vector<std::string> notes;

  bool all_pass() const;
};

struct Artifacts {
  const SimulationTrace* trace = nullptr;  // trace.csv, snapshot.csv
  std::optional<PeakReport> peaks;         // envelope column of snapshot.csv
  std::vector<ModelErrorNorms> convergence;
  std::optional<PressureField> field;
  RunSummary summary;
};

struct OutputOptions {
  bool gnuplot = false;
};

/// Writes every file of one run. Each file is staged next to its target and
/// renamed into place; every file starts with a "# config-digest: <hex>" line.
/// Returns the written file names.
std::vector<std::string> write_outputs(const std::string& dir, const RunConfig& cfg,
                                       const Artifacts& artifacts,
                                       const OutputOptions& options = {});

/// Body of summary.json without the digest line.
std::string summary_json(const RunConfig& cfg, const RunSummary& summary);

}  // namespace cochlea
