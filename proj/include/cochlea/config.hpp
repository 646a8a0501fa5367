// Run configuration: JSON schema, scenario presets and the config digest.
#pragma once

#include "cochlea/model.hpp"
#include "cochlea/solver.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cochlea {

struct RunConfig {
  ModelParams params;
  Grid grid;
  EngineKind engine = EngineKind::Spectral;
  std::optional<std::string> scenario;
  std::string out_dir;  // from the command line; not part of the file
  std::uint64_t seed = 0;
  double initial_velocity_noise = 0.0;
  double separation_threshold = 0.25;
  std::vector<std::string> overrides;  // key paths set on top of the scenario
};

/// Keys present in the file that replaced preset values are listed in
/// `overrides`; everything else comes from the preset (or defaults).
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text, const std::string& source = "<string>");

/// Canonical JSON text (sorted keys, round-trip exact numbers).
std::string config_to_json(const RunConfig& cfg);

/// FNV-1a 64-bit over the canonical JSON, as 16 hex digits.
std::string config_digest(const RunConfig& cfg);

bool same_config(const RunConfig& a, const RunConfig& b);

const std::vector<std::string>& scenario_names();
bool is_scenario(const std::string& name);

/// Base configuration of a named scenario; throws ConfigError for unknown names.
RunConfig scenario_preset(const std::string& name);

/// Formats a double with 17 significant digits.
std::string fmt17(double v);

}  // namespace cochlea
