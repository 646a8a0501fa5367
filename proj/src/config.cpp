#include "cochlea/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace cochlea {

using json = nlohmann::json;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

[[noreturn]] void fail(const std::string& source, const std::string& path,
                       const std::string& what) {
  throw ConfigError(source + ": " + (path.empty() ? "/" : path) + ": " + what);
}

struct Reader {
  std::string source;

  void keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) const {
    if (!obj.is_object()) fail(source, path, "expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      const bool known = std::any_of(allowed.begin(), allowed.end(),
                                     [&](const char* k) { return it.key() == k; });
      if (!known) fail(source, path + "/" + it.key(), "unknown key");
    }
  }

  double number(const json& v, const std::string& path) const {
    if (!v.is_number()) fail(source, path, "expected a number");
    return v.get<double>();
  }

  long long integer(const json& v, const std::string& path) const {
    if (!v.is_number_integer()) fail(source, path, "expected an integer");
    return v.get<long long>();
  }

  std::uint64_t unsigned_integer(const json& v, const std::string& path) const {
    if (!v.is_number_unsigned()) fail(source, path, "expected a nonnegative integer");
    return v.get<std::uint64_t>();
  }

  std::string string(const json& v, const std::string& path) const {
    if (!v.is_string()) fail(source, path, "expected a string");
    return v.get<std::string>();
  }
};

json to_json(const RunConfig& c) {
  const ModelParams& p = c.params;
  json j;
  j["m"] = p.m;
  j["r"] = p.r;
  j["delta"] = p.delta;
  j["stiffness"] = {{"k0", p.stiffness.k0}, {"alpha", p.stiffness.alpha}};
  j["nonlinearity"] = {{"kind", to_string(p.nonlinearity.kind)},
                       {"rho", p.nonlinearity.rho},
                       {"c", p.nonlinearity.c}};
  json tones = json::array();
  for (const Tone& t : p.forcing.tones) tones.push_back({{"amp", t.amp}, {"omega", t.omega}});
  j["forcing"] = {{"tones", tones}, {"ramp_time", p.forcing.ramp_time}};
  if (p.rho_field)
    j["rho_field"] = {{"mean", p.rho_field->mean},
                      {"std", p.rho_field->std},
                      {"seed", p.rho_field->seed}};
  const Grid& g = c.grid;
  j["grid"] = {{"n", g.n},
               {"nz", g.nz},
               {"dt", g.dt},
               {"t_final", g.t_final},
               {"snapshot_window", g.snapshot_window},
               {"sample_every", g.sample_every}};
  j["engine"] = to_string(c.engine);
  j["seed"] = c.seed;
  j["initial_velocity_noise"] = c.initial_velocity_noise;
  j["separation_threshold"] = c.separation_threshold;
  if (c.scenario) j["scenario"] = *c.scenario;
  return j;
}

void apply(const json& j, RunConfig& c, const Reader& rd) {
  rd.keys(j, "",
          {"m", "r", "stiffness", "nonlinearity", "forcing", "delta", "grid", "rho_field",
           "engine", "seed", "scenario", "initial_velocity_noise", "separation_threshold"});
  ModelParams& p = c.params;
  if (j.contains("m")) p.m = rd.number(j["m"], "/m");
  if (j.contains("r")) p.r = rd.number(j["r"], "/r");
  if (j.contains("delta")) p.delta = rd.number(j["delta"], "/delta");
  if (j.contains("stiffness")) {
    const json& s = j["stiffness"];
    rd.keys(s, "/stiffness", {"k0", "alpha"});
    if (s.contains("k0")) p.stiffness.k0 = rd.number(s["k0"], "/stiffness/k0");
    if (s.contains("alpha")) p.stiffness.alpha = rd.number(s["alpha"], "/stiffness/alpha");
  }
  if (j.contains("nonlinearity")) {
    const json& s = j["nonlinearity"];
    rd.keys(s, "/nonlinearity", {"kind", "rho", "c"});
    if (s.contains("kind")) {
      const std::string kind = rd.string(s["kind"], "/nonlinearity/kind");
      try {
        p.nonlinearity.kind = nonlinearity_kind_from_string(kind);
      } catch (const std::exception&) {
        fail(rd.source, "/nonlinearity/kind", "unknown kind '" + kind + "'");
      }
    }
    if (s.contains("rho")) p.nonlinearity.rho = rd.number(s["rho"], "/nonlinearity/rho");
    if (s.contains("c")) p.nonlinearity.c = rd.number(s["c"], "/nonlinearity/c");
  }
  if (j.contains("forcing")) {
    const json& s = j["forcing"];
    rd.keys(s, "/forcing", {"tones", "ramp_time"});
    if (s.contains("tones")) {
      const json& arr = s["tones"];
      if (!arr.is_array()) fail(rd.source, "/forcing/tones", "expected an array");
      p.forcing.tones.clear();
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string path = "/forcing/tones/" + std::to_string(i);
        rd.keys(arr[i], path, {"amp", "omega"});
        if (!arr[i].contains("amp") || !arr[i].contains("omega"))
          fail(rd.source, path, "a tone needs both amp and omega");
        p.forcing.tones.push_back(
            {rd.number(arr[i]["amp"], path + "/amp"), rd.number(arr[i]["omega"], path + "/omega")});
      }
    }
    if (s.contains("ramp_time"))
      p.forcing.ramp_time = rd.number(s["ramp_time"], "/forcing/ramp_time");
  }
  if (j.contains("rho_field")) {
    const json& s = j["rho_field"];
    if (s.is_null()) {
      p.rho_field.reset();
    } else {
      rd.keys(s, "/rho_field", {"mean", "std", "seed"});
      RhoField rf = p.rho_field.value_or(RhoField{});
      if (s.contains("mean")) rf.mean = rd.number(s["mean"], "/rho_field/mean");
      if (s.contains("std")) rf.std = rd.number(s["std"], "/rho_field/std");
      if (s.contains("seed")) rf.seed = rd.unsigned_integer(s["seed"], "/rho_field/seed");
      p.rho_field = rf;
    }
  }
  if (j.contains("grid")) {
    const json& s = j["grid"];
    rd.keys(s, "/grid", {"n", "nz", "dt", "t_final", "snapshot_window", "sample_every"});
    Grid& g = c.grid;
    auto as_int = [&](const char* key) {
      const long long v = rd.integer(s[key], std::string("/grid/") + key);
      if (v < 0 || v > 1 << 24) fail(rd.source, std::string("/grid/") + key, "out of range");
      return static_cast<int>(v);
    };
    if (s.contains("n")) g.n = as_int("n");
    if (s.contains("nz")) g.nz = as_int("nz");
    if (s.contains("sample_every")) g.sample_every = as_int("sample_every");
    if (s.contains("dt")) g.dt = rd.number(s["dt"], "/grid/dt");
    if (s.contains("t_final")) g.t_final = rd.number(s["t_final"], "/grid/t_final");
    if (s.contains("snapshot_window"))
      g.snapshot_window = rd.number(s["snapshot_window"], "/grid/snapshot_window");
  }
  if (j.contains("engine")) {
    const std::string e = rd.string(j["engine"], "/engine");
    try {
      c.engine = engine_kind_from_string(e);
    } catch (const std::exception&) {
      fail(rd.source, "/engine", "unknown engine '" + e + "'");
    }
  }
  if (j.contains("seed")) c.seed = rd.unsigned_integer(j["seed"], "/seed");
  if (j.contains("initial_velocity_noise"))
    c.initial_velocity_noise = rd.number(j["initial_velocity_noise"], "/initial_velocity_noise");
  if (j.contains("separation_threshold"))
    c.separation_threshold = rd.number(j["separation_threshold"], "/separation_threshold");
}

// '#' lines become blank so parser line numbers still match the file.
std::string strip_comment_lines(const std::string& text) {
  std::istringstream in(text);
  std::string out, line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t");
    if (first != std::string::npos && line[first] == '#') line.clear();
    out += line;
    out += '\n';
  }
  return out;
}

ModelParams fig_params(bool active, int figure) {
  ModelParams p;
  p.m = 1.0;
  p.stiffness = {400.0, 9.6};
  p.delta = 0.0;
  if (figure == 1) {
    p.r = 0.3;
    p.forcing.tones = {{0.1, 2.0}, {0.08, 2.4}};
    p.nonlinearity = {active ? NonlinearityKind::ExpRayleigh : NonlinearityKind::Passive,
                      active ? 0.2995 : 0.0, 0.05};
  } else {
    p.r = 2.0;
    p.forcing.tones = {{0.1, 2.0}, {0.1, 2.3}};
    p.nonlinearity = {active ? NonlinearityKind::ExpRayleigh : NonlinearityKind::Passive,
                      active ? 1.995 : 0.0, 0.05};
  }
  return p;
}

}  // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {
      "fig1-passive", "fig1-active", "fig2-passive", "fig2-active",
      "convergence",  "energy-audit", "otoacoustic", "oracle-suite"};
  return names;
}

bool is_scenario(const std::string& name) {
  const auto& names = scenario_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

RunConfig scenario_preset(const std::string& name) {
  if (!is_scenario(name)) throw ConfigError("unknown scenario '" + name + "'");
  RunConfig c;
  c.scenario = name;
  if (name == "fig1-passive" || name == "oracle-suite") {
    c.params = fig_params(false, 1);
  } else if (name == "fig1-active" || name == "energy-audit") {
    c.params = fig_params(true, 1);
  } else if (name == "fig2-passive") {
    c.params = fig_params(false, 2);
  } else if (name == "fig2-active") {
    c.params = fig_params(true, 2);
  } else if (name == "convergence") {
    c.params = fig_params(false, 1);
    c.grid.t_final = 50.0;
    c.grid.snapshot_window = 25.0;
    c.grid.sample_every = 10;
  } else if (name == "otoacoustic") {
    // f = 0; a small seeded velocity kick starts the motion
    c.params = fig_params(true, 2);
    c.params.forcing.tones.clear();
    c.params.nonlinearity.rho = 0.95 * c.params.r;
    c.params.rho_field = RhoField{0.95 * c.params.r, 0.5 * c.params.r, 20201};
    c.grid.t_final = 500.0;
    c.grid.sample_every = 100;
    c.seed = 7;
    c.initial_velocity_noise = 1e-3;
  }
  return c;
}

RunConfig parse_config(const std::string& text, const std::string& source) {
  json j;
  try {
    j = json::parse(strip_comment_lines(text));
  } catch (const json::parse_error& e) {
    throw ConfigError(source + ": " + e.what());
  }
  const Reader rd{source};
  if (!j.is_object()) fail(source, "", "expected an object");

  RunConfig c;
  json base;
  if (j.contains("scenario")) {
    const std::string name = rd.string(j["scenario"], "/scenario");
    if (!is_scenario(name)) fail(source, "/scenario", "unknown scenario '" + name + "'");
    c = scenario_preset(name);
    base = to_json(c);
  }
  apply(j, c, rd);

  if (c.scenario) {
    for (const json& op : json::diff(base, to_json(c)))
      c.overrides.push_back(op["path"].get<std::string>());
  }

  ValidationReport report = validate_params(c.params, &c.grid);
  if (!report.ok()) {
    std::string msg = source + ": invalid configuration:";
    for (const std::string& e : report.errors()) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

std::string config_to_json(const RunConfig& cfg) { return to_json(cfg).dump(2); }

std::string config_digest(const RunConfig& cfg) {
  const std::string text = to_json(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool same_config(const RunConfig& a, const RunConfig& b) { return to_json(a) == to_json(b); }

}  // namespace cochlea
