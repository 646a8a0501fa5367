// Command-line front end: simulate, scenario, converge, audit.
#include "cochlea/scenarios.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

using namespace cochlea;

namespace {

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw ConfigError("bad number in list: '" + item + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Active cochlea simulator: full chamber model and its reduced limit"};
  app.require_subcommand(1);

  std::string config_path, out_dir, engine, scenario, deltas = "0.2,0.1,0.05,0.025";
  bool gnuplot = false;

  auto* sim = app.add_subcommand("simulate", "run one configuration");
  sim->add_option("--config", config_path, "JSON config")->required();
  sim->add_option("--engine", engine, "spectral or fd")->check(CLI::IsMember({"spectral", "fd"}));
  sim->add_option("--out", out_dir, "output directory")->required();
  sim->add_flag("--gnuplot", gnuplot, "also write plot.gp");

  auto* scn = app.add_subcommand("scenario", "run a named preset with its checks");
  scn->add_option("name", scenario, "preset name")->required();
  scn->add_option("--out", out_dir, "output directory")->required();
  scn->add_flag("--gnuplot", gnuplot, "also write plot.gp");

  auto* conv = app.add_subcommand("converge", "delta ladder against the reduced model");
  conv->add_option("--config", config_path, "JSON config")->required();
  conv->add_option("--deltas", deltas, "comma separated aspect ratios");
  conv->add_option("--out", out_dir, "output directory")->required();
  conv->add_flag("--gnuplot", gnuplot, "also write plot.gp");

  auto* aud = app.add_subcommand("audit", "energy and interaction audits");
  aud->add_option("--config", config_path, "JSON config")->required();
  aud->add_option("--out", out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigError;
  }

  const OutputOptions opts{gnuplot};
  if (scn->parsed()) return run_scenario(scenario, out_dir, opts, std::cout);

  RunConfig cfg;
  std::vector<double> ladder;
  try {
    cfg = load_config(config_path);
    if (conv->parsed()) ladder = parse_list(deltas);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfigError;
  }
  cfg.out_dir = out_dir;
  if (!engine.empty()) cfg.engine = engine_kind_from_string(engine);

  if (sim->parsed()) return run_simulate(cfg, opts, std::cout);
  if (conv->parsed()) return run_converge(cfg, ladder, opts, std::cout);
  return run_audit(cfg, opts, std::cout);
}
