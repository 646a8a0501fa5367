#include "cochlea/output.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <functional>

namespace cochlea {

namespace fs = std::filesystem;
using json = nlohmann::json;

bool RunSummary::all_pass() const {
  for (const Check& c : checks)
    if (c.pass == c.expected_fail) return false;
  return true;
}

namespace {

// One writer per run directory; files are staged and renamed.
class RunWriter {
 public:
  RunWriter(fs::path dir, std::string digest) : dir_(std::move(dir)), digest_(std::move(digest)) {
    fs::create_directories(dir_);
  }

  void write(const std::string& name, const std::function<void(std::ostream&)>& body) {
    const fs::path target = dir_ / name;
    const fs::path tmp = dir_ / ("." + name + ".tmp");
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error("cannot write " + tmp.string());
      out << "# config-digest: " << digest_ << '\n';
      body(out);
      out.flush();
      if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
    written_.push_back(name);
  }

  const std::vector<std::string>& written() const { return written_; }

 private:
  fs::path dir_;
  std::string digest_;
  std::vector<std::string> written_;
};

void row(std::ostream& out, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) out << ',';
    out << fmt17(v);
    first = false;
  }
  out << '\n';
}

void write_trace(std::ostream& out, const SimulationTrace& tr) {
  out << "t,node,x,v,vdot,p_bottom\n";
  std::string line;
  for (Eigen::Index i = 0; i < tr.samples(); ++i) {
    const std::string t = fmt17(tr.times[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < tr.n(); ++j) {
      line = t;
      line += ',';
      line += std::to_string(j);
      for (double v : {tr.x(j), tr.v(j, i), tr.vdot(j, i), tr.p_bottom(j, i)}) {
        line += ',';
        line += fmt17(v);
      }
      line += '\n';
      out << line;
    }
  }
}

void write_snapshot(std::ostream& out, const SimulationTrace& tr, const Vec& envelope) {
  out << "x,v_T,vdot_T,envelope\n";
  for (Eigen::Index j = 0; j < tr.n(); ++j)
    row(out, {tr.x(j), tr.final_state.v(j), tr.final_state.vdot(j), envelope(j)});
}

void write_convergence(std::ostream& out, const std::vector<ModelErrorNorms>& entries) {
  out << "delta";
  for (const std::string& name : error_norm_names()) out << ',' << name;
  out << '\n';
  for (const ModelErrorNorms& e : entries) {
    out << fmt17(e.delta);
    for (const std::string& name : error_norm_names()) out << ',' << fmt17(error_norm_value(e, name));
    out << '\n';
  }
}

void write_field(std::ostream& out, const PressureField& f) {
  out << "x,z,p\n";
  for (Eigen::Index j = 0; j < f.values.rows(); ++j)
    for (Eigen::Index l = 0; l < f.values.cols(); ++l) row(out, {f.x(j), f.z(l), f.values(j, l)});
}

void write_gnuplot(std::ostream& out, bool has_convergence) {
  out << "set datafile separator ','\n"
         "set key autotitle columnhead\n"
         "set xlabel 'x'\n"
         "set terminal pngcairo size 900,600\n"
         "set output 'snapshot.png'\n"
         "plot 'snapshot.csv' using 1:4 with lines title 'envelope', \\\n"
         "     'snapshot.csv' using 1:2 with lines title 'v(T)'\n";
  if (has_convergence) {
    out << "set output 'convergence.png'\n"
           "set logscale xy\n"
           "set xlabel 'delta'\n"
           "plot for [k=2:8] 'convergence.csv' using 1:k with linespoints\n";
  }
}

json checks_json(const std::vector<Check>& checks) {
  json arr = json::array();
  for (const Check& c : checks)
    arr.push_back({{"name", c.name},
                   {"result", c.pass ? "pass" : "fail"},
                   {"value", c.value},
                   {"criterion", c.criterion},
                   {"expected_fail", c.expected_fail}});
  return arr;
}

}  // namespace

std::string summary_json(const RunConfig& cfg, const RunSummary& s) {
  json j;
  j["config_digest"] = config_digest(cfg);
  j["config"] = json::parse(config_to_json(cfg));
  j["overrides"] = cfg.overrides;
  j["scenario"] = cfg.scenario ? json(*cfg.scenario) : json(nullptr);
  j["seeds"] = {{"seed", cfg.seed},
                {"rho_field_seed",
                 cfg.params.rho_field ? json(cfg.params.rho_field->seed) : json(nullptr)}};
  j["status"] = s.status.empty() ? (s.all_pass() ? "pass" : "fail") : s.status;
  json metrics = json::object();
  for (const auto& [name, value] : s.metrics) metrics[name] = value;
  j["metrics"] = metrics;
  j["checks"] = checks_json(s.checks);
  json fits = json::object();
  for (const auto& [name, fit] : s.fits) fits[name] = {{"order", fit.order}, {"residual", fit.residual}};
  j["fits"] = fits;
  j["warnings"] = s.warnings;
  j["notes"] = s.notes;
  return j.dump(2);
}

std::vector<std::string> write_outputs(const std::string& dir, const RunConfig& cfg,
                                       const Artifacts& a, const OutputOptions& options) {
  RunWriter w(dir, config_digest(cfg));
  if (a.trace) {
    w.write("trace.csv", [&](std::ostream& out) { write_trace(out, *a.trace); });
    Vec env;
    if (a.peaks) {
      env = a.peaks->envelope;
    } else {
      const double span = a.trace->samples() ? a.trace->times.back() - a.trace->times.front() : 0.0;
      env = cfg.grid.snapshot_window <= span
                ? envelope_and_peaks(*a.trace, cfg.grid.snapshot_window).envelope
                : Vec(a.trace->v.rowwise().lpNorm<Eigen::Infinity>());
    }
    w.write("snapshot.csv", [&](std::ostream& out) { write_snapshot(out, *a.trace, env); });
  }
  if (!a.convergence.empty())
    w.write("convergence.csv", [&](std::ostream& out) { write_convergence(out, a.convergence); });
  if (a.field) w.write("field.csv", [&](std::ostream& out) { write_field(out, *a.field); });
  if (options.gnuplot && a.trace)
    w.write("plot.gp", [&](std::ostream& out) { write_gnuplot(out, !a.convergence.empty()); });
  w.write("summary.json", [&](std::ostream& out) { out << summary_json(cfg, a.summary) << '\n'; });
  return w.written();
}

}  // namespace cochlea
