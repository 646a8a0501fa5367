#include "cochlea/scenarios.hpp"

#include "cochlea/fd_reference.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <mutex>
#include <ostream>
#include <thread>

namespace cochlea {

void parallel_for(int count, const std::function<void(int)>& fn, int threads) {
  if (count <= 0) return;
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, count);
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int k = 1; k < threads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::vector<double> membrane_energy_samples(const SimulationTrace& tr, double m) {
  std::vector<double> out(static_cast<std::size_t>(tr.samples()));
  const double h = tr.grid.h();
  for (Eigen::Index i = 0; i < tr.samples(); ++i)
    out[static_cast<std::size_t>(i)] =
        0.5 * h *
        (m * tr.vdot.col(i).squaredNorm() + tr.stiffness.dot(tr.v.col(i).cwiseAbs2()));
  return out;
}

namespace {

SimulationOptions options_for(const RunConfig& cfg, bool store_accel) {
  SimulationOptions o;
  o.engine = cfg.engine;
  o.store_accel_spectra = store_accel || cfg.params.delta > 0.0;
  o.initial_velocity_noise = cfg.initial_velocity_noise;
  o.seed = cfg.seed;
  return o;
}

double relative_gap(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s > 0.0 ? std::abs(a - b) / s : 0.0;
}

// Two tallest peaks, sorted by x, each within tol of the matching target.
double peak_location_error(const PeakReport& rep, std::vector<double> targets) {
  if (rep.peaks.size() < 2 || targets.size() < 2) return INFINITY;
  std::vector<double> xs = {rep.peaks[0].x, rep.peaks[1].x};
  std::sort(xs.begin(), xs.end());
  std::sort(targets.begin(), targets.end());
  return std::max(std::abs(xs[0] - targets[0]), std::abs(xs[1] - targets[1]));
}

void add_metric(RunSummary& s, const std::string& name, double v) { s.metrics.emplace_back(name, v); }

void add_check(RunSummary& s, const std::string& name, bool pass, double value,
               const std::string& criterion, bool expected_fail = false) {
  s.checks.push_back({name, pass, value, criterion, expected_fail});
}

void add_run_checks(RunSummary& s, const SingleRun& run, const std::string& prefix) {
  const std::string p = prefix.empty() ? "" : prefix + ".";
  add_metric(s, p + "energy_relative_residual", run.energy.relative_residual);
  add_metric(s, p + "interaction_direct", run.interaction.direct);
  add_metric(s, p + "interaction_spectral", run.interaction.spectral);
  add_metric(s, p + "interaction_min_running", run.min_running_interaction);
  add_metric(s, p + "interaction_scale", run.interaction_scale);
  add_metric(s, p + "max_abs_vdot", run.trace.vdot.cwiseAbs().maxCoeff());
  add_check(s, p + "energy_identity", run.energy.relative_residual < 1e-4,
            run.energy.relative_residual, "< 1e-4");
  const double floor = -1e-10 * run.interaction_scale;
  add_check(s, p + "interaction_positive", run.min_running_interaction >= floor,
            run.min_running_interaction, ">= -1e-10 * scale");
  const double gap = relative_gap(run.interaction.direct, run.interaction.spectral);
  add_check(s, p + "interaction_direct_vs_spectral", gap <= 0.01, gap, "<= 0.01");
}

void add_peak_metrics(RunSummary& s, const PeakReport& rep, const std::string& prefix) {
  const std::string p = prefix.empty() ? "" : prefix + ".";
  add_metric(s, p + "envelope_max", rep.envelope.maxCoeff());
  add_metric(s, p + "peak_count", static_cast<double>(rep.peaks.size()));
  for (std::size_t i = 0; i < std::min<std::size_t>(2, rep.peaks.size()); ++i) {
    add_metric(s, p + "peak" + std::to_string(i + 1) + "_x", rep.peaks[i].x);
    add_metric(s, p + "peak" + std::to_string(i + 1) + "_height", rep.peaks[i].height);
  }
  add_metric(s, p + "separation", rep.separation);
}

std::vector<double> tone_targets(const ModelParams& params) {
  std::vector<double> out;
  for (const Tone& t : params.forcing.tones) out.push_back(resonance_location(params, t.omega));
  return out;
}

void warn_all(RunSummary& s, const ValidationReport& v, std::ostream& log) {
  for (const std::string& w : v.warnings()) {
    s.warnings.push_back(w);
    log << "warning: " << w << '\n';
  }
}

int finish(const RunConfig& cfg, Artifacts& a, const OutputOptions& opts, std::ostream& log) {
  a.summary.status = a.summary.all_pass() ? "pass" : "fail";
  for (const Check& c : a.summary.checks)
    log << (c.pass ? "PASS " : "FAIL ") << c.name << " = " << fmt17(c.value) << " (" << c.criterion
        << (c.expected_fail ? ", expected fail" : "") << ")\n";
  if (!cfg.out_dir.empty()) {
    const auto files = write_outputs(cfg.out_dir, cfg, a, opts);
    log << "wrote";
    for (const auto& f : files) log << ' ' << f;
    log << " to " << cfg.out_dir << '\n';
  }
  return a.summary.all_pass() ? kExitPass : kExitChecksFailed;
}

template <typename Fn>
int guarded(const RunConfig& cfg, std::ostream& log, Fn&& fn) {
  auto write_error = [&](const std::string& status, const std::string& what) {
    if (cfg.out_dir.empty()) return;
    try {
      Artifacts a;
      a.summary.status = status;
      a.summary.notes.push_back(what);
      write_outputs(cfg.out_dir, cfg, a);
    } catch (const std::exception&) {
    }
  };
  try {
    return fn();
  } catch (const NumericalAbort& e) {
    log << "numerical abort: " << e.what() << '\n';
    write_error("numerical-abort", e.what());
    return kExitNumericalAbort;
  } catch (const ConfigError& e) {
    log << "configuration error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    log << "configuration error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    write_error("error", e.what());
    return kExitConfigError;
  }
}

RunConfig with_out(RunConfig cfg, const std::string& dir) {
  cfg.out_dir = dir;
  return cfg;
}

}  // namespace

SingleRun run_single(const RunConfig& cfg, bool store_accel_spectra) {
  SingleRun out;
  out.validation = validate_params(cfg.params, &cfg.grid);
  if (!out.validation.ok()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : out.validation.errors()) msg += " " + e;
    throw ConfigError(msg);
  }
  out.trace = simulate(cfg.params, cfg.grid, options_for(cfg, store_accel_spectra));
  out.peaks = envelope_and_peaks(out.trace, cfg.grid.snapshot_window);
  out.energy = energy_audit(out.trace);
  out.interaction = interaction_energy(out.trace);
  double big = 0.0;
  out.min_running_interaction = 0.0;
  for (const EnergyTerms& e : out.trace.running) {
    out.min_running_interaction = std::min(out.min_running_interaction, e.interaction);
    big = std::max(big, std::abs(e.interaction));
  }
  for (double e : membrane_energy_samples(out.trace, cfg.params.m)) big = std::max(big, e);
  out.interaction_scale = big;
  return out;
}

DeltaLadder delta_ladder(const RunConfig& base, const std::vector<double>& deltas) {
  const int count = static_cast<int>(deltas.size());
  std::vector<SimulationTrace> traces(static_cast<std::size_t>(count + 1));
  parallel_for(count + 1, [&](int i) {
    RunConfig cfg = base;
    cfg.params.delta = i == 0 ? 0.0 : deltas[static_cast<std::size_t>(i - 1)];
    traces[static_cast<std::size_t>(i)] = simulate(cfg.params, cfg.grid, options_for(cfg, i > 0));
  });

  DeltaLadder out;
  out.deltas = deltas;
  const SimulationTrace& reduced = traces[0];
  for (int i = 1; i <= count; ++i) {
    const SimulationTrace& full = traces[static_cast<std::size_t>(i)];
    out.entries.push_back(model_error_norms(full, reduced));
    out.interactions.push_back(interaction_energy(full));
    double lo = 0.0, big = 0.0;
    for (const EnergyTerms& e : full.running) {
      lo = std::min(lo, e.interaction);
      big = std::max(big, std::abs(e.interaction));
    }
    for (double e : membrane_energy_samples(full, base.params.m)) big = std::max(big, e);
    out.min_running_interaction.push_back(lo);
    out.interaction_scale.push_back(big);
    out.energy_residuals.push_back(energy_audit(full).relative_residual);
  }
  out.report = summarize_error_norms(out.entries);

  std::vector<std::pair<double, double>> vnorm;
  out.v_norm_decreasing = true;
  std::vector<ModelErrorNorms> sorted = out.entries;
  std::sort(sorted.begin(), sorted.end(),
            [](const ModelErrorNorms& a, const ModelErrorNorms& b) { return a.delta > b.delta; });
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    vnorm.emplace_back(sorted[i].delta, std::sqrt(sorted[i].v_diff));
    if (i > 0 && !(sorted[i].v_diff < sorted[i - 1].v_diff)) out.v_norm_decreasing = false;
  }
  if (vnorm.size() >= 3) out.v_norm_fit = fit_convergence_order(vnorm);
  return out;
}

EnergyLadder energy_dt_ladder(const RunConfig& base, const std::vector<double>& dts) {
  EnergyLadder out;
  out.dts = dts;
  out.relative_residuals.assign(dts.size(), 0.0);
  parallel_for(static_cast<int>(dts.size()), [&](int i) {
    RunConfig cfg = base;
    const double dt = dts[static_cast<std::size_t>(i)];
    cfg.grid.dt = dt;
    // keep the sampling period in time units
    cfg.grid.sample_every =
        std::max(1, static_cast<int>(std::lround(base.grid.sample_every * base.grid.dt / dt)));
    const SimulationTrace tr = simulate(cfg.params, cfg.grid, options_for(cfg, false));
    out.relative_residuals[static_cast<std::size_t>(i)] = energy_audit(tr).relative_residual;
  });
  std::vector<std::pair<double, double>> pairs;
  for (std::size_t i = 0; i < dts.size(); ++i) pairs.emplace_back(dts[i], out.relative_residuals[i]);
  if (pairs.size() >= 3) out.fit = fit_convergence_order(pairs);
  return out;
}

OtoacousticStudy otoacoustic_study(const RunConfig& cfg) {
  if (!cfg.params.rho_field) throw ConfigError("otoacoustic study needs a rho_field");
  RunConfig twin = cfg;
  twin.params.rho_field->std = 0.0;
  std::vector<SimulationTrace> traces(2);
  parallel_for(2, [&](int i) {
    const RunConfig& c = i == 0 ? cfg : twin;
    traces[static_cast<std::size_t>(i)] = simulate(c.params, c.grid, options_for(c, false));
  });
  OtoacousticStudy out;
  out.emission = otoacoustic_metric(traces[0], cfg.grid.snapshot_window);
  out.twin = otoacoustic_metric(traces[1], cfg.grid.snapshot_window);
  out.unstable_fraction = validate_params(cfg.params, &cfg.grid).rho_field_unstable_fraction;
  out.energy = energy_audit(traces[0]);
  out.trace = std::move(traces[0]);
  return out;
}

MembraneState oracle_state(int n) {
  MembraneState s = MembraneState::zero(n);
  const Vec x = Grid{.n = n}.nodes();
  s.v = 0.05 * (x.array() * (1.0 - x.array()) * (2.0 * x.array()).exp()).matrix();
  s.vdot = 0.3 * ((5.0 * x.array()).cos() * x.array() * (1.0 - x.array())).matrix();
  return s;
}

OracleSuite oracle_suite() {
  OracleSuite out;
  const ModelParams active = scenario_preset("fig1-active").params;

  auto reduced_err = [&](int n) {
    const MembraneState s = oracle_state(n);
    const Vec a = acceleration_solve(s, 0.0, active);
    const Vec b = fd_reduced_accel_solve(s, 0.0, active);
    return (a - b).norm() / a.norm();
  };
  for (int n : {31, 63, 127, 255}) out.reduced_ladder.emplace_back(1.0 / (n + 1), reduced_err(n));
  out.reduced_rel_err = reduced_err(128);
  out.reduced_fit = fit_convergence_order(out.reduced_ladder);

  {
    ModelParams p = active;
    p.delta = 0.1;
    const int n = 128;
    const MembraneState s = oracle_state(n);
    const SpectralAccelerationSolver spec(p, n);
    const FdCoupledAccelerationSolver fd(p, n, n);
    const Vec a = spec.accelerate(s.v, s.vdot, 0.0).vddot;
    const Vec b = fd.accelerate(s.v, s.vdot, 0.0).vddot;
    out.coupled_rel_err = (a - b).norm() / a.norm();
  }

  {
    const int n = 128;
    const Vec x = Grid{.n = n}.nodes();
    const Vec mode = (kPi * x.array()).sin().matrix();
    const FdLaplaceSolver lap(n, n, 1.0);
    const Mat p = lap.solve(0.0, -mode);
    out.fd_lambda1 = dst_forward(Vec(p.col(0))).coeffs(0);
    out.spectral_lambda1 = ndt_symbol(1, 1.0);
  }

  {
    RunConfig cfg = scenario_preset("fig1-passive");
    out.steady_trace = simulate(cfg.params, cfg.grid, options_for(cfg, false));
    const auto times = window_times(out.steady_trace, cfg.grid.snapshot_window);
    const Vec env_td = envelope_and_peaks(out.steady_trace, cfg.grid.snapshot_window).envelope;
    const Vec env_fd = passive_steady_state_oracle(cfg.params, cfg.grid).envelope(times);
    out.steady_state_rel_err = (env_td - env_fd).norm() / env_fd.norm();
  }

  {
    const double m = 1.0, k = 4.0, p0 = 1.0, dt = 1e-4;
    const double rs[3] = {0.3, 4.0, 10.0};
    for (int c = 0; c < 3; ++c) {
      const double r = rs[c];
      MembraneState s = MembraneState::zero(1);
      auto accel = [&](const Vec& v, const Vec& w, double) -> Vec {
        return ((-p0 - r * w.array() - k * v.array()) / m).matrix();
      };
      double worst = 0.0;
      for (long i = 1; i <= 100000; ++i) {
        s = rk4_step(s, dt, accel);
        const OscillatorSample ref = damped_oscillator_closed_form(m, r, k, p0, i * dt);
        worst = std::max({worst, std::abs(s.v(0) - ref.v), std::abs(s.vdot(0) - ref.vdot)});
      }
      out.rk4_max_err[c] = worst;
    }
  }
  return out;
}

int run_simulate(const RunConfig& cfg, const OutputOptions& opts, std::ostream& log) {
  return guarded(cfg, log, [&] {
    log << "simulate: engine " << to_string(cfg.engine) << ", delta " << cfg.params.delta << ", n "
        << cfg.grid.n << ", " << cfg.grid.steps() << " steps\n";
    SingleRun run = run_single(cfg);
    Artifacts a;
    warn_all(a.summary, run.validation, log);
    add_peak_metrics(a.summary, run.peaks, "");
    add_run_checks(a.summary, run, "");
    a.trace = &run.trace;
    a.peaks = run.peaks;
    if (cfg.params.delta > 0.0 && run.trace.samples() > 0) {
      const Eigen::Index last = run.trace.samples() - 1;
      a.field = reconstruct_pressure_field(SineSpectrum{run.trace.accel_spectra.col(last)},
                                           run.trace.forcing(last), cfg.params.delta,
                                           cfg.grid.nz, run.trace.times.back());
    }
    return finish(cfg, a, opts, log);
  });
}

namespace {

void add_ladder_checks(RunSummary& s, const DeltaLadder& lad, const std::string& prefix) {
  const std::string p = prefix.empty() ? "" : prefix + ".";
  for (const auto& [name, fit] : lad.report.fits) {
    s.fits.emplace_back(p + name, fit);
    add_check(s, p + name + ".order", fit.order >= 1.8, fit.order, ">= 1.8");
    add_check(s, p + name + ".fit_residual", fit.residual < 0.15, fit.residual, "< 0.15");
  }
  s.fits.emplace_back(p + "v_norm", lad.v_norm_fit);
  add_check(s, p + "v_norm_decreasing", lad.v_norm_decreasing, lad.v_norm_decreasing ? 1.0 : 0.0,
            "strictly decreasing in delta");
  add_check(s, p + "v_norm_slope", lad.v_norm_fit.order >= 0.9, lad.v_norm_fit.order, ">= 0.9");
  for (std::size_t i = 0; i < lad.deltas.size(); ++i) {
    const std::string q = p + "delta_" + fmt17(lad.deltas[i]) + ".";
    const double floor = -1e-10 * lad.interaction_scale[i];
    add_check(s, q + "interaction_positive", lad.min_running_interaction[i] >= floor,
              lad.min_running_interaction[i], ">= -1e-10 * scale");
    const double gap = relative_gap(lad.interactions[i].direct, lad.interactions[i].spectral);
    add_check(s, q + "interaction_direct_vs_spectral", gap <= 0.01, gap, "<= 0.01");
    add_check(s, q + "energy_identity", lad.energy_residuals[i] < 1e-4, lad.energy_residuals[i],
              "< 1e-4");
  }
}

int converge_into(const RunConfig& cfg, const std::vector<double>& deltas, const OutputOptions& opts,
                  std::ostream& log, RunSummary* parent, const std::string& prefix) {
  if (deltas.size() < 3) throw ConfigError("a delta ladder needs at least three values");
  for (double d : deltas)
    if (!(d > 0.0)) throw ConfigError("ladder deltas must be positive");
  log << "converge: " << deltas.size() << " deltas, t_final " << cfg.grid.t_final << '\n';
  const DeltaLadder lad = delta_ladder(cfg, deltas);
  Artifacts a;
  a.convergence = lad.entries;
  add_ladder_checks(a.summary, lad, "");
  if (parent) add_ladder_checks(*parent, lad, prefix);
  return finish(cfg, a, opts, log);
}

void add_energy_ladder(RunSummary& s, const EnergyLadder& lad, const std::string& prefix) {
  const std::string p = prefix.empty() ? "" : prefix + ".";
  for (std::size_t i = 0; i < lad.dts.size(); ++i)
    add_metric(s, p + "energy_residual_dt_" + fmt17(lad.dts[i]), lad.relative_residuals[i]);
  s.fits.emplace_back(p + "energy_residual", lad.fit);
  add_check(s, p + "energy_residual_order", lad.fit.order >= 2.0, lad.fit.order, ">= 2");
}

const std::vector<double> kEnergyDts = {4e-3, 2e-3, 1e-3, 5e-4};

}  // namespace

int run_converge(const RunConfig& cfg, const std::vector<double>& deltas, const OutputOptions& opts,
                 std::ostream& log) {
  return guarded(cfg, log, [&] { return converge_into(cfg, deltas, opts, log, nullptr, ""); });
}

int run_audit(const RunConfig& cfg, const OutputOptions& opts, std::ostream& log) {
  return guarded(cfg, log, [&] {
    log << "audit: dt ladder and energy/interaction checks\n";
    const SingleRun run = run_single(cfg);
    Artifacts a;
    warn_all(a.summary, run.validation, log);
    add_run_checks(a.summary, run, "");
    add_energy_ladder(a.summary, energy_dt_ladder(cfg, kEnergyDts), "");
    a.trace = &run.trace;
    a.peaks = run.peaks;
    return finish(cfg, a, opts, log);
  });
}

int run_scenario(const std::string& name, const std::string& out_dir, const OutputOptions& opts,
                 std::ostream& log) {
  if (!is_scenario(name)) {
    log << "configuration error: unknown scenario '" << name << "'\n";
    return kExitConfigError;
  }
  const RunConfig cfg = with_out(scenario_preset(name), out_dir);
  return guarded(cfg, log, [&]() -> int {
    log << "scenario " << name << '\n';
    Artifacts a;
    RunSummary& s = a.summary;

    if (name.rfind("fig", 0) == 0) {
      const SingleRun run = run_single(cfg);
      warn_all(s, run.validation, log);
      add_peak_metrics(s, run.peaks, "");
      add_run_checks(s, run, "");
      const std::vector<double> targets = tone_targets(cfg.params);
      for (std::size_t i = 0; i < targets.size(); ++i)
        add_metric(s, "resonance_x_" + std::to_string(i + 1), targets[i]);
      if (name.rfind("fig1", 0) == 0) {
        const double err = peak_location_error(run.peaks, targets);
        add_check(s, "peak_locations", err <= 0.05, err, "<= 0.05");
      }
      if (name == "fig1-active") {
        RunConfig passive = scenario_preset("fig1-passive");
        passive.grid = cfg.grid;
        const SingleRun twin = run_single(passive);
        const double ratio = amplification_ratio(run.peaks, twin.peaks);
        add_metric(s, "passive.envelope_max", twin.peaks.envelope.maxCoeff());
        add_check(s, "amplification_ratio", ratio >= 5.0 && ratio <= 20.0, ratio, "in [5, 20]");
        s.notes.push_back("amplification band [5, 20] around the reported factor of about 10");
      }
      if (name.rfind("fig2", 0) == 0) {
        const bool separated = run.peaks.peaks.size() >= 2 &&
                               run.peaks.separation >= cfg.separation_threshold;
        add_check(s, "two_tone_separation", separated, run.peaks.separation,
                  ">= " + fmt17(cfg.separation_threshold), name == "fig2-passive");
      }
      a.trace = &run.trace;
      a.peaks = run.peaks;
      return finish(cfg, a, opts, log);
    }

    if (name == "convergence") {
      const std::vector<double> deltas = {0.2, 0.1, 0.05, 0.025};
      int worst = kExitPass;
      for (const char* preset : {"fig1-passive", "fig1-active"}) {
        RunConfig c = scenario_preset(preset);
        c.grid = cfg.grid;
        c.out_dir = out_dir.empty() ? "" : (std::filesystem::path(out_dir) / preset).string();
        worst = std::max(worst, converge_into(c, deltas, opts, log, &s, preset));
      }
      finish(cfg, a, opts, log);
      return s.all_pass() ? worst : kExitChecksFailed;
    }

    if (name == "energy-audit") {
      SingleRun kept;
      for (const char* preset : {"fig1-passive", "fig1-active", "fig2-passive", "fig2-active",
                                 "otoacoustic"}) {
        log << "  " << preset << '\n';
        const RunConfig c = scenario_preset(preset);
        SingleRun run = run_single(c);
        add_run_checks(s, run, preset);
        add_energy_ladder(s, energy_dt_ladder(c, kEnergyDts), preset);
        if (std::string(preset) == "fig1-active") kept = std::move(run);
      }
      a.trace = &kept.trace;
      a.peaks = kept.peaks;
      return finish(cfg, a, opts, log);
    }

    if (name == "otoacoustic") {
      const OtoacousticStudy st = otoacoustic_study(cfg);
      add_metric(s, "trailing_rms", st.emission.trailing_rms);
      add_metric(s, "transient_rms", st.emission.transient_rms);
      add_metric(s, "relative_rms", st.emission.relative);
      add_metric(s, "twin.trailing_rms", st.twin.trailing_rms);
      add_metric(s, "twin.transient_rms", st.twin.transient_rms);
      add_metric(s, "twin.relative_rms", st.twin.relative);
      add_metric(s, "unstable_fraction", st.unstable_fraction);
      add_metric(s, "energy_relative_residual", st.energy.relative_residual);
      add_check(s, "emission", st.emission.trailing_rms > 1e3 * st.twin.trailing_rms,
                st.emission.trailing_rms, "> 1e3 * twin trailing RMS");
      add_check(s, "twin_decay", st.twin.relative < 1e-8, st.twin.relative, "< 1e-8");
      add_check(s, "energy_identity", st.energy.relative_residual < 1e-4,
                st.energy.relative_residual, "< 1e-4");
      s.notes.push_back("f = 0; motion starts from a seeded initial velocity of amplitude " +
                        fmt17(cfg.initial_velocity_noise));
      a.trace = &st.trace;
      return finish(cfg, a, opts, log);
    }

    // oracle-suite
    const OracleSuite o = oracle_suite();
    for (const auto& [h, e] : o.reduced_ladder) add_metric(s, "reduced_rel_err_h_" + fmt17(h), e);
    add_check(s, "reduced_spectral_vs_fd", o.reduced_rel_err < 1e-3, o.reduced_rel_err, "< 1e-3");
    s.fits.emplace_back("reduced_spectral_vs_fd", o.reduced_fit);
    add_check(s, "reduced_order", std::abs(o.reduced_fit.order - 2.0) <= 0.2, o.reduced_fit.order,
              "2 +- 0.2");
    add_check(s, "coupled_spectral_vs_fd", o.coupled_rel_err < 1e-2, o.coupled_rel_err, "< 1e-2");
    add_metric(s, "spectral_lambda1", o.spectral_lambda1);
    add_check(s, "fd_lambda1", std::abs(o.fd_lambda1 - 0.3195) < 5e-4, o.fd_lambda1,
              "0.3195 to 3 significant figures");
    add_check(s, "steady_state_envelope", o.steady_state_rel_err < 1e-2, o.steady_state_rel_err,
              "< 1e-2");
    const char* regimes[3] = {"underdamped", "critical", "overdamped"};
    for (int c = 0; c < 3; ++c)
      add_check(s, std::string("rk4_") + regimes[c], o.rk4_max_err[c] < 1e-8, o.rk4_max_err[c],
                "< 1e-8");
    a.trace = &o.steady_trace;
    return finish(cfg, a, opts, log);
  });
}

}  // namespace cochlea
