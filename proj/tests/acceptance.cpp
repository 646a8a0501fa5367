// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.
#include "cochlea/scenarios.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

using namespace cochlea;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, const std::string& title, bool pass, const std::string& detail) {
  if (!pass) ++failures;
  std::printf("[%s] %d %s: %s\n", pass ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
  std::fflush(stdout);
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool peaks_near(const PeakReport& rep, double lo, double hi, double tol) {
  if (rep.peaks.size() < 2) return false;
  double a = rep.peaks[0].x, b = rep.peaks[1].x;
  if (a > b) std::swap(a, b);
  return std::abs(a - lo) <= tol && std::abs(b - hi) <= tol;
}

double gap(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s > 0.0 ? std::abs(a - b) / s : 0.0;
}

}  // namespace

int main() {
  const std::vector<double> deltas = {0.2, 0.1, 0.05, 0.025};
  const std::vector<double> dts = {4e-3, 2e-3, 1e-3, 5e-4};
  const std::vector<std::string> presets = {"fig1-passive", "fig1-active", "fig2-passive",
                                            "fig2-active", "otoacoustic"};

  // positivity bookkeeping across every run below
  double worst_positivity = INFINITY;  // min over runs of (min running I) / scale
  double worst_agreement = 0.0;

  // 1, 2: delta ladders
  {
    double min_order = INFINITY, max_resid = 0.0, lemma_order = INFINITY;
    std::string where;
    for (const char* name : {"fig1-passive", "fig1-active"}) {
      RunConfig c = scenario_preset(name);
      c.grid.t_final = 50.0;
      c.grid.snapshot_window = 25.0;
      c.grid.sample_every = 10;
      const DeltaLadder lad = delta_ladder(c, deltas);
      for (const auto& [norm, fit] : lad.report.fits) {
        if (fit.order < min_order) {
          min_order = fit.order;
          where = std::string(name) + "/" + norm;
        }
        max_resid = std::max(max_resid, fit.residual);
        if (norm == "p0_minus_pbottom" || norm == "p_minus_p0_slab")
          lemma_order = std::min(lemma_order, fit.order);
      }
      for (std::size_t i = 0; i < deltas.size(); ++i) {
        worst_positivity = std::min(worst_positivity,
                                    lad.min_running_interaction[i] / lad.interaction_scale[i]);
        worst_agreement = std::max(worst_agreement,
                                   gap(lad.interactions[i].direct, lad.interactions[i].spectral));
      }
    }
    report(1, "dimension-reduction order", min_order >= 1.8 && max_resid < 0.15,
           "min fitted order " + num(min_order) + " at " + where + " (>= 1.8), max fit residual " +
               num(max_resid) + " (< 0.15)");
    report(2, "depth-average lemma order", lemma_order >= 1.8,
           "min order of ||p0 - p(.,0)||^2 and ||p - p0||^2 = " + num(lemma_order) + " (>= 1.8)");
  }

  // single preset runs at dt = 1e-3
  std::vector<SingleRun> runs;
  for (const auto& name : presets) runs.push_back(run_single(scenario_preset(name)));

  // 3: amplification and peak locations
  {
    const double ratio = amplification_ratio(runs[1].peaks, runs[0].peaks);
    const bool loc_p = peaks_near(runs[0].peaks, 0.4417, 0.4797, 0.05);
    const bool loc_a = peaks_near(runs[1].peaks, 0.4417, 0.4797, 0.05);
    report(3, "amplification", ratio >= 5.0 && ratio <= 20.0 && loc_p && loc_a,
           "ratio " + num(ratio) + " (in [5, 20]); passive peaks " + num(runs[0].peaks.peaks[0].x) +
               ", " + num(runs[0].peaks.peaks[1].x) + "; active peaks " +
               num(runs[1].peaks.peaks[0].x) + ", " + num(runs[1].peaks.peaks[1].x) +
               " (within 0.05 of 0.4417 and 0.4797)");
  }

  // 4: tone separation
  {
    auto separated = [](const PeakReport& r) { return r.peaks.size() >= 2 && r.separation >= 0.25; };
    const bool ok = separated(runs[3].peaks) && !separated(runs[2].peaks);
    report(4, "tone separation", ok,
           "fig2-active dip " + num(runs[3].peaks.separation) + " (>= 0.25), fig2-passive dip " +
               num(runs[2].peaks.separation) + " with " +
               std::to_string(runs[2].peaks.peaks.size()) + " peak(s) (must fail)");
  }

  // 5: energy identity
  {
    double worst_resid = 0.0, min_order = INFINITY;
    for (std::size_t i = 0; i < presets.size(); ++i) {
      worst_resid = std::max(worst_resid, runs[i].energy.relative_residual);
      const EnergyLadder lad = energy_dt_ladder(scenario_preset(presets[i]), dts);
      min_order = std::min(min_order, lad.fit.order);
    }
    report(5, "energy identity", worst_resid < 1e-4 && min_order >= 2.0,
           "max relative residual at dt=1e-3 " + num(worst_resid) + " (< 1e-4), min dt-ladder order " +
               num(min_order) + " (>= 2)");
  }

  // 6: interaction energy
  {
    for (const SingleRun& r : runs) {
      worst_positivity = std::min(worst_positivity, r.min_running_interaction / r.interaction_scale);
      worst_agreement = std::max(worst_agreement, gap(r.interaction.direct, r.interaction.spectral));
    }
    report(6, "interaction-energy positivity", worst_positivity >= -1e-10 && worst_agreement <= 0.01,
           "min running value / scale " + num(worst_positivity) +
               " (>= -1e-10), max direct vs spectral gap " + num(worst_agreement) + " (<= 0.01)");
  }

  // 7: oracle equivalences
  {
    const OracleSuite o = oracle_suite();
    const double rk4 = std::max({o.rk4_max_err[0], o.rk4_max_err[1], o.rk4_max_err[2]});
    const bool ok = o.reduced_rel_err < 1e-3 && std::abs(o.reduced_fit.order - 2.0) <= 0.2 &&
                    o.coupled_rel_err < 1e-2 && std::abs(o.fd_lambda1 - 0.3195) < 5e-4 &&
                    o.steady_state_rel_err < 1e-2 && rk4 < 1e-8;
    report(7, "oracle equivalences", ok,
           "(a) " + num(o.reduced_rel_err) + " order " + num(o.reduced_fit.order) + "; (b) " +
               num(o.coupled_rel_err) + "; (c) lambda1 " + num(o.fd_lambda1) + "; (d) " +
               num(o.steady_state_rel_err) + "; (e) " + num(rk4));
  }

  // 8: nonlinearity contract
  {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1000.0, 1000.0);
    double bound_excess = -INFINITY, deriv_err = 0.0;
    bool odd = true;
    for (auto kind : {NonlinearityKind::ExpRayleigh, NonlinearityKind::TanhRayleigh}) {
      const Nonlinearity nl{kind, 0.2995, 0.05};
      const double sup_n = kind == NonlinearityKind::ExpRayleigh ? 0.2995 / (0.05 * std::exp(1.0)) : 1.0;
      const double sup_dn = 0.2995;
      for (int i = 0; i < 1000000; ++i) {
        const double s = u(rng);
        bound_excess = std::max({bound_excess, std::abs(nonlin_eval(nl, s)) - sup_n,
                                 std::abs(nonlin_deriv(nl, s)) - sup_dn});
        odd = odd && nonlin_eval(nl, -s) == -nonlin_eval(nl, s);
        if (std::abs(s) > 1e-3 && i % 10 == 0) {
          const double h = 1e-6;
          const double fd = (nonlin_eval(nl, s + h) - nonlin_eval(nl, s - h)) / (2 * h);
          deriv_err = std::max(deriv_err, std::abs(fd - nonlin_deriv(nl, s)));
        }
      }
    }
    report(8, "nonlinearity contract", bound_excess <= 1e-12 && odd && deriv_err < 1e-6,
           "max bound excess " + num(bound_excess) + " (<= 1e-12), odd " + (odd ? "yes" : "no") +
               ", max derivative error " + num(deriv_err) + " (< 1e-6)");
  }

  // 9: determinism and otoacoustic emission
  {
    RunConfig c = scenario_preset("otoacoustic");
    c.grid.t_final = 20.0;
    c.grid.snapshot_window = 10.0;
    const fs::path base = fs::temp_directory_path() / "cochlea_acceptance";
    fs::remove_all(base);
    std::ostringstream log;
    bool same = true;
    std::vector<std::string> files;
    for (const char* sub : {"a", "b"}) {
      c.out_dir = (base / sub).string();
      run_simulate(c, {}, log);
    }
    for (const auto& entry : fs::directory_iterator(base / "a")) {
      const auto name = entry.path().filename();
      files.push_back(name.string());
      same = same && slurp(base / "a" / name) == slurp(base / "b" / name);
    }
    const OtoacousticStudy st = otoacoustic_study(scenario_preset("otoacoustic"));
    const bool emission = st.emission.trailing_rms > 1e3 * st.twin.trailing_rms;
    report(9, "determinism and emission", same && files.size() >= 3 && emission && st.twin.relative < 1e-8,
           std::to_string(files.size()) + " files byte-identical: " + (same ? "yes" : "no") +
               "; emission trailing RMS " + num(st.emission.trailing_rms) + " vs twin " +
               num(st.twin.trailing_rms) + " (> 1e3 x), twin relative RMS " + num(st.twin.relative) +
               " (< 1e-8)");
  }

  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
