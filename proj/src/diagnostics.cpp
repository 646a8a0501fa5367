#include "cochlea/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cochlea {

namespace {

double membrane_energy(const SimulationTrace& tr, const Vec& v, const Vec& vdot) {
  const double h = tr.grid.h();
  return 0.5 * h * (tr.m * vdot.squaredNorm() + v.dot(tr.stiffness.cwiseProduct(v)));
}

// Trapezoid weights for the stored sample times.
Vec time_weights(const std::vector<double>& t) {
  Vec w = Vec::Zero(static_cast<Eigen::Index>(t.size()));
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const double dt = t[i + 1] - t[i];
    w(i) += 0.5 * dt;
    w(i + 1) += 0.5 * dt;
  }
  return w;
}

}  // namespace

EnergyReport energy_audit(const SimulationTrace& tr) {
  EnergyReport rep;
  if (tr.samples() == 0) return rep;
  const Eigen::Index last = tr.samples() - 1;
  rep.T = tr.times.back();
  rep.membrane_energy = membrane_energy(tr, tr.v.col(last), tr.vdot.col(last));
  rep.initial_energy = tr.initial_energy;
  rep.friction_dissipation = tr.energy.friction;
  rep.fluid_work = tr.energy.fluid_work;
  rep.active_input = tr.energy.active_input;
  rep.residual = (rep.membrane_energy - rep.initial_energy) + rep.friction_dissipation +
                 rep.fluid_work - rep.active_input;
  const double scale = std::max({std::abs(rep.membrane_energy), std::abs(rep.initial_energy),
                                 std::abs(rep.friction_dissipation), std::abs(rep.fluid_work),
                                 std::abs(rep.active_input)});
  rep.relative_residual = scale > 0.0 ? std::abs(rep.residual) / scale : 0.0;
  return rep;
}

EnergyTerms energy_terms_from_samples(const SimulationTrace& tr) {
  const double h = tr.grid.h();
  const Vec w = time_weights(tr.times);
  const Nonlinearity& nl = tr.nonlinearity;
  EnergyTerms out;
  for (Eigen::Index i = 0; i < tr.samples(); ++i) {
    const Vec vd = tr.vdot.col(i);
    const double fluid = h * tr.p_bottom.col(i).dot(vd);
    double active = 0.0;
    for (Eigen::Index j = 0; j < vd.size(); ++j)
      active += vd(j) * nonlin_eval(nl.kind, tr.rho(j), nl.c, vd(j));
    out.friction += w(i) * h * tr.r * vd.squaredNorm();
    out.active_input += w(i) * h * active;
    out.fluid_work += w(i) * fluid;
    out.interaction += w(i) * (fluid - h * tr.forcing(i) * (1.0 - tr.x.array()).matrix().dot(vd));
  }
  return out;
}

double interaction_energy_from_samples(const SimulationTrace& tr) {
  return energy_terms_from_samples(tr).interaction;
}

InteractionEnergy interaction_energy(const SimulationTrace& tr, double delta) {
  InteractionEnergy out;
  if (tr.samples() == 0) return out;
  out.direct = tr.running.empty() ? interaction_energy_from_samples(tr) : tr.energy.interaction;
  const int n = tr.n();
  const SineTransform<double> dst(n);
  const Vec gamma = dst.forward(tr.vdot.col(tr.samples() - 1));
  const Vec gamma0 = dst.forward(tr.vdot.col(0));  // zero when starting from rest
  out.spectral = 0.25 * ndt_symbols(n, delta).dot(gamma.cwiseAbs2() - gamma0.cwiseAbs2());
  return out;
}

InteractionEnergy interaction_energy(const SimulationTrace& tr) {
  return interaction_energy(tr, tr.delta);
}

double error_norm_value(const ModelErrorNorms& e, const std::string& name) {
  if (name == "p0_minus_p1") return e.p0_minus_p1;
  if (name == "v_diff") return e.v_diff;
  if (name == "p0x_minus_p1x") return e.p0x_minus_p1x;
  if (name == "vdot_diff") return e.vdot_diff;
  if (name == "p_minus_p1_slab") return e.p_minus_p1_slab;
  if (name == "p0_minus_pbottom") return e.p0_minus_pbottom;
  if (name == "p_minus_p0_slab") return e.p_minus_p0_slab;
  throw std::invalid_argument("unknown error norm " + name);
}

namespace {

// Trapezoid over [0,1] of u^2 with interior samples and zero end values.
double interior_sq(const Vec& u, double h) { return h * u.squaredNorm(); }

// x-derivative on the closed grid [0, x_1..x_n, 1] with end values, second
// order everywhere, then trapezoid of its square.
double derivative_sq(const Vec& interior, double left, double right, double h) {
  const Eigen::Index n = interior.size();
  Vec u(n + 2);
  u(0) = left;
  u.segment(1, n) = interior;
  u(n + 1) = right;
  Vec du(n + 2);
  du(0) = (-3.0 * u(0) + 4.0 * u(1) - u(2)) / (2.0 * h);
  du(n + 1) = (3.0 * u(n + 1) - 4.0 * u(n) + u(n - 1)) / (2.0 * h);
  for (Eigen::Index j = 1; j <= n; ++j) du(j) = (u(j + 1) - u(j - 1)) / (2.0 * h);
  return h * (du.squaredNorm() - 0.5 * (du(0) * du(0) + du(n + 1) * du(n + 1)));
}

}  // namespace

ModelErrorNorms model_error_norms(const SimulationTrace& full, const SimulationTrace& reduced) {
  if (full.n() != reduced.n() || full.samples() != reduced.samples())
    throw std::invalid_argument("traces do not share a grid");
  for (Eigen::Index i = 0; i < full.samples(); ++i)
    if (std::abs(full.times[i] - reduced.times[i]) > 1e-9 * (1.0 + full.times[i]))
      throw std::invalid_argument("traces do not share sample times");
  const bool have_spectra = full.accel_spectra.cols() == full.samples() || full.delta == 0.0;
  if (!have_spectra)
    throw std::invalid_argument("full trace needs stored acceleration spectra");

  const double h = full.grid.h();
  const Vec w = time_weights(full.times);

  ModelErrorNorms out;
  out.delta = full.delta;
  for (Eigen::Index i = 0; i < full.samples(); ++i) {
    const double f = full.forcing(i);
    Vec p0;
    double slab_dev = 0.0;
    if (full.delta == 0.0) {
      p0 = full.p_bottom.col(i);
    } else {
      const SineSpectrum b{full.accel_spectra.col(i)};
      p0 = depth_average_spectral(b, f);
      slab_dev = depth_deviation_sq(b, full.delta);
    }
    const Vec p1 = reduced.p_bottom.col(i);
    const Vec dp = p0 - p1;
    const double p0p1 = interior_sq(dp, h);
    out.p0_minus_p1 += w(i) * p0p1;
    out.v_diff += w(i) * interior_sq(full.v.col(i) - reduced.v.col(i), h);
    out.vdot_diff += w(i) * interior_sq(full.vdot.col(i) - reduced.vdot.col(i), h);
    // end values agree (f at x = 0, 0 at x = 1), so the difference vanishes there
    out.p0x_minus_p1x += w(i) * derivative_sq(dp, 0.0, 0.0, h);
    out.p0_minus_pbottom += w(i) * interior_sq(p0 - full.p_bottom.col(i), h);
    out.p_minus_p0_slab += w(i) * slab_dev;
    // p - p0 has zero z-mean, so the cross term vanishes
    out.p_minus_p1_slab += w(i) * (slab_dev + p0p1);
  }
  return out;
}

ConvergenceFit fit_convergence_order(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.size() < 3) throw std::invalid_argument("convergence fit needs at least 3 points");
  const auto m = static_cast<Eigen::Index>(pairs.size());
  Vec lx(m), ly(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto [d, v] = pairs[static_cast<std::size_t>(i)];
    if (!(d > 0.0) || !(v > 0.0))
      throw std::invalid_argument("convergence fit needs positive abscissae and values");
    lx(i) = std::log(d);
    ly(i) = std::log(v);
  }
  const double mx = lx.mean(), my = ly.mean();
  const Vec cx = lx.array() - mx, cy = ly.array() - my;
  ConvergenceFit fit;
  fit.order = cx.dot(cy) / cx.squaredNorm();
  const Vec res = cy - fit.order * cx;
  fit.residual = std::sqrt(res.squaredNorm() / static_cast<double>(m));
  return fit;
}

ErrorNormReport summarize_error_norms(std::vector<ModelErrorNorms> entries) {
  ErrorNormReport rep;
  rep.entries = std::move(entries);
  for (const auto& name : error_norm_names()) {
    std::vector<std::pair<double, double>> pairs;
    for (const auto& e : rep.entries) pairs.emplace_back(e.delta, error_norm_value(e, name));
    rep.fits.emplace_back(name, fit_convergence_order(pairs));
  }
  return rep;
}

std::vector<Peak> find_peaks(const Vec& x, const Vec& env) {
  const Eigen::Index n = env.size();
  auto at = [&](Eigen::Index j) { return (j < 0 || j >= n) ? 0.0 : env(j); };
  std::vector<Peak> peaks;
  Eigen::Index j = 0;
  while (j < n) {
    Eigen::Index end = j;
    while (end + 1 < n && env(end + 1) == env(j)) ++end;
    if (env(j) > at(j - 1) && env(j) > at(end + 1)) {
      const Eigen::Index mid = (j + end) / 2;
      Peak p;
      p.index = mid;
      p.height = env(j);
      p.x = (j + end) % 2 == 0 ? x(mid) : 0.5 * (x(mid) + x(mid + 1));
      peaks.push_back(p);
    }
    j = end + 1;
  }
  std::stable_sort(peaks.begin(), peaks.end(),
                   [](const Peak& a, const Peak& b) { return a.height > b.height; });
  return peaks;
}

double separation_depth(const Vec& env, const std::vector<Peak>& peaks) {
  if (peaks.size() < 2) return 0.0;
  const auto lo = std::min(peaks[0].index, peaks[1].index);
  const auto hi = std::max(peaks[0].index, peaks[1].index);
  const double dip = env.segment(lo, hi - lo + 1).minCoeff();
  const double lower = std::min(peaks[0].height, peaks[1].height);
  return lower > 0.0 ? (lower - dip) / lower : 0.0;
}

std::vector<double> window_times(const SimulationTrace& tr, double window) {
  std::vector<double> out;
  if (tr.times.empty()) return out;
  const double t0 = tr.times.back() - window - 1e-9 * (1.0 + tr.times.back());
  for (double t : tr.times)
    if (t >= t0) out.push_back(t);
  return out;
}

PeakReport peaks_from_envelope(const Vec& x, const Vec& envelope, double window) {
  PeakReport rep;
  rep.window = window;
  rep.x = x;
  rep.envelope = envelope;
  rep.peaks = find_peaks(x, envelope);
  rep.separation = separation_depth(envelope, rep.peaks);
  return rep;
}

PeakReport envelope_and_peaks(const SimulationTrace& tr, double window) {
  if (tr.samples() == 0 || window > tr.times.back() - tr.times.front() + 1e-12)
    throw std::invalid_argument("envelope window is longer than the trace");
  const double t0 = tr.times.back() - window - 1e-9 * (1.0 + tr.times.back());
  Vec env = Vec::Zero(tr.n());
  for (Eigen::Index i = 0; i < tr.samples(); ++i)
    if (tr.times[static_cast<std::size_t>(i)] >= t0) env = env.cwiseMax(tr.v.col(i).cwiseAbs());
  return peaks_from_envelope(tr.x, env, window);
}

double amplification_ratio(const PeakReport& active, const PeakReport& passive) {
  const double p = passive.envelope.maxCoeff();
  if (!(p > 0.0)) throw std::invalid_argument("passive envelope is identically zero");
  return active.envelope.maxCoeff() / p;
}

OtoacousticMetric otoacoustic_metric(const SimulationTrace& tr, double window) {
  OtoacousticMetric out;
  if (tr.samples() == 0) return out;
  const double t0 = tr.times.back() - window - 1e-9 * (1.0 + tr.times.back());
  const double n = tr.n();
  double sum = 0.0;
  long count = 0;
  for (Eigen::Index i = 0; i < tr.samples(); ++i) {
    const double ms = tr.v.col(i).squaredNorm() / n;
    out.transient_rms = std::max(out.transient_rms, std::sqrt(ms));
    if (tr.times[static_cast<std::size_t>(i)] >= t0) {
      sum += ms;
      ++count;
    }
  }
  out.trailing_rms = count > 0 ? std::sqrt(sum / count) : 0.0;
  out.relative = out.transient_rms > 0.0 ? out.trailing_rms / out.transient_rms : 0.0;
  return out;
}

}  // namespace cochlea
