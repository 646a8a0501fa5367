#include "cochlea/diagnostics.hpp"

#include <doctest.h>

#include <random>

using namespace cochlea;

namespace {

// Bare trace on n nodes with the given sample times; everything zero.
SimulationTrace blank_trace(int n, const std::vector<double>& times) {
  SimulationTrace tr;
  tr.grid.n = n;
  tr.x = tr.grid.nodes();
  tr.stiffness = Vec::Zero(n);
  tr.rho = Vec::Zero(n);
  tr.times = times;
  const auto s = static_cast<Eigen::Index>(times.size());
  tr.v = Mat::Zero(n, s);
  tr.vdot = Mat::Zero(n, s);
  tr.p_bottom = Mat::Zero(n, s);
  tr.forcing = Vec::Zero(s);
  tr.final_state = MembraneState::zero(n);
  return tr;
}

std::vector<double> linspace(double a, double b, int count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = a + (b - a) * i / (count - 1);
  return out;
}

}  // namespace

TEST_CASE("fit order on synthetic data") {
  const std::vector<double> d = {0.2, 0.1, 0.05, 0.025};
  std::vector<std::pair<double, double>> sq, lin, noisy;
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  for (double x : d) {
    sq.emplace_back(x, x * x);
    lin.emplace_back(x, x);
    noisy.emplace_back(x, std::pow(x, 1.9) * (1.0 + u(rng)));
  }
  CHECK(fit_convergence_order(sq).order == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit_convergence_order(sq).residual < 1e-12);
  CHECK(fit_convergence_order(lin).order == doctest::Approx(1.0).epsilon(1e-12));
  const ConvergenceFit f = fit_convergence_order(noisy);
  CHECK(f.order >= 1.7);
  CHECK(f.order <= 2.1);

  CHECK_THROWS_AS(fit_convergence_order({{0.1, 1.0}, {0.2, 0.0}, {0.3, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(fit_convergence_order({{0.1, 1.0}, {0.2, 2.0}}), std::invalid_argument);
}

TEST_CASE("envelope of sin(2 pi x) sin(t) has one peak at x = 0.25") {
  const int n = 127;  // x = 0.25 is a node
  const auto times = linspace(0.0, 20.0, 4001);
  SimulationTrace tr = blank_trace(n, times);
  for (std::size_t i = 0; i < times.size(); ++i)
    tr.v.col(static_cast<Eigen::Index>(i)) =
        ((2.0 * kPi * tr.x.array()).sin() * std::sin(times[i])).matrix();
  const PeakReport rep = envelope_and_peaks(tr, 2.0 * kPi);
  // |sin(2 pi x)| also peaks at 0.75; keep the positive lobe only
  Vec env = rep.envelope;
  for (int j = n / 2; j < n; ++j) env(j) = 0.0;
  const auto peaks = find_peaks(tr.x, env);
  REQUIRE(peaks.size() == 1);
  CHECK(peaks[0].x == doctest::Approx(0.25));
  CHECK(peaks[0].height == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS_AS(envelope_and_peaks(tr, 25.0), std::invalid_argument);
}

TEST_CASE("peaks: plateaus report their center, padding finds edge maxima") {
  const Vec x = Vec::LinSpaced(9, 0.1, 0.9);
  Vec e(9);
  e << 0.0, 1.0, 2.0, 2.0, 2.0, 1.0, 0.5, 1.5, 0.2;
  const auto peaks = find_peaks(x, e);
  REQUIRE(peaks.size() == 2);
  CHECK(peaks[0].index == 3);
  CHECK(peaks[1].index == 7);
  // dip 0.5 under the lower peak 1.5
  CHECK(separation_depth(e, peaks) == doctest::Approx(1.0 / 1.5));

  Vec edge(4);
  edge << 3.0, 1.0, 0.5, 0.2;
  CHECK(find_peaks(Vec::LinSpaced(4, 0.2, 0.8), edge).at(0).index == 0);
  CHECK(separation_depth(edge, find_peaks(Vec::LinSpaced(4, 0.2, 0.8), edge)) == 0.0);
}

TEST_CASE("amplification ratio") {
  PeakReport a, p;
  a.envelope = Vec::Constant(3, 1.0);
  p.envelope = Vec::Constant(3, 0.1);
  CHECK(amplification_ratio(a, p) == doctest::Approx(10.0));
  p.envelope.setZero();
  CHECK_THROWS(amplification_ratio(a, p));
}

TEST_CASE("interaction energy of a single mode: lambda_1 T^2 / 4") {
  // vdot = t sin(pi x), so vddot has coefficient 1 and q = lambda_1 sin(pi x)
  const int n = 31;
  const double T = 3.0, delta = 0.2;
  const auto times = linspace(0.0, T, 301);
  SimulationTrace tr = blank_trace(n, times);
  tr.delta = delta;
  const double l1 = ndt_symbol(1, delta);
  const Vec mode = (kPi * tr.x.array()).sin().matrix();
  for (std::size_t i = 0; i < times.size(); ++i) {
    tr.vdot.col(static_cast<Eigen::Index>(i)) = times[i] * mode;
    tr.p_bottom.col(static_cast<Eigen::Index>(i)) = l1 * mode;
  }
  tr.final_state.vdot = T * mode;
  const InteractionEnergy e = interaction_energy(tr);
  CHECK(e.spectral == doctest::Approx(l1 * T * T / 4.0).epsilon(1e-12));
  // trapezoid is exact for a linear integrand
  CHECK(e.direct == doctest::Approx(l1 * T * T / 4.0).epsilon(1e-12));
}

TEST_CASE("interaction energy from a moving start subtracts the initial term") {
  // vdot = (1 + t) sin(pi x): direct = lambda_1 (T + T^2/2) / 2 = lambda_1 ((1+T)^2 - 1) / 4
  const int n = 15;
  const double T = 2.0, delta = 0.05;
  const auto times = linspace(0.0, T, 101);
  SimulationTrace tr = blank_trace(n, times);
  tr.delta = delta;
  const double l1 = ndt_symbol(1, delta);
  const Vec mode = (kPi * tr.x.array()).sin().matrix();
  for (std::size_t i = 0; i < times.size(); ++i) {
    tr.vdot.col(static_cast<Eigen::Index>(i)) = (1.0 + times[i]) * mode;
    tr.p_bottom.col(static_cast<Eigen::Index>(i)) = l1 * mode;
  }
  const InteractionEnergy e = interaction_energy(tr);
  const double exact = l1 * ((1.0 + T) * (1.0 + T) - 1.0) / 4.0;
  CHECK(e.spectral == doctest::Approx(exact).epsilon(1e-12));
  CHECK(e.direct == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("energy terms from samples on a hand-made trace") {
  const int n = 15;
  const auto times = linspace(0.0, 2.0, 201);
  SimulationTrace tr = blank_trace(n, times);
  tr.r = 0.5;
  for (std::size_t i = 0; i < times.size(); ++i)
    tr.vdot.col(static_cast<Eigen::Index>(i)).setConstant(1.0);
  // int_0^2 int_0^1 r dx dt with the interior-node x rule: r * 2 * n h
  const EnergyTerms e = energy_terms_from_samples(tr);
  CHECK(e.friction == doctest::Approx(0.5 * 2.0 * n / (n + 1.0)));
  CHECK(e.fluid_work == 0.0);
  CHECK(e.active_input == 0.0);
}

TEST_CASE("model error norms of a reduced trace against itself vanish") {
  ModelParams p;
  p.forcing.tones = {{0.1, 2.0}};
  Grid g;
  g.n = 16;
  g.t_final = 2.0;
  g.snapshot_window = 1.0;
  g.sample_every = 10;
  const SimulationTrace tr = simulate(p, g);
  const ModelErrorNorms e = model_error_norms(tr, tr);
  for (const auto& name : error_norm_names()) CHECK(error_norm_value(e, name) == 0.0);
  CHECK_THROWS_AS(error_norm_value(e, "nope"), std::invalid_argument);

  Grid g2 = g;
  g2.sample_every = 5;
  CHECK_THROWS_AS(model_error_norms(tr, simulate(p, g2)), std::invalid_argument);

  ModelParams full = p;
  full.delta = 0.1;
  CHECK_THROWS_AS(model_error_norms(simulate(full, g), tr), std::invalid_argument);
}

TEST_CASE("error norms shrink with delta") {
  ModelParams p;
  p.forcing.tones = {{0.1, 2.0}};
  Grid g;
  g.n = 32;
  g.t_final = 10.0;
  g.snapshot_window = 5.0;
  g.sample_every = 20;
  SimulationOptions o;
  o.store_accel_spectra = true;
  const SimulationTrace reduced = simulate(p, g);
  std::vector<ModelErrorNorms> entries;
  for (double d : {0.2, 0.1, 0.05}) {
    p.delta = d;
    entries.push_back(model_error_norms(simulate(p, g, o), reduced));
  }
  for (const auto& name : error_norm_names()) {
    CHECK(error_norm_value(entries[1], name) < error_norm_value(entries[0], name));
    CHECK(error_norm_value(entries[2], name) < error_norm_value(entries[1], name));
  }
  const ErrorNormReport rep = summarize_error_norms(entries);
  CHECK(rep.fits.size() == error_norm_names().size());
}

TEST_CASE("otoacoustic metric on a decaying signal") {
  const int n = 8;
  const auto times = linspace(0.0, 10.0, 1001);
  SimulationTrace tr = blank_trace(n, times);
  for (std::size_t i = 0; i < times.size(); ++i)
    tr.v.col(static_cast<Eigen::Index>(i)).setConstant(std::exp(-times[i]));
  const OtoacousticMetric m = otoacoustic_metric(tr, 1.0);
  CHECK(m.transient_rms == doctest::Approx(1.0));
  CHECK(m.trailing_rms < std::exp(-9.0));
  CHECK(m.trailing_rms > std::exp(-10.0));
}
