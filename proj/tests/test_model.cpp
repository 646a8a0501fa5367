#include "cochlea/model.hpp"

#include <doctest.h>

#include <random>

using namespace cochlea;

TEST_CASE("exp rayleigh bounds hold on a dense sample") {
  const double rho = 0.2995, c = 0.05;
  const Nonlinearity nl{NonlinearityKind::ExpRayleigh, rho, c};
  // |s| e^{-c|s|} peaks at |s| = 1/c; the slope is largest at s = 0
  const double sup_n = rho / (c * std::exp(1.0));
  const double sup_dn = rho;
  CHECK(nl.sup_abs() == doctest::Approx(sup_n).epsilon(1e-14));

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2000.0, 2000.0);
  double worst_n = 0.0, worst_dn = 0.0;
  for (int i = 0; i < 1000000; ++i) {
    const double s = u(rng);
    worst_n = std::max(worst_n, std::abs(nonlin_eval(nl, s)));
    worst_dn = std::max(worst_dn, std::abs(nonlin_deriv(nl, s)));
  }
  CHECK(worst_n <= sup_n + 1e-12);
  CHECK(worst_dn <= sup_dn + 1e-12);
}

TEST_CASE("tanh rayleigh bounds") {
  const Nonlinearity nl{NonlinearityKind::TanhRayleigh, 1.5, 0.0};
  CHECK(nl.sup_abs() == 1.0);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int i = 0; i < 100000; ++i) {
    const double s = u(rng);
    REQUIRE(std::abs(nonlin_eval(nl, s)) <= 1.0 + 1e-12);
    REQUIRE(std::abs(nonlin_deriv(nl, s)) <= 1.5 + 1e-12);
  }
}

TEST_CASE("nonlinearities are odd, bit for bit") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-300.0, 300.0);
  for (auto kind : {NonlinearityKind::Passive, NonlinearityKind::ExpRayleigh,
                    NonlinearityKind::TanhRayleigh}) {
    const Nonlinearity nl{kind, 0.7, 0.05};
    for (int i = 0; i < 10000; ++i) {
      const double s = u(rng);
      REQUIRE(nonlin_eval(nl, -s) == -nonlin_eval(nl, s));
    }
  }
}

TEST_CASE("derivative matches central differences away from zero") {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(0.01, 100.0);
  for (auto kind : {NonlinearityKind::ExpRayleigh, NonlinearityKind::TanhRayleigh}) {
    const Nonlinearity nl{kind, 0.2995, 0.05};
    const double h = 1e-6;
    for (int i = 0; i < 2000; ++i) {
      const double s = (i % 2 ? 1.0 : -1.0) * u(rng);
      const double fd = (nonlin_eval(nl, s + h) - nonlin_eval(nl, s - h)) / (2.0 * h);
      REQUIRE(std::abs(fd - nonlin_deriv(nl, s)) < 1e-6);
    }
  }
}

TEST_CASE("small velocities see rho as extra negative friction") {
  const Nonlinearity nl{NonlinearityKind::ExpRayleigh, 0.2995, 0.05};
  CHECK(nonlin_deriv(nl, 0.0) == doctest::Approx(0.2995));
  CHECK(nonlin_eval(nl, 1e-8) == doctest::Approx(0.2995e-8).epsilon(1e-9));
}

TEST_CASE("forcing") {
  Forcing f;
  f.tones = {{0.1, 2.0}, {0.08, 2.4}};
  CHECK(forcing_at(f, 0.0) == doctest::Approx(0.18));
  CHECK(forcing_at(f, 1.3) == doctest::Approx(0.1 * std::cos(2.6) + 0.08 * std::cos(3.12)));
  CHECK(f.bound() == doctest::Approx(0.18));

  f.ramp_time = 4.0;
  CHECK(forcing_at(f, 0.0) == 0.0);
  CHECK(forcing_at(f, 4.0) == doctest::Approx(0.1 * std::cos(8.0) + 0.08 * std::cos(9.6)));
  // C1 at both ends of the ramp
  const double e = 1e-6;
  const double slope0 = (forcing_at(f, e) - forcing_at(f, 0.0)) / e;
  CHECK(std::abs(slope0) < 1e-5);
  Forcing none;
  CHECK(forcing_at(none, 3.0) == 0.0);
}

TEST_CASE("resonance locations follow the place principle") {
  ModelParams p;
  // k(x) = 400 exp(-9.6 x) = omega^2
  CHECK(resonance_location(p, 2.0) == doctest::Approx(std::log(100.0) / 9.6).epsilon(1e-14));
  CHECK(resonance_location(p, 2.0) == doctest::Approx(0.4797).epsilon(1e-4));
  CHECK(resonance_location(p, 2.4) == doctest::Approx(0.4417).epsilon(1e-4));
  CHECK(resonance_location(p, 20.0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK_THROWS_AS(resonance_location(p, 25.0), std::domain_error);
  CHECK_THROWS_AS(resonance_location(p, 0.05), std::domain_error);
}

TEST_CASE("validation") {
  ModelParams p;
  CHECK(validate_params(p).ok());

  p.nonlinearity = {NonlinearityKind::ExpRayleigh, 0.5, 0.05};
  p.r = 0.3;
  CHECK_FALSE(validate_params(p).ok());

  p.nonlinearity.rho = 0.2995;
  CHECK(validate_params(p).ok());

  ModelParams q;
  q.m = 0.0;
  CHECK_FALSE(validate_params(q).ok());
  q = ModelParams{};
  q.delta = -0.1;
  CHECK_FALSE(validate_params(q).ok());

  ModelParams passive_field;
  passive_field.rho_field = RhoField{0.1, 0.05, 1};
  CHECK_FALSE(validate_params(passive_field).ok());

  Grid g;
  g.snapshot_window = g.t_final * 2;
  CHECK_FALSE(validate_grid(g).ok());
  g = Grid{};
  g.dt = 0.0;
  CHECK_FALSE(validate_grid(g).ok());
}

TEST_CASE("rho field sampling is seeded and reports unstable sites") {
  ModelParams p;
  p.r = 2.0;
  p.nonlinearity = {NonlinearityKind::ExpRayleigh, 1.9, 0.05};
  p.rho_field = RhoField{1.9, 1.0, 20201};
  const Vec a = sample_rho_nodes(p, 128), b = sample_rho_nodes(p, 128);
  CHECK(a == b);
  CHECK(a.minCoeff() >= 0.0);
  Grid g;
  const ValidationReport rep = validate_params(p, &g);
  CHECK(rep.ok());
  const double frac = (a.array() >= p.r).cast<double>().mean();
  CHECK(rep.rho_field_unstable_fraction == doctest::Approx(frac));
  CHECK(frac > 0.0);

  p.rho_field->std = 0.0;
  CHECK((sample_rho_nodes(p, 16).array() == 1.9).all());
}
