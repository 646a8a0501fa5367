#include "cochlea/spectral.hpp"

#include <doctest.h>

#include <functional>
#include <random>

using namespace cochlea;

namespace {

// x coth(x) / (n pi)^2 with x = n pi delta, in long double
double symbol_oracle(int n, double delta) {
  const long double k = static_cast<long double>(n) * 3.141592653589793238462643383279L;
  if (delta == 0.0) return static_cast<double>(1.0L / (k * k));
  const long double x = k * delta;
  return static_cast<double>(x / std::tanh(x) / (k * k));
}

double simpson(const std::function<double(double)>& f, double a, double b, int m) {
  const double h = (b - a) / m;
  double s = f(a) + f(b);
  for (int i = 1; i < m; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("sine transform round trip") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int n : {8, 128, 1024}) {
    const SineTransform<double> dst(n);
    Vec u(n);
    for (int j = 0; j < n; ++j) u(j) = g(rng);
    const Vec back = dst.inverse(dst.forward(u));
    CHECK((back - u).lpNorm<Eigen::Infinity>() < 1e-12 * std::max(1.0, u.lpNorm<Eigen::Infinity>()));
  }
}

TEST_CASE("samples of sin(k pi x) map to unit vectors") {
  const int n = 31;
  const Vec x = Grid{.n = n}.nodes();
  for (int k = 1; k <= n; k += 5) {
    const SineSpectrum s = dst_forward((k * kPi * x.array()).sin().matrix());
    Vec e = Vec::Zero(n);
    e(k - 1) = 1.0;
    CHECK((s.coeffs - e).lpNorm<Eigen::Infinity>() < 1e-13);
  }
  CHECK_THROWS_AS(SineTransform<double>(4).forward(Vec::Zero(5)), std::invalid_argument);
}

TEST_CASE("transform works on long double") {
  const SineTransform<long double> dst(16);
  VectorX<long double> u = VectorX<long double>::LinSpaced(16, -1.0L, 2.0L);
  CHECK(static_cast<double>((dst.inverse(dst.forward(u)) - u).cwiseAbs().maxCoeff()) < 1e-15);
}

TEST_CASE("neumann-to-dirichlet symbol") {
  for (int n : {1, 2, 7, 40, 200})
    for (double d : {0.0, 1e-7, 1e-3, 0.025, 0.1, 1.0, 5.0})
      CHECK(ndt_symbol(n, d) == doctest::Approx(symbol_oracle(n, d)).epsilon(1e-13));
  CHECK(ndt_symbol(1, 1.0) == doctest::Approx(0.3195).epsilon(2e-4));
  CHECK(ndt_symbol(1, 0.0) == doctest::Approx(1.0 / (kPi * kPi)));
  // decreasing in n, increasing in delta, continuous at delta = 0
  const std::vector<double> deltas = {0.0, 0.025, 0.05, 0.1, 0.2, 1.0};
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const Vec l = ndt_symbols(64, deltas[i]);
    for (int k = 1; k < 64; ++k) REQUIRE(l(k) < l(k - 1));
    if (i > 0) {
      const Vec prev = ndt_symbols(64, deltas[i - 1]);
      REQUIRE((l.array() > prev.array()).all());
    }
  }
  CHECK(ndt_symbol(3, 1e-12) == doctest::Approx(ndt_symbol(3, 0.0)).epsilon(1e-14));
}

TEST_CASE("bottom pressure of a single mode") {
  const int n = 63;
  const Vec x = Grid{.n = n}.nodes();
  SineSpectrum b{Vec::Zero(n)};
  b.coeffs(2) = 2.0;
  const Vec p = bottom_pressure(b, 0.3, 0.1);
  const Vec expect =
      (0.3 * (1.0 - x.array()) + 2.0 * symbol_oracle(3, 0.1) * (3.0 * kPi * x.array()).sin()).matrix();
  CHECK((p - expect).lpNorm<Eigen::Infinity>() < 1e-13);
}

TEST_CASE("reconstructed field meets its boundary conditions") {
  const int n = 47, nz = 65;
  const double delta = 0.2, f = 0.17;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  SineSpectrum b{Vec(n)};
  for (int k = 0; k < n; ++k) b.coeffs(k) = g(rng) / (1.0 + k * k);
  const PressureField field = reconstruct_pressure_field(b, f, delta, nz, 1.5);
  CHECK(field.values.rows() == n);
  CHECK(field.values.cols() == nz);
  CHECK((field.values.col(0) - bottom_pressure(b, f, delta)).lpNorm<Eigen::Infinity>() < 1e-12);

  const Vec accel = dst_inverse(b);
  // p_z = -delta^2 vddot at the membrane, zero at the top wall
  CHECK((pressure_field_dz(b, delta, 0.0) + delta * delta * accel).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK(pressure_field_dz(b, delta, 1.0).lpNorm<Eigen::Infinity>() < 1e-12);

  // harmonic: p_xx + p_zz / delta^2 = 0, checked with differences on a smooth field
  SineSpectrum smooth{Vec::Zero(n)};
  smooth.coeffs(0) = 1.0;
  smooth.coeffs(2) = 0.3;
  const Mat P = reconstruct_pressure_field(smooth, f, delta, nz).values;
  const int j = n / 3, l = nz / 2;
  const double hx = 1.0 / (n + 1), hz = 1.0 / (nz - 1);
  const double pxx = (P(j - 1, l) - 2 * P(j, l) + P(j + 1, l)) / (hx * hx);
  const double pzz = (P(j, l - 1) - 2 * P(j, l) + P(j, l + 1)) / (hz * hz * delta * delta);
  CHECK(std::abs(pxx + pzz) < 5e-3 * (std::abs(pxx) + std::abs(pzz)));

  CHECK_THROWS_AS(reconstruct_pressure_field(b, f, 0.0, nz), std::invalid_argument);
}

TEST_CASE("depth average: trapezoid converges at second order to the exact average") {
  const int n = 31;
  const double delta = 0.5, f = 0.1;
  SineSpectrum b{Vec::Zero(n)};
  b.coeffs(0) = 1.0;
  b.coeffs(3) = -0.4;
  const Vec exact = depth_average_spectral(b, f);
  double prev = 0.0;
  for (int nz : {9, 17, 33, 65}) {
    const double err =
        (depth_average(reconstruct_pressure_field(b, f, delta, nz)) - exact).lpNorm<Eigen::Infinity>();
    if (prev > 0.0) CHECK(std::log2(prev / err) == doctest::Approx(2.0).epsilon(0.05));
    prev = err;
  }
  // the exact average does not depend on delta
  const Vec avg_small = depth_average(reconstruct_pressure_field(b, f, 0.05, 2049));
  CHECK((avg_small - exact).lpNorm<Eigen::Infinity>() < 1e-6);
}

TEST_CASE("depth deviation matches direct quadrature") {
  const int n = 15;
  const double delta = 0.3, f = 0.05;
  SineSpectrum b{Vec::Zero(n)};
  b.coeffs(0) = 1.0;
  b.coeffs(1) = 0.5;
  b.coeffs(6) = -0.2;
  const int nz = 4001;
  const PressureField field = reconstruct_pressure_field(b, f, delta, nz);
  const Vec avg = depth_average_spectral(b, f);
  double total = 0.0;
  const double h = 1.0 / (n + 1);
  for (int j = 0; j < n; ++j) {
    const double hz = 1.0 / (nz - 1);
    double s = 0.0;
    for (int l = 0; l < nz; ++l) {
      const double w = (l == 0 || l == nz - 1) ? 1.0 : (l % 2 ? 4.0 : 2.0);
      const double d = field.values(j, l) - avg(j);
      s += w * d * d;
    }
    total += h * s * hz / 3.0;
  }
  CHECK(depth_deviation_sq(b, delta) == doctest::Approx(total).epsilon(1e-8));
}

TEST_CASE("cosh profile variance against quadrature") {
  for (double beta : {1e-3, 0.05, 0.099, 0.101, 0.7, 3.0, 25.0}) {
    const auto f = [beta](double s) {
      const double d = std::cosh(beta * s) / std::sinh(beta) - 1.0 / beta;
      return d * d;
    };
    const double q = simpson(f, 0.0, 1.0, 20000);
    CHECK(cosh_profile_variance(beta) == doctest::Approx(q).epsilon(1e-7));
  }
  // series limit beta^2 / 45
  CHECK(cosh_profile_variance(1e-4) == doctest::Approx(1e-8 / 45.0).epsilon(1e-6));
  CHECK(std::isfinite(cosh_profile_variance(800.0)));
}
