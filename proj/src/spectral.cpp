#include "cochlea/spectral.hpp"

#include <cmath>

namespace cochlea {

namespace {

// x coth(x), accurate near zero and free of overflow for large x.
double x_coth_x(double x) {
  if (x < 1e-4) {
    const double x2 = x * x;
    return 1.0 + x2 / 3.0 - x2 * x2 / 45.0;
  }
  if (x > 30.0) return x;
  return x / std::tanh(x);
}

// cosh(beta s) / sinh(beta) for s in [0, 1].
double cosh_ratio(double beta, double s) {
  return (std::exp(beta * (s - 1.0)) + std::exp(-beta * (s + 1.0))) / -std::expm1(-2.0 * beta);
}

// sinh(beta s) / sinh(beta) for s in [0, 1].
double sinh_ratio(double beta, double s) {
  return (std::exp(beta * (s - 1.0)) - std::exp(-beta * (s + 1.0))) / -std::expm1(-2.0 * beta);
}

}  // namespace

SineSpectrum dst_forward(const Vec& samples) {
  const SineTransform<double> dst(static_cast<int>(samples.size()));
  return {dst.forward(samples)};
}

Vec dst_inverse(const SineSpectrum& spectrum) {
  const SineTransform<double> dst(static_cast<int>(spectrum.size()));
  return dst.inverse(spectrum.coeffs);
}

double ndt_symbol(int mode, double delta) {
  if (mode < 1) throw std::invalid_argument("mode index starts at 1");
  const double k = mode * kPi;
  return x_coth_x(k * delta) / (k * k);
}

Vec ndt_symbols(int n, double delta) {
  Vec out(n);
  for (int k = 0; k < n; ++k) out(k) = ndt_symbol(k + 1, delta);
  return out;
}

Vec bottom_pressure(const SineSpectrum& accel, double forcing_value, double delta) {
  const int n = static_cast<int>(accel.size());
  const SineTransform<double> dst(n);
  const Vec x = Grid{.n = n}.nodes();
  Vec p = dst.inverse(ndt_symbols(n, delta).cwiseProduct(accel.coeffs));
  p.array() += forcing_value * (1.0 - x.array());
  return p;
}

PressureField reconstruct_pressure_field(const SineSpectrum& accel, double forcing_value,
                                         double delta, int nz, double t) {
  if (delta <= 0.0) throw std::invalid_argument("reduced model has no z-structure");
  if (nz < 2) throw std::invalid_argument("pressure field needs at least two z-levels");
  const int n = static_cast<int>(accel.size());
  const SineTransform<double> dst(n);

  PressureField field;
  field.x = Grid{.n = n}.nodes();
  field.z = Vec::LinSpaced(nz, 0.0, 1.0);
  field.t = t;
  field.delta = delta;
  field.values.resize(n, nz);

  // q = sum_k a_k sin(k pi x) cosh(k pi delta (1 - z)), a_k = delta b_k / (k pi sinh(k pi delta))
  Mat modal(n, nz);
  for (int k = 0; k < n; ++k) {
    const double kpi = (k + 1) * kPi;
    const double beta = kpi * delta;
    const double scale = delta * accel.coeffs(k) / kpi;
    for (int l = 0; l < nz; ++l) modal(k, l) = scale * cosh_ratio(beta, 1.0 - field.z(l));
  }
  field.values = dst.basis() * modal;
  field.values.colwise() += (forcing_value * (1.0 - field.x.array())).matrix();
  return field;
}

Vec pressure_field_dz(const SineSpectrum& accel, double delta, double z) {
  if (delta <= 0.0) throw std::invalid_argument("reduced model has no z-structure");
  const int n = static_cast<int>(accel.size());
  Vec modal(n);
  for (int k = 0; k < n; ++k) {
    const double kpi = (k + 1) * kPi;
    const double beta = kpi * delta;
    modal(k) = -delta * delta * accel.coeffs(k) * sinh_ratio(beta, 1.0 - z);
  }
  return SineTransform<double>(n).inverse(modal);
}

Vec depth_average(const PressureField& field) {
  const Eigen::Index nz = field.values.cols();
  if (nz < 2) throw std::invalid_argument("depth average needs at least two z-levels");
  const double hz = 1.0 / static_cast<double>(nz - 1);
  Vec avg = field.values.rowwise().sum();
  avg -= 0.5 * (field.values.col(0) + field.values.col(nz - 1));
  return hz * avg;
}

Vec depth_average_spectral(const SineSpectrum& accel, double forcing_value) {
  const int n = static_cast<int>(accel.size());
  const SineTransform<double> dst(n);
  const Vec x = Grid{.n = n}.nodes();
  Vec p = dst.inverse(ndt_symbols(n, 0.0).cwiseProduct(accel.coeffs));
  p.array() += forcing_value * (1.0 - x.array());
  return p;
}

double cosh_profile_variance(double beta) {
  if (beta < 0.1) {
    const double b2 = beta * beta;
    return b2 * (1.0 / 45.0 + b2 * (-4.0 / 945.0 + b2 * (1.0 / 1575.0 - b2 * 8.0 / 93555.0)));
  }
  const double s = std::sinh(beta);
  const double inv_sinh_sq = beta > 350.0 ? 0.0 : 1.0 / (s * s);
  return 0.5 * inv_sinh_sq + x_coth_x(beta) / (2.0 * beta * beta) - 1.0 / (beta * beta);
}

double depth_deviation_sq(const SineSpectrum& accel, double delta) {
  if (delta <= 0.0) return 0.0;
  double sum = 0.0;
  for (Eigen::Index k = 0; k < accel.size(); ++k) {
    const double kpi = static_cast<double>(k + 1) * kPi;
    const double amp = delta * accel.coeffs(k) / kpi;
    sum += amp * amp * cosh_profile_variance(kpi * delta);
  }
  return 0.5 * sum;
}

}  // namespace cochlea
