// Sine-basis machinery for the pressure chamber.
//
// Functions on (0,1) vanishing at both ends are sampled on the interior grid
// x_j = j/(n+1), j = 1..n, and expanded as u(x) = sum_k c_k sin(k pi x).
// In that basis the Neumann-to-Dirichlet map of the chamber is diagonal.
#pragma once

#include "cochlea/model.hpp"

#include <Eigen/Core>

namespace cochlea {

struct SineSpectrum {
  Vec coeffs;

  Eigen::Index size() const { return coeffs.size(); }
};

/// DST-I on n interior nodes: samples of sin(k pi x) map to e_k.
template <typename Scalar>
class SineTransform {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = VectorX<Scalar>;

  explicit SineTransform(int n) : n_(n), basis_(n, n) {
    if (n < 1) throw std::invalid_argument("sine transform needs at least one node");
    const Scalar step = Scalar(kPi) / Scalar(n + 1);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        // reduce (j+1)(k+1) mod 2(n+1) so the sine argument stays small
        const long idx = (static_cast<long>(j + 1) * (k + 1)) % (2L * (n + 1));
        basis_(j, k) = std::sin(step * Scalar(idx));
      }
  }

  int size() const { return n_; }

  /// basis()(j, k) = sin((k+1) pi x_j); symmetric, and basis()^2 = (n+1)/2 I.
  const Matrix& basis() const { return basis_; }

  Vector forward(const Vector& samples) const {
    check(samples.size());
    return (Scalar(2) / Scalar(n_ + 1)) * (basis_ * samples);
  }

  Vector inverse(const Vector& coeffs) const {
    check(coeffs.size());
    return basis_ * coeffs;
  }

 private:
  void check(Eigen::Index len) const {
    if (len != n_) throw std::invalid_argument("length does not match the sine grid");
  }

  int n_;
  Matrix basis_;
};

SineSpectrum dst_forward(const Vec& samples);
Vec dst_inverse(const SineSpectrum& spectrum);

/// Bottom-pressure response lambda_n(delta) to the n-th sine mode of the
/// membrane acceleration:  delta coth(n pi delta) / (n pi), and 1/(n pi)^2
/// in the reduced limit delta = 0.
double ndt_symbol(int mode, double delta);

/// lambda_1..lambda_n as a vector.
Vec ndt_symbols(int n, double delta);

/// p(x_j, 0) = f (1 - x_j) + sum_k lambda_k(delta) b_k sin(k pi x_j).
Vec bottom_pressure(const SineSpectrum& accel, double forcing_value, double delta);

struct PressureField {
  Mat values;  // n x nz, rows are x-nodes, columns are z-levels
  Vec x;
  Vec z;       // z_l = l/(nz-1)
  double t = 0.0;
  double delta = 0.0;
};

/// Full chamber pressure from the acceleration spectrum (delta > 0).
PressureField reconstruct_pressure_field(const SineSpectrum& accel, double forcing_value,
                                         double delta, int nz, double t = 0.0);

/// d/dz of the reconstructed field at height z.
Vec pressure_field_dz(const SineSpectrum& accel, double delta, double z);

/// Trapezoid rule over the field's z-levels.
Vec depth_average(const PressureField& field);

/// Exact z-average of the reconstructed field, f (1 - x) + sum_k b_k/(k pi)^2 sin(k pi x).
Vec depth_average_spectral(const SineSpectrum& accel, double forcing_value);

/// int_0^1 int_0^1 (p - p_0)^2 dz dx with the x-integral taken as the
/// interior-node trapezoid rule (exact for the sine modes) and the z-integral exact.
double depth_deviation_sq(const SineSpectrum& accel, double delta);

/// int_0^1 (cosh(beta s)/sinh(beta) - 1/beta)^2 ds, stable for all beta > 0.
double cosh_profile_variance(double beta);

}  // namespace cochlea
