// Model data for the active basilar-membrane / fluid-chamber system.
//
// Everything here is nondimensional: the cochlea has unit length, the chamber
// has unit (scaled) height, and the aspect ratio delta selects between the
// two-dimensional model (delta > 0) and its reduced one-dimensional limit
// (delta == 0).
#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cochlea {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

inline constexpr double kPi = 3.14159265358979323846;

/// Thrown for parameter sets that violate a hard model constraint.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// k(x) = k0 * exp(-alpha * x).
struct StiffnessProfile {
  double k0 = 400.0;
  double alpha = 9.6;
};

template <typename Scalar>
Scalar stiffness_at(const StiffnessProfile& s, Scalar x) {
  using std::exp;
  return Scalar(s.k0) * exp(-Scalar(s.alpha) * x);
}

enum class NonlinearityKind { Passive, ExpRayleigh, TanhRayleigh };

std::string to_string(NonlinearityKind kind);
NonlinearityKind nonlinearity_kind_from_string(const std::string& name);

/// Velocity-dependent active force N(vdot).
struct Nonlinearity {
  NonlinearityKind kind = NonlinearityKind::Passive;
  double rho = 0.0;
  double c = 0.05;

  /// sup |N(s)| over the real line.
  double sup_abs() const;
};

// Pointwise forms with an explicit gain so that per-node gains (random rho
// fields) share the same code path.
template <typename Scalar>
Scalar nonlin_eval(NonlinearityKind kind, double rho, double c, Scalar s) {
  using std::abs;
  using std::exp;
  using std::tanh;
  switch (kind) {
    case NonlinearityKind::ExpRayleigh:
      return Scalar(rho) * s * exp(-Scalar(c) * abs(s));
    case NonlinearityKind::TanhRayleigh:
      return tanh(Scalar(rho) * s);
    case NonlinearityKind::Passive:
      break;
  }
  return Scalar(0);
}

/// dN/ds. The ExpRayleigh slope is extended continuously to s = 0 (value rho).
template <typename Scalar>
Scalar nonlin_deriv(NonlinearityKind kind, double rho, double c, Scalar s) {
  using std::abs;
  using std::cosh;
  using std::exp;
  switch (kind) {
    case NonlinearityKind::ExpRayleigh: {
      const Scalar a = abs(s);
      return Scalar(rho) * exp(-Scalar(c) * a) * (Scalar(1) - Scalar(c) * a);
    }
    case NonlinearityKind::TanhRayleigh: {
      const Scalar ch = cosh(Scalar(rho) * s);
      return Scalar(rho) / (ch * ch);
    }
    case NonlinearityKind::Passive:
      break;
  }
  return Scalar(0);
}

template <typename Scalar>
Scalar nonlin_eval(const Nonlinearity& nl, Scalar s) {
  return nonlin_eval(nl.kind, nl.rho, nl.c, s);
}

template <typename Scalar>
Scalar nonlin_deriv(const Nonlinearity& nl, Scalar s) {
  return nonlin_deriv(nl.kind, nl.rho, nl.c, s);
}

struct Tone {
  double amp = 0.0;
  double omega = 0.0;
};

/// f(t) = ramp(t) * sum_i a_i cos(omega_i t) applied at the oval window x = 0.
struct Forcing {
  std::vector<Tone> tones;
  double ramp_time = 0.0;  // 0 disables the ramp

  double bound() const;
};

double forcing_at(const Forcing& f, double t);

/// Per-node random gain rho(x_j) ~ N(mean, std^2), clamped at zero.
struct RhoField {
  double mean = 0.0;
  double std = 0.0;
  std::uint64_t seed = 0;
};

struct ModelParams {
  double m = 1.0;
  double r = 0.3;
  StiffnessProfile stiffness;
  Nonlinearity nonlinearity;
  Forcing forcing;
  double delta = 0.0;
  std::optional<RhoField> rho_field;
};

struct Grid {
  int n = 128;
  int nz = 33;
  double dt = 1e-3;
  double t_final = 200.0;
  double snapshot_window = 50.0;
  int sample_every = 50;

  double h() const { return 1.0 / (n + 1); }
  double x(int j) const { return (j + 1) * h(); }  // j = 0..n-1
  Vec nodes() const;
  long steps() const { return std::lround(t_final / dt); }
};

struct MembraneState {
  double t = 0.0;
  Vec v;
  Vec vdot;

  static MembraneState zero(int n) { return {0.0, Vec::Zero(n), Vec::Zero(n)}; }
};

struct ValidationIssue {
  enum class Severity { Error, Warning };
  Severity severity;
  std::string check;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  /// Fraction of nodes whose sampled gain reaches or exceeds r (rho_field only).
  double rho_field_unstable_fraction = 0.0;

  bool ok() const;
  std::vector<std::string> errors() const;
  std::vector<std::string> warnings() const;
};

/// Checks the parameter constraints. The grid is optional; when given it is
/// used to sample the rho field and check step/horizon consistency.
ValidationReport validate_params(const ModelParams& p, const Grid* grid = nullptr);
ValidationReport validate_grid(const Grid& g);

/// Position x* with k(x*) = m * omega^2.
double resonance_location(const ModelParams& p, double omega);

/// Per-node gains: the sampled field if configured, the scalar rho otherwise.
Vec sample_rho_nodes(const ModelParams& p, int n);

}  // namespace cochlea
