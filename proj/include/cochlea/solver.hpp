// Time integration of the coupled membrane / pressure dynamics.
//
// The pressure is eliminated through the bottom Neumann-to-Dirichlet map, which
// turns the membrane equation into
//
//   (m I + L_delta) vddot = -r vdot - k v + N(vdot) - f(t) (1 - x),
//
// with L_delta diagonal in the sine basis. Solving that relation at every
// Runge-Kutta stage gives an explicit first-order system in (v, vdot).
#pragma once

#include "cochlea/model.hpp"
#include "cochlea/spectral.hpp"

#include <Eigen/Core>

#include <complex>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace cochlea {

/// Non-finite state encountered during time stepping.
class NumericalAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Nodal coefficients of the membrane equation on the interior grid.
class MembraneModel {
 public:
  MembraneModel(const ModelParams& params, int n);

  const ModelParams& params() const { return params_; }
  int size() const { return static_cast<int>(x_.size()); }
  const Vec& x() const { return x_; }
  const Vec& stiffness() const { return k_; }
  const Vec& rho() const { return rho_; }
  const Vec& one_minus_x() const { return one_minus_x_; }

  Vec active_force(const Vec& vdot) const;
  /// -r vdot - k v + N(vdot); the forcing enters through the pressure.
  Vec membrane_force(const Vec& v, const Vec& vdot) const;
  double forcing(double t) const { return forcing_at(params_.forcing, t); }

 private:
  ModelParams params_;
  Vec x_, k_, rho_, one_minus_x_;
};

struct Acceleration {
  Vec vddot;
  Vec p_bottom;  // p(x_j, 0, t)
};

/// Maps a membrane state to its acceleration and bottom pressure.
class AccelerationSolver {
 public:
  explicit AccelerationSolver(const ModelParams& params, int n) : membrane_(params, n) {}
  virtual ~AccelerationSolver() = default;

  virtual Acceleration accelerate(const Vec& v, const Vec& vdot, double t) const = 0;
  const MembraneModel& membrane() const { return membrane_; }

 protected:
  MembraneModel membrane_;
};

/// Production path: exact diagonal solve in the sine basis for any delta >= 0.
class SpectralAccelerationSolver final : public AccelerationSolver {
 public:
  SpectralAccelerationSolver(const ModelParams& params, int n);

  Acceleration accelerate(const Vec& v, const Vec& vdot, double t) const override;
  const SineTransform<double>& transform() const { return dst_; }
  const Vec& symbols() const { return lambda_; }

 private:
  SineTransform<double> dst_;
  Vec lambda_;
  Mat accel_op_;  // (m I + L_delta)^{-1} in nodal form
};

enum class EngineKind { Spectral, Fd };

std::string to_string(EngineKind kind);
EngineKind engine_kind_from_string(const std::string& name);

std::unique_ptr<AccelerationSolver> make_solver(EngineKind kind, const ModelParams& params,
                                                const Grid& grid);

/// vddot from the transform route: dst_inverse(dst_forward(RHS)_k / (m + lambda_k)).
Vec acceleration_solve(const MembraneState& state, double t, const ModelParams& params);

/// Classical RK4 on (v, vdot) with an arbitrary acceleration callback
/// accel(v, vdot, t) -> vddot.
template <typename AccelFn>
MembraneState rk4_step(const MembraneState& s, double dt, AccelFn&& accel) {
  const double t = s.t;
  const Vec a1 = accel(s.v, s.vdot, t);
  const Vec v2 = s.v + 0.5 * dt * s.vdot;
  const Vec w2 = s.vdot + 0.5 * dt * a1;
  const Vec a2 = accel(v2, w2, t + 0.5 * dt);
  const Vec v3 = s.v + 0.5 * dt * w2;
  const Vec w3 = s.vdot + 0.5 * dt * a2;
  const Vec a3 = accel(v3, w3, t + 0.5 * dt);
  const Vec v4 = s.v + dt * w3;
  const Vec w4 = s.vdot + dt * a3;
  const Vec a4 = accel(v4, w4, t + dt);

  MembraneState out;
  out.t = t + dt;
  out.v = s.v + (dt / 6.0) * (s.vdot + 2.0 * w2 + 2.0 * w3 + w4);
  out.vdot = s.vdot + (dt / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
  return out;
}

/// One RK4 step of the full/reduced system; throws NumericalAbort on a
/// non-finite result.
MembraneState step(const MembraneState& state, double t, double dt, const ModelParams& params);
MembraneState step(const MembraneState& state, double dt, const AccelerationSolver& solver);

/// Time integrals of the energy balance (interior-node rule in x).
struct EnergyTerms {
  double friction = 0.0;     // int int r vdot^2
  double fluid_work = 0.0;   // int int p(x,0,t) vdot
  double active_input = 0.0; // int int vdot N(vdot)
  double interaction = 0.0;  // int int q(x,0,t) vdot, q = p - f (1 - x)
};

struct SimulationOptions {
  EngineKind engine = EngineKind::Spectral;
  bool store_vdot_spectra = false;
  bool store_accel_spectra = false;
  /// Amplitude of a seeded random initial velocity; 0 keeps the rest state.
  double initial_velocity_noise = 0.0;
  std::uint64_t seed = 0;
};

struct SimulationTrace {
  std::string params_digest;
  Grid grid;
  double delta = 0.0;
  double m = 1.0;
  double r = 0.0;
  Nonlinearity nonlinearity;
  Vec x;
  Vec stiffness;
  Vec rho;

  std::vector<double> times;
  Mat v;         // n x samples
  Mat vdot;      // n x samples
  Mat p_bottom;  // n x samples
  Vec forcing;   // f(t) at each sample
  Mat vdot_spectra;   // optional, n x samples
  Mat accel_spectra;  // optional, n x samples

  double initial_energy = 0.0;
  EnergyTerms energy;                  // to t_final, end-corrected trapezoid
  EnergyTerms energy_trapezoid;        // to t_final, plain trapezoid
  std::vector<EnergyTerms> running;    // plain trapezoid to each sample time
  MembraneState final_state;

  Eigen::Index samples() const { return static_cast<Eigen::Index>(times.size()); }
  int n() const { return static_cast<int>(x.size()); }
};

SimulationTrace simulate(const ModelParams& params, const Grid& grid,
                         const SimulationOptions& options = {});
SimulationTrace simulate(const AccelerationSolver& solver, const Grid& grid,
                         const SimulationOptions& options = {});

enum class DampingRegime { Underdamped, Critical, Overdamped };

struct OscillatorSample {
  double v = 0.0;
  double vdot = 0.0;
  DampingRegime regime = DampingRegime::Underdamped;
};

/// m vddot + r vdot + k v = -p0 from rest.
OscillatorSample damped_oscillator_closed_form(double m, double r, double k, double p0, double t);

/// Frequency-domain solution of the passive reduced model.
struct SteadyStateResponse {
  Vec x;
  std::vector<Tone> tones;
  std::vector<Eigen::VectorXcd> pressure;    // P(x_j) per tone
  std::vector<Eigen::VectorXcd> deflection;  // V(x_j) per tone

  /// Re sum_i V_i(x) exp(i omega_i t) for every node.
  Vec deflection_at(double t) const;
  /// max over the given times of |deflection_at(t)|.
  Vec envelope(const std::vector<double>& times) const;
};

SteadyStateResponse passive_steady_state_oracle(const ModelParams& params, const Grid& grid);

/// Solves a complex tridiagonal system (Thomas algorithm, no pivoting).
Eigen::VectorXcd solve_tridiagonal(const Eigen::VectorXcd& lower, const Eigen::VectorXcd& diag,
                                   const Eigen::VectorXcd& upper, Eigen::VectorXcd rhs);

}  // namespace cochlea
