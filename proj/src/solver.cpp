#include "cochlea/solver.hpp"

#include "cochlea/fd_reference.hpp"

#include <random>
#include <sstream>

namespace cochlea {

MembraneModel::MembraneModel(const ModelParams& params, int n)
    : params_(params), x_(Grid{.n = n}.nodes()), k_(n), rho_(sample_rho_nodes(params, n)) {
  for (int j = 0; j < n; ++j) k_(j) = stiffness_at(params.stiffness, x_(j));
  one_minus_x_ = (1.0 - x_.array()).matrix();
}

Vec MembraneModel::active_force(const Vec& vdot) const {
  const auto& nl = params_.nonlinearity;
  if (nl.kind == NonlinearityKind::Passive) return Vec::Zero(vdot.size());
  Vec out(vdot.size());
  for (Eigen::Index j = 0; j < vdot.size(); ++j)
    out(j) = nonlin_eval(nl.kind, rho_(j), nl.c, vdot(j));
  return out;
}

Vec MembraneModel::membrane_force(const Vec& v, const Vec& vdot) const {
  Vec f = -params_.r * vdot - k_.cwiseProduct(v);
  if (params_.nonlinearity.kind != NonlinearityKind::Passive) f += active_force(vdot);
  return f;
}

SpectralAccelerationSolver::SpectralAccelerationSolver(const ModelParams& params, int n)
    : AccelerationSolver(params, n), dst_(n), lambda_(ndt_symbols(n, params.delta)) {
  const Vec inv_mass = (params.m + lambda_.array()).inverse().matrix();
  accel_op_ = (2.0 / (n + 1)) * dst_.basis() * inv_mass.asDiagonal() * dst_.basis();
}

Acceleration SpectralAccelerationSolver::accelerate(const Vec& v, const Vec& vdot,
                                                    double t) const {
  const Vec force = membrane_.membrane_force(v, vdot);
  const Vec rhs = force - membrane_.forcing(t) * membrane_.one_minus_x();
  Acceleration out;
  out.vddot = accel_op_ * rhs;
  out.p_bottom = force - membrane_.params().m * out.vddot;
  return out;
}

std::string to_string(EngineKind kind) { return kind == EngineKind::Fd ? "fd" : "spectral"; }

EngineKind engine_kind_from_string(const std::string& name) {
  if (name == "spectral") return EngineKind::Spectral;
  if (name == "fd") return EngineKind::Fd;
  throw ConfigError("unknown engine '" + name + "' (expected spectral or fd)");
}

std::unique_ptr<AccelerationSolver> make_solver(EngineKind kind, const ModelParams& params,
                                                const Grid& grid) {
  if (kind == EngineKind::Spectral)
    return std::make_unique<SpectralAccelerationSolver>(params, grid.n);
  if (params.delta == 0.0) return std::make_unique<FdReducedAccelerationSolver>(params, grid.n);
  return std::make_unique<FdCoupledAccelerationSolver>(params, grid.n, grid.nz);
}

Vec acceleration_solve(const MembraneState& state, double t, const ModelParams& params) {
  const int n = static_cast<int>(state.v.size());
  const MembraneModel membrane(params, n);
  const Vec rhs = membrane.membrane_force(state.v, state.vdot) -
                  membrane.forcing(t) * membrane.one_minus_x();
  SineSpectrum spec = dst_forward(rhs);
  spec.coeffs.array() /= params.m + ndt_symbols(n, params.delta).array();
  return dst_inverse(spec);
}

namespace {

void check_finite(const MembraneState& s, double dt) {
  if (s.v.allFinite() && s.vdot.allFinite()) return;
  double vmax = 0.0;
  for (Eigen::Index j = 0; j < s.vdot.size(); ++j)
    if (std::isfinite(s.vdot(j))) vmax = std::max(vmax, std::abs(s.vdot(j)));
  std::ostringstream os;
  os.precision(6);
  os << "non-finite membrane state at t = " << s.t << " (dt = " << dt
     << ", max finite |vdot| = " << vmax << ")";
  throw NumericalAbort(os.str());
}

}  // namespace

MembraneState step(const MembraneState& state, double dt, const AccelerationSolver& solver) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  MembraneState next = rk4_step(state, dt, [&](const Vec& v, const Vec& w, double tt) {
    return solver.accelerate(v, w, tt).vddot;
  });
  check_finite(next, dt);
  return next;
}

MembraneState step(const MembraneState& state, double t, double dt, const ModelParams& params) {
  const SpectralAccelerationSolver solver(params, static_cast<int>(state.v.size()));
  MembraneState s = state;
  s.t = t;
  return step(s, dt, solver);
}

SimulationTrace simulate(const ModelParams& params, const Grid& grid,
                         const SimulationOptions& options) {
  const auto solver = make_solver(options.engine, params, grid);
  return simulate(*solver, grid, options);
}

SimulationTrace simulate(const AccelerationSolver& solver, const Grid& grid,
                         const SimulationOptions& options) {
  const MembraneModel& mem = solver.membrane();
  const ModelParams& params = mem.params();
  const int n = mem.size();
  if (n != grid.n) throw std::invalid_argument("solver and grid disagree on n");
  const long steps = grid.steps();
  const long every = grid.sample_every;
  const long n_samples = steps / every + 1 + (steps % every != 0 ? 1 : 0);
  const double h = grid.h();
  const SineTransform<double> dst(n);

  SimulationTrace tr;
  tr.grid = grid;
  tr.delta = params.delta;
  tr.m = params.m;
  tr.r = params.r;
  tr.nonlinearity = params.nonlinearity;
  tr.x = mem.x();
  tr.stiffness = mem.stiffness();
  tr.rho = mem.rho();
  tr.times.reserve(n_samples);
  tr.running.reserve(n_samples);
  tr.v.resize(n, n_samples);
  tr.vdot.resize(n, n_samples);
  tr.p_bottom.resize(n, n_samples);
  tr.forcing.resize(n_samples);
  if (options.store_vdot_spectra) tr.vdot_spectra.resize(n, n_samples);
  if (options.store_accel_spectra) tr.accel_spectra.resize(n, n_samples);

  MembraneState state = MembraneState::zero(n);
  if (options.initial_velocity_noise > 0.0) {
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int j = 0; j < n; ++j) state.vdot(j) = options.initial_velocity_noise * dist(rng);
  }
  tr.initial_energy =
      0.5 * h * (params.m * state.vdot.squaredNorm() + state.v.dot(mem.stiffness().cwiseProduct(state.v)));

  EnergyTerms acc;
  EnergyTerms prev_density;
  std::vector<EnergyTerms> head;   // densities at steps 0, 1, 2
  std::vector<EnergyTerms> tail;   // densities at the last three steps
  Eigen::Index sample = 0;

  auto accel_fn = [&](const Vec& v, const Vec& w, double t) {
    return solver.accelerate(v, w, t).vddot;
  };

  for (long k = 0;; ++k) {
    const double t = static_cast<double>(k) * grid.dt;
    state.t = t;
    const Acceleration a = solver.accelerate(state.v, state.vdot, t);
    const double f = mem.forcing(t);

    EnergyTerms density;
    density.friction = h * params.r * state.vdot.squaredNorm();
    density.fluid_work = h * a.p_bottom.dot(state.vdot);
    density.active_input = h * mem.active_force(state.vdot).dot(state.vdot);
    density.interaction = density.fluid_work - h * f * mem.one_minus_x().dot(state.vdot);
    if (k > 0) {
      acc.friction += 0.5 * grid.dt * (prev_density.friction + density.friction);
      acc.fluid_work += 0.5 * grid.dt * (prev_density.fluid_work + density.fluid_work);
      acc.active_input += 0.5 * grid.dt * (prev_density.active_input + density.active_input);
      acc.interaction += 0.5 * grid.dt * (prev_density.interaction + density.interaction);
    }
    prev_density = density;
    if (head.size() < 3) head.push_back(density);
    tail.push_back(density);
    if (tail.size() > 3) tail.erase(tail.begin());

    if (k % every == 0 || k == steps) {
      tr.times.push_back(t);
      tr.v.col(sample) = state.v;
      tr.vdot.col(sample) = state.vdot;
      tr.p_bottom.col(sample) = a.p_bottom;
      tr.forcing(sample) = f;
      if (options.store_vdot_spectra) tr.vdot_spectra.col(sample) = dst.forward(state.vdot);
      if (options.store_accel_spectra) tr.accel_spectra.col(sample) = dst.forward(a.vddot);
      tr.running.push_back(acc);
      ++sample;
    }
    if (k == steps) break;

    // reuse the stage-1 acceleration computed above
    bool first = true;
    MembraneState next = rk4_step(state, grid.dt, [&](const Vec& v, const Vec& w, double tt) {
      if (first) {
        first = false;
        return a.vddot;
      }
      return accel_fn(v, w, tt);
    });
    check_finite(next, grid.dt);
    state = std::move(next);
  }
  tr.energy_trapezoid = acc;
  tr.energy = acc;
  if (steps >= 3) {
    // Gregory end corrections: error O(dt^4) instead of O(dt^2)
    auto correct = [&](double EnergyTerms::*term) {
      const double f0 = head[0].*term, f1 = head[1].*term, f2 = head[2].*term;
      const double g0 = tail[2].*term, g1 = tail[1].*term, g2 = tail[0].*term;
      const double fwd1 = f1 - f0, fwd2 = f2 - 2.0 * f1 + f0;
      const double bwd1 = g0 - g1, bwd2 = g0 - 2.0 * g1 + g2;
      tr.energy.*term += -grid.dt / 12.0 * (bwd1 - fwd1) - grid.dt / 24.0 * (bwd2 + fwd2);
    };
    correct(&EnergyTerms::friction);
    correct(&EnergyTerms::fluid_work);
    correct(&EnergyTerms::active_input);
    correct(&EnergyTerms::interaction);
  }
  tr.final_state = state;
  return tr;
}

OscillatorSample damped_oscillator_closed_form(double m, double r, double k, double p0, double t) {
  if (!(m > 0.0 && r > 0.0 && k > 0.0))
    throw std::invalid_argument("oscillator needs positive m, r, k");
  const double vinf = -p0 / k;
  const double disc = 4.0 * m * k - r * r;
  const double sigma = r / (2.0 * m);
  OscillatorSample out;
  // v = vinf + A v1 + B v2 with v(0) = vdot(0) = 0
  if (std::abs(disc) <= 1e-14 * 4.0 * m * k) {
    out.regime = DampingRegime::Critical;
    const double a = -vinf;
    const double b = sigma * a;
    const double e = std::exp(-sigma * t);
    out.v = vinf + (a + b * t) * e;
    out.vdot = (b - sigma * (a + b * t)) * e;
  } else if (disc > 0.0) {
    out.regime = DampingRegime::Underdamped;
    const double wd = std::sqrt(disc) / (2.0 * m);
    const double a = -vinf;
    const double b = sigma * a / wd;
    const double e = std::exp(-sigma * t);
    const double c = std::cos(wd * t), s = std::sin(wd * t);
    out.v = vinf + e * (a * c + b * s);
    out.vdot = e * ((-sigma * a + wd * b) * c + (-sigma * b - wd * a) * s);
  } else {
    out.regime = DampingRegime::Overdamped;
    const double root = std::sqrt(-disc) / (2.0 * m);
    const double lp = -sigma + root, lm = -sigma - root;
    const double a = -vinf * (-lm) / (lp - lm);
    const double b = -vinf * lp / (lp - lm);
    out.v = vinf + a * std::exp(lp * t) + b * std::exp(lm * t);
    out.vdot = a * lp * std::exp(lp * t) + b * lm * std::exp(lm * t);
  }
  return out;
}

Eigen::VectorXcd solve_tridiagonal(const Eigen::VectorXcd& lower, const Eigen::VectorXcd& diag,
                                   const Eigen::VectorXcd& upper, Eigen::VectorXcd rhs) {
  const Eigen::Index n = diag.size();
  Eigen::VectorXcd c(n);
  std::complex<double> denom = diag(0);
  if (std::abs(denom) == 0.0) throw std::runtime_error("singular tridiagonal matrix");
  c(0) = n > 1 ? upper(0) / denom : 0.0;
  rhs(0) /= denom;
  for (Eigen::Index i = 1; i < n; ++i) {
    denom = diag(i) - lower(i) * c(i - 1);
    if (std::abs(denom) == 0.0) throw std::runtime_error("singular tridiagonal matrix");
    c(i) = i + 1 < n ? upper(i) / denom : 0.0;
    rhs(i) = (rhs(i) - lower(i) * rhs(i - 1)) / denom;
  }
  for (Eigen::Index i = n - 2; i >= 0; --i) rhs(i) -= c(i) * rhs(i + 1);
  return rhs;
}

SteadyStateResponse passive_steady_state_oracle(const ModelParams& params, const Grid& grid) {
  if (params.delta != 0.0 || params.nonlinearity.kind != NonlinearityKind::Passive)
    throw std::invalid_argument("steady-state oracle applies to the passive reduced model only");
  using cd = std::complex<double>;
  const int n = grid.n;
  const double h = grid.h();
  SteadyStateResponse out;
  out.x = grid.nodes();
  out.tones = params.forcing.tones;

  for (const Tone& tone : params.forcing.tones) {
    const double w = tone.omega;
    Eigen::VectorXcd impedance(n);
    for (int j = 0; j < n; ++j)
      impedance(j) = cd(stiffness_at(params.stiffness, out.x(j)) - params.m * w * w, params.r * w);

    // (P_{j-1} - 2 P_j + P_{j+1}) / h^2 + w^2 P_j / Z_j = 0, P(0) = a, P(1) = 0
    Eigen::VectorXcd lower = Eigen::VectorXcd::Constant(n, 1.0);
    Eigen::VectorXcd upper = Eigen::VectorXcd::Constant(n, 1.0);
    Eigen::VectorXcd diag(n);
    for (int j = 0; j < n; ++j) diag(j) = -2.0 + h * h * w * w / impedance(j);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
    rhs(0) = -tone.amp;
    const Eigen::VectorXcd p = solve_tridiagonal(lower, diag, upper, rhs);
    out.pressure.push_back(p);
    out.deflection.push_back(-p.cwiseQuotient(impedance));
  }
  return out;
}

Vec SteadyStateResponse::deflection_at(double t) const {
  Eigen::VectorXcd sum = Eigen::VectorXcd::Zero(x.size());
  for (std::size_t i = 0; i < tones.size(); ++i)
    sum += deflection[i] * std::exp(std::complex<double>(0.0, tones[i].omega * t));
  return sum.real();
}

Vec SteadyStateResponse::envelope(const std::vector<double>& times) const {
  Vec env = Vec::Zero(x.size());
  for (double t : times) env = env.cwiseMax(deflection_at(t).cwiseAbs());
  return env;
}

}  // namespace cochlea
