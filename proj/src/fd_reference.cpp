#include "cochlea/fd_reference.hpp"

#include <sstream>

namespace cochlea {

bool TridiagonalCholesky::factor(const Vec& diag, const Vec& off) {
  const Eigen::Index n = diag.size();
  d_.resize(n);
  l_.resize(n > 0 ? n - 1 : 0);
  ok_ = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    double di = diag(i);
    if (i > 0) {
      l_(i - 1) = off(i - 1) / d_(i - 1);
      di -= l_(i - 1) * off(i - 1);
    }
    if (!(di > 0.0)) return false;
    d_(i) = di;
  }
  ok_ = true;
  return true;
}

Vec TridiagonalCholesky::solve(const Vec& rhs) const {
  if (!ok_) throw std::logic_error("tridiagonal factorization is not available");
  const Eigen::Index n = d_.size();
  Vec y = rhs;
  for (Eigen::Index i = 1; i < n; ++i) y(i) -= l_(i - 1) * y(i - 1);
  for (Eigen::Index i = 0; i < n; ++i) y(i) /= d_(i);
  for (Eigen::Index i = n - 2; i >= 0; --i) y(i) -= l_(i) * y(i + 1);
  return y;
}

Vec apply_neg_second_difference(const Vec& u) {
  const Eigen::Index n = u.size();
  const double inv_h2 = static_cast<double>((n + 1) * (n + 1));
  Vec out(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double left = j > 0 ? u(j - 1) : 0.0;
    const double right = j + 1 < n ? u(j + 1) : 0.0;
    out(j) = inv_h2 * (2.0 * u(j) - left - right);
  }
  return out;
}

FdReducedAccelerationSolver::FdReducedAccelerationSolver(const ModelParams& params, int n)
    : AccelerationSolver(params, n) {
  if (params.delta != 0.0) throw std::invalid_argument("reduced FD solver needs delta = 0");
  const double inv_h2 = static_cast<double>((n + 1) * (n + 1));
  const Vec diag = Vec::Constant(n, params.m * 2.0 * inv_h2 + 1.0);
  const Vec off = Vec::Constant(n > 0 ? n - 1 : 0, -params.m * inv_h2);
  if (!chol_.factor(diag, off))
    throw std::runtime_error("reduced FD operator is not positive definite");
}

Acceleration FdReducedAccelerationSolver::accelerate(const Vec& v, const Vec& vdot,
                                                     double t) const {
  const Vec force = membrane_.membrane_force(v, vdot);
  const Vec rhs = force - membrane_.forcing(t) * membrane_.one_minus_x();
  Acceleration out;
  out.vddot = chol_.solve(apply_neg_second_difference(rhs));
  out.p_bottom = force - membrane_.params().m * out.vddot;
  return out;
}

Vec fd_reduced_accel_solve(const MembraneState& state, double t, const ModelParams& params) {
  const FdReducedAccelerationSolver solver(params, static_cast<int>(state.v.size()));
  return solver.accelerate(state.v, state.vdot, t).vddot;
}

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

// Symmetrized 5-point rows; index(j, l) = l * n + j.
void assemble_laplace(int n, int nz, double cx, double cz, Triplets& trips) {
  auto id = [n](int j, int l) { return l * n + j; };
  for (int l = 0; l < nz; ++l) {
    const bool boundary = (l == 0 || l == nz - 1);
    const double w = boundary ? 0.5 : 1.0;
    for (int j = 0; j < n; ++j) {
      const int row = id(j, l);
      trips.emplace_back(row, row, w * 2.0 * cx + (boundary ? cz : 2.0 * cz));
      if (j > 0) trips.emplace_back(row, id(j - 1, l), -w * cx);
      if (j + 1 < n) trips.emplace_back(row, id(j + 1, l), -w * cx);
      if (l == 0) {
        trips.emplace_back(row, id(j, 1), -cz);
      } else if (l == nz - 1) {
        trips.emplace_back(row, id(j, nz - 2), -cz);
      } else {
        trips.emplace_back(row, id(j, l - 1), -cz);
        trips.emplace_back(row, id(j, l + 1), -cz);
      }
    }
  }
}

}  // namespace

FdLaplaceSolver::FdLaplaceSolver(int n, int nz, double delta)
    : n_(n), nz_(nz), delta_(delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("2-D Laplace solve needs delta > 0");
  if (n < 1 || nz < 2) throw std::invalid_argument("2-D Laplace solve needs n >= 1, nz >= 2");
  const double hx = 1.0 / (n + 1);
  hz_ = 1.0 / (nz - 1);
  cx_ = 1.0 / (hx * hx);
  cz_ = 1.0 / (delta * delta * hz_ * hz_);
  Triplets trips;
  trips.reserve(static_cast<std::size_t>(5 * n * nz));
  assemble_laplace(n, nz, cx_, cz_, trips);
  a_.resize(n * nz, n * nz);
  a_.setFromTriplets(trips.begin(), trips.end());
  ldlt_.compute(a_);
  if (ldlt_.info() != Eigen::Success)
    throw std::runtime_error("2-D Laplace matrix factorization failed");
}

Mat FdLaplaceSolver::solve(double side_value, const Vec& bottom_flux) const {
  if (bottom_flux.size() != n_) throw std::invalid_argument("bottom flux length mismatch");
  Vec b = Vec::Zero(static_cast<Eigen::Index>(n_) * nz_);
  for (int l = 0; l < nz_; ++l) {
    const double w = (l == 0 || l == nz_ - 1) ? 0.5 : 1.0;
    b(l * n_) += w * cx_ * side_value;
  }
  // ghost node p_{-1} = p_1 - 2 hz g, halved row
  for (int j = 0; j < n_; ++j) b(j) -= cz_ * hz_ * bottom_flux(j);
  const Vec p = ldlt_.solve(b);
  return Eigen::Map<const Mat>(p.data(), n_, nz_);
}

Mat fd_full_pressure_solve(const Laplace2DProblem& prob) {
  const FdLaplaceSolver solver(prob.n, prob.nz, prob.delta);
  return solver.solve(prob.side_value, prob.bottom_flux);
}

Mat laplace_residual(const Mat& p, double side_value, double delta) {
  const Eigen::Index n = p.rows(), nz = p.cols();
  const double cx = static_cast<double>((n + 1) * (n + 1));
  const double cz = static_cast<double>((nz - 1) * (nz - 1)) / (delta * delta);
  Mat res = Mat::Zero(n, nz);
  for (Eigen::Index l = 1; l + 1 < nz; ++l)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double left = j > 0 ? p(j - 1, l) : side_value;
      const double right = j + 1 < n ? p(j + 1, l) : 0.0;
      res(j, l) = cx * (left - 2.0 * p(j, l) + right) +
                  cz * (p(j, l - 1) - 2.0 * p(j, l) + p(j, l + 1));
    }
  return res;
}

FdCoupledAccelerationSolver::FdCoupledAccelerationSolver(const ModelParams& params, int n, int nz)
    : AccelerationSolver(params, n), laplace_(n, nz, params.delta) {
  // Bordered system: unknowns (p, vddot). The Neumann row at the bottom picks
  // up +cz hz delta^2 vddot_j; the membrane rows read m vddot_j + p_{j,0} = force_j.
  const double hz = 1.0 / (nz - 1);
  const double cz = 1.0 / (params.delta * params.delta * hz * hz);
  const int np = n * nz;
  Triplets trips;
  for (int k = 0; k < laplace_.matrix().outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(laplace_.matrix(), k); it; ++it)
      trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  for (int j = 0; j < n; ++j) {
    trips.emplace_back(j, np + j, -cz * hz * params.delta * params.delta);
    trips.emplace_back(np + j, j, 1.0);
    trips.emplace_back(np + j, np + j, params.m);
  }
  Eigen::SparseMatrix<double> a(np + n, np + n);
  a.setFromTriplets(trips.begin(), trips.end());
  a.makeCompressed();
  bordered_.analyzePattern(a);
  bordered_.factorize(a);
  if (bordered_.info() != Eigen::Success)
    throw std::runtime_error("bordered coupled system factorization failed");
}

CoupledSolution FdCoupledAccelerationSolver::solve_bordered(const Vec& force,
                                                            double forcing_value) const {
  const int n = laplace_.n(), nz = laplace_.nz();
  const int np = n * nz;
  const double cx = static_cast<double>((n + 1) * (n + 1));
  Vec b = Vec::Zero(np + n);
  for (int l = 0; l < nz; ++l) {
    const double w = (l == 0 || l == nz - 1) ? 0.5 : 1.0;
    b(l * n) += w * cx * forcing_value;
  }
  b.tail(n) = force;
  const Vec sol = bordered_.solve(b);
  CoupledSolution out;
  out.vddot = sol.tail(n);
  out.pressure = Eigen::Map<const Mat>(sol.data(), n, nz);
  out.iterations = 1;
  return out;
}

CoupledSolution FdCoupledAccelerationSolver::solve_fixed_point(const Vec& force,
                                                               double forcing_value, double theta,
                                                               double tol, int max_iter) const {
  const double m = membrane_.params().m;
  const double d2 = membrane_.params().delta * membrane_.params().delta;
  CoupledSolution out;
  out.vddot = (force - forcing_value * membrane_.one_minus_x()) / m;
  for (int it = 1; it <= max_iter; ++it) {
    out.pressure = laplace_.solve(forcing_value, -d2 * out.vddot);
    const Vec target = (force - out.pressure.col(0)) / m;
    const Vec next = (1.0 - theta) * out.vddot + theta * target;
    const double change = (next - out.vddot).lpNorm<Eigen::Infinity>();
    out.residuals.push_back(change);
    out.vddot = next;
    out.iterations = it;
    if (!std::isfinite(change)) break;
    if (change < tol) {
      out.pressure = laplace_.solve(forcing_value, -d2 * out.vddot);
      return out;
    }
  }
  std::ostringstream os;
  os << "coupled fixed-point iteration did not converge (theta = " << theta << ", "
     << out.residuals.size() << " iterations, last residuals:";
  const std::size_t first = out.residuals.size() > 5 ? out.residuals.size() - 5 : 0;
  for (std::size_t i = first; i < out.residuals.size(); ++i) os << ' ' << out.residuals[i];
  os << ")";
  throw std::runtime_error(os.str());
}

Acceleration FdCoupledAccelerationSolver::accelerate(const Vec& v, const Vec& vdot,
                                                     double t) const {
  const Vec force = membrane_.membrane_force(v, vdot);
  CoupledSolution sol = solve_bordered(force, membrane_.forcing(t));
  return {std::move(sol.vddot), sol.pressure.col(0)};
}

CoupledSolution fd_full_coupled_accel_solve(const MembraneState& state, double t,
                                            const ModelParams& params, int nz,
                                            CoupledMethod method) {
  const FdCoupledAccelerationSolver solver(params, static_cast<int>(state.v.size()), nz);
  const Vec force = solver.membrane().membrane_force(state.v, state.vdot);
  const double f = solver.membrane().forcing(t);
  return method == CoupledMethod::Bordered ? solver.solve_bordered(force, f)
                                           : solver.solve_fixed_point(force, f);
}

}  // namespace cochlea
