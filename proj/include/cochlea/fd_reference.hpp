// Finite-difference reference solvers.
//
// These are deliberately independent of the sine-basis machinery: the reduced
// model uses the second-difference Dirichlet operator directly, and the full
// model solves the 5-point Laplace problem on the chamber with ghost-node
// Neumann rows. They back the spectral path in tests and in `--engine fd`.
#pragma once

#include "cochlea/model.hpp"
#include "cochlea/solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <vector>

namespace cochlea {

/// LDL^T factorization of a symmetric tridiagonal matrix. factor() fails
/// (returns false) on a nonpositive pivot, i.e. when the matrix is not SPD.
class TridiagonalCholesky {
 public:
  bool factor(const Vec& diag, const Vec& off);
  Vec solve(const Vec& rhs) const;
  bool ok() const { return ok_; }

 private:
  Vec d_, l_;
  bool ok_ = false;
};

/// -D^2 on n interior nodes with homogeneous Dirichlet ends, applied to u.
Vec apply_neg_second_difference(const Vec& u);

/// Reduced model via (m (-D^2) + I) vddot = (-D^2) RHS.
class FdReducedAccelerationSolver final : public AccelerationSolver {
 public:
  FdReducedAccelerationSolver(const ModelParams& params, int n);
  Acceleration accelerate(const Vec& v, const Vec& vdot, double t) const override;

 private:
  TridiagonalCholesky chol_;
};

Vec fd_reduced_accel_solve(const MembraneState& state, double t, const ModelParams& params);

struct Laplace2DProblem {
  int n = 0;
  int nz = 0;
  double delta = 0.0;
  double side_value = 0.0;  // p(0, z) = f; p(1, z) = 0
  Vec bottom_flux;          // p_z(x_j, 0) = g_j = -delta^2 vddot_j
};

/// 5-point solver for p_xx + p_zz / delta^2 = 0 on interior x-nodes and
/// z-levels z_l = l/(nz-1). The matrix is symmetrized (Neumann rows halved)
/// and factored once with a sparse Cholesky.
class FdLaplaceSolver {
 public:
  FdLaplaceSolver(int n, int nz, double delta);

  /// n x nz pressure grid.
  Mat solve(double side_value, const Vec& bottom_flux) const;
  int n() const { return n_; }
  int nz() const { return nz_; }
  const Eigen::SparseMatrix<double>& matrix() const { return a_; }

 private:
  int n_, nz_;
  double delta_;
  double cx_, cz_, hz_;
  Eigen::SparseMatrix<double> a_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
};

Mat fd_full_pressure_solve(const Laplace2DProblem& prob);

/// Discrete residual of p_xx + p_zz / delta^2 at interior (x, z) nodes,
/// including the Dirichlet side values.
Mat laplace_residual(const Mat& p, double side_value, double delta);

struct CoupledSolution {
  Vec vddot;
  Mat pressure;  // n x nz
  int iterations = 0;
  std::vector<double> residuals;
};

enum class CoupledMethod { FixedPoint, Bordered };

/// Full model acceleration with a genuine 2-D pressure solve.
class FdCoupledAccelerationSolver final : public AccelerationSolver {
 public:
  FdCoupledAccelerationSolver(const ModelParams& params, int n, int nz);

  Acceleration accelerate(const Vec& v, const Vec& vdot, double t) const override;

  CoupledSolution solve_bordered(const Vec& force, double forcing_value) const;
  /// Damped iteration vddot <- (1-theta) vddot + theta (force - p(.,0)) / m.
  CoupledSolution solve_fixed_point(const Vec& force, double forcing_value, double theta = 0.5,
                                    double tol = 1e-10, int max_iter = 1000) const;

 private:
  FdLaplaceSolver laplace_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> bordered_;
};

CoupledSolution fd_full_coupled_accel_solve(const MembraneState& state, double t,
                                            const ModelParams& params, int nz,
                                            CoupledMethod method = CoupledMethod::Bordered);

}  // namespace cochlea
