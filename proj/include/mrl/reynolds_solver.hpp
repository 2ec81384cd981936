#ifndef MRL_REYNOLDS_SOLVER_HPP
#define MRL_REYNOLDS_SOLVER_HPP

#include <Eigen/Dense>
#include <vector>

#include "mrl/cell_solver.hpp"
#include "mrl/parallel.hpp"
#include "mrl/params.hpp"

namespace mrl {

/// Rectangle omega = (0,Lx) x (0,Ly) with a uniform mx x my Q1 grid.
struct MacroDomain {
  double Lx = 1, Ly = 1;
  int mx = 8, my = 8;

  int nodes() const { return (mx + 1) * (my + 1); }
  double x1(int i) const { return Lx * static_cast<double>(i) / mx; }
  double x2(int j) const { return Ly * static_cast<double>(j) / my; }
};

struct SolverOptions {
  enum class Method { Direct, ConjugateGradient };
  Method method = Method::Direct;
  double cg_tol = 1e-12;  ///< relative residual target for the CG path
  int cg_max_iter = 20000;
};

struct MacroSolution {
  MacroDomain domain;
  Eigen::VectorXd p;                 ///< nodal pressure, zero mean over omega
  std::vector<Eigen::Vector2d> U;    ///< nodal averaged velocity
  std::vector<Eigen::Vector2d> W;    ///< nodal averaged microrotation
  double residual = 0;               ///< relative weak-form residual
  bool k1_asymmetry_warning = false; ///< set when only sym(K1) was definite-checked
};

/// Pure-Neumann Reynolds solve: int K1 grad p . grad eta = int L1 s' . grad eta
/// for all eta in H^1(omega); the flux condition on the boundary is natural and
/// the zero-mean gauge is a Lagrange multiplier. Recovered fields:
///   U = -K1 grad p + L1 s',   W = K2 (grad p)^perp + L2 (s')^perp,
/// evaluated at quadrature points and averaged to nodes.
/// Throws IndefinitenessError if sym(K1) is not positive definite.
MacroSolution solve_pressure(const FlowFactors& factors, const MacroDomain& dom,
                             const FluidParams& p, SolverOptions opts = {},
                             ExecPolicy policy = ExecPolicy::Parallel);

/// Discrete mass conservation diagnostic: max over nodal test functions of
/// |int U . grad eta|, normalized by the load. Galerkin exactness makes this
/// the linear-solver residual.
double mass_residual(const MacroSolution& sol, const FlowFactors& factors,
                     const FluidParams& p);

}  // namespace mrl

#endif
