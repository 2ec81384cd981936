#ifndef MRL_CELL_SOLVER_HPP
#define MRL_CELL_SOLVER_HPP

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "mrl/coefficients.hpp"
#include "mrl/parallel.hpp"

namespace mrl {

/// Correctors q1, q2 of the periodic local problem on Z', Q1 elements on a
/// uniform n x n mesh, zero cell mean enforced by a Lagrange multiplier.
struct CellSolution {
  int n = 0;
  Eigen::VectorXd q1, q2;  ///< n*n nodal values, z2-slow row-major
  /// Gradients at the 2x2 Gauss points, element-major then qpoint-major.
  std::vector<Eigen::Vector2d> grad_q1, grad_q2;
  double residual1 = 0, residual2 = 0;  ///< relative linear-system residuals

  double node_coord(int i) const { return -0.5 + static_cast<double>(i) / n; }
};

/// Weak form: int Theta1 (grad q_i + e_i) . grad theta = int Theta2 s_i
/// (e_i . grad theta). Theta is sampled pointwise at quadrature points.
/// Throws EllipticityError if any quadrature theta1 <= 0, SolverError /
/// SingularSystemError on solve failure.
CellSolution solve_correctors(const CoefficientEvaluator& coeff,
                              const FluidParams& p, int n,
                              ExecPolicy policy = ExecPolicy::Parallel);

struct FlowFactors {
  Eigen::Matrix2d K1 = Eigen::Matrix2d::Zero();
  double L1 = 0;
  Eigen::Matrix2d K2 = Eigen::Matrix2d::Zero();
  double L2 = 0;
  double k1_symmetry_defect = 0;  ///< max-norm of K1 - K1^T (nonzero when s' != 0)
};

/// Quadrature-consistent factor integrals (same 2x2 Gauss rule as assembly).
FlowFactors flow_factors(const CellSolution& cell,
                         const CoefficientEvaluator& coeff, const FluidParams& p,
                         ExecPolicy policy = ExecPolicy::Parallel);

/// Harmonic and arithmetic means of theta1 over the same quadrature field,
/// the classical two-sided bounds on the eigenvalues of K1 when s' = 0.
struct Theta1Means {
  double harmonic = 0, arithmetic = 0;
};
Theta1Means theta1_quadrature_means(const CoefficientEvaluator& coeff, int n);

}  // namespace mrl

#endif
