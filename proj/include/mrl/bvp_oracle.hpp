#ifndef MRL_BVP_ORACLE_HPP
#define MRL_BVP_ORACLE_HPP

#include <Eigen/Dense>
#include <vector>

#include "mrl/coefficients.hpp"
#include "mrl/params.hpp"

namespace mrl {

/// Loads of the reduced film system: constant in-plane pressure gradient G
/// (standing for grad_x p + grad_z pi at a frozen point) and wall velocity s.
struct BvpLoad {
  Eigen::Vector2d G{0, 0};
  Eigen::Vector2d s{0, 0};
};

struct BvpSolution {
  double h = 0;
  int M = 0;                        ///< interval count (even)
  std::vector<Eigen::Vector2d> u;   ///< M+1 nodal velocities
  std::vector<Eigen::Vector2d> w;   ///< M+1 nodal microrotations
  Eigen::Vector2d U{0, 0};          ///< z3-integral of u (composite Simpson)
  Eigen::Vector2d W{0, 0};          ///< z3-integral of w
  double residual = 0;              ///< relative residual of the linear system

  double z(int j) const { return j == M ? h : h * static_cast<double>(j) / M; }
};

/// Second-order finite-difference solve of the coupled 4-component system
///   -u'' - 2 N2 d/dz3 (w)^perp = -G
///   -Rc w'' + 4 N2 w - 2 N2 d/dz3 (u)^perp = 0
/// with u(h) = w(h) = 0, u'(0) = -(2/alpha)(w(0))^perp and
/// Rc w'(0) = -2 N2 beta (u(0) - s)^perp. Robin rows use one-sided
/// second-order differences. M is rounded up to even; M >= 16 required.
BvpSolution solve_bvp(double h_val, const FluidParams& p, const BvpLoad& load,
                      int M);

/// Unit-load averaging: (G=e1, s=0) gives theta1 = -U1, phi1 = W2;
/// (G=0, s=e1) gives theta2 = U1, phi2 = W2.
CoefficientSample oracle_coefficients(double h_val, const FluidParams& p, int M);

/// Max over nodes of |u_oracle - u_closed| + |w_oracle - w_closed|.
double oracle_profile_check(double h_val, const FluidParams& p,
                            const BvpLoad& load, int M);

}  // namespace mrl

#endif
