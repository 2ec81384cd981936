#ifndef MRL_PARAMS_HPP
#define MRL_PARAMS_HPP

#include <Eigen/Dense>

#include "mrl/errors.hpp"

namespace mrl {

/// Dimensionless model parameters. N2 is the coupling parameter *squared*;
/// N itself is derived internally and never taken as input.
struct FluidParams {
  double N2;               ///< coupling, 0 < N2 < 1
  double Rc;               ///< scaled microrotation viscosity, > 0
  double alpha;            ///< boundary-viscosity coefficient, 0 < alpha <= 1/N2
  double beta;             ///< slippage control, > 0
  Eigen::Vector2d s{0, 0}; ///< wall velocity s'
};

/// |alpha - 1| at or below this routes evaluation to the alpha=1 formulas.
inline constexpr double kUnitAlphaThreshold = 1e-8;

/// Closed forms lose too many digits to hyperbolic cancellation past this;
/// coefficient evaluation falls back to the finite-difference solve.
inline constexpr double kHyperbolicGuard = 30.0;

inline bool unit_alpha_branch(const FluidParams& p) {
  return std::abs(p.alpha - 1.0) <= kUnitAlphaThreshold;
}

struct DerivedParams {
  double k;                ///< profile wave number
  double gamma_alpha;      ///< NaN on the alpha=1 branch
  double gamma2;           ///< |1/alpha - N2 - N2*beta|^2
  double existence_margin; ///< Rc/h_max^2 (1-N2) - gamma2, > 0 once validated
  bool unit_alpha;
};

/// k = 2 N sqrt((1-N2)/Rc).
double wave_number(const FluidParams& p);

/// gamma_alpha = 2 (1 - alpha N2) / (alpha - 1). Throws BranchError on the
/// alpha=1 branch, where the dedicated unit-alpha formulas apply instead.
double gamma_alpha(const FluidParams& p);

/// Range-checks every parameter and gates on the existence condition
///   gamma^2 < Rc/h_max^2 (1-N2).
/// Throws RangeError or ExistenceError; on success the margin is positive.
DerivedParams validate(const FluidParams& p, double h_max);

}  // namespace mrl

#endif
