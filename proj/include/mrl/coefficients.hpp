#ifndef MRL_COEFFICIENTS_HPP
#define MRL_COEFFICIENTS_HPP

#include <Eigen/Dense>
#include <atomic>
#include <functional>
#include <vector>

#include "mrl/parallel.hpp"
#include "mrl/params.hpp"
#include "mrl/roughness.hpp"

namespace mrl {

/// Which constant multiplies the first bracket of phi2. The two natural
/// pairings differ; A2 is the variant that agrees with the boundary-value
/// oracle and is the default everywhere.
enum class Phi2Variant { A2, A1 };

/// The five constants of the closed-form film solution, branch-selected on
/// alpha. On the alpha=1 branch the primed constants occupy the same slots.
struct ClosedFormConstants {
  double L, A1, A2, B1, B2;
  bool unit_alpha;
};

/// Throws DegenerateDenominatorError when the shared denominator of the
/// constants is numerically zero (unreachable under the existence condition).
ClosedFormConstants coef_constants(double h_val, const FluidParams& p);

struct CoefficientSample {
  double theta1, theta2, phi1, phi2;
};

/// z3-averaged coefficients at thickness h_val. Past the hyperbolic guard
/// (k*h > 30) the value comes from the finite-difference solve instead of the
/// closed forms; `fallback`, when given, is set accordingly.
/// Throws EllipticityError if theta1 comes out non-positive.
CoefficientSample theta_phi(double h_val, const FluidParams& p,
                            Phi2Variant variant = Phi2Variant::A2,
                            bool* fallback = nullptr);

/// Worst componentwise discrepancy between two coefficient samples, measured
/// relative to the larger of the component's own magnitude and the sample's
/// overall scale. phi1 crosses zero inside the admissible parameter region;
/// against any finite-resolution reference a pure componentwise relative
/// error is unbounded there, while a formula defect still registers at
/// O(scale).
double coefficient_discrepancy(const CoefficientSample& got,
                               const CoefficientSample& ref);

struct ProfileSample {
  Eigen::Vector2d u, w;
};

/// Pointwise film profiles at height z3 in [0, h_val] under a constant
/// in-plane pressure gradient G and wall velocity s. Linear in (G, s) with
/// zero offset; exactly zero at z3 = h_val by construction.
ProfileSample profile(double z3, double h_val, const FluidParams& p,
                      const Eigen::Vector2d& G, const Eigen::Vector2d& s);

/// Scalar response functions: u = u_G(z3) G + u_s(z3) s,
/// w = w_G(z3) G^perp + w_s(z3) s^perp with (v)^perp = (-v2, v1).
struct ProfileResponse {
  double u_G, u_s, w_G, w_s;
};
ProfileResponse profile_response(double z3, double h_val, const FluidParams& p);

/// Point evaluator of the averaged coefficients over the cell; pure and
/// thread-safe. Counts hyperbolic-guard fallbacks for reporting.
class CoefficientField {
 public:
  CoefficientField(RoughnessProfile roughness, FluidParams params,
                   Phi2Variant variant = Phi2Variant::A2)
      : roughness_(std::move(roughness)), params_(params), variant_(variant) {}

  CoefficientSample operator()(double z1, double z2) const;

  const RoughnessProfile& roughness() const { return roughness_; }
  const FluidParams& params() const { return params_; }
  Phi2Variant variant() const { return variant_; }
  long fallback_count() const { return fallbacks_.load(); }

 private:
  RoughnessProfile roughness_;
  FluidParams params_;
  Phi2Variant variant_;
  mutable std::atomic<long> fallbacks_{0};
};

/// Type-erased coefficient evaluator used by the cell solver.
using CoefficientEvaluator = std::function<CoefficientSample(double, double)>;

/// n x n node-centered samples over Z' (nodes -1/2 + i/n), z2-slow row-major.
/// Output is independent of the execution policy, bit for bit.
std::vector<CoefficientSample> sample_field(const CoefficientField& field,
                                            int n,
                                            ExecPolicy policy = ExecPolicy::Parallel);

}  // namespace mrl

#endif
