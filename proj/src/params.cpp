#include "mrl/params.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace mrl {

double wave_number(const FluidParams& p) {
  return 2.0 * std::sqrt(p.N2) * std::sqrt((1.0 - p.N2) / p.Rc);
}

double gamma_alpha(const FluidParams& p) {
  if (unit_alpha_branch(p)) {
    std::ostringstream msg;
    msg << "gamma_alpha undefined at alpha = " << p.alpha
        << " (|alpha - 1| <= " << kUnitAlphaThreshold
        << "); use the alpha = 1 branch";
    throw BranchError(msg.str());
  }
  return 2.0 * (1.0 - p.alpha * p.N2) / (p.alpha - 1.0);
}

namespace {

void check_ranges(const FluidParams& p) {
  std::ostringstream msg;
  if (!(p.N2 > 0.0 && p.N2 < 1.0)) {
    msg << "N2 = " << p.N2 << " must lie in (0, 1)";
    throw RangeError(msg.str());
  }
  if (!(p.Rc > 0.0)) {
    msg << "Rc = " << p.Rc << " must be positive";
    throw RangeError(msg.str());
  }
  if (!(p.alpha > 0.0 && p.alpha <= 1.0 / p.N2)) {
    msg << "alpha = " << p.alpha << " must lie in (0, 1/N2] = (0, "
        << 1.0 / p.N2 << "]";
    throw RangeError(msg.str());
  }
  if (!(p.beta > 0.0)) {
    msg << "beta = " << p.beta << " must be positive";
    throw RangeError(msg.str());
  }
  if (!p.s.allFinite()) {
    throw RangeError("wall velocity s' must be finite");
  }
}

}  // namespace

DerivedParams validate(const FluidParams& p, double h_max) {
  check_ranges(p);
  if (!(h_max > 0.0) || !std::isfinite(h_max)) {
    std::ostringstream msg;
    msg << "h_max = " << h_max << " must be positive and finite";
    throw RangeError(msg.str());
  }

  DerivedParams d;
  d.unit_alpha = unit_alpha_branch(p);
  d.k = wave_number(p);
  d.gamma_alpha =
      d.unit_alpha ? std::numeric_limits<double>::quiet_NaN() : gamma_alpha(p);
  const double gamma = std::abs(1.0 / p.alpha - p.N2 - p.N2 * p.beta);
  d.gamma2 = gamma * gamma;
  const double bound = p.Rc / (h_max * h_max) * (1.0 - p.N2);
  d.existence_margin = bound - d.gamma2;

  if (!(d.existence_margin > 0.0)) {
    std::ostringstream msg;
    msg << "existence condition violated: gamma^2 = " << d.gamma2
        << " must be < Rc/h_max^2 (1-N2) = " << bound
        << " (deficit " << d.gamma2 - bound
        << "); decrease h_max or beta, move alpha toward 1/(N2(1+beta)), "
           "or increase Rc";
    throw ExistenceError(msg.str(), d.gamma2, bound);
  }
  return d;
}

}  // namespace mrl
