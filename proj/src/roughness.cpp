#include "mrl/roughness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace mrl {

namespace {

// Wrap into [0, 1): fractional part of z + 1/2 measured from the cell corner.
double wrap01(double z) {
  double f = z - std::floor(z);
  if (f >= 1.0) f = 0.0;  // guard against floor rounding at exact integers
  return f;
}

}  // namespace

RoughnessProfile RoughnessProfile::cosine(double h0,
                                          const Eigen::Vector2d& amplitude) {
  RoughnessProfile r;
  r.kind_ = Kind::Cosine;
  r.h0_ = h0;
  r.amp_ = amplitude;
  r.h_min_ = h0 - std::abs(amplitude[0]) - std::abs(amplitude[1]);
  r.h_max_ = h0 + std::abs(amplitude[0]) + std::abs(amplitude[1]);
  if (!(r.h_min_ > 0.0)) {
    std::ostringstream msg;
    msg << "cosine roughness not positive: h_min = " << r.h_min_
        << " with h0 = " << h0 << ", |a| = (" << std::abs(amplitude[0]) << ", "
        << std::abs(amplitude[1]) << ")";
    throw RangeError(msg.str());
  }
  return r;
}

RoughnessProfile RoughnessProfile::sampled(int n, std::vector<double> values) {
  if (n < 2 || values.size() != static_cast<std::size_t>(n) * n) {
    std::ostringstream msg;
    msg << "sampled roughness needs an n x n grid with n >= 2, got n = " << n
        << " and " << values.size() << " values";
    throw RangeError(msg.str());
  }
  RoughnessProfile r;
  r.kind_ = Kind::Sampled;
  r.n_ = n;
  r.values_ = std::move(values);
  const auto [lo, hi] = std::minmax_element(r.values_.begin(), r.values_.end());
  r.h_min_ = *lo;
  r.h_max_ = *hi;
  if (!(r.h_min_ > 0.0)) {
    std::ostringstream msg;
    msg << "sampled roughness not positive: min nodal value = " << r.h_min_;
    throw RangeError(msg.str());
  }
  return r;
}

double RoughnessProfile::operator()(double z1, double z2) const {
  if (kind_ == Kind::Cosine) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    return h0_ + amp_[0] * std::cos(two_pi * z1) + amp_[1] * std::cos(two_pi * z2);
  }
  // Bilinear interpolation with periodic wrap; node i sits at -1/2 + i/n.
  const double x = wrap01(z1 + 0.5) * n_;
  const double y = wrap01(z2 + 0.5) * n_;
  const int i0 = std::min(static_cast<int>(x), n_ - 1);
  const int j0 = std::min(static_cast<int>(y), n_ - 1);
  const double fx = x - i0;
  const double fy = y - j0;
  const int i1 = (i0 + 1) % n_;
  const int j1 = (j0 + 1) % n_;
  const double v00 = values_[static_cast<std::size_t>(j0) * n_ + i0];
  const double v10 = values_[static_cast<std::size_t>(j0) * n_ + i1];
  const double v01 = values_[static_cast<std::size_t>(j1) * n_ + i0];
  const double v11 = values_[static_cast<std::size_t>(j1) * n_ + i1];
  return (1 - fy) * ((1 - fx) * v00 + fx * v10) + fy * ((1 - fx) * v01 + fx * v11);
}

}  // namespace mrl
