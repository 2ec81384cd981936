#ifndef MRL_ROUGHNESS_HPP
#define MRL_ROUGHNESS_HPP

#include <Eigen/Dense>
#include <vector>

#include "mrl/errors.hpp"

namespace mrl {

/// Periodic film thickness h on the unit cell Z' = (-1/2, 1/2)^2.
/// Either a cosine family h0 + a1 cos(2 pi z1) + a2 cos(2 pi z2), or an
/// n x n nodal grid (z2-slow, nodes at -1/2 + i/n) with periodic bilinear
/// interpolation. h must stay strictly positive.
class RoughnessProfile {
 public:
  static RoughnessProfile cosine(double h0, const Eigen::Vector2d& amplitude);
  static RoughnessProfile sampled(int n, std::vector<double> values);

  double operator()(double z1, double z2) const;

  double min() const { return h_min_; }
  double max() const { return h_max_; }
  bool is_cosine() const { return kind_ == Kind::Cosine; }

 private:
  enum class Kind { Cosine, Sampled };
  RoughnessProfile() = default;

  Kind kind_ = Kind::Cosine;
  double h0_ = 1.0;
  Eigen::Vector2d amp_{0, 0};
  int n_ = 0;
  std::vector<double> values_;
  double h_min_ = 0.0, h_max_ = 0.0;
};

}  // namespace mrl

#endif
