#include "mrl/bvp_oracle.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>
#include <sstream>

namespace mrl {

namespace {

// Unknown layout per node j: [u1, u2, w1, w2] at index 4j + c.
constexpr int U1 = 0, U2 = 1, W1 = 2, W2 = 3;

}  // namespace

BvpSolution solve_bvp(double h, const FluidParams& p, const BvpLoad& load, int M) {
  if (!(h > 0.0)) throw DomainError("solve_bvp needs h > 0");
  if (M < 16) throw DomainError("solve_bvp needs M >= 16");
  if (M % 2 == 1) ++M;  // composite Simpson wants an even interval count

  const double N2 = p.N2;
  const double Rc = p.Rc;
  const double dz = h / M;
  const int nun = 4 * (M + 1);

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(nun) * 6);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nun);
  auto id = [](int j, int c) { return 4 * j + c; };

  // z3 = 0: Robin rows, one-sided second-order first derivatives.
  {
    const double d0 = -3.0 / (2 * dz), d1 = 4.0 / (2 * dz), d2 = -1.0 / (2 * dz);
    // u1'(0) = (2/alpha) w2(0)
    trip.emplace_back(id(0, U1), id(0, U1), d0);
    trip.emplace_back(id(0, U1), id(1, U1), d1);
    trip.emplace_back(id(0, U1), id(2, U1), d2);
    trip.emplace_back(id(0, U1), id(0, W2), -2.0 / p.alpha);
    // u2'(0) = -(2/alpha) w1(0)
    trip.emplace_back(id(0, U2), id(0, U2), d0);
    trip.emplace_back(id(0, U2), id(1, U2), d1);
    trip.emplace_back(id(0, U2), id(2, U2), d2);
    trip.emplace_back(id(0, U2), id(0, W1), 2.0 / p.alpha);
    // Rc w1'(0) = 2 N2 beta (u2(0) - s2)
    trip.emplace_back(id(0, W1), id(0, W1), Rc * d0);
    trip.emplace_back(id(0, W1), id(1, W1), Rc * d1);
    trip.emplace_back(id(0, W1), id(2, W1), Rc * d2);
    trip.emplace_back(id(0, W1), id(0, U2), -2.0 * N2 * p.beta);
    rhs[id(0, W1)] = -2.0 * N2 * p.beta * load.s[1];
    // Rc w2'(0) = -2 N2 beta (u1(0) - s1)
    trip.emplace_back(id(0, W2), id(0, W2), Rc * d0);
    trip.emplace_back(id(0, W2), id(1, W2), Rc * d1);
    trip.emplace_back(id(0, W2), id(2, W2), Rc * d2);
    trip.emplace_back(id(0, W2), id(0, U1), 2.0 * N2 * p.beta);
    rhs[id(0, W2)] = 2.0 * N2 * p.beta * load.s[0];
  }

  // Interior: centered second-order stencils.
  const double idz2 = 1.0 / (dz * dz);
  const double idz = 1.0 / (2 * dz);
  for (int j = 1; j < M; ++j) {
    // -u1'' + 2 N2 w2' = -G1
    trip.emplace_back(id(j, U1), id(j - 1, U1), -idz2);
    trip.emplace_back(id(j, U1), id(j, U1), 2 * idz2);
    trip.emplace_back(id(j, U1), id(j + 1, U1), -idz2);
    trip.emplace_back(id(j, U1), id(j - 1, W2), -2 * N2 * idz);
    trip.emplace_back(id(j, U1), id(j + 1, W2), 2 * N2 * idz);
    rhs[id(j, U1)] = -load.G[0];
    // -u2'' - 2 N2 w1' = -G2
    trip.emplace_back(id(j, U2), id(j - 1, U2), -idz2);
    trip.emplace_back(id(j, U2), id(j, U2), 2 * idz2);
    trip.emplace_back(id(j, U2), id(j + 1, U2), -idz2);
    trip.emplace_back(id(j, U2), id(j - 1, W1), 2 * N2 * idz);
    trip.emplace_back(id(j, U2), id(j + 1, W1), -2 * N2 * idz);
    rhs[id(j, U2)] = -load.G[1];
    // -Rc w1'' + 4 N2 w1 + 2 N2 u2' = 0
    trip.emplace_back(id(j, W1), id(j - 1, W1), -Rc * idz2);
    trip.emplace_back(id(j, W1), id(j, W1), 2 * Rc * idz2 + 4 * N2);
    trip.emplace_back(id(j, W1), id(j + 1, W1), -Rc * idz2);
    trip.emplace_back(id(j, W1), id(j - 1, U2), -2 * N2 * idz);
    trip.emplace_back(id(j, W1), id(j + 1, U2), 2 * N2 * idz);
    // -Rc w2'' + 4 N2 w2 - 2 N2 u1' = 0
    trip.emplace_back(id(j, W2), id(j - 1, W2), -Rc * idz2);
    trip.emplace_back(id(j, W2), id(j, W2), 2 * Rc * idz2 + 4 * N2);
    trip.emplace_back(id(j, W2), id(j + 1, W2), -Rc * idz2);
    trip.emplace_back(id(j, W2), id(j - 1, U1), 2 * N2 * idz);
    trip.emplace_back(id(j, W2), id(j + 1, U1), -2 * N2 * idz);
  }

  // z3 = h: homogeneous Dirichlet.
  for (int c = 0; c < 4; ++c) trip.emplace_back(id(M, c), id(M, c), 1.0);

  Eigen::SparseMatrix<double> A(nun, nun);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "film BVP factorization failed at h = " << h << ", N2 = " << N2
        << ", alpha = " << p.alpha << "; check the existence margin";
    throw SingularSystemError(msg.str());
  }
  Eigen::VectorXd x = lu.solve(rhs);

  BvpSolution sol;
  sol.h = h;
  sol.M = M;
  sol.u.resize(M + 1);
  sol.w.resize(M + 1);
  for (int j = 0; j <= M; ++j) {
    sol.u[j] = {x[id(j, U1)], x[id(j, U2)]};
    sol.w[j] = {x[id(j, W1)], x[id(j, W2)]};
  }

  // Normwise backward error |Ax-b| / (|A||x| + |b|); the raw |Ax-b|/|b| is
  // dominated by the 1/dz^2 row scale.
  double row_sum_max = 0;
  Eigen::VectorXd abs_row_sums = Eigen::VectorXd::Zero(nun);
  for (int k = 0; k < A.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it)
      abs_row_sums[it.row()] += std::abs(it.value());
  row_sum_max = abs_row_sums.maxCoeff();
  const double denom = row_sum_max * x.lpNorm<Eigen::Infinity>() +
                       rhs.lpNorm<Eigen::Infinity>();
  sol.residual = denom == 0.0 ? (A * x - rhs).lpNorm<Eigen::Infinity>()
                              : (A * x - rhs).lpNorm<Eigen::Infinity>() / denom;

  // Composite Simpson z3-integrals.
  auto simpson = [&](auto&& comp) {
    Eigen::Vector2d acc = Eigen::Vector2d::Zero();
    for (int j = 0; j <= M; ++j) {
      const double wgt = (j == 0 || j == M) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
      acc += wgt * comp(j);
    }
    return Eigen::Vector2d(acc * dz / 3.0);
  };
  sol.U = simpson([&](int j) { return sol.u[j]; });
  sol.W = simpson([&](int j) { return sol.w[j]; });
  return sol;
}

CoefficientSample oracle_coefficients(double h, const FluidParams& p, int M) {
  const BvpSolution grad = solve_bvp(h, p, {{1, 0}, {0, 0}}, M);
  const BvpSolution wall = solve_bvp(h, p, {{0, 0}, {1, 0}}, M);
  // (e1)^perp = (0, 1), so phi-coefficients are read from W2.
  return {-grad.U[0], wall.U[0], grad.W[1], wall.W[1]};
}

double oracle_profile_check(double h, const FluidParams& p, const BvpLoad& load,
                            int M) {
  const BvpSolution sol = solve_bvp(h, p, load, M);
  double worst = 0;
  for (int j = 0; j <= sol.M; ++j) {
    const ProfileSample cf = profile(sol.z(j), h, p, load.G, load.s);
    worst = std::max(worst, (sol.u[j] - cf.u).norm() + (sol.w[j] - cf.w).norm());
  }
  return worst;
}

}  // namespace mrl
