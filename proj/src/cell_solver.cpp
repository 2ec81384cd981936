#include "mrl/cell_solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <array>
#include <cmath>
#include <sstream>

namespace mrl {

namespace {

// 2x2 Gauss rule on the reference square [0,1]^2, fixed ordering.
struct QuadRule {
  std::array<double, 2> pts;
  double weight;  // per point, on [0,1]
};

constexpr double kGaussLo = 0.5 - 0.28867513459481287;  // 1/(2 sqrt 3)
constexpr double kGaussHi = 0.5 + 0.28867513459481287;

struct QPoint {
  double xi, eta;
};

constexpr std::array<QPoint, 4> kQuad = {
    QPoint{kGaussLo, kGaussLo}, QPoint{kGaussHi, kGaussLo},
    QPoint{kGaussLo, kGaussHi}, QPoint{kGaussHi, kGaussHi}};

// Q1 shape values and reference gradients at (xi, eta); node order
// (0,0), (1,0), (1,1), (0,1).
void shapes(double xi, double eta, std::array<double, 4>& N,
            std::array<std::array<double, 2>, 4>& dN) {
  N = {(1 - xi) * (1 - eta), xi * (1 - eta), xi * eta, (1 - xi) * eta};
  dN = {{{-(1 - eta), -(1 - xi)}, {(1 - eta), -xi}, {eta, xi}, {-eta, (1 - xi)}}};
}

struct ElementData {
  std::array<double, 16> Ke;                 // row-major local stiffness
  std::array<double, 4> Fe1, Fe2;            // loads of q1 and q2
  std::array<CoefficientSample, 4> coef;     // per quadrature point
  bool bad_theta1 = false;
};

// Local integrals of one element; pure, evaluated identically regardless of
// the thread that runs it.
ElementData element_integrals(const CoefficientEvaluator& coeff,
                              const FluidParams& p, int n, int e) {
  const int i = e % n;
  const int j = e / n;
  const double hx = 1.0 / n;
  const double x0 = -0.5 + i * hx;
  const double y0 = -0.5 + j * hx;
  const double detJ = hx * hx;

  ElementData out{};
  out.Ke.fill(0.0);
  out.Fe1.fill(0.0);
  out.Fe2.fill(0.0);

  std::array<double, 4> N;
  std::array<std::array<double, 2>, 4> dN;
  for (int q = 0; q < 4; ++q) {
    shapes(kQuad[q].xi, kQuad[q].eta, N, dN);
    const double z1 = x0 + kQuad[q].xi * hx;
    const double z2 = y0 + kQuad[q].eta * hx;
    const CoefficientSample cs = coeff(z1, z2);
    out.coef[q] = cs;
    if (!(cs.theta1 > 0.0)) out.bad_theta1 = true;
    const double wdet = 0.25 * detJ;
    for (int a = 0; a < 4; ++a) {
      const double gax = dN[a][0] / hx;
      const double gay = dN[a][1] / hx;
      for (int b = 0; b < 4; ++b) {
        const double gbx = dN[b][0] / hx;
        const double gby = dN[b][1] / hx;
        out.Ke[4 * a + b] += wdet * cs.theta1 * (gax * gbx + gay * gby);
      }
      // int (s_i theta2 - theta1) d_{z_i} phi_a
      out.Fe1[a] += wdet * (p.s[0] * cs.theta2 - cs.theta1) * gax;
      out.Fe2[a] += wdet * (p.s[1] * cs.theta2 - cs.theta1) * gay;
    }
  }
  return out;
}

}  // namespace

CellSolution solve_correctors(const CoefficientEvaluator& coeff,
                              const FluidParams& p, int n, ExecPolicy policy) {
  if (n < 8) throw DomainError("solve_correctors needs n >= 8");
  const int nel = n * n;
  const int nn = n * n;  // periodic: one node per element corner

  std::vector<ElementData> elems(nel);
  for_each_index_checked(policy, nel,
                 [&](std::ptrdiff_t e) { elems[e] = element_integrals(coeff, p, n, static_cast<int>(e)); });

  for (int e = 0; e < nel; ++e) {
    if (elems[e].bad_theta1) {
      std::ostringstream msg;
      msg << "theta1 <= 0 at a quadrature point of element " << e
          << "; local problem not elliptic";
      throw EllipticityError(msg.str());
    }
  }

  // Periodic connectivity: corner nodes of element (i, j).
  auto node = [n](int i, int j) { return (j % n) * n + (i % n); };

  // Bordered system [[A, m], [m^T, 0]] enforcing zero cell mean.
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(nel) * 16 + 2 * nn);
  Eigen::VectorXd f1 = Eigen::VectorXd::Zero(nn + 1);
  Eigen::VectorXd f2 = Eigen::VectorXd::Zero(nn + 1);
  const double mass = 1.0 / nn;  // int phi_a on the uniform periodic mesh

  for (int e = 0; e < nel; ++e) {
    const int i = e % n;
    const int j = e / n;
    const std::array<int, 4> dofs = {node(i, j), node(i + 1, j), node(i + 1, j + 1),
                                     node(i, j + 1)};
    for (int a = 0; a < 4; ++a) {
      f1[dofs[a]] += elems[e].Fe1[a];
      f2[dofs[a]] += elems[e].Fe2[a];
      for (int b = 0; b < 4; ++b)
        trip.emplace_back(dofs[a], dofs[b], elems[e].Ke[4 * a + b]);
    }
  }
  for (int a = 0; a < nn; ++a) {
    trip.emplace_back(a, nn, mass);
    trip.emplace_back(nn, a, mass);
  }

  Eigen::SparseMatrix<double> A(nn + 1, nn + 1);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success)
    throw SingularSystemError("cell problem factorization failed");

  const Eigen::VectorXd x1 = lu.solve(f1);
  const Eigen::VectorXd x2 = lu.solve(f2);

  auto rel_residual = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& f) {
    const double fn = f.norm();
    return (A * x - f).norm() / std::max(fn, 1e-300);
  };

  CellSolution sol;
  sol.n = n;
  sol.q1 = x1.head(nn);
  sol.q2 = x2.head(nn);
  sol.residual1 = f1.norm() == 0.0 ? x1.norm() : rel_residual(x1, f1);
  sol.residual2 = f2.norm() == 0.0 ? x2.norm() : rel_residual(x2, f2);
  if (sol.residual1 > 1e-12 || sol.residual2 > 1e-12) {
    std::ostringstream msg;
    msg << "cell solve residuals " << sol.residual1 << ", " << sol.residual2
        << " exceed 1e-12";
    throw SolverError(msg.str());
  }

  // Corrector gradients at quadrature points, element-major.
  sol.grad_q1.resize(static_cast<std::size_t>(nel) * 4);
  sol.grad_q2.resize(static_cast<std::size_t>(nel) * 4);
  const double hx = 1.0 / n;
  for_each_index(policy, nel, [&](std::ptrdiff_t e) {
    const int i = static_cast<int>(e) % n;
    const int j = static_cast<int>(e) / n;
    const std::array<int, 4> dofs = {node(i, j), node(i + 1, j), node(i + 1, j + 1),
                                     node(i, j + 1)};
    std::array<double, 4> N;
    std::array<std::array<double, 2>, 4> dN;
    for (int q = 0; q < 4; ++q) {
      shapes(kQuad[q].xi, kQuad[q].eta, N, dN);
      Eigen::Vector2d g1 = Eigen::Vector2d::Zero();
      Eigen::Vector2d g2 = Eigen::Vector2d::Zero();
      for (int a = 0; a < 4; ++a) {
        const Eigen::Vector2d ga(dN[a][0] / hx, dN[a][1] / hx);
        g1 += sol.q1[dofs[a]] * ga;
        g2 += sol.q2[dofs[a]] * ga;
      }
      sol.grad_q1[4 * e + q] = g1;
      sol.grad_q2[4 * e + q] = g2;
    }
  });
  return sol;
}

FlowFactors flow_factors(const CellSolution& cell, const CoefficientEvaluator& coeff,
                         const FluidParams& p, ExecPolicy policy) {
  (void)p;
  const int n = cell.n;
  const int nel = n * n;
  const double hx = 1.0 / n;
  const double wdet = 0.25 * hx * hx;

  // Per-element partial integrals, reduced serially in element order so the
  // result is independent of the thread count.
  struct Partial {
    std::array<double, 10> v;  // K1(4), L1, K2(4), L2
  };
  std::vector<Partial> partials(nel);
  for_each_index_checked(policy, nel, [&](std::ptrdiff_t e) {
    const int i = static_cast<int>(e) % n;
    const int j = static_cast<int>(e) / n;
    const double x0 = -0.5 + i * hx;
    const double y0 = -0.5 + j * hx;
    Partial acc{};
    acc.v.fill(0.0);
    for (int q = 0; q < 4; ++q) {
      const double z1 = x0 + kQuad[q].xi * hx;
      const double z2 = y0 + kQuad[q].eta * hx;
      const CoefficientSample cs = coeff(z1, z2);
      if (!(cs.theta1 > 0.0))
        throw EllipticityError("theta1 <= 0 in factor integration");
      const Eigen::Vector2d g1 = cell.grad_q1[4 * e + q];
      const Eigen::Vector2d g2 = cell.grad_q2[4 * e + q];
      // corrector matrix M, column i = grad q^i + e_i
      const double m11 = g1[0] + 1, m12 = g2[0];
      const double m21 = g1[1], m22 = g2[1] + 1;
      acc.v[0] += wdet * cs.theta1 * m11;
      acc.v[1] += wdet * cs.theta1 * m12;
      acc.v[2] += wdet * cs.theta1 * m21;
      acc.v[3] += wdet * cs.theta1 * m22;
      acc.v[4] += wdet * cs.theta2;
      // perp arrangement: [[m22, -m21], [-m12, m11]]
      acc.v[5] += wdet * cs.phi1 * m22;
      acc.v[6] += wdet * cs.phi1 * (-m21);
      acc.v[7] += wdet * cs.phi1 * (-m12);
      acc.v[8] += wdet * cs.phi1 * m11;
      acc.v[9] += wdet * cs.phi2;
    }
    partials[e] = acc;
  });

  std::array<double, 10> tot{};
  tot.fill(0.0);
  for (int e = 0; e < nel; ++e)
    for (int c = 0; c < 10; ++c) tot[c] += partials[e].v[c];

  FlowFactors f;
  f.K1 << tot[0], tot[1], tot[2], tot[3];
  f.L1 = tot[4];
  f.K2 << tot[5], tot[6], tot[7], tot[8];
  f.L2 = tot[9];
  f.k1_symmetry_defect = std::abs(f.K1(0, 1) - f.K1(1, 0));
  return f;
}

Theta1Means theta1_quadrature_means(const CoefficientEvaluator& coeff, int n) {
  const double hx = 1.0 / n;
  const double wdet = 0.25 * hx * hx;
  double arith = 0, harm = 0;
  for (int e = 0; e < n * n; ++e) {
    const int i = e % n;
    const int j = e / n;
    for (int q = 0; q < 4; ++q) {
      const double z1 = -0.5 + i * hx + kQuad[q].xi * hx;
      const double z2 = -0.5 + j * hx + kQuad[q].eta * hx;
      const double t1 = coeff(z1, z2).theta1;
      if (!(t1 > 0.0)) throw EllipticityError("theta1 <= 0 in mean computation");
      arith += wdet * t1;
      harm += wdet / t1;
    }
  }
  return {1.0 / harm, arith};
}

}  // namespace mrl
