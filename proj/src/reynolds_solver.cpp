#include "mrl/reynolds_solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <array>
#include <cmath>
#include <sstream>

namespace mrl {

namespace {

constexpr double kGaussLo = 0.5 - 0.28867513459481287;
constexpr double kGaussHi = 0.5 + 0.28867513459481287;

struct QPoint {
  double xi, eta;
};
constexpr std::array<QPoint, 4> kQuad = {
    QPoint{kGaussLo, kGaussLo}, QPoint{kGaussHi, kGaussLo},
    QPoint{kGaussLo, kGaussHi}, QPoint{kGaussHi, kGaussHi}};

void shapes(double xi, double eta, std::array<double, 4>& N,
            std::array<std::array<double, 2>, 4>& dN) {
  N = {(1 - xi) * (1 - eta), xi * (1 - eta), xi * eta, (1 - xi) * eta};
  dN = {{{-(1 - eta), -(1 - xi)}, {(1 - eta), -xi}, {eta, xi}, {-eta, (1 - xi)}}};
}

Eigen::Vector2d perp(const Eigen::Vector2d& v) { return {-v[1], v[0]}; }

struct Assembled {
  Eigen::SparseMatrix<double> A;  // pressure block only, nodes x nodes
  Eigen::VectorXd f;
  Eigen::VectorXd mass;  // int phi_a, the mean-constraint row
};

Assembled assemble(const FlowFactors& factors, const MacroDomain& dom,
                   const FluidParams& p) {
  const int nn = dom.nodes();
  const double hx = dom.Lx / dom.mx;
  const double hy = dom.Ly / dom.my;
  const double detJ = hx * hy;
  auto node = [&](int i, int j) { return j * (dom.mx + 1) + i; };

  // K1 is constant over omega, so the local stiffness is one 4x4 matrix.
  std::array<double, 16> Ke{};
  std::array<double, 4> Fe{};
  std::array<double, 4> Me{};
  std::array<double, 4> N;
  std::array<std::array<double, 2>, 4> dN;
  const Eigen::Vector2d Ls = factors.L1 * p.s;
  for (int q = 0; q < 4; ++q) {
    shapes(kQuad[q].xi, kQuad[q].eta, N, dN);
    const double wdet = 0.25 * detJ;
    for (int a = 0; a < 4; ++a) {
      const Eigen::Vector2d ga(dN[a][0] / hx, dN[a][1] / hy);
      for (int b = 0; b < 4; ++b) {
        const Eigen::Vector2d gb(dN[b][0] / hx, dN[b][1] / hy);
        Ke[4 * a + b] += wdet * ga.dot(factors.K1 * gb);
      }
      Fe[a] += wdet * ga.dot(Ls);
      Me[a] += wdet * N[a];
    }
  }

  Assembled out;
  out.f = Eigen::VectorXd::Zero(nn);
  out.mass = Eigen::VectorXd::Zero(nn);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(dom.mx) * dom.my * 16);
  for (int j = 0; j < dom.my; ++j) {
    for (int i = 0; i < dom.mx; ++i) {
      const std::array<int, 4> dofs = {node(i, j), node(i + 1, j),
                                       node(i + 1, j + 1), node(i, j + 1)};
      for (int a = 0; a < 4; ++a) {
        out.f[dofs[a]] += Fe[a];
        out.mass[dofs[a]] += Me[a];
        for (int b = 0; b < 4; ++b)
          trip.emplace_back(dofs[a], dofs[b], Ke[4 * a + b]);
      }
    }
  }
  out.A.resize(nn, nn);
  out.A.setFromTriplets(trip.begin(), trip.end());
  out.A.makeCompressed();
  return out;
}

void check_definite(const FlowFactors& factors, bool* asym_warning) {
  const Eigen::Matrix2d S = 0.5 * (factors.K1 + factors.K1.transpose());
  const double tr = S.trace();
  const double det = S.determinant();
  const double disc = std::sqrt(std::max(0.0, tr * tr / 4 - det));
  const double lmin = tr / 2 - disc;
  if (!(lmin > 0.0)) {
    std::ostringstream msg;
    msg << "sym(K1) has non-positive eigenvalue " << lmin
        << "; Reynolds problem indefinite";
    throw IndefinitenessError(msg.str());
  }
  const double defect = (factors.K1 - factors.K1.transpose()).cwiseAbs().maxCoeff();
  if (asym_warning) *asym_warning = defect > 1e-10 * factors.K1.cwiseAbs().maxCoeff();
}

}  // namespace

MacroSolution solve_pressure(const FlowFactors& factors, const MacroDomain& dom,
                             const FluidParams& p, SolverOptions opts,
                             ExecPolicy policy) {
  if (dom.mx < 8 || dom.my < 8 || !(dom.Lx > 0) || !(dom.Ly > 0))
    throw DomainError("macro domain needs Lx, Ly > 0 and mx, my >= 8");

  MacroSolution sol;
  sol.domain = dom;
  check_definite(factors, &sol.k1_asymmetry_warning);

  const Assembled sys = assemble(factors, dom, p);
  const int nn = dom.nodes();
  const double fn = sys.f.norm();
  const double load_scale = std::max(fn, 1e-300);

  if (opts.method == SolverOptions::Method::Direct) {
    // Bordered saddle system enforcing the zero-mean gauge.
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(sys.A.nonZeros() + 2 * nn);
    for (int k = 0; k < sys.A.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(sys.A, k); it; ++it)
        trip.emplace_back(it.row(), it.col(), it.value());
    for (int a = 0; a < nn; ++a) {
      trip.emplace_back(a, nn, sys.mass[a]);
      trip.emplace_back(nn, a, sys.mass[a]);
    }
    Eigen::SparseMatrix<double> B(nn + 1, nn + 1);
    B.setFromTriplets(trip.begin(), trip.end());
    B.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(B);
    if (lu.info() != Eigen::Success)
      throw SingularSystemError("Reynolds factorization failed");
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nn + 1);
    rhs.head(nn) = sys.f;
    const Eigen::VectorXd x = lu.solve(rhs);
    sol.p = x.head(nn);
    sol.residual = (sys.A * sol.p - sys.f).lpNorm<Eigen::Infinity>() / load_scale;
  } else {
    // Mean-projected conjugate gradients on the singular consistent system.
    if (factors.k1_symmetry_defect > 1e-10 * factors.K1.cwiseAbs().maxCoeff())
      throw SolverError("CG path requires symmetric K1");
    const double total_mass = sys.mass.sum();
    auto project = [&](Eigen::VectorXd& v) {
      v.array() -= sys.mass.dot(v) / total_mass;
    };
    Eigen::VectorXd x = Eigen::VectorXd::Zero(nn);
    Eigen::VectorXd r = sys.f;
    project(r);
    Eigen::VectorXd d = r;
    double rho = r.squaredNorm();
    const double stop = opts.cg_tol * load_scale;
    int it = 0;
    while (std::sqrt(rho) > stop && it < opts.cg_max_iter) {
      Eigen::VectorXd Ad = sys.A * d;
      const double alpha = rho / d.dot(Ad);
      x += alpha * d;
      r -= alpha * Ad;
      project(r);
      const double rho_new = r.squaredNorm();
      d = r + (rho_new / rho) * d;
      rho = rho_new;
      ++it;
    }
    if (it >= opts.cg_max_iter)
      throw SolverError("Reynolds CG did not converge");
    project(x);
    sol.p = x;
    sol.residual = (sys.A * sol.p - sys.f).lpNorm<Eigen::Infinity>() / load_scale;
  }

  // Recovered fields at quadrature points, averaged to nodes; node values are
  // means over the adjacent elements' quadrature averages, accumulated in a
  // fixed order.
  const int nel = dom.mx * dom.my;
  const double hx = dom.Lx / dom.mx;
  const double hy = dom.Ly / dom.my;
  auto node = [&](int i, int j) { return j * (dom.mx + 1) + i; };
  std::vector<Eigen::Vector2d> Ue(nel), We(nel);
  for_each_index(policy, nel, [&](std::ptrdiff_t e) {
    const int i = static_cast<int>(e) % dom.mx;
    const int j = static_cast<int>(e) / dom.mx;
    const std::array<int, 4> dofs = {node(i, j), node(i + 1, j),
                                     node(i + 1, j + 1), node(i, j + 1)};
    std::array<double, 4> N;
    std::array<std::array<double, 2>, 4> dN;
    Eigen::Vector2d Uacc = Eigen::Vector2d::Zero();
    Eigen::Vector2d Wacc = Eigen::Vector2d::Zero();
    for (int q = 0; q < 4; ++q) {
      shapes(kQuad[q].xi, kQuad[q].eta, N, dN);
      Eigen::Vector2d grad = Eigen::Vector2d::Zero();
      for (int a = 0; a < 4; ++a)
        grad += sol.p[dofs[a]] * Eigen::Vector2d(dN[a][0] / hx, dN[a][1] / hy);
      Uacc += -factors.K1 * grad + factors.L1 * p.s;
      Wacc += factors.K2 * perp(grad) + factors.L2 * perp(p.s);
    }
    Ue[e] = 0.25 * Uacc;
    We[e] = 0.25 * Wacc;
  });

  sol.U.assign(nn, Eigen::Vector2d::Zero());
  sol.W.assign(nn, Eigen::Vector2d::Zero());
  std::vector<int> touch(nn, 0);
  for (int j = 0; j < dom.my; ++j)
    for (int i = 0; i < dom.mx; ++i) {
      const int e = j * dom.mx + i;
      for (const int a : {node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1)}) {
        sol.U[a] += Ue[e];
        sol.W[a] += We[e];
        ++touch[a];
      }
    }
  for (int a = 0; a < nn; ++a) {
    sol.U[a] /= touch[a];
    sol.W[a] /= touch[a];
  }
  return sol;
}

double mass_residual(const MacroSolution& sol, const FlowFactors& factors,
                     const FluidParams& p) {
  const MacroDomain& dom = sol.domain;
  const Assembled sys = assemble(factors, dom, p);
  // int U . grad eta_a with U = -K1 grad p + L1 s' at quadrature points is, by
  // construction, f_a - (A p)_a; assembling it directly keeps the diagnostic
  // honest against the solver's own residual.
  const Eigen::VectorXd r = sys.f - sys.A * sol.p;
  return r.lpNorm<Eigen::Infinity>() / std::max(sys.f.norm(), 1e-300);
}

}  // namespace mrl
