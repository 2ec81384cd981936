#include <doctest.h>

#include <cmath>

#include "mrl/reynolds_solver.hpp"

using namespace mrl;

namespace {

// Constant factors taken from the frozen unit-alpha coefficient point.
FlowFactors constant_factors() {
  FlowFactors f;
  const double theta1 = 0.2536813054091942, theta2 = 0.2379517638157082;
  const double phi1 = -0.0339834898122328, phi2 = -0.1496749217605502;
  f.K1 = theta1 * Eigen::Matrix2d::Identity();
  f.L1 = theta2;
  f.K2 = phi1 * Eigen::Matrix2d::Identity();
  f.L2 = phi2;
  return f;
}

FluidParams params_with(Eigen::Vector2d s) {
  return FluidParams{0.25, 1.0, 1.0, 1.0, s};
}

}  // namespace

TEST_SUITE_BEGIN("reynolds_solver");

TEST_CASE("constant factors: exact linear zero-mean pressure") {
  const FlowFactors f = constant_factors();
  const MacroDomain dom{2.0, 1.0, 24, 16};
  const FluidParams p = params_with({1, 0});
  const MacroSolution sol = solve_pressure(f, dom, p);

  const double slope = f.L1 / f.K1(0, 0);
  double perr = 0, mean = 0;
  for (int j = 0; j <= dom.my; ++j)
    for (int i = 0; i <= dom.mx; ++i) {
      const int a = j * (dom.mx + 1) + i;
      perr = std::max(perr, std::abs(sol.p[a] - slope * (dom.x1(i) - dom.Lx / 2)));
      mean += sol.p[a];
    }
  CHECK(perr < 1e-10);
  CHECK(sol.residual < 1e-12);

  // Sealed cavity: the pressure-driven backflow cancels the wall drag.
  double umax = 0;
  for (const auto& u : sol.U) umax = std::max(umax, u.norm());
  CHECK(umax < 1e-10);

  // W is assembled from the perp arrangement, constant across the domain.
  const double w2 = f.K2(1, 1) * slope + f.L2;
  for (const auto& w : sol.W) {
    CHECK(std::abs(w[0]) < 1e-10);
    CHECK(w[1] == doctest::Approx(w2).epsilon(1e-10));
  }
}

TEST_CASE("zero wall velocity: zero load, zero pressure") {
  const MacroSolution sol =
      solve_pressure(constant_factors(), {1, 1, 12, 12}, params_with({0, 0}));
  CHECK(sol.p.lpNorm<Eigen::Infinity>() < 1e-12);
  for (const auto& u : sol.U) CHECK(u.norm() < 1e-12);
  CHECK(sol.residual == 0.0);
}

TEST_CASE("linearity in the wall velocity at frozen factors") {
  const FlowFactors f = constant_factors();
  const MacroDomain dom{1.5, 1.0, 16, 12};
  const MacroSolution one = solve_pressure(f, dom, params_with({1, 0.5}));
  const MacroSolution two = solve_pressure(f, dom, params_with({2, 1.0}));
  for (int a = 0; a < dom.nodes(); ++a) {
    CHECK(two.p[a] == doctest::Approx(2 * one.p[a]).epsilon(1e-12));
    CHECK((two.U[a] - 2 * one.U[a]).norm() < 1e-12);
    CHECK((two.W[a] - 2 * one.W[a]).norm() < 1e-12);
  }
}

TEST_CASE("axis swap transposes the solution") {
  FlowFactors f;
  f.K1 << 0.3, 0.05, 0.05, 0.2;
  f.L1 = 0.15;
  f.K2 = 0.1 * Eigen::Matrix2d::Identity();
  f.L2 = 0.05;
  const MacroDomain dom{1.0, 1.0, 20, 20};
  const MacroSolution a = solve_pressure(f, dom, params_with({1, 0.25}));

  FlowFactors ft = f;
  Eigen::Matrix2d P;
  P << 0, 1, 1, 0;
  ft.K1 = P * f.K1 * P;
  const MacroSolution b = solve_pressure(ft, dom, params_with({0.25, 1}));
  double worst = 0;
  for (int j = 0; j <= dom.my; ++j)
    for (int i = 0; i <= dom.mx; ++i) {
      const double pa = a.p[j * (dom.mx + 1) + i];
      const double pb = b.p[i * (dom.mx + 1) + j];
      worst = std::max(worst, std::abs(pa - pb));
    }
  CHECK(worst < 1e-10);
}

TEST_CASE("mass conservation diagnostic tracks the solver residual") {
  const FlowFactors f = constant_factors();
  const MacroDomain dom{2.0, 1.0, 24, 16};
  const FluidParams p = params_with({1, 0.5});

  const MacroSolution direct = solve_pressure(f, dom, p);
  const double mres = mass_residual(direct, f, p);
  CHECK(mres < 1e-10);
  const double floor = 1e-16;
  const double ratio = (mres + floor) / (direct.residual + floor);
  CHECK(ratio < 10.0);
  CHECK(ratio > 0.1);

  // Deliberately truncated iterative solve: the diagnostic must see it.
  SolverOptions opts;
  opts.method = SolverOptions::Method::ConjugateGradient;
  opts.cg_tol = 1e-4;
  const MacroSolution loose = solve_pressure(f, dom, p, opts);
  const double loose_res = mass_residual(loose, f, p);
  CHECK(loose_res > 1e-8);
  CHECK(loose_res <= 2e-4);
  CHECK(loose_res == doctest::Approx(loose.residual).epsilon(1e-6));
}

TEST_CASE("tight conjugate gradients agree with the direct solve") {
  const FlowFactors f = constant_factors();
  const MacroDomain dom{1.0, 1.0, 16, 16};
  const FluidParams p = params_with({1, 0});
  SolverOptions opts;
  opts.method = SolverOptions::Method::ConjugateGradient;
  opts.cg_tol = 1e-13;
  const MacroSolution cg = solve_pressure(f, dom, p, opts);
  const MacroSolution lu = solve_pressure(f, dom, p);
  CHECK((cg.p - lu.p).lpNorm<Eigen::Infinity>() < 1e-9);
}

TEST_CASE("gauge invariance: constant pressure shifts are unobservable") {
  const FlowFactors f = constant_factors();
  const MacroDomain dom{1.0, 1.0, 12, 12};
  const FluidParams p = params_with({1, 0.3});
  MacroSolution sol = solve_pressure(f, dom, p);
  const double before = mass_residual(sol, f, p);
  sol.p.array() += 3.7;  // un-gauged pressure
  const double after = mass_residual(sol, f, p);
  CHECK(after == doctest::Approx(before).epsilon(1e-9));
}

TEST_CASE("definiteness gate and asymmetry warning") {
  FlowFactors bad = constant_factors();
  bad.K1 << -1, 0, 0, 1;
  CHECK_THROWS_AS(solve_pressure(bad, {1, 1, 8, 8}, params_with({1, 0})),
                  IndefinitenessError);

  FlowFactors asym = constant_factors();
  asym.K1 << 0.3, 0.08, 0.02, 0.25;
  asym.k1_symmetry_defect = 0.06;
  const MacroSolution sol = solve_pressure(asym, {1, 1, 8, 8}, params_with({1, 0}));
  CHECK(sol.k1_asymmetry_warning);
  CHECK(sol.residual < 1e-10);
}

TEST_CASE("domain gates") {
  CHECK_THROWS_AS(solve_pressure(constant_factors(), {1, 1, 4, 8}, params_with({1, 0})),
                  DomainError);
  CHECK_THROWS_AS(solve_pressure(constant_factors(), {-1, 1, 8, 8}, params_with({1, 0})),
                  DomainError);
}

TEST_SUITE_END();
