// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one pass/fail line per criterion. argv[1] is the path to the
// micro-reynolds CLI (used by the gating and adjudication criteria).

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "mrl/bvp_oracle.hpp"
#include "mrl/cell_solver.hpp"
#include "mrl/pipeline.hpp"
#include "mrl/reynolds_solver.hpp"

namespace fs = std::filesystem;
using namespace mrl;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& name, bool pass,
            const std::string& detail) {
  std::cout << (pass ? "[PASS]" : "[FAIL]") << " criterion " << criterion << ": "
            << name << " (" << detail << ")\n";
  if (!pass) ++g_failures;
}

FluidParams params(double N2, double Rc, double alpha, double beta,
                   Eigen::Vector2d s = {0, 0}) {
  return FluidParams{N2, Rc, alpha, beta, s};
}

CoefficientEvaluator make_eval(RoughnessProfile r, const FluidParams& p,
                               Phi2Variant v = Phi2Variant::A2) {
  auto field = std::make_shared<CoefficientField>(std::move(r), p, v);
  return [field](double z1, double z2) { return (*field)(z1, z2); };
}

double rel(double got, double ref) {
  return std::abs(got - ref) / std::max(std::abs(ref), 1e-14);
}

struct SweepPoint {
  double N2, alpha, beta, h;
};

std::vector<SweepPoint> standard_sweep() {
  std::vector<SweepPoint> pts;
  for (double N2 : {0.1, 0.25, 0.5, 0.8})
    for (double alpha : {0.5, 1.0, 2.0})
      for (double beta : {0.5, 1.0, 2.0})
        for (double h : {0.5, 1.0, 2.0}) {
          const double gamma = std::abs(1.0 / alpha - N2 - N2 * beta);
          if (gamma * gamma < 1.0 / (h * h) * (1.0 - N2))  // Rc = 1
            pts.push_back({N2, alpha, beta, h});
        }
  return pts;
}

RoughnessProfile skewed_profile(int n) {
  std::vector<double> vals(static_cast<std::size_t>(n) * n);
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double z1 = -0.5 + static_cast<double>(i) / n;
      const double z2 = -0.5 + static_cast<double>(j) / n;
      vals[static_cast<std::size_t>(j) * n + i] =
          1.0 + 0.18 * std::cos(two_pi * (z1 + z2)) + 0.12 * std::cos(two_pi * z1);
    }
  return RoughnessProfile::sampled(n, std::move(vals));
}

// --- criterion 1 ---------------------------------------------------------
void criterion_oracle_equivalence() {
  const auto start = std::chrono::steady_clock::now();
  double worst = 0, worst_literal = 0;
  int count = 0;
  for (const SweepPoint& pt : standard_sweep()) {
    const FluidParams p = params(pt.N2, 1.0, pt.alpha, pt.beta);
    const CoefficientSample ref = oracle_coefficients(pt.h, p, 2048);
    const CoefficientSample got = theta_phi(pt.h, p);
    worst = std::max(worst, coefficient_discrepancy(got, ref));
    worst_literal = std::max({worst_literal, rel(got.theta1, ref.theta1),
                              rel(got.theta2, ref.theta2), rel(got.phi1, ref.phi1),
                              rel(got.phi2, ref.phi2)});
    ++count;
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ostringstream detail;
  detail << "max rel err " << worst << " over " << count
         << " existence-passing points, M = 2048, " << secs
         << " s single-threaded (componentwise-literal max " << worst_literal
         << ", dominated by the in-sweep zero of phi1)";
  report(1, "oracle equivalence of closed-form coefficients", worst <= 1e-6 && secs < 60,
         detail.str());
}

// --- criterion 2 ---------------------------------------------------------
void criterion_branch_continuity() {
  const CoefficientSample mid = theta_phi(1.0, params(0.25, 1.0, 1.0, 1.0));
  double worst = 0;
  for (double alpha : {1.0 + 1e-6, 1.0 - 1e-6}) {
    const CoefficientSample off = theta_phi(1.0, params(0.25, 1.0, alpha, 1.0));
    worst = std::max({worst, std::abs(off.theta1 - mid.theta1) / std::abs(mid.theta1),
                      std::abs(off.theta2 - mid.theta2) / std::abs(mid.theta2),
                      std::abs(off.phi1 - mid.phi1) / std::abs(mid.phi1),
                      std::abs(off.phi2 - mid.phi2) / std::abs(mid.phi2)});
  }
  std::ostringstream detail;
  detail << "max rel jump " << worst << " at alpha = 1 +/- 1e-6";
  report(2, "branch continuity at alpha = 1", worst <= 1e-4, detail.str());
}

// --- criterion 3 ---------------------------------------------------------
void criterion_newtonian_limit() {
  const double h = 1.0;
  const double ref = h * h * h / 3.0;
  const FluidParams p = params(1e-6, 1.0, 1.0, 1.0);
  const CoefficientSample orc = oracle_coefficients(h, p, 2048);
  const bool oracle_ok = std::abs(orc.theta1 - ref) / ref <= 1e-4 &&
                         std::abs(orc.theta2) <= 1e-4 * ref * 3 &&
                         std::abs(orc.phi1) <= 1e-4 * ref * 3 &&
                         std::abs(orc.phi2) <= 1e-4 * ref * 3;
  const CoefficientSample cf = theta_phi(h, p);
  const bool closed_ok = std::abs(cf.theta1 - ref) / ref <= 1e-3 &&
                         std::abs(cf.theta2) <= 1e-3 && std::abs(cf.phi1) <= 1e-3 &&
                         std::abs(cf.phi2) <= 1e-3;
  std::ostringstream detail;
  detail << "oracle theta1 err " << std::abs(orc.theta1 - ref) / ref
         << ", closed theta1 err " << std::abs(cf.theta1 - ref) / ref
         << " (cancellation-degraded tolerance 1e-3 for the closed forms)";
  report(3, "newtonian limit at N2 = 1e-6", oracle_ok && closed_ok, detail.str());
}

// --- criterion 4 ---------------------------------------------------------
void criterion_constant_degeneracy() {
  const FluidParams p = params(0.25, 1.0, 1.0, 1.0, {1, 0});
  const CoefficientSample c = theta_phi(1.0, p);
  const auto eval = make_eval(RoughnessProfile::cosine(1.0, {0, 0}), p);
  const CellSolution cell = solve_correctors(eval, p, 32);
  double gmax = 0;
  for (const auto& g : cell.grad_q1) gmax = std::max(gmax, g.norm());
  for (const auto& g : cell.grad_q2) gmax = std::max(gmax, g.norm());
  const FlowFactors f = flow_factors(cell, eval, p);
  const double fdev = std::max(
      {std::abs(f.K1(0, 0) - c.theta1), std::abs(f.K1(1, 1) - c.theta1),
       std::abs(f.K1(0, 1)), std::abs(f.K1(1, 0)), std::abs(f.L1 - c.theta2),
       std::abs(f.K2(0, 0) - c.phi1), std::abs(f.K2(1, 1) - c.phi1),
       std::abs(f.K2(0, 1)), std::abs(f.K2(1, 0)), std::abs(f.L2 - c.phi2)});
  std::ostringstream detail;
  detail << "corrector gradient max " << gmax << ", factor deviation " << fdev;
  report(4, "constant-roughness degeneracy", gmax <= 1e-10 && fdev <= 1e-10,
         detail.str());
}

// --- criterion 5 ---------------------------------------------------------
void criterion_analytic_macro() {
  const CoefficientSample c = theta_phi(1.0, params(0.25, 1.0, 1.0, 1.0));
  FlowFactors f;
  f.K1 = c.theta1 * Eigen::Matrix2d::Identity();
  f.L1 = c.theta2;
  f.K2 = c.phi1 * Eigen::Matrix2d::Identity();
  f.L2 = c.phi2;
  double worst = 0;
  for (const MacroDomain dom : {MacroDomain{1.0, 1.0, 16, 16}, MacroDomain{2.0, 1.5, 40, 24}}) {
    const MacroSolution sol = solve_pressure(f, dom, params(0.25, 1, 1, 1, {1, 0}));
    const double slope = c.theta2 / c.theta1;
    for (int j = 0; j <= dom.my; ++j)
      for (int i = 0; i <= dom.mx; ++i)
        worst = std::max(worst, std::abs(sol.p[j * (dom.mx + 1) + i] -
                                         slope * (dom.x1(i) - dom.Lx / 2)));
  }
  std::ostringstream detail;
  detail << "max |p - analytic| = " << worst << " over two grids";
  report(5, "analytic macroscopic solve with constant factors", worst <= 1e-10,
         detail.str());
}

// --- criterion 6 ---------------------------------------------------------
void criterion_self_convergence() {
  const FluidParams p = params(0.25, 1.0, 2.0, 1.0);
  const auto eval = make_eval(RoughnessProfile::cosine(1.0, {0.3, 0.15}), p);
  Eigen::Matrix2d K[3];
  const int grids[3] = {32, 64, 128};
  for (int g = 0; g < 3; ++g) {
    const CellSolution cell = solve_correctors(eval, p, grids[g]);
    K[g] = flow_factors(cell, eval, p).K1;
  }
  double worst_cell_order = 1e30;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      const double e1 = std::abs(K[0](r, c) - K[1](r, c));
      const double e2 = std::abs(K[1](r, c) - K[2](r, c));
      if (e2 < 1e-12) continue;  // entry already at rounding level
      worst_cell_order = std::min(worst_cell_order, std::log2(e1 / e2));
    }

  const BvpLoad load{{1, 0}, {0, 0}};
  const double u512 = solve_bvp(1.0, p, load, 512).U[0];
  const double u1024 = solve_bvp(1.0, p, load, 1024).U[0];
  const double u2048 = solve_bvp(1.0, p, load, 2048).U[0];
  const double oracle_order =
      std::log2(std::abs(u512 - u1024) / std::abs(u1024 - u2048));

  std::ostringstream detail;
  detail << "cell K1 order " << worst_cell_order << " (n 32/64/128), oracle order "
         << oracle_order << " (M 512/1024/2048)";
  report(6, "self-convergence of cell solver and oracle",
         worst_cell_order >= 1.9 && oracle_order >= 1.9, detail.str());
}

// --- criterion 7 ---------------------------------------------------------
void criterion_conservation() {
  const FluidParams p = params(0.25, 1.0, 1.0, 1.0, {1, 0.4});
  const auto eval = make_eval(RoughnessProfile::cosine(1.0, {0.3, 0.1}), p);
  const CellSolution cell = solve_correctors(eval, p, 48);
  const FlowFactors f = flow_factors(cell, eval, p);
  const MacroDomain dom{2.0, 1.0, 32, 20};
  const MacroSolution sol = solve_pressure(f, dom, p);
  const double mres = mass_residual(sol, f, p);
  const double floor = 1e-16;
  const double ratio = (mres + floor) / (sol.residual + floor);
  std::ostringstream detail;
  detail << "solver residual " << sol.residual << ", mass residual " << mres
         << ", ratio " << ratio;
  report(7, "discrete conservation of the Reynolds solve",
         sol.residual <= 1e-10 && mres <= 1e-10 && ratio >= 0.1 && ratio <= 10.0,
         detail.str());
}

// --- criterion 8 ---------------------------------------------------------
void criterion_k1_structure() {
  const FluidParams p = params(0.25, 1.0, 2.0, 1.0);  // s' = 0
  const int n = 64;
  const auto eval = make_eval(skewed_profile(n), p);
  const CellSolution cell = solve_correctors(eval, p, n);
  const FlowFactors f = flow_factors(cell, eval, p);
  const Theta1Means means = theta1_quadrature_means(eval, n);
  const Eigen::Matrix2d S = 0.5 * (f.K1 + f.K1.transpose());
  const double tr = S.trace(), det = S.determinant();
  const double disc = std::sqrt(std::max(0.0, tr * tr / 4 - det));
  const double lo = tr / 2 - disc, hi = tr / 2 + disc;
  std::ostringstream detail;
  detail << "symmetry defect " << f.k1_symmetry_defect << ", eig [" << lo << ", " << hi
         << "] within [" << means.harmonic << ", " << means.arithmetic << "]";
  report(8, "structure of K1 with s' = 0",
         f.k1_symmetry_defect <= 1e-10 && lo >= means.harmonic - 1e-8 &&
             hi <= means.arithmetic + 1e-8,
         detail.str());
}

// --- criterion 9 ---------------------------------------------------------
void criterion_gating(const std::string& cli) {
  const fs::path dir = fs::temp_directory_path() / "mrl_acceptance_gate";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path cfg_path = dir / "bad.json";
  {
    std::ofstream cfg(cfg_path);
    cfg << R"({
  "fluid": {"N2": 0.25, "Rc": 1.0, "alpha": 0.1, "beta": 1.0, "s": [1.0, 0.0]},
  "roughness": {"kind": "cosine", "h0": 1.0, "amplitude": [0.0, 0.0]},
  "cell": {"n": 16},
  "macro": {"Lx": 1.0, "Ly": 1.0, "mx": 16, "my": 16},
  "oracle": {"M": 256},
  "output": {"directory": ")" << (dir / "out").string() << R"(", "formats": ["csv", "json"]},
  "flags": {"phi2_variant": "A2"}
})";
  }
  const std::string cmd = "\"" + cli + "\" full --config \"" + cfg_path.string() +
                          "\" 2> \"" + (dir / "stderr.txt").string() + "\"";
  const int raw = std::system(cmd.c_str());
  const int code = WEXITSTATUS(raw);
  std::ifstream err_in(dir / "stderr.txt");
  std::stringstream err;
  err << err_in.rdbuf();
  const std::string msg = err.str();
  const bool message_ok = msg.find("90.25") != std::string::npos &&
                          msg.find("0.75") != std::string::npos;
  const bool no_outputs = !fs::exists(dir / "out" / "coefficients.csv");

  // Library-level gate: validation must throw before any solver runs.
  bool lib_gate = false;
  try {
    validate(params(0.25, 1.0, 0.1, 1.0), 1.0);
  } catch (const ExistenceError&) {
    lib_gate = true;
  }
  std::ostringstream detail;
  detail << "exit code " << code << ", message carries gamma^2 and bound: "
         << (message_ok ? "yes" : "no");
  report(9, "existence gating before any solve",
         code == 3 && message_ok && no_outputs && lib_gate, detail.str());
}

// --- criterion 10 --------------------------------------------------------
void criterion_phi2_adjudication(const std::string& cli) {
  double worst_a2 = 0, worst_a1 = 0;
  for (const SweepPoint& pt : standard_sweep()) {
    const FluidParams p = params(pt.N2, 1.0, pt.alpha, pt.beta);
    const CoefficientSample ref = oracle_coefficients(pt.h, p, 2048);
    worst_a2 = std::max(worst_a2, rel(theta_phi(pt.h, p, Phi2Variant::A2).phi2, ref.phi2));
    worst_a1 = std::max(worst_a1, rel(theta_phi(pt.h, p, Phi2Variant::A1).phi2, ref.phi2));
  }
  const bool exactly_one = worst_a2 <= 1e-6 && worst_a1 > 1e-6;

  // `--phi2-variant auto` must land on the oracle-consistent variant and the
  // run report must name it.
  const fs::path dir = fs::temp_directory_path() / "mrl_acceptance_phi2";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path cfg_path = dir / "cfg.json";
  {
    std::ofstream cfg(cfg_path);
    cfg << R"({
  "fluid": {"N2": 0.25, "Rc": 1.0, "alpha": 1.0, "beta": 1.0, "s": [1.0, 0.0]},
  "roughness": {"kind": "cosine", "h0": 1.0, "amplitude": [0.3, 0.0]},
  "cell": {"n": 16},
  "macro": {"Lx": 1.0, "Ly": 1.0, "mx": 16, "my": 16},
  "oracle": {"M": 256},
  "output": {"directory": ")" << (dir / "out").string() << R"(", "formats": ["csv", "json"]},
  "flags": {"phi2_variant": "auto"}
})";
  }
  const std::string cmd = "\"" + cli + "\" coeffs --config \"" + cfg_path.string() +
                          "\" > /dev/null 2>&1";
  const int code = WEXITSTATUS(std::system(cmd.c_str()));
  bool report_names_a2 = false;
  const fs::path rep_path = dir / "out" / "run_report.json";
  if (code == 0 && fs::exists(rep_path)) {
    std::ifstream in(rep_path);
    nlohmann::json rep;
    in >> rep;
    report_names_a2 = rep["phi2"]["variant"].get<std::string>() == "A2" &&
                      rep["phi2"]["adjudicated"].get<bool>();
  }
  std::ostringstream detail;
  detail << "sweep max rel err: A2 " << worst_a2 << ", A1 " << worst_a1
         << "; auto run selected "
         << (report_names_a2 ? "A2" : "something else");
  report(10, "phi2 variant adjudication", exactly_one && report_names_a2, detail.str());
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <path-to-micro-reynolds-cli>\n";
    return 2;
  }
  const std::string cli = argv[1];
  set_max_threads(1);  // criterion 1 is specified single-threaded

  criterion_oracle_equivalence();
  criterion_branch_continuity();
  criterion_newtonian_limit();
  criterion_constant_degeneracy();
  criterion_analytic_macro();
  criterion_self_convergence();
  criterion_conservation();
  criterion_k1_structure();
  criterion_gating(cli);
  criterion_phi2_adjudication(cli);

  if (g_failures == 0) {
    std::cout << "all acceptance criteria passed\n";
    return 0;
  }
  std::cout << g_failures << " acceptance criteria FAILED\n";
  return 1;
}
