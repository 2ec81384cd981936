#include "mrl/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <ostream>

#include "mrl/float_format.hpp"

namespace mrl {

namespace {

using nlohmann::json;

struct SweepGrid {
  std::vector<double> N2{0.1, 0.25, 0.5, 0.8};
  std::vector<double> alpha{0.5, 1.0, 2.0};
  std::vector<double> beta{0.5, 1.0, 2.0};
  std::vector<double> h{0.5, 1.0, 2.0};
};

std::vector<OraclePoint> sweep_points(const FluidParams& fluid,
                                      const SweepGrid& grid) {
  std::vector<OraclePoint> pts;
  for (double N2 : grid.N2)
    for (double alpha : grid.alpha)
      for (double beta : grid.beta)
        for (double h : grid.h) {
          FluidParams p = fluid;
          p.N2 = N2;
          p.alpha = alpha;
          p.beta = beta;
          const double gamma = std::abs(1.0 / alpha - N2 - N2 * beta);
          if (gamma * gamma < p.Rc / (h * h) * (1.0 - N2))
            pts.push_back({N2, alpha, beta, h, 0, 0, 0, 0, 0, 0});
        }
  return pts;
}

double rel_err(double got, double ref) {
  return std::abs(got - ref) / std::max(std::abs(ref), 1e-14);
}

void fill_point_errors(OraclePoint& pt, const FluidParams& fluid, int M,
                       Phi2Variant variant) {
  FluidParams p = fluid;
  p.N2 = pt.N2;
  p.alpha = pt.alpha;
  p.beta = pt.beta;
  const CoefficientSample ref = oracle_coefficients(pt.h, p, M);
  const CoefficientSample got = theta_phi(pt.h, p, variant);
  const double scale = std::max({std::abs(ref.theta1), std::abs(ref.theta2),
                                 std::abs(ref.phi1), std::abs(ref.phi2), 1e-300});
  const auto err = [&](double g, double r) {
    return std::abs(g - r) / std::max(std::abs(r), scale);
  };
  pt.err_theta1 = err(got.theta1, ref.theta1);
  pt.err_theta2 = err(got.theta2, ref.theta2);
  pt.err_phi1 = err(got.phi1, ref.phi1);
  pt.err_phi2 = err(got.phi2, ref.phi2);
  pt.max_err = coefficient_discrepancy(got, ref);
  pt.max_err_literal =
      std::max({rel_err(got.theta1, ref.theta1), rel_err(got.theta2, ref.theta2),
                rel_err(got.phi1, ref.phi1), rel_err(got.phi2, ref.phi2)});
}

double max_phi2_error(const FluidParams& fluid,
                      const std::vector<OraclePoint>& pts, int M,
                      Phi2Variant variant) {
  double worst = 0;
  for (const OraclePoint& pt : pts) {
    FluidParams p = fluid;
    p.N2 = pt.N2;
    p.alpha = pt.alpha;
    p.beta = pt.beta;
    const CoefficientSample ref = oracle_coefficients(pt.h, p, M);
    const CoefficientSample got = theta_phi(pt.h, p, variant);
    worst = std::max(worst, rel_err(got.phi2, ref.phi2));
  }
  return worst;
}

// Rethrows the in-flight exception with the stage name prefixed, preserving
// the concrete type so the exit-code mapping still sees it.
[[noreturn]] void rethrow_with_stage(const std::string& stage) {
  const auto tag = [&](const std::exception& e) {
    return "stage " + stage + ": " + e.what();
  };
  try {
    throw;
  } catch (const EllipticityError& e) {
    throw EllipticityError(tag(e));
  } catch (const DegenerateDenominatorError& e) {
    throw DegenerateDenominatorError(tag(e));
  } catch (const SingularSystemError& e) {
    throw SingularSystemError(tag(e));
  } catch (const SolverError& e) {
    throw SolverError(tag(e));
  } catch (const IndefinitenessError& e) {
    throw IndefinitenessError(tag(e));
  } catch (const DomainError& e) {
    throw DomainError(tag(e));
  } catch (const BranchError& e) {
    throw BranchError(tag(e));
  }
}

class StageClock {
 public:
  StageClock(RunReport& report, std::string name)
      : report_(report), name_(std::move(name)),
        start_(std::chrono::steady_clock::now()) {}
  ~StageClock() {
    const auto end = std::chrono::steady_clock::now();
    report_.timings.push_back(
        {name_, std::chrono::duration<double>(end - start_).count()});
  }

 private:
  RunReport& report_;
  std::string name_;
  std::chrono::steady_clock::time_point start_;
};

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << content;
}

json factors_json(const FlowFactors& f) {
  return json{{"K1", {f.K1(0, 0), f.K1(0, 1), f.K1(1, 0), f.K1(1, 1)}},
              {"L1", f.L1},
              {"K2", {f.K2(0, 0), f.K2(0, 1), f.K2(1, 0), f.K2(1, 1)}},
              {"L2", f.L2},
              {"k1_symmetry_defect", f.k1_symmetry_defect}};
}

}  // namespace

std::vector<OraclePoint> oracle_sweep(const FluidParams& fluid, int M,
                                      Phi2Variant variant, ExecPolicy policy) {
  std::vector<OraclePoint> pts = sweep_points(fluid, SweepGrid{});
  for_each_index_checked(policy, static_cast<std::ptrdiff_t>(pts.size()),
                         [&](std::ptrdiff_t i) {
                           fill_point_errors(pts[i], fluid, M, variant);
                         });
  return pts;
}

Phi2Variant adjudicate_phi2(const FluidParams& fluid, int M, double& err_A1,
                            double& err_A2, bool& degenerate, ExecPolicy policy) {
  (void)policy;
  SweepGrid grid;
  std::vector<OraclePoint> pts = sweep_points(fluid, grid);
  err_A1 = max_phi2_error(fluid, pts, M, Phi2Variant::A1);
  err_A2 = max_phi2_error(fluid, pts, M, Phi2Variant::A2);
  degenerate = false;
  const double tol = 1e-6;
  if (err_A1 <= tol && err_A2 <= tol) {
    // Both match: widen the sweep until the variants separate.
    grid.alpha = {0.3, 0.5, 0.7, 1.5, 2.0, 3.0};
    grid.h = {0.25, 0.5, 0.75, 1.0, 1.25, 2.0};
    pts = sweep_points(fluid, grid);
    err_A1 = max_phi2_error(fluid, pts, M, Phi2Variant::A1);
    err_A2 = max_phi2_error(fluid, pts, M, Phi2Variant::A2);
    if (err_A1 <= tol && err_A2 <= tol) {
      degenerate = true;
      return Phi2Variant::A2;
    }
  }
  return err_A2 <= err_A1 ? Phi2Variant::A2 : Phi2Variant::A1;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ExistenceError*>(&e)) return 3;
  if (dynamic_cast<const ParseError*>(&e) ||
      dynamic_cast<const ValidationError*>(&e) ||
      dynamic_cast<const RangeError*>(&e))
    return 2;
  return 4;
}

int run_pipeline(const RunConfig& cfg, Subcommand cmd, RunReport& report,
                 std::ostream& log, Tolerances tol, ExecPolicy policy) {
  namespace fs = std::filesystem;
  const fs::path out_dir = cfg.out_dir;
  fs::create_directories(out_dir);

  // Fail fast: no solver runs before the existence condition passes.
  {
    StageClock clock(report, "validate");
    report.derived = validate(cfg.fluid, cfg.roughness.max());
  }
  log << "validate: k = " << report.derived.k
      << ", gamma2 = " << report.derived.gamma2
      << ", existence margin = " << report.derived.existence_margin << "\n";

  // Resolve the phi2 variant before any coefficient evaluation.
  Phi2Variant variant = Phi2Variant::A2;
  switch (cfg.phi2) {
    case RunConfig::Phi2Flag::A1:
      variant = Phi2Variant::A1;
      report.phi2_variant = "A1";
      break;
    case RunConfig::Phi2Flag::A2:
      variant = Phi2Variant::A2;
      report.phi2_variant = "A2";
      break;
    case RunConfig::Phi2Flag::Auto: {
      StageClock clock(report, "phi2-adjudication");
      constexpr int kAdjudicationNodes = 512;
      variant = adjudicate_phi2(cfg.fluid, kAdjudicationNodes, report.phi2_err_A1,
                                report.phi2_err_A2, report.phi2_degenerate, policy);
      report.phi2_adjudicated = true;
      report.phi2_variant = variant == Phi2Variant::A2 ? "A2" : "A1";
      log << "phi2 adjudication: variant " << report.phi2_variant
          << " (sweep error A1 = " << report.phi2_err_A1
          << ", A2 = " << report.phi2_err_A2 << ")"
          << (report.phi2_degenerate ? " [degenerate: variants identical]" : "")
          << "\n";
      break;
    }
  }

  const CoefficientField field(cfg.roughness, cfg.fluid, variant);
  const CoefficientEvaluator eval = [&field](double z1, double z2) {
    return field(z1, z2);
  };

  const bool want_coeffs = cmd != Subcommand::OracleCheck;
  const bool want_cell = cmd == Subcommand::Cell || cmd == Subcommand::Solve ||
                         cmd == Subcommand::Full;
  const bool want_solve = cmd == Subcommand::Solve || cmd == Subcommand::Full;
  const bool want_oracle = cmd == Subcommand::OracleCheck || cmd == Subcommand::Full;

  if (want_coeffs) {
    StageClock clock(report, "coeffs");
    try {
    const std::vector<CoefficientSample> samples =
        sample_field(field, cfg.cell_n, policy);
    if (cfg.write_csv && (cmd == Subcommand::Coeffs || cmd == Subcommand::Cell ||
                          cmd == Subcommand::Full)) {
      std::string csv = "# z1,z2,h,theta1,theta2,phi1,phi2\n";
      const int n = cfg.cell_n;
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          const double z1 = -0.5 + static_cast<double>(i) / n;
          const double z2 = -0.5 + static_cast<double>(j) / n;
          const CoefficientSample& c = samples[static_cast<std::size_t>(j) * n + i];
          csv += format_double(z1) + "," + format_double(z2) + "," +
                 format_double(cfg.roughness(z1, z2)) + "," +
                 format_double(c.theta1) + "," + format_double(c.theta2) + "," +
                 format_double(c.phi1) + "," + format_double(c.phi2) + "\n";
        }
      write_file(out_dir / "coefficients.csv", csv);
    }
    } catch (...) {
      rethrow_with_stage("coeffs");
    }
  }

  CellSolution cell;
  if (want_cell) {
    StageClock clock(report, "cell");
    try {
    cell = solve_correctors(eval, cfg.fluid, cfg.cell_n, policy);
    report.factors = flow_factors(cell, eval, cfg.fluid, policy);
    report.have_factors = true;
    report.cell_residual1 = cell.residual1;
    report.cell_residual2 = cell.residual2;
    if (cmd != Subcommand::Solve) {
      if (cfg.write_csv) {
        std::string csv = "# z1,z2,q1,q2\n";
        const int n = cell.n;
        for (int j = 0; j < n; ++j)
          for (int i = 0; i < n; ++i) {
            csv += format_double(cell.node_coord(i)) + "," +
                   format_double(cell.node_coord(j)) + "," +
                   format_double(cell.q1[static_cast<std::size_t>(j) * n + i]) + "," +
                   format_double(cell.q2[static_cast<std::size_t>(j) * n + i]) + "\n";
          }
        write_file(out_dir / "correctors.csv", csv);
      }
      if (cfg.write_json)
        write_file(out_dir / "flow_factors.json", factors_json(report.factors).dump(2) + "\n");
    }
    log << "cell: K1 = [" << report.factors.K1(0, 0) << ", " << report.factors.K1(0, 1)
        << "; " << report.factors.K1(1, 0) << ", " << report.factors.K1(1, 1)
        << "], L1 = " << report.factors.L1
        << ", symmetry defect = " << report.factors.k1_symmetry_defect << "\n";
    } catch (...) {
      rethrow_with_stage("cell");
    }
  }

  if (want_solve) {
    StageClock clock(report, "solve");
    try {
    const MacroSolution sol =
        solve_pressure(report.factors, cfg.macro, cfg.fluid, {}, policy);
    report.have_solve = true;
    report.reynolds_residual = sol.residual;
    report.mass_conservation = mass_residual(sol, report.factors, cfg.fluid);
    report.k1_asymmetry_warning = sol.k1_asymmetry_warning;
    if (sol.residual > tol.solver_residual)
      report.breaches.push_back("reynolds residual " + format_double(sol.residual) +
                                " > " + format_double(tol.solver_residual));
    if (report.mass_conservation > tol.solver_residual)
      report.breaches.push_back("mass residual " +
                                format_double(report.mass_conservation) + " > " +
                                format_double(tol.solver_residual));
    if (cfg.write_csv) {
      std::string csv = "# x1,x2,p,U1,U2,W1,W2\n";
      for (int j = 0; j <= cfg.macro.my; ++j)
        for (int i = 0; i <= cfg.macro.mx; ++i) {
          const int a = j * (cfg.macro.mx + 1) + i;
          csv += format_double(cfg.macro.x1(i)) + "," + format_double(cfg.macro.x2(j)) +
                 "," + format_double(sol.p[a]) + "," + format_double(sol.U[a][0]) +
                 "," + format_double(sol.U[a][1]) + "," + format_double(sol.W[a][0]) +
                 "," + format_double(sol.W[a][1]) + "\n";
        }
      write_file(out_dir / "pressure.csv", csv);
    }
    log << "solve: residual = " << sol.residual
        << ", mass residual = " << report.mass_conservation << "\n";
    } catch (...) {
      rethrow_with_stage("solve");
    }
  }

  if (want_oracle) {
    StageClock clock(report, "oracle-check");
    try {
    report.oracle_points = oracle_sweep(cfg.fluid, cfg.oracle_M, variant, policy);
    report.have_oracle = true;
    for (const OraclePoint& pt : report.oracle_points)
      report.oracle_max_err = std::max(report.oracle_max_err, pt.max_err);
    if (report.oracle_max_err > tol.oracle)
      report.breaches.push_back("oracle discrepancy " +
                                format_double(report.oracle_max_err) + " > " +
                                format_double(tol.oracle));
    if (cfg.write_json) {
      json pts = json::array();
      for (const OraclePoint& pt : report.oracle_points)
        pts.push_back({{"N2", pt.N2},
                       {"alpha", pt.alpha},
                       {"beta", pt.beta},
                       {"h", pt.h},
                       {"errors",
                        {{"theta1", pt.err_theta1},
                         {"theta2", pt.err_theta2},
                         {"phi1", pt.err_phi1},
                         {"phi2", pt.err_phi2}}},
                       {"max", pt.max_err},
                       {"max_literal_relative", pt.max_err_literal}});
      const json doc{{"M", cfg.oracle_M},
                     {"variant", report.phi2_variant},
                     {"tolerance", tol.oracle},
                     {"max_discrepancy", report.oracle_max_err},
                     {"points", pts}};
      write_file(out_dir / "oracle_report.json", doc.dump(2) + "\n");
    }
    log << "oracle-check: " << report.oracle_points.size()
        << " existence-passing points, max discrepancy = " << report.oracle_max_err
        << "\n";
    } catch (...) {
      rethrow_with_stage("oracle-check");
    }
  }

  report.hyperbolic_fallbacks = field.fallback_count();
  if (report.hyperbolic_fallbacks > 0)
    log << "warning: hyperbolic guard (k h > " << kHyperbolicGuard
        << ") routed " << report.hyperbolic_fallbacks
        << " coefficient evaluations to the finite-difference solve\n";

  // run_report.json carries everything except wall-clock timings, so that a
  // fixed config yields byte-identical files; timings go to the log only.
  {
    json rep{{"derived",
              {{"k", report.derived.k},
               {"gamma_alpha", report.derived.unit_alpha
                                   ? json()
                                   : json(report.derived.gamma_alpha)},
               {"gamma2", report.derived.gamma2},
               {"existence_margin", report.derived.existence_margin},
               {"unit_alpha_branch", report.derived.unit_alpha}}},
             {"phi2",
              {{"variant", report.phi2_variant},
               {"adjudicated", report.phi2_adjudicated},
               {"degenerate", report.phi2_degenerate},
               {"sweep_error_A1", report.phi2_err_A1},
               {"sweep_error_A2", report.phi2_err_A2}}},
             {"hyperbolic_fallbacks", report.hyperbolic_fallbacks},
             {"breaches", report.breaches}};
    if (report.have_factors) {
      rep["flow_factors"] = factors_json(report.factors);
      rep["cell_residuals"] = {report.cell_residual1, report.cell_residual2};
    }
    if (report.have_solve) {
      rep["reynolds_residual"] = report.reynolds_residual;
      rep["mass_residual"] = report.mass_conservation;
      rep["k1_asymmetry_warning"] = report.k1_asymmetry_warning;
    }
    if (report.have_oracle) rep["oracle_max_discrepancy"] = report.oracle_max_err;
    write_file(out_dir / "run_report.json", rep.dump(2) + "\n");
  }

  for (const StageTiming& t : report.timings)
    log << "timing: " << t.name << " " << t.seconds << " s\n";

  if (!report.breaches.empty()) {
    for (const std::string& b : report.breaches) log << "TOLERANCE BREACH: " << b << "\n";
    return 5;
  }
  return 0;
}

}  // namespace mrl
