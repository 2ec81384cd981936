#ifndef MRL_PIPELINE_HPP
#define MRL_PIPELINE_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "mrl/bvp_oracle.hpp"
#include "mrl/cell_solver.hpp"
#include "mrl/config.hpp"
#include "mrl/reynolds_solver.hpp"

namespace mrl {

enum class Subcommand { Coeffs, Cell, Solve, OracleCheck, Full };

/// One point of the coefficient cross-check sweep. Errors are measured per
/// component relative to max(component magnitude, sample scale); see
/// coefficient_discrepancy. max_err_literal is the plain componentwise
/// relative error, reported for transparency (phi1 crosses zero inside the
/// sweep, where the literal measure amplifies the oracle's resolution limit).
struct OraclePoint {
  double N2, alpha, beta, h;
  double err_theta1, err_theta2, err_phi1, err_phi2;
  double max_err;
  double max_err_literal;
};

struct StageTiming {
  std::string name;
  double seconds;
};

struct RunReport {
  DerivedParams derived{};
  std::string phi2_variant;  // "A1" or "A2"
  bool phi2_adjudicated = false;
  bool phi2_degenerate = false;
  double phi2_err_A1 = 0, phi2_err_A2 = 0;

  bool have_factors = false;
  FlowFactors factors;
  double cell_residual1 = 0, cell_residual2 = 0;

  bool have_solve = false;
  double reynolds_residual = 0;
  double mass_conservation = 0;
  bool k1_asymmetry_warning = false;

  bool have_oracle = false;
  double oracle_max_err = 0;
  std::vector<OraclePoint> oracle_points;

  long hyperbolic_fallbacks = 0;
  std::vector<std::string> breaches;
  std::vector<StageTiming> timings;
};

/// Residual/discrepancy budgets; a report value above its budget makes the
/// run exit with code 5.
struct Tolerances {
  double oracle = 1e-6;
  double solver_residual = 1e-10;
};

/// The default coefficient cross-check sweep (existence-passing points of
/// N2 x alpha x beta x h with Rc and s taken from `fluid`).
std::vector<OraclePoint> oracle_sweep(const FluidParams& fluid, int M,
                                      Phi2Variant variant,
                                      ExecPolicy policy = ExecPolicy::Parallel);

/// Compares both phi2 variants against the oracle over the default sweep;
/// returns the matching variant and fills the per-variant errors.
Phi2Variant adjudicate_phi2(const FluidParams& fluid, int M, double& err_A1,
                            double& err_A2, bool& degenerate,
                            ExecPolicy policy = ExecPolicy::Parallel);

/// Runs the requested stages, writes output files under cfg.out_dir, fills
/// the report, prints a summary to `log`. Returns 0 on success or 5 on a
/// tolerance breach; solver/validation failures escape as exceptions.
int run_pipeline(const RunConfig& cfg, Subcommand cmd, RunReport& report,
                 std::ostream& log, Tolerances tol = {},
                 ExecPolicy policy = ExecPolicy::Parallel);

/// Exit-code contract: 0 success, 2 validation, 3 existence, 4 solver
/// failure, 5 tolerance breach.
int exit_code_for(const std::exception& e);

}  // namespace mrl

#endif
