#ifndef MRL_CONFIG_HPP
#define MRL_CONFIG_HPP

#include <string>

#include "mrl/coefficients.hpp"
#include "mrl/params.hpp"
#include "mrl/reynolds_solver.hpp"
#include "mrl/roughness.hpp"

namespace mrl {

/// Fully validated run configuration. Parsing is strict: every key is
/// required, unknown keys are errors, and all ranges are checked before any
/// solver starts.
struct RunConfig {
  FluidParams fluid;
  RoughnessProfile roughness = RoughnessProfile::cosine(1.0, {0, 0});
  int cell_n = 64;
  MacroDomain macro;
  int oracle_M = 2048;
  std::string out_dir = "out";
  bool write_csv = true;
  bool write_json = true;
  enum class Phi2Flag { Auto, A1, A2 } phi2 = Phi2Flag::Auto;
};

/// Parse a UTF-8 JSON document. Throws ParseError (with line/column) on
/// malformed input and ValidationError naming the offending key otherwise.
RunConfig parse_config(const std::string& text);

}  // namespace mrl

#endif
