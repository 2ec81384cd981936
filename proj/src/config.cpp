#include "mrl/config.hpp"

#include <json.hpp>
#include <set>
#include <sstream>

namespace mrl {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& key, const std::string& what) {
  throw ValidationError(key + " " + what);
}

void reject_unknown(const json& obj, const std::string& scope,
                    const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!allowed.contains(key))
      throw ValidationError("unknown key \"" + scope + key + "\"");
  }
}

const json& require(const json& obj, const std::string& scope,
                    const std::string& key) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(scope + key, "is required");
  return *it;
}

double number(const json& obj, const std::string& scope, const std::string& key) {
  const json& v = require(obj, scope, key);
  if (!v.is_number()) fail(scope + key, "must be a number");
  return v.get<double>();
}

int integer(const json& obj, const std::string& scope, const std::string& key) {
  const json& v = require(obj, scope, key);
  if (!v.is_number_integer()) fail(scope + key, "must be an integer");
  return v.get<int>();
}

std::string text(const json& obj, const std::string& scope, const std::string& key) {
  const json& v = require(obj, scope, key);
  if (!v.is_string()) fail(scope + key, "must be a string");
  return v.get<std::string>();
}

Eigen::Vector2d vec2(const json& obj, const std::string& scope,
                     const std::string& key) {
  const json& v = require(obj, scope, key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    fail(scope + key, "must be an array of two numbers");
  return {v[0].get<double>(), v[1].get<double>()};
}

void line_column(const std::string& doc, std::size_t byte, int& line, int& col) {
  line = 1;
  col = 1;
  for (std::size_t i = 0; i < byte && i < doc.size(); ++i) {
    if (doc[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
}

}  // namespace

RunConfig parse_config(const std::string& doc) {
  json root;
  try {
    root = json::parse(doc);
  } catch (const json::parse_error& e) {
    int line = 0, col = 0;
    line_column(doc, e.byte > 0 ? e.byte - 1 : 0, line, col);
    std::ostringstream msg;
    msg << "config is not valid JSON at line " << line << ", column " << col
        << ": " << e.what();
    throw ParseError(msg.str(), line, col);
  }
  if (!root.is_object()) throw ValidationError("config root must be an object");
  reject_unknown(root, "",
                 {"fluid", "roughness", "cell", "macro", "oracle", "output", "flags"});

  RunConfig cfg;

  const json& fluid = require(root, "", "fluid");
  if (!fluid.is_object()) fail("fluid", "must be an object");
  reject_unknown(fluid, "fluid.", {"N2", "Rc", "alpha", "beta", "s"});
  cfg.fluid.N2 = number(fluid, "fluid.", "N2");
  cfg.fluid.Rc = number(fluid, "fluid.", "Rc");
  cfg.fluid.alpha = number(fluid, "fluid.", "alpha");
  cfg.fluid.beta = number(fluid, "fluid.", "beta");
  cfg.fluid.s = vec2(fluid, "fluid.", "s");
  if (!(cfg.fluid.N2 > 0.0 && cfg.fluid.N2 < 1.0))
    fail("fluid.N2", "must lie in (0,1)");
  if (!(cfg.fluid.Rc > 0.0)) fail("fluid.Rc", "must be positive");
  if (!(cfg.fluid.alpha > 0.0 && cfg.fluid.alpha <= 1.0 / cfg.fluid.N2))
    fail("fluid.alpha", "must lie in (0, 1/N2]");
  if (!(cfg.fluid.beta > 0.0)) fail("fluid.beta", "must be positive");

  const json& rough = require(root, "", "roughness");
  if (!rough.is_object()) fail("roughness", "must be an object");
  const std::string kind = text(rough, "roughness.", "kind");
  if (kind == "cosine") {
    reject_unknown(rough, "roughness.", {"kind", "h0", "amplitude"});
    const double h0 = number(rough, "roughness.", "h0");
    const Eigen::Vector2d a = vec2(rough, "roughness.", "amplitude");
    try {
      cfg.roughness = RoughnessProfile::cosine(h0, a);
    } catch (const RangeError& e) {
      throw ValidationError(std::string("roughness: ") + e.what());
    }
  } else if (kind == "sampled") {
    reject_unknown(rough, "roughness.", {"kind", "n", "values"});
    const int n = integer(rough, "roughness.", "n");
    const json& vals = require(rough, "roughness.", "values");
    if (!vals.is_array()) fail("roughness.values", "must be an array");
    std::vector<double> values;
    values.reserve(vals.size());
    for (const auto& v : vals) {
      if (!v.is_number()) fail("roughness.values", "must contain only numbers");
      values.push_back(v.get<double>());
    }
    try {
      cfg.roughness = RoughnessProfile::sampled(n, std::move(values));
    } catch (const RangeError& e) {
      throw ValidationError(std::string("roughness: ") + e.what());
    }
  } else {
    fail("roughness.kind", "must be \"cosine\" or \"sampled\"");
  }

  const json& cell = require(root, "", "cell");
  if (!cell.is_object()) fail("cell", "must be an object");
  reject_unknown(cell, "cell.", {"n"});
  cfg.cell_n = integer(cell, "cell.", "n");
  if (cfg.cell_n < 8) fail("cell.n", "must be >= 8");

  const json& macro = require(root, "", "macro");
  if (!macro.is_object()) fail("macro", "must be an object");
  reject_unknown(macro, "macro.", {"Lx", "Ly", "mx", "my"});
  cfg.macro.Lx = number(macro, "macro.", "Lx");
  cfg.macro.Ly = number(macro, "macro.", "Ly");
  cfg.macro.mx = integer(macro, "macro.", "mx");
  cfg.macro.my = integer(macro, "macro.", "my");
  if (!(cfg.macro.Lx > 0.0)) fail("macro.Lx", "must be positive");
  if (!(cfg.macro.Ly > 0.0)) fail("macro.Ly", "must be positive");
  if (cfg.macro.mx < 8) fail("macro.mx", "must be >= 8");
  if (cfg.macro.my < 8) fail("macro.my", "must be >= 8");

  const json& oracle = require(root, "", "oracle");
  if (!oracle.is_object()) fail("oracle", "must be an object");
  reject_unknown(oracle, "oracle.", {"M"});
  cfg.oracle_M = integer(oracle, "oracle.", "M");
  if (cfg.oracle_M < 16) fail("oracle.M", "must be >= 16");

  const json& output = require(root, "", "output");
  if (!output.is_object()) fail("output", "must be an object");
  reject_unknown(output, "output.", {"directory", "formats"});
  cfg.out_dir = text(output, "output.", "directory");
  const json& formats = require(output, "output.", "formats");
  if (!formats.is_array() || formats.empty())
    fail("output.formats", "must be a non-empty array");
  cfg.write_csv = false;
  cfg.write_json = false;
  for (const auto& f : formats) {
    if (!f.is_string()) fail("output.formats", "must contain strings");
    const std::string s = f.get<std::string>();
    if (s == "csv")
      cfg.write_csv = true;
    else if (s == "json")
      cfg.write_json = true;
    else
      fail("output.formats", "entries must be \"csv\" or \"json\"");
  }

  const json& flags = require(root, "", "flags");
  if (!flags.is_object()) fail("flags", "must be an object");
  reject_unknown(flags, "flags.", {"phi2_variant"});
  const std::string var = text(flags, "flags.", "phi2_variant");
  if (var == "auto")
    cfg.phi2 = RunConfig::Phi2Flag::Auto;
  else if (var == "A1")
    cfg.phi2 = RunConfig::Phi2Flag::A1;
  else if (var == "A2")
    cfg.phi2 = RunConfig::Phi2Flag::A2;
  else
    fail("flags.phi2_variant", "must be \"auto\", \"A1\" or \"A2\"");

  return cfg;
}

}  // namespace mrl
