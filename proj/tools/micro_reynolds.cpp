#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mrl/pipeline.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw mrl::ValidationError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(mrl::Subcommand cmd, const std::string& config_path,
        const std::string& out_override, const std::string& phi2_override,
        int threads) {
  if (threads > 0) mrl::set_max_threads(threads);
  mrl::RunConfig cfg = mrl::parse_config(read_file(config_path));
  if (!out_override.empty()) cfg.out_dir = out_override;
  if (!phi2_override.empty()) {
    if (phi2_override == "auto")
      cfg.phi2 = mrl::RunConfig::Phi2Flag::Auto;
    else if (phi2_override == "A1")
      cfg.phi2 = mrl::RunConfig::Phi2Flag::A1;
    else if (phi2_override == "A2")
      cfg.phi2 = mrl::RunConfig::Phi2Flag::A2;
    else
      throw mrl::ValidationError("--phi2-variant must be auto, A1 or A2");
  }
  mrl::RunReport report;
  return mrl::run_pipeline(cfg, cmd, report, std::cout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Homogenized micropolar thin-film lubrication pipeline"};
  app.require_subcommand(1);
  app.fallthrough();  // micro-reynolds <subcommand> --config ... --out ...

  std::string config_path;
  std::string out_override;
  std::string phi2_override;
  int threads = 0;

  app.add_option("--config", config_path, "JSON run configuration")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--out", out_override, "output directory (overrides config)");
  app.add_option("--threads", threads, "worker thread count")
      ->envname("MICRO_REYNOLDS_THREADS");
  app.add_option("--phi2-variant", phi2_override,
                 "phi2 closed-form variant: auto, A1 or A2");

  std::pair<std::string, mrl::Subcommand> cmds[] = {
      {"coeffs", mrl::Subcommand::Coeffs},
      {"cell", mrl::Subcommand::Cell},
      {"solve", mrl::Subcommand::Solve},
      {"oracle-check", mrl::Subcommand::OracleCheck},
      {"full", mrl::Subcommand::Full}};
  const char* descs[] = {
      "evaluate averaged coefficients over the cell and export them",
      "solve the periodic cell problems and export correctors and flow factors",
      "solve the macroscopic Reynolds problem and export pressure and fields",
      "cross-check closed-form coefficients against the film BVP solve",
      "run every stage"};
  mrl::Subcommand selected{};
  int i = 0;
  for (auto& [name, cmd] : cmds) {
    auto* sub = app.add_subcommand(name, descs[i++]);
    const mrl::Subcommand value = cmd;
    sub->callback([&selected, value] { selected = value; });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    return run(selected, config_path, out_override, phi2_override, threads);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return mrl::exit_code_for(e);
  }
}
