#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wgstark/errors.hpp"
#include "wgstark/lab/commands.hpp"

namespace lab = wgstark::lab;

int main(int argc, char** argv) {
  CLI::App app{"Stark resonances in bent two-dimensional waveguides"};
  app.require_subcommand(1);
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  bool quiet = false;
  app.add_option("-c,--config", config_path, "YAML run configuration (defaults apply when omitted)");
  app.add_option("--set", overrides, "Override a config key, e.g. --set field.F=0.003")->allow_extra_args(false);
  app.add_option("-o,--out", out_dir, "Output directory (overrides output.dir)");
  app.add_flag("-q,--quiet", quiet, "Only print the summary line");

  const std::vector<std::pair<const char*, const char*>> commands = {
      {"check", "Hypotheses, regime and resolved auto parameters"},
      {"modes", "Transverse eigenvalue table"},
      {"bound", "Bound states of the field-free guide"},
      {"resonance", "One resonance of the distorted Stark operator"},
      {"sweep_theta", "Resonance against distortion strength"},
      {"sweep_field", "Resonance along a field ladder with width fit"},
      {"confining", "Eigenvalue counts below a cap for growing L"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : lab::kExitValidation;
  }
  const auto command = lab::parse_command(app.get_subcommands().front()->get_name());

  lab::RunConfig config;
  try {
    config = config_path.empty() ? lab::parse_config("{}", overrides) : lab::load_config(config_path, overrides);
  } catch (const wgstark::Error& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return lab::kExitValidation;
  }
  if (!out_dir.empty()) config.output.dir = out_dir;

  const auto outcome = lab::run_command(*command, config, std::nullopt, quiet ? nullptr : &std::clog);
  std::cout << lab::to_string(*command) << ": " << outcome.summary << " [" << outcome.dir.string() << "]\n";
  return outcome.exit_code;
}
