#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wgstark/lab/config.hpp"

namespace wgstark::lab {

enum class Command { Check, Modes, Bound, Resonance, SweepTheta, SweepField, Confining };

std::string_view to_string(Command command);
std::optional<Command> parse_command(std::string_view name);

/// Process exit codes of the command line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitSolver = 3;

/// Field ladder used by sweep_field when field.F_list is empty.
std::vector<double> default_field_ladder();
/// Distortion strengths used by sweep_theta when distortion.beta_list is empty.
std::vector<double> default_beta_list();

struct RunOutcome {
  int exit_code = kExitOk;
  std::filesystem::path dir;
  std::string summary;
  std::vector<std::string> warnings;
};

/// output.dir when absolute, otherwise relative to $WGSTARK_OUTPUT_ROOT
/// (or the working directory when unset).
std::filesystem::path output_directory(const RunConfig& config);

/// Runs one command and writes its CSV/SVG tables and manifest.yaml into
/// `dir` (default: output_directory(config)).  Errors are caught, written to
/// the manifest with whatever outputs exist, and mapped to an exit code.
/// Progress lines go to `log` when given.
RunOutcome run_command(Command command, const RunConfig& config,
                       const std::optional<std::filesystem::path>& dir = std::nullopt, std::ostream* log = nullptr);

}  // namespace wgstark::lab
