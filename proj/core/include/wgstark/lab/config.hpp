#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wgstark/discretize.hpp"
#include "wgstark/spectra.hpp"

namespace YAML {
class Node;
}

namespace wgstark::lab {

/// Validated run configuration.  An empty optional means "auto".
struct RunConfig {
  struct Geometry {
    double d = 1.0;
    std::string model = "rational";
    double alpha = -0.8;
    int n = 2;
  } geometry;

  struct Field {
    double F = 0.002;
    std::vector<double> F_list;
    double eta = 0.3;
  } field;

  struct Distortion {
    double beta = 0.008;
    std::vector<double> beta_list;
    std::optional<double> E;
    std::optional<double> deltaE;
    double sharpness = 1.0;
  } distortion;

  struct GridSpec {
    std::optional<double> L;
    std::optional<int> Ns;
    int Nu = 25;
    std::optional<double> margin;
    /// Target spacing when Ns is auto.
    double hs = 0.05;
    /// Plateau damping exponent used by the auto margin.
    double damping = 2.5;
    /// Half-length of the F = 0 reference solve that fixes E0.
    double reference_L = 60.0;
  } grid;

  struct Solver {
    std::string method = "shift-invert";
    int k = 8;
    double tol = 1e-12;
    int max_iter = 1000;
    int workers = 1;
  } solver;

  struct Plateau {
    /// Drift tolerance relative to |E0 - lambda0|.
    double drift_tol = 1e-4;
  } plateau;

  struct Confining {
    double cap_offset = 2.0;
    std::vector<double> L_list = {30.0, 60.0};
  } confining;

  struct Output {
    std::string dir = "runs/default";
    std::vector<std::string> formats = {"csv", "svg"};
  } output;

  GeometrySetup geometry_setup() const;
  FieldConfig field_config() const;
  WaveguideSetup setup() const;
  SolverOptions solver_options() const;
  bool wants(const std::string& format) const;

  /// Config echo; auto fields are written as "auto".
  std::string to_yaml() const;
};

/// Parses YAML text, applies "dotted.key=value" overrides and validates.
/// Throws ConfigError (with the offending key path) on parse errors, schema
/// violations, boundary field directions and a failed (h1)/(h2) gate.
RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {});
RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

}  // namespace wgstark::lab
