#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Sparse>

#include "wgstark/distortion.hpp"

namespace wgstark {

/// Physical scenario: geometry plus field.
struct WaveguideSetup {
  GeometrySetup geometry;
  FieldConfig field;

  double total_bend() const { return wgstark::total_bend(geometry); }
  Regime regime() const { return classify_regime(field.direction, total_bend()); }
  /// Stable 64-bit FNV-1a digest of the canonical description, as hex.
  std::string hash() const;
};

/// Interior nodes s_i = -L + (i+1) hs, i < ns, and u_j = (j+1) hu, j < nu.
/// Node (i, j) has index i*nu + j.
struct Grid {
  double half_length = 20.0;
  int ns = 801;
  int nu = 25;
  double width = 1.0;

  double hs() const noexcept { return 2.0 * half_length / (ns + 1); }
  double hu() const noexcept { return width / (nu + 1); }
  double s(int i) const noexcept { return -half_length + (i + 1) * hs(); }
  /// Midpoint between nodes i-1 and i; i = 0 and i = ns touch the boundary.
  double s_half(int i) const noexcept { return -half_length + (i + 0.5) * hs(); }
  double u(int j) const noexcept { return (j + 1) * hu(); }
  std::size_t size() const noexcept { return static_cast<std::size_t>(ns) * static_cast<std::size_t>(nu); }
  std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(nu) + static_cast<std::size_t>(j);
  }

  /// Grid with the same L whose spacing is as close as possible to hs_target.
  static Grid with_spacing(double half_length, double hs_target, int nu, double width);

  void validate() const;
};

/// Lowest eigenvalue of the discrete transverse operator, the grid's threshold.
double discrete_threshold(const Grid& grid);

/// Plateau onsets |E| / (F |c|) on the left and right.
std::pair<double, double> plateau_onsets(const DistortionParams& params, const FieldConfig& field, double alpha0);
/// Longest cutoff transition, deltaE / (F min|c|).
double transition_width(const DistortionParams& params, const FieldConfig& field, double alpha0);
/// 5 + three transition widths.
double default_margin(const DistortionParams& params, const FieldConfig& field, double alpha0);
/// Plateau length over which an outgoing wave at the threshold is damped by
/// exp(-damping): (damping / beta)^2 F max|c|.
double damping_length(const DistortionParams& params, const FieldConfig& field, double alpha0, double damping);
/// L = max plateau onset + margin.  Throws RegimeMismatch outside the resonant regime.
double auto_truncation(const DistortionParams& params, const FieldConfig& field, double alpha0, double margin);

/// Onsets inside (-L, L), transition resolved by >= 8 points, and the two
/// outermost cells at each end on the plateaus.  Throws InvalidArgument.
void validate_distortion_grid(const Grid& grid, const DistortionParams& params, const FieldConfig& field,
                              double alpha0);

enum class OperatorKind {
  Waveguide,           // H = T_s + T_u + V0
  Stark,               // H(F) = H + W
  ReferenceStark,      // H~0(F) = T_s + T_u + W~
  DistortedStark,      // H_theta(F) = T_s,theta + T_u + V0_theta + W_theta
  DistortedReference,  // H~0,theta(F) = T_s,theta + T_u + W~_theta
  DistortedFree,       // H0,theta = T_s,theta + T_u
};

std::string_view to_string(OperatorKind kind);
bool is_distorted(OperatorKind kind);
bool uses_field(OperatorKind kind);

struct Provenance {
  OperatorKind kind = OperatorKind::Waveguide;
  std::string setup_hash;
  Grid grid;
  std::optional<DistortionParams> params;
};

struct OperatorMatrix {
  Eigen::SparseMatrix<Complex> matrix;
  bool is_hermitian = false;
  bool is_complex_symmetric = false;
  Provenance provenance;

  std::size_t size() const noexcept { return static_cast<std::size_t>(matrix.rows()); }
  const Grid& grid() const noexcept { return provenance.grid; }
  /// Real part as a real sparse matrix (for real kinds).
  Eigen::SparseMatrix<double> real() const;
};

/// Coefficients on the nodes and longitudinal half-points of one grid, for
/// one distortion (or the identity).  Every operator kind is assembled from
/// such a table.
class CoefficientTable {
 public:
  CoefficientTable(const WaveguideSetup& setup, const std::optional<DistortionParams>& params, const Grid& grid,
                   bool with_field = true);

  const Grid& grid() const noexcept { return grid_; }
  const WaveguideSetup& setup() const noexcept { return setup_; }
  const std::optional<DistortionParams>& params() const noexcept { return params_; }
  bool with_field() const noexcept { return with_field_; }

  /// G at (s_half(i), u_j), i in [0, ns].
  Complex flux(int i, int j) const { return flux_[static_cast<std::size_t>(i) * grid_.nu + j]; }
  Complex curvature(std::size_t k) const { return curvature_[k]; }
  Complex correction(std::size_t k) const { return correction_[k]; }
  Complex stark(std::size_t k) const { return stark_[k]; }
  Complex reference(std::size_t k) const { return reference_[k]; }
  /// Distortion field values at the nodes, for diagnostics.
  const std::vector<FieldValue>& node_field() const noexcept { return node_field_; }

 private:
  WaveguideSetup setup_;
  std::optional<DistortionParams> params_;
  Grid grid_;
  bool with_field_;
  std::vector<Complex> flux_;
  std::vector<Complex> curvature_;
  std::vector<Complex> correction_;
  std::vector<Complex> stark_;
  std::vector<Complex> reference_;
  std::vector<FieldValue> node_field_;
};

/// Five-point divergence-form assembly with Dirichlet conditions on all sides.
/// Distorted kinds require a table built with distortion parameters;
/// undistorted kinds require one built without.
OperatorMatrix assemble(OperatorKind kind, const CoefficientTable& table);

/// Builds the table (identity distortion for undistorted kinds) and assembles.
/// Checks the hypothesis gate and, for distorted kinds, the grid policy.
OperatorMatrix assemble(OperatorKind kind, const WaveguideSetup& setup, const std::optional<DistortionParams>& params,
                        const Grid& grid);

/// V_theta = V0_theta + W_theta - W~_theta on the nodes.
Eigen::VectorXcd perturbation_diagonal(const CoefficientTable& table);

struct TransverseMode {
  int k = 0;
  double discrete = 0.0;
  double continuum = 0.0;
};

/// All nu eigenvalues (2/hu^2)(1 - cos(k pi hu/d)) with (k pi/d)^2 alongside.
std::vector<TransverseMode> transverse_modes(double width, int nu);

/// "row col re im" per stored entry, 0-based, 17 significant digits.
void export_coordinate(const OperatorMatrix& op, std::ostream& out);

/// Max |M_ij - M_ji| over stored entries.
double max_asymmetry(const Eigen::SparseMatrix<Complex>& m);

}  // namespace wgstark
