#pragma once

#include <optional>

#include "wgstark/fields.hpp"

namespace wgstark {

/// Exterior distortion s -> s + i beta f(s).  Energies are binding energies
/// measured from the continuum threshold, so E < 0.
struct DistortionParams {
  double reference_energy = -0.04;
  double window = 0.01;
  double beta = 0.008;
  double sharpness = 1.0;

  double e_minus() const noexcept { return reference_energy - window; }
  double e_plus() const noexcept { return reference_energy + window; }
  Complex theta() const noexcept { return {0.0, beta}; }

  /// E < 0, 0 < deltaE < min(1, |E|)/2, beta >= 0, sharpness > 0.
  void validate() const;
};

/// phi and its first three t-derivatives.
struct StepValue {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double d3 = 0.0;
};

/// phi = 1 for t <= E, 0 for t >= E + deltaE, and the logistic bump
/// 1 / (1 + exp(sigma (1/(1-x) - 1/x))), x = (t - E)/deltaE, in between.
StepValue smooth_step(double E, double deltaE, double t, double sharpness = 1.0);

struct FieldValue {
  double f = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double d3 = 0.0;
  double cutoff = 0.0;  // Phi(s)
};

/// f = -Phi / (F c) with c = cos eta for s <= 0 and cos(eta - alpha0) for s > 0.
/// Throws RegimeMismatch outside the resonant-both-ends regime.
FieldValue distortion_field(const DistortionParams& params, const FieldConfig& field, double alpha0, double s);

/// Every coefficient of the distorted operator at one point (s, u).
struct DistortedCoefficients {
  Complex point;        // s + i beta f
  Complex jacobian;     // 1 + theta f'
  Complex gamma;        // gamma(point)
  Complex gamma_first;  // gamma'(point)
  Complex metric;       // g_theta
  Complex flux;         // G_theta = g_theta / jacobian^2
  Complex correction;   // S_theta
  Complex stark;        // W_theta
  Complex reference;    // W~_theta
  Complex curvature;    // V0_theta
  Complex remainder;    // R_theta
  double f = 0.0;
  double df = 0.0;
  double d2f = 0.0;
  double d3f = 0.0;
  double cutoff = 0.0;  // Phi
  double defect = 0.0;  // f# = Phi - 1
  Complex mu;           // 1 + theta f#
};

/// Coefficient evaluator for one (setup, field, distortion).  Without
/// distortion parameters the identity distortion (f = 0) is used through the
/// same arithmetic, so beta = 0 and "undistorted" agree bit for bit.
class DistortedProfile {
 public:
  DistortedProfile(const StarkField& field, std::optional<DistortionParams> params);

  /// Longitudinal data shared by every u at one s.
  struct Column {
    double s = 0.0;
    FieldValue f;
    Complex theta;
    Complex point;
    Complex jacobian;
    CurvatureTriple gamma;
    StarkField::Column stark;
  };

  Column column(double s) const;
  DistortedCoefficients at(const Column& column, double u) const;
  DistortedCoefficients at(double s, double u) const { return at(column(s), u); }

  const StarkField& field() const noexcept { return *field_; }
  const std::optional<DistortionParams>& params() const noexcept { return params_; }

 private:
  const StarkField* field_;
  std::optional<DistortionParams> params_;
};

DistortedCoefficients distorted_coefficients(const StarkField& field, const DistortionParams& params, double s,
                                             double u);

/// Conservative membership in nu_theta: Im mu^2 (E_- + lambda0 - z) < beta deltaE / 4
/// for every mu = 1 + i beta f#, f# in [-1, 0].
bool nu_region_contains(const DistortionParams& params, Complex z, double lambda0);

}  // namespace wgstark
