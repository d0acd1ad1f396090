#pragma once

#include <string_view>
#include <utility>
#include <vector>

#include "wgstark/geometry.hpp"

namespace wgstark {

/// Field F (cos eta, sin eta).
struct FieldConfig {
  double strength = 0.002;
  double direction = 0.3;

  /// Requires 0 < F < 1 and a finite direction.
  void validate() const;
};

enum class Regime { ResonantBothEnds, BGRegime, Confining, SymmetricResonant };

std::string_view to_string(Regime regime);

/// Throws BoundaryDirection if |eta| or |eta - alpha0| is within 1e-9 of pi/2.
Regime classify_regime(double eta, double alpha0);

/// V0 from a curvature triple at transverse position u.
Complex curvature_potential(const CurvatureTriple& gamma, double u);
Complex curvature_potential(const GeometrySetup& setup, Complex s, double u);

/// Piecewise-linear comparison field W~.  Left branch for Re s < 0.
struct ReferenceInteraction {
  double a_minus = 0.0;
  double a_plus = 0.0;
  double slope_left = 0.0;        // F cos eta
  double slope_right = 0.0;       // F cos(eta - alpha0)
  double transverse_left = 0.0;   // F sin eta
  double transverse_right = 0.0;  // F sin(eta - alpha0)
  double strength = 0.0;

  Complex value(Complex s, double u) const;
  double value(double s, double u) const { return value(Complex(s, 0.0), u).real(); }
};

/// Field interaction W for one geometry and field, with the real-axis
/// integrals cached on the breakpoints of a BendProfile.  W at a complex
/// argument is W~ + R with R continued along the vertical offset.
class StarkField {
 public:
  StarkField(const GeometrySetup& setup, const FieldConfig& field, double half_span);

  /// Coefficients of W~ and R that are affine in u at one longitudinal point:
  ///   W~ = reference + u * reference_du,   R = remainder + u * remainder_du.
  struct Column {
    Complex alpha;
    Complex reference;
    Complex reference_du;
    Complex remainder;
    Complex remainder_du;

    Complex interaction(double u) const { return reference + u * reference_du + (remainder + u * remainder_du); }
    Complex reference_at(double u) const { return reference + u * reference_du; }
    Complex remainder_at(double u) const { return remainder + u * remainder_du; }
  };

  Column column(Complex z) const;

  /// W by direct integration of cos(eta - alpha) from 0 (real axis only).
  double direct(double s, double u) const;
  Complex potential(Complex z, double u) const { return column(z).interaction(u); }
  Complex remainder(Complex z, double u) const { return column(z).remainder_at(u); }

  const ReferenceInteraction& reference() const noexcept { return reference_; }
  const BendProfile& bend() const noexcept { return bend_; }
  const FieldConfig& field() const noexcept { return field_; }
  const GeometrySetup& setup() const noexcept { return setup_; }
  double total_bend() const noexcept { return bend_.total(); }

  /// int_{-inf}^s (cos(eta - alpha) - cos eta) for s < 0,
  /// int_s^inf (cos(eta - alpha0) - cos(eta - alpha)) for s >= 0.
  double remainder_integral(double s) const;
  Complex remainder_integral(Complex z) const;

 private:
  double left_tail(double T) const;
  double right_tail(double T) const;
  double left_integrand(double t) const;
  double right_integrand(double t) const;

  GeometrySetup setup_;
  FieldConfig field_;
  BendProfile bend_;
  ReferenceInteraction reference_;
  std::vector<double> left_;    // J_-(knot k), knots <= 0
  std::vector<double> right_;   // J_+(knot k), knots >= 0
  std::vector<double> direct_;  // int_0^{knot k} cos(eta - alpha)
};

/// (A_-, A_+).  `cutoff` is where quadrature hands over to the tail formula.
std::pair<double, double> reference_constants(const GeometrySetup& setup, const FieldConfig& field,
                                              double cutoff = 20.0);
ReferenceInteraction reference_interaction(const GeometrySetup& setup, const FieldConfig& field);

double stark_potential(const GeometrySetup& setup, const FieldConfig& field, double s, double u);
Complex stark_potential(const GeometrySetup& setup, const FieldConfig& field, Complex z, double u);

double remainder(const GeometrySetup& setup, const FieldConfig& field, double s, double u);
Complex remainder(const GeometrySetup& setup, const FieldConfig& field, Complex z, double u);

}  // namespace wgstark
