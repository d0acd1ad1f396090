#include "wgstark/distortion.hpp"

#include <cmath>
#include <sstream>

#include "wgstark/errors.hpp"

namespace wgstark {

void DistortionParams::validate() const {
  if (!(reference_energy < 0.0)) throw InvalidArgument("reference energy E must be negative");
  const double cap = 0.5 * std::min(1.0, std::abs(reference_energy));
  if (!(window > 0.0 && window < cap)) {
    std::ostringstream os;
    os << "window deltaE = " << window << " must lie in (0, " << cap << ")";
    throw InvalidArgument(os.str());
  }
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw InvalidArgument("distortion strength beta must be >= 0");
  if (!(sharpness > 0.0)) throw InvalidArgument("cutoff sharpness must be positive");
}

StepValue smooth_step(double E, double deltaE, double t, double sharpness) {
  const double x = (t - E) / deltaE;
  if (x <= 0.0) return {1.0, 0.0, 0.0, 0.0};
  if (x >= 1.0) return {};
  const double a = 1.0 / x;
  const double b = 1.0 / (1.0 - x);
  const double r = sharpness * (b - a);
  // Beyond this the bump is flat to double precision and r' overflows.
  if (r > 700.0) return {};
  if (r < -700.0) return {1.0, 0.0, 0.0, 0.0};
  double psi = 0.0;
  double rest = 0.0;  // 1 - psi
  if (r > 0.0) {
    const double e = std::exp(-r);
    psi = e / (1.0 + e);
    rest = 1.0 / (1.0 + e);
  } else {
    const double e = std::exp(r);
    psi = 1.0 / (1.0 + e);
    rest = e / (1.0 + e);
  }
  const double p1 = -psi * rest;
  const double p2 = -p1 * (rest - psi);
  const double p3 = -p2 * (rest - psi) + 2.0 * p1 * p1;
  const double r1 = sharpness * (b * b + a * a);
  const double r2 = sharpness * 2.0 * (b * b * b - a * a * a);
  const double r3 = sharpness * 6.0 * (b * b * b * b + a * a * a * a);
  StepValue out;
  out.value = psi;
  out.d1 = p1 * r1 / deltaE;
  out.d2 = (p2 * r1 * r1 + p1 * r2) / (deltaE * deltaE);
  out.d3 = (p3 * r1 * r1 * r1 + 3.0 * p2 * r1 * r2 + p1 * r3) / (deltaE * deltaE * deltaE);
  return out;
}

FieldValue distortion_field(const DistortionParams& params, const FieldConfig& field, double alpha0, double s) {
  const Regime regime = classify_regime(field.direction, alpha0);
  if (regime != Regime::ResonantBothEnds) {
    std::ostringstream os;
    os << "distortion field needs the resonant regime, got " << to_string(regime) << " (eta = " << field.direction
       << ", alpha0 = " << alpha0 << ")";
    throw RegimeMismatch(os.str());
  }
  if (!(field.strength > 0.0)) throw InvalidArgument("distortion field needs F > 0");
  const double c = s <= 0.0 ? std::cos(field.direction) : std::cos(field.direction - alpha0);
  const double fc = field.strength * c;
  const StepValue phi = smooth_step(params.reference_energy, params.window, fc * s, params.sharpness);
  FieldValue out;
  out.cutoff = phi.value;
  out.f = -phi.value / fc;
  out.d1 = -phi.d1;
  out.d2 = -phi.d2 * fc;
  out.d3 = -phi.d3 * fc * fc;
  return out;
}

DistortedProfile::DistortedProfile(const StarkField& field, std::optional<DistortionParams> params)
    : field_(&field), params_(std::move(params)) {
  if (params_) {
    if (!std::isfinite(params_->beta)) throw InvalidArgument("beta must be finite");
    // Regime gate up front so column() never fails half way through a grid.
    (void)distortion_field(*params_, field.field(), field.total_bend(), 0.0);
  }
}

DistortedProfile::Column DistortedProfile::column(double s) const {
  Column c;
  c.s = s;
  double beta = 0.0;
  if (params_) {
    c.f = distortion_field(*params_, field_->field(), field_->total_bend(), s);
    beta = params_->beta;
  }
  c.theta = Complex(0.0, beta);
  c.point = Complex(s, beta * c.f.f);
  c.jacobian = Complex(1.0, beta * c.f.d1);
  c.gamma = field_->setup().model.eval(c.point);
  c.stark = field_->column(c.point);
  return c;
}

DistortedCoefficients DistortedProfile::at(const Column& c, double u) const {
  DistortedCoefficients d;
  d.point = c.point;
  d.jacobian = c.jacobian;
  d.gamma = c.gamma.value;
  d.gamma_first = c.gamma.first;
  const Complex q = 1.0 + u * c.gamma.value;
  if (std::abs(q) < 1e-8) throw GeometryViolation("1 + u*gamma vanishes at a distorted point");
  const Complex q2 = q * q;
  d.metric = 1.0 / q2;
  const Complex j = c.jacobian;
  const Complex j2 = j * j;
  const Complex j3 = j2 * j;
  d.flux = d.metric / j2;
  // d/ds g(s + theta f, u) = -2 u gamma'(z) (1 + theta f') / q^3
  const Complex metric_ds = -2.0 * u * c.gamma.first * j / (q2 * q);
  const Complex theta = c.theta;
  d.correction = -1.25 * d.metric * theta * theta * c.f.d2 * c.f.d2 / (j2 * j2) +
                 0.5 * d.metric * theta * c.f.d3 / j3 + 0.5 * metric_ds * theta * c.f.d2 / j3;
  d.curvature = curvature_potential(c.gamma, u);
  d.reference = c.stark.reference_at(u);
  d.remainder = c.stark.remainder_at(u);
  d.stark = d.reference + d.remainder;
  d.f = c.f.f;
  d.df = c.f.d1;
  d.d2f = c.f.d2;
  d.d3f = c.f.d3;
  d.cutoff = c.f.cutoff;
  d.defect = c.f.cutoff - 1.0;
  d.mu = 1.0 + theta * d.defect;
  return d;
}

DistortedCoefficients distorted_coefficients(const StarkField& field, const DistortionParams& params, double s,
                                             double u) {
  return DistortedProfile(field, params).at(s, u);
}

bool nu_region_contains(const DistortionParams& params, Complex z, double lambda0) {
  const double bound = 0.25 * params.beta * params.window;
  const Complex shift = params.e_minus() + lambda0 - z;
  // Im mu^2 w is quadratic in f#; check a dense sample plus the endpoints.
  constexpr int kSamples = 257;
  for (int k = 0; k < kSamples; ++k) {
    const double sharp = -static_cast<double>(k) / (kSamples - 1);
    const Complex mu(1.0, params.beta * sharp);
    if (!((mu * mu * shift).imag() < bound)) return false;
  }
  // Interior extremum of the quadratic in f#.
  const double a = shift.real();
  const double b = shift.imag();
  // Im[(1 + i x)^2 (a + i b)] with x = beta f#: b (1 - x^2) + 2 a x.
  if (b != 0.0) {
    const double x = a / b;
    if (x >= -params.beta && x <= 0.0) {
      if (!(b * (1.0 - x * x) + 2.0 * a * x < bound)) return false;
    }
  }
  return true;
}

}  // namespace wgstark
