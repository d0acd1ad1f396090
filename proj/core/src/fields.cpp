#include "wgstark/fields.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "wgstark/errors.hpp"

namespace wgstark {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr double kBoundaryTol = 1e-9;

template <class F>
double adaptive(F&& f, double a, double b) {
  if (a == b) return 0.0;
  double error = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 20, 1e-14, &error);
  if (!std::isfinite(value) || error > 1e-11) {
    std::ostringstream os;
    os << "field quadrature on [" << a << ", " << b << "] did not converge (error estimate " << error << ")";
    throw QuadratureFailure(os.str());
  }
  return value;
}

}  // namespace

void FieldConfig::validate() const {
  if (!(strength > 0.0 && strength < 1.0)) throw InvalidArgument("field strength F must satisfy 0 < F < 1");
  if (!std::isfinite(direction)) throw InvalidArgument("field direction must be finite");
}

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::ResonantBothEnds: return "ResonantBothEnds";
    case Regime::BGRegime: return "BGRegime";
    case Regime::Confining: return "Confining";
    case Regime::SymmetricResonant: return "SymmetricResonant";
  }
  return "unknown";
}

Regime classify_regime(double eta, double alpha0) {
  const double left = std::abs(eta);
  const double right = std::abs(eta - alpha0);
  if (std::abs(left - kHalfPi) < kBoundaryTol || std::abs(right - kHalfPi) < kBoundaryTol) {
    std::ostringstream os;
    os.precision(17);
    os << "field direction on a regime boundary: |eta| = " << left << ", |eta - alpha0| = " << right;
    throw BoundaryDirection(os.str());
  }
  const bool left_small = left < kHalfPi;
  const bool right_small = right < kHalfPi;
  if (left_small && !right_small) return Regime::ResonantBothEnds;
  if (left_small && right_small) return Regime::BGRegime;
  if (!left_small && right_small) return Regime::Confining;
  return Regime::SymmetricResonant;
}

Complex curvature_potential(const CurvatureTriple& g, double u) {
  const Complex q = 1.0 + u * g.value;
  const Complex q2 = q * q;
  return -g.value * g.value / (4.0 * q2) + u * g.second / (2.0 * q2 * q) -
         1.25 * u * u * g.first * g.first / (q2 * q2);
}

Complex curvature_potential(const GeometrySetup& setup, Complex s, double u) {
  return curvature_potential(setup.model.eval(s), u);
}

Complex ReferenceInteraction::value(Complex s, double u) const {
  if (s.real() < 0.0) return slope_left * s + transverse_left * u + strength * a_minus;
  return slope_right * s + transverse_right * u + strength * a_plus;
}

StarkField::StarkField(const GeometrySetup& setup, const FieldConfig& field, double half_span)
    : setup_(setup), field_(field), bend_(setup, std::max(half_span, 4.0)) {
  const double eta = field_.direction;
  const double F = field_.strength;
  const double alpha0 = bend_.total();
  const std::size_t count = bend_.knot_count();
  const std::size_t mid = count / 2;
  const double S = bend_.half_span();

  left_.resize(mid + 1);
  left_[0] = left_tail(S);
  auto left_f = [this](double t) { return left_integrand(t); };
  for (std::size_t k = 0; k < mid; ++k) {
    left_[k + 1] = left_[k] + detail::gauss16(left_f, bend_.knot(k), bend_.knot(k + 1));
  }
  right_.resize(count - mid);
  right_.back() = right_tail(S);
  auto right_f = [this](double t) { return right_integrand(t); };
  for (std::size_t r = right_.size() - 1; r > 0; --r) {
    right_[r - 1] = right_[r] + detail::gauss16(right_f, bend_.knot(mid + r - 1), bend_.knot(mid + r));
  }
  direct_.assign(count, 0.0);
  auto cos_f = [&](double t) { return std::cos(eta - bend_(t)); };
  for (std::size_t k = mid; k + 1 < count; ++k) {
    direct_[k + 1] = direct_[k] + detail::gauss16(cos_f, bend_.knot(k), bend_.knot(k + 1));
  }
  for (std::size_t k = mid; k > 0; --k) {
    direct_[k - 1] = direct_[k] - detail::gauss16(cos_f, bend_.knot(k - 1), bend_.knot(k));
  }

  reference_.a_minus = -left_[mid];
  reference_.a_plus = -right_[0];
  reference_.strength = F;
  reference_.slope_left = F * std::cos(eta);
  reference_.slope_right = F * std::cos(eta - alpha0);
  reference_.transverse_left = F * std::sin(eta);
  reference_.transverse_right = F * std::sin(eta - alpha0);
}

double StarkField::left_integrand(double t) const {
  const double a = bend_(t);
  return 2.0 * std::sin(field_.direction - 0.5 * a) * std::sin(0.5 * a);
}

double StarkField::right_integrand(double t) const {
  const double delta = bend_.total() - bend_(t);
  return 2.0 * std::sin(field_.direction - bend_.total() + 0.5 * delta) * std::sin(0.5 * delta);
}

double StarkField::left_tail(double T) const {
  const CurvatureModel& m = setup_.model;
  if (m.kind() == CurvatureModel::Kind::Zero) return 0.0;
  const double eta = field_.direction;
  // t = -T/v maps (-inf, -T] onto (0, 1]; the integrand is O(v^{eps-3}).
  return adaptive(
      [&](double v) {
        if (v <= 0.0) return 0.0;
        const double a = m.tail_left(T / v);
        return 2.0 * std::sin(eta - 0.5 * a) * std::sin(0.5 * a) * T / (v * v);
      },
      0.0, 1.0);
}

double StarkField::right_tail(double T) const {
  const CurvatureModel& m = setup_.model;
  if (m.kind() == CurvatureModel::Kind::Zero) return 0.0;
  const double shifted = field_.direction - bend_.total();
  return adaptive(
      [&](double v) {
        if (v <= 0.0) return 0.0;
        const double delta = m.tail_right(T / v);
        return 2.0 * std::sin(shifted + 0.5 * delta) * std::sin(0.5 * delta) * T / (v * v);
      },
      0.0, 1.0);
}

double StarkField::remainder_integral(double s) const {
  const double S = bend_.half_span();
  const std::size_t mid = bend_.knot_count() / 2;
  if (s < 0.0) {
    if (s < -S) return left_tail(-s);
    const std::size_t k = bend_.panel_of(s);
    return left_[k] + detail::gauss16([this](double t) { return left_integrand(t); }, bend_.knot(k), s);
  }
  if (s > S) return right_tail(s);
  const std::size_t k = bend_.panel_of(s);
  return right_[k + 1 - mid] +
         detail::gauss16([this](double t) { return right_integrand(t); }, s, bend_.knot(k + 1));
}

Complex StarkField::remainder_integral(Complex z) const {
  const double s = z.real();
  const double y = z.imag();
  Complex value(remainder_integral(s), 0.0);
  if (y == 0.0) return value;
  const double eta = field_.direction;
  const Complex i(0.0, 1.0);
  if (s < 0.0) {
    const double c = std::cos(eta);
    return value + i * bend_.vertical_integral(s, y, [&](Complex a) { return std::cos(eta - a) - c; });
  }
  const double c0 = std::cos(eta - bend_.total());
  return value - i * bend_.vertical_integral(s, y, [&](Complex a) { return c0 - std::cos(eta - a); });
}

StarkField::Column StarkField::column(Complex z) const {
  const double F = field_.strength;
  const double eta = field_.direction;
  const bool left = z.real() < 0.0;
  const double side_sin = left ? std::sin(eta) : std::sin(eta - bend_.total());
  const double side_cos = left ? std::cos(eta) : std::cos(eta - bend_.total());
  const double offset = left ? reference_.a_minus : reference_.a_plus;
  Column c;
  c.alpha = bend_(z);
  c.reference = F * (z * side_cos + offset);
  c.reference_du = Complex(F * side_sin, 0.0);
  c.remainder = F * remainder_integral(z);
  c.remainder_du = F * (std::sin(eta - c.alpha) - side_sin);
  return c;
}

double StarkField::direct(double s, double u) const {
  const double F = field_.strength;
  const double eta = field_.direction;
  const double S = bend_.half_span();
  auto cos_f = [&](double t) { return std::cos(eta - bend_(t)); };
  double integral = 0.0;
  if (s < -S) {
    integral = direct_.front() - adaptive(cos_f, s, -S);
  } else if (s > S) {
    integral = direct_.back() + adaptive(cos_f, S, s);
  } else {
    const std::size_t k = bend_.panel_of(s);
    integral = direct_[k] + detail::gauss16(cos_f, bend_.knot(k), s);
  }
  return F * (integral + u * std::sin(eta - bend_(s)));
}

std::pair<double, double> reference_constants(const GeometrySetup& setup, const FieldConfig& field,
                                              double cutoff) {
  const StarkField w(setup, field, cutoff);
  return {w.reference().a_minus, w.reference().a_plus};
}

ReferenceInteraction reference_interaction(const GeometrySetup& setup, const FieldConfig& field) {
  return StarkField(setup, field, 20.0).reference();
}

namespace {
double span_for(double s) { return std::max(20.0, std::abs(s) + 1.0); }
}  // namespace

double stark_potential(const GeometrySetup& setup, const FieldConfig& field, double s, double u) {
  return StarkField(setup, field, span_for(s)).direct(s, u);
}

Complex stark_potential(const GeometrySetup& setup, const FieldConfig& field, Complex z, double u) {
  return StarkField(setup, field, span_for(z.real())).potential(z, u);
}

double remainder(const GeometrySetup& setup, const FieldConfig& field, double s, double u) {
  return StarkField(setup, field, span_for(s)).remainder(Complex(s, 0.0), u).real();
}

Complex remainder(const GeometrySetup& setup, const FieldConfig& field, Complex z, double u) {
  return StarkField(setup, field, span_for(z.real())).remainder(z, u);
}

}  // namespace wgstark
