#include "wgstark/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "wgstark/errors.hpp"

namespace wgstark {

namespace {

constexpr double kTailStart = 2.0;

template <class F>
double adaptive(F&& f, double a, double b) {
  if (a == b) return 0.0;
  double error = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-14, &error);
  if (!std::isfinite(value) || error > 1e-11) {
    std::ostringstream os;
    os << "quadrature on [" << a << ", " << b << "] did not converge (error estimate " << error << ")";
    throw QuadratureFailure(os.str());
  }
  return value;
}

Complex ipow(Complex z, int k) {
  Complex r(1.0, 0.0);
  for (int i = 0; i < k; ++i) r *= z;
  return r;
}

}  // namespace

CurvatureModel CurvatureModel::zero() { return CurvatureModel{}; }

CurvatureModel CurvatureModel::rational(double amplitude, int exponent) {
  if (exponent < 1) throw InvalidArgument("rational curvature needs exponent n >= 1");
  if (!std::isfinite(amplitude)) throw InvalidArgument("curvature amplitude must be finite");
  CurvatureModel m;
  m.kind_ = Kind::Rational;
  m.amplitude_ = amplitude;
  m.exponent_ = exponent;
  return m;
}

double CurvatureModel::decay_exponent() const noexcept {
  if (kind_ == Kind::Zero || amplitude_ == 0.0) return std::numeric_limits<double>::infinity();
  return 2.0 * exponent_;
}

CurvatureTriple CurvatureModel::eval(Complex z) const {
  if (kind_ == Kind::Zero) return {};
  const int m = 2 * exponent_;
  const Complex zm2 = ipow(z, m - 2);
  const Complex zm1 = zm2 * z;
  const Complex q = 1.0 + zm1 * z;
  if (std::abs(q) < pole_guard) {
    std::ostringstream os;
    os << "curvature evaluated at " << z << ", too close to a pole of 1 + z^" << m;
    throw DegenerateEvaluation(os.str());
  }
  const double a = amplitude_;
  const Complex q2 = q * q;
  const Complex dq = double(m) * zm1;
  CurvatureTriple t;
  t.value = a / q;
  t.first = -a * dq / q2;
  t.second = -a * (double(m) * (m - 1) * zm2 / q2 - 2.0 * dq * dq / (q2 * q));
  return t;
}

double CurvatureModel::value(double s) const {
  if (kind_ == Kind::Zero) return 0.0;
  return amplitude_ / (1.0 + std::pow(s, 2 * exponent_));
}

double CurvatureModel::first(double s) const {
  if (kind_ == Kind::Zero) return 0.0;
  const int m = 2 * exponent_;
  const double q = 1.0 + std::pow(s, m);
  return -amplitude_ * m * std::pow(s, m - 1) / (q * q);
}

double CurvatureModel::singularity_distance(Complex z) const {
  if (kind_ == Kind::Zero) return std::numeric_limits<double>::infinity();
  const int m = 2 * exponent_;
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < m; ++k) {
    const double phase = std::numbers::pi * (2 * k + 1) / m;
    best = std::min(best, std::abs(z - std::polar(1.0, phase)));
  }
  return best;
}

double CurvatureModel::tail_radius() const noexcept { return kTailStart; }

double CurvatureModel::tail_right(double T) const {
  if (kind_ == Kind::Zero) return 0.0;
  if (T < kTailStart) throw InvalidArgument("tail series requested inside its radius");
  // int_T^inf dt/(1+t^m) = sum_k (-1)^k T^{1-(k+1)m} / ((k+1)m - 1), T > 1.
  const double m = 2.0 * exponent_;
  const double ratio = std::pow(T, -m);
  double power = T * ratio;
  double sum = 0.0;
  for (int k = 0; k < 400; ++k) {
    const double term = power / ((k + 1) * m - 1.0);
    sum += (k % 2 == 0) ? term : -term;
    if (term <= 1e-18 * std::abs(sum)) break;
    power *= ratio;
  }
  return amplitude_ * sum;
}

double CurvatureModel::tail_left(double T) const { return tail_right(T); }

double CurvatureModel::sup_abs() const noexcept {
  return kind_ == Kind::Zero ? 0.0 : std::abs(amplitude_);
}

std::string CurvatureModel::describe() const {
  std::ostringstream os;
  if (kind_ == Kind::Zero) {
    os << "zero";
  } else {
    os.precision(17);
    os << "rational(alpha=" << amplitude_ << ", n=" << exponent_ << ")";
  }
  return os.str();
}

CurvatureTriple curvature_eval(const CurvatureModel& model, Complex z) { return model.eval(z); }

double total_bend(const GeometrySetup& setup) {
  const CurvatureModel& m = setup.model;
  if (m.kind() == CurvatureModel::Kind::Zero) return 0.0;
  const double T = m.tail_radius();
  return m.tail_left(T) + adaptive([&](double t) { return m.value(t); }, -T, 0.0) +
         adaptive([&](double t) { return m.value(t); }, 0.0, T) + m.tail_right(T);
}

double bending_angle(const GeometrySetup& setup, double s) {
  const CurvatureModel& m = setup.model;
  if (m.kind() == CurvatureModel::Kind::Zero) return 0.0;
  const double T = m.tail_radius();
  if (s <= -T) return m.tail_left(-s);
  if (s >= T) return total_bend(setup) - m.tail_right(s);
  return m.tail_left(T) + adaptive([&](double t) { return m.value(t); }, -T, s);
}

Complex metric_factor(Complex gamma, double u) {
  const Complex q = 1.0 + u * gamma;
  if (std::abs(q) < 1e-8) throw GeometryViolation("1 + u*gamma vanishes; tube coordinates break down");
  return 1.0 / (q * q);
}

namespace detail {
double vertical_panel(const CurvatureModel& model, Complex start) {
  const double d = model.singularity_distance(start);
  return std::clamp(0.5 * d, 1e-3, 2.0);
}
}  // namespace detail

BendProfile::BendProfile(const GeometrySetup& setup, double half_span) : setup_(setup), total_(total_bend(setup)) {
  double clearance = 1.0;
  if (setup_.model.kind() == CurvatureModel::Kind::Rational) {
    clearance = std::sin(std::numbers::pi / (2.0 * setup_.model.exponent()));
  }
  step_ = std::min(0.25, 0.4 * clearance);
  half_ = static_cast<std::size_t>(std::ceil(std::max(half_span, 1.0) / step_));
  half_span_ = static_cast<double>(half_) * step_;
  knots_.resize(2 * half_ + 1);
  knots_[half_] = bending_angle(setup_, 0.0);
  const CurvatureModel& m = setup_.model;
  auto gamma = [&](double t) { return m.value(t); };
  for (std::size_t k = half_; k < 2 * half_; ++k) {
    knots_[k + 1] = knots_[k] + detail::gauss16(gamma, knot(k), knot(k + 1));
  }
  for (std::size_t k = half_; k > 0; --k) {
    knots_[k - 1] = knots_[k] - detail::gauss16(gamma, knot(k - 1), knot(k));
  }
}

std::size_t BendProfile::panel_of(double s) const {
  const auto k = static_cast<std::ptrdiff_t>(std::floor(s / step_)) + static_cast<std::ptrdiff_t>(half_);
  return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(2 * half_ - 1)));
}

double BendProfile::far_value(double s) const { return bending_angle(setup_, s); }

double BendProfile::operator()(double s) const {
  if (s < -half_span_ || s > half_span_) return far_value(s);
  const std::size_t k = panel_of(s);
  const double a = knot(k);
  if (s == a) return knots_[k];
  const CurvatureModel& m = setup_.model;
  return knots_[k] + detail::gauss16([&](double t) { return m.value(t); }, a, s);
}

Complex BendProfile::vertical_increment(double s, double y) const {
  if (y == 0.0) return Complex{};
  const CurvatureModel& m = setup_.model;
  const double dir = y > 0 ? 1.0 : -1.0;
  const double span = std::abs(y);
  Complex sum{};
  double t = 0.0;
  while (t < span) {
    const double h = std::min(detail::vertical_panel(m, Complex(s, dir * t)), span - t);
    sum += detail::gauss16([&](double tau) { return m.eval(Complex(s, tau)).value; }, dir * t, dir * (t + h));
    t += h;
  }
  return Complex(0, 1) * sum;
}

Complex BendProfile::operator()(Complex z) const {
  return Complex((*this)(z.real()), 0.0) + vertical_increment(z.real(), z.imag());
}

PlanePoint embed(const GeometrySetup& setup, double s, double u) {
  if (u < 0.0 || u > setup.width) throw InvalidArgument("embed requires 0 <= u <= d");
  const BendProfile alpha(setup, std::abs(s) + 1.0);
  const double x = adaptive([&](double t) { return std::cos(alpha(t)); }, 0.0, s);
  const double y = adaptive([&](double t) { return std::sin(alpha(t)); }, 0.0, s);
  const double a = alpha(s);
  return {x - u * std::sin(a), y + u * std::cos(a)};
}

std::vector<PlanePoint> embed_polyline(const GeometrySetup& setup, const std::vector<double>& s, double u) {
  std::vector<PlanePoint> out;
  if (s.empty()) return out;
  double reach = 1.0;
  for (double v : s) reach = std::max(reach, std::abs(v));
  const BendProfile alpha(setup, reach + 1.0);
  const double step = alpha.panel_width();
  auto advance = [&](double a, double b, double& x, double& y) {
    const int pieces = std::max(1, static_cast<int>(std::ceil(std::abs(b - a) / step)));
    const double h = (b - a) / pieces;
    for (int p = 0; p < pieces; ++p) {
      const double lo = a + p * h;
      x += detail::gauss16([&](double t) { return std::cos(alpha(t)); }, lo, lo + h);
      y += detail::gauss16([&](double t) { return std::sin(alpha(t)); }, lo, lo + h);
    }
  };
  double x = 0.0;
  double y = 0.0;
  advance(0.0, s.front(), x, y);
  double prev = s.front();
  out.reserve(s.size());
  for (double v : s) {
    advance(prev, v, x, y);
    prev = v;
    const double a = alpha(v);
    out.push_back({x - u * std::sin(a), y + u * std::cos(a)});
  }
  return out;
}

namespace {

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

HypothesisReport check_hypotheses(const GeometrySetup& setup, const std::optional<DistortionSampling>& hints) {
  HypothesisReport report;
  const CurvatureModel& m = setup.model;

  // h1: d sup|Re gamma| < 1 on a sampling sweep, plus the closed-form sup.
  double sup = m.sup_abs();
  double where = 0.0;
  const int n1 = 20001;
  for (int k = 0; k < n1; ++k) {
    const double s = -50.0 + 100.0 * k / (n1 - 1);
    const double g = std::abs(m.value(s));
    if (g > sup) {
      sup = g;
      where = s;
    }
  }
  report.sup_abs_gamma = sup;
  report.h1_ok = setup.width > 0.0 && setup.width * sup < 1.0;
  if (!report.h1_ok) report.violations.emplace_back("h1", where);

  // h2: log-log decay fit over |s| in [10, 1000] on both tails.
  constexpr double kDecayMargin = 0.1;
  if (m.kind() == CurvatureModel::Kind::Zero || m.amplitude() == 0.0) {
    report.fitted_decay_exponent = std::numeric_limits<double>::infinity();
    report.h2_ok = true;
  } else {
    double worst = std::numeric_limits<double>::infinity();
    for (double side : {-1.0, 1.0}) {
      std::vector<double> lx, ly;
      for (int k = 0; k <= 20; ++k) {
        const double s = side * std::pow(10.0, 1.0 + 2.0 * k / 20.0);
        const double g = std::abs(m.value(s));
        if (g > 0.0) {
          lx.push_back(std::log(std::abs(s)));
          ly.push_back(std::log(g));
        }
      }
      worst = std::min(worst, -fit_slope(lx, ly));
    }
    report.fitted_decay_exponent = worst;
    report.h2_ok = worst >= 3.0 + kDecayMargin;
    if (!report.h2_ok) report.violations.emplace_back("h2", 1000.0);
  }

  // h3 surrogate: f * gamma' >= 0 wherever the distortion field is nonzero.
  DistortionSampling sampling;
  if (hints) {
    sampling = *hints;
  } else {
    sampling.field = [](double s) { return std::abs(s) >= 1.0 ? (s > 0 ? 1.0 : -1.0) : 0.0; };
  }
  report.h3_surrogate_ok = true;
  const int n3 = std::max(sampling.samples, 2);
  const double scale = std::max(m.sup_abs(), 1e-300);
  for (int k = 0; k < n3; ++k) {
    const double s = sampling.s_min + (sampling.s_max - sampling.s_min) * k / (n3 - 1);
    const double f = sampling.field(s);
    if (f == 0.0) continue;
    if (f * m.first(s) < -1e-15 * std::abs(f) * scale) {
      report.h3_surrogate_ok = false;
      if (report.violations.size() < 64) report.violations.emplace_back("h3", s);
    }
  }
  return report;
}

}  // namespace wgstark
