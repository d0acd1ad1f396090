#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wgstark/detail/gauss.hpp"

namespace wgstark {

using Complex = std::complex<double>;

/// gamma and its first two derivatives at one (possibly complex) point.
struct CurvatureTriple {
  Complex value;
  Complex first;
  Complex second;
};

/// Analytic curvature family.  `Rational` is gamma(s) = alpha / (1 + s^{2n}).
class CurvatureModel {
 public:
  enum class Kind { Zero, Rational };

  CurvatureModel() = default;

  static CurvatureModel zero();
  /// n >= 1 is accepted so that decay violations (n = 1) can be reported by
  /// check_hypotheses instead of failing at construction.
  static CurvatureModel rational(double amplitude, int exponent);

  Kind kind() const noexcept { return kind_; }
  double amplitude() const noexcept { return amplitude_; }
  int exponent() const noexcept { return exponent_; }

  /// epsilon in gamma = O(|s|^-epsilon); +inf for the zero model.
  double decay_exponent() const noexcept;

  /// Throws DegenerateEvaluation when |1 + z^{2n}| < pole_guard.
  CurvatureTriple eval(Complex z) const;
  double value(double s) const;
  double first(double s) const;

  /// Distance from z to the nearest singularity of the continuation.
  double singularity_distance(Complex z) const;

  /// Exact tail integrals int_T^inf gamma and int_{-inf}^{-T} gamma for
  /// T >= tail_radius().
  double tail_right(double T) const;
  double tail_left(double T) const;
  double tail_radius() const noexcept;

  /// sup_s |gamma(s)| on the real axis, in closed form.
  double sup_abs() const noexcept;

  std::string describe() const;

  static constexpr double pole_guard = 1e-10;

 private:
  Kind kind_ = Kind::Zero;
  double amplitude_ = 0.0;
  int exponent_ = 0;
};

CurvatureTriple curvature_eval(const CurvatureModel& model, Complex z);

struct GeometrySetup {
  CurvatureModel model = CurvatureModel::rational(-0.8, 2);
  double width = 1.0;

  static GeometrySetup default_setup() { return {}; }
};

/// alpha(s) = int_{-inf}^s gamma.
double bending_angle(const GeometrySetup& setup, double s);
/// alpha_0 = int_R gamma.
double total_bend(const GeometrySetup& setup);

struct PlanePoint {
  double x;
  double y;
};

PlanePoint embed(const GeometrySetup& setup, double s, double u);

/// Embedded curve {(x(s_k,u), y(s_k,u))} for an increasing list of s_k,
/// integrated cumulatively.
std::vector<PlanePoint> embed_polyline(const GeometrySetup& setup, const std::vector<double>& s, double u);

/// (1 + u gamma)^{-2}.
Complex metric_factor(Complex gamma, double u);

/// Samples of a distortion field supplied to the non-trapping surrogate.
struct DistortionSampling {
  std::function<double(double)> field;
  double s_min = -50.0;
  double s_max = 50.0;
  int samples = 20001;
};

struct HypothesisReport {
  bool h1_ok = false;
  bool h2_ok = false;
  bool h3_surrogate_ok = false;
  double sup_abs_gamma = 0.0;
  double fitted_decay_exponent = 0.0;
  /// s positions where a check failed, tagged with the hypothesis name.
  std::vector<std::pair<std::string, double>> violations;

  bool all_ok() const noexcept { return h1_ok && h2_ok && h3_surrogate_ok; }
};

/// Without hints the surrogate assumes the generic sign pattern
/// sign f(s) = sign s for |s| >= 1.
HypothesisReport check_hypotheses(const GeometrySetup& setup,
                                  const std::optional<DistortionSampling>& hints = std::nullopt);

/// alpha on the real axis, cached on breakpoints over [-half_span, half_span].
/// Queries inside the span cost one 16-point Gauss rule; outside they fall back
/// to the tail formulas.  Immutable after construction.
class BendProfile {
 public:
  BendProfile(const GeometrySetup& setup, double half_span);

  double operator()(double s) const;
  /// alpha(s + i y): real-axis value plus the integral of gamma along the
  /// vertical segment.
  Complex operator()(Complex z) const;

  double total() const noexcept { return total_; }
  double half_span() const noexcept { return half_span_; }
  double panel_width() const noexcept { return step_; }
  /// Breakpoints are k * panel_width() for integer k; s = 0 is always one.
  std::size_t knot_count() const noexcept { return knots_.size(); }
  double knot(std::size_t k) const noexcept {
    return (static_cast<double>(k) - static_cast<double>(half_)) * step_;
  }
  double knot_value(std::size_t k) const noexcept { return knots_[k]; }
  /// Index k of the panel [knot(k), knot(k+1)] holding s (clamped to the table).
  std::size_t panel_of(double s) const;
  const GeometrySetup& setup() const noexcept { return setup_; }

  /// Vertical increment i * int_0^y gamma(s + i t) dt.
  Complex vertical_increment(double s, double y) const;

  /// int_0^y g(alpha(s + i t)) dt for g: Complex -> Complex.  Returns 0 for y == 0.
  template <class G>
  Complex vertical_integral(double s, double y, G&& g) const;

 private:
  double far_value(double s) const;

  GeometrySetup setup_;
  double half_span_ = 0.0;
  double step_ = 0.0;
  std::size_t half_ = 0;
  double total_ = 0.0;
  std::vector<double> knots_;
};

namespace detail {
/// Panel length along a vertical line that keeps Gauss rules well inside the
/// analyticity region.
double vertical_panel(const CurvatureModel& model, Complex start);
}  // namespace detail

template <class G>
Complex BendProfile::vertical_integral(double s, double y, G&& g) const {
  if (y == 0.0) return Complex{};
  const CurvatureModel& model = setup_.model;
  const double dir = y > 0 ? 1.0 : -1.0;
  const double span = std::abs(y);
  Complex alpha_start((*this)(s), 0.0);
  Complex total{};
  double t = 0.0;
  while (t < span) {
    const double h = std::min(detail::vertical_panel(model, Complex(s, dir * t)), span - t);
    const double a = dir * t;
    const double b = dir * (t + h);
    detail::gauss16_nodes(a, b, [&](double node, double weight) {
      const Complex partial =
          Complex(0, 1) * detail::gauss16([&](double tau) { return model.eval(Complex(s, tau)).value; }, a, node);
      total += weight * g(alpha_start + partial);
    });
    alpha_start += Complex(0, 1) * detail::gauss16([&](double tau) { return model.eval(Complex(s, tau)).value; }, a, b);
    t += h;
  }
  return total;
}

}  // namespace wgstark
