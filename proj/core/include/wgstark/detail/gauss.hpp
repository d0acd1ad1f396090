#pragma once

#include <boost/math/quadrature/gauss.hpp>

namespace wgstark::detail {

/// 16-point Gauss-Legendre rule on [a, b]; works for real or complex integrands.
template <class F>
auto gauss16(F&& f, double a, double b) -> decltype(f(a)) {
  using Rule = boost::math::quadrature::gauss<double, 16>;
  const auto& x = Rule::abscissa();
  const auto& w = Rule::weights();
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  decltype(f(a)) sum{};
  for (std::size_t j = 0; j < x.size(); ++j) {
    sum += w[j] * (f(c - h * x[j]) + f(c + h * x[j]));
  }
  return sum * h;
}

/// Nodes and weights of the same rule mapped to [a, b], in increasing order.
template <class Visit>
void gauss16_nodes(double a, double b, Visit&& visit) {
  using Rule = boost::math::quadrature::gauss<double, 16>;
  const auto& x = Rule::abscissa();
  const auto& w = Rule::weights();
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  for (std::size_t j = x.size(); j-- > 0;) visit(c - h * x[j], h * w[j]);
  for (std::size_t j = 0; j < x.size(); ++j) visit(c + h * x[j], h * w[j]);
}

}  // namespace wgstark::detail
