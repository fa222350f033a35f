#pragma once

#include <cmath>
#include <sstream>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "zenolab/error.hpp"

namespace zenolab::quadrature {

struct Settings {
  double tolerance = 1e-13;   // relative, per subinterval
  unsigned max_depth = 20;
  double accept = 1e-9;       // error estimate above tolerance*scale that still counts as converged
  double absolute = 0.0;      // error estimates below this always count as converged
};

/// Adaptive 61-point Gauss-Kronrod over [a, b]. Throws a numeric-failure
/// error when the error estimate exceeds `accept` relative to the L1 norm.
template <class F>
auto integrate(F&& f, double a, double b, const Settings& s = {}) {
  double error = 0.0;
  double l1 = 0.0;
  // Boost reports the error of each subinterval in the units of [-1, 1], so
  // the affine map is done here to keep the estimate in the caller's units.
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  auto mapped = [&](double u) { return half * f(mid + half * u); };
  auto value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(mapped, -1.0, 1.0, s.max_depth,
                                                                              s.tolerance, &error, &l1);
  if (error > s.accept * std::max(l1, 1e-300) && error > std::max(s.absolute, 1e-300)) {
    std::ostringstream msg;
    msg << "adaptive quadrature on [" << a << ", " << b << "] did not converge: estimate " << value
        << " with error " << error << " (L1 " << l1 << ")";
    throw Error(ErrorKind::NumericFailure, msg.str());
  }
  return value;
}

/// Double-exponential rule for integrands with (integrable) endpoint
/// singularities such as logarithms.
template <class F>
double integrate_endpoint_singular(F&& f, double a, double b, double tolerance = 1e-12) {
  thread_local boost::math::quadrature::tanh_sinh<double> rule;
  double error = 0.0;
  double l1 = 0.0;
  const double value = rule.integrate(f, a, b, tolerance, &error, &l1, static_cast<std::size_t*>(nullptr));
  if (error > 1e-9 * std::max(l1, 1e-300) && error > 1e-300) {
    std::ostringstream msg;
    msg << "tanh-sinh quadrature on [" << a << ", " << b << "] did not converge: estimate " << value
        << " with error " << error;
    throw Error(ErrorKind::NumericFailure, msg.str());
  }
  return value;
}

/// Integrates piecewise over the sorted breakpoints.
template <class F>
auto integrate_pieces(F&& f, std::span<const double> breaks, const Settings& s = {}) {
  using R = decltype(f(breaks[0]));
  R total{};
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
    if (breaks[i + 1] > breaks[i]) total += integrate(f, breaks[i], breaks[i + 1], s);
  return total;
}

}  // namespace zenolab::quadrature
