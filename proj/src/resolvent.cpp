#include "zenolab/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "zenolab/quadrature.hpp"

namespace zenolab {

namespace {

constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double tabulated_value(const Tabulated& t, double x) {
  if (x < t.omega.front() || x > t.omega.back()) return 0.0;
  auto it = std::upper_bound(t.omega.begin(), t.omega.end(), x);
  if (it == t.omega.end()) return t.g_sq.back();
  const auto hi = static_cast<std::size_t>(it - t.omega.begin());
  const std::size_t lo = hi - 1;
  const double s = (x - t.omega[lo]) / (t.omega[hi] - t.omega[lo]);
  return t.g_sq[lo] + s * (t.g_sq[hi] - t.g_sq[lo]);
}

std::vector<double> breakpoints(const FormFactor& ff, std::optional<double> extra) {
  std::vector<double> b;
  if (const auto* t = std::get_if<Tabulated>(&ff.spec()))
    b = t->omega;
  else
    b = {ff.support_min(), ff.support_max()};
  if (extra && *extra > b.front() && *extra < b.back()) {
    b.push_back(*extra);
    std::sort(b.begin(), b.end());
  }
  return b;
}

bool on_cut(const FormFactor& ff, complex e) {
  return e.imag() == 0.0 && e.real() >= ff.support_min() && e.real() <= ff.support_max();
}

// g0^2 [Log(E - a) - Log(E - b)]: principal logs, whose cuts cancel left of
// a, leave exactly the segment [a, b] as the discontinuity.
complex flat_closed_form(const FlatInterval& f, complex e) {
  return f.g0_sq * (std::log(e - f.omega_g) - std::log(e - f.omega_max));
}

}  // namespace

FormFactor FormFactor::flat_interval(double g0_sq, double omega_g, double omega_max) {
  if (!std::isfinite(g0_sq) || g0_sq < 0.0) throw Error(ErrorKind::InvalidInput, "g0_sq must be finite and >= 0");
  if (!std::isfinite(omega_g) || !std::isfinite(omega_max))
    throw Error(ErrorKind::InvalidInput, "flat_interval needs a finite support (the self-energy diverges otherwise)");
  if (!(omega_max > omega_g)) throw Error(ErrorKind::InvalidInput, "flat_interval needs omega_max > omega_g");
  return FormFactor(FlatInterval{g0_sq, omega_g, omega_max});
}

FormFactor FormFactor::constant_line(double gamma) {
  if (!std::isfinite(gamma) || gamma < 0.0) throw Error(ErrorKind::InvalidInput, "gamma must be finite and >= 0");
  return FormFactor(ConstantLine{gamma});
}

FormFactor FormFactor::tabulated(std::vector<double> omega, std::vector<double> g_sq) {
  if (omega.size() < 2 || omega.size() != g_sq.size())
    throw Error(ErrorKind::InvalidInput, "tabulated form factor needs >= 2 points and matching g_sq values");
  for (std::size_t i = 0; i < omega.size(); ++i) {
    if (!std::isfinite(omega[i]) || !std::isfinite(g_sq[i]))
      throw Error(ErrorKind::InvalidInput, "tabulated form factor has non-finite entries");
    if (g_sq[i] < 0.0) throw Error(ErrorKind::InvalidInput, "tabulated g_sq must be >= 0");
    if (i > 0 && !(omega[i] > omega[i - 1]))
      throw Error(ErrorKind::InvalidInput, "tabulated omega grid must be strictly increasing");
  }
  return FormFactor(Tabulated{std::move(omega), std::move(g_sq)});
}

std::string FormFactor::kind() const {
  return std::visit(overloaded{[](const FlatInterval&) { return std::string("flat_interval"); },
                               [](const ConstantLine&) { return std::string("constant_line"); },
                               [](const Tabulated&) { return std::string("tabulated"); }},
                    spec_);
}

double FormFactor::support_min() const {
  return std::visit(overloaded{[](const FlatInterval& f) { return f.omega_g; },
                               [](const ConstantLine&) { return -kInfinity; },
                               [](const Tabulated& t) { return t.omega.front(); }},
                    spec_);
}

double FormFactor::support_max() const {
  return std::visit(overloaded{[](const FlatInterval& f) { return f.omega_max; },
                               [](const ConstantLine&) { return kInfinity; },
                               [](const Tabulated& t) { return t.omega.back(); }},
                    spec_);
}

bool FormFactor::finite_support() const { return std::isfinite(support_min()) && std::isfinite(support_max()); }

bool FormFactor::inside(double x) const { return x > support_min() && x < support_max(); }

double FormFactor::g_sq(double x) const {
  return std::visit(overloaded{[x](const FlatInterval& f) { return (x >= f.omega_g && x <= f.omega_max) ? f.g0_sq : 0.0; },
                               [](const ConstantLine& c) { return c.gamma / (2.0 * kPi); },
                               [x](const Tabulated& t) { return tabulated_value(t, x); }},
                    spec_);
}

double FormFactor::total_weight() const {
  return std::visit(overloaded{[](const FlatInterval& f) { return f.g0_sq * (f.omega_max - f.omega_g); },
                               [](const ConstantLine& c) { return c.gamma > 0.0 ? kInfinity : 0.0; },
                               [](const Tabulated& t) {
                                 double s = 0.0;
                                 for (std::size_t i = 0; i + 1 < t.omega.size(); ++i)
                                   s += 0.5 * (t.g_sq[i] + t.g_sq[i + 1]) * (t.omega[i + 1] - t.omega[i]);
                                 return s;
                               }},
                    spec_);
}

FormFactor FormFactor::scaled(double factor) const {
  return std::visit(overloaded{[factor](const FlatInterval& f) {
                                 return flat_interval(f.g0_sq * factor, f.omega_g, f.omega_max);
                               },
                               [factor](const ConstantLine& c) { return constant_line(c.gamma * factor); },
                               [factor](const Tabulated& t) {
                                 std::vector<double> g = t.g_sq;
                                 for (double& v : g) v *= factor;
                                 return tabulated(t.omega, std::move(g));
                               }},
                    spec_);
}

complex self_energy_quadrature(const FormFactor& ff, complex e) {
  if (!ff.finite_support())
    throw Error(ErrorKind::InvalidInput, "direct quadrature needs a finite support");
  if (on_cut(ff, e)) throw Error(ErrorKind::Boundary, "E lies on the cut; use boundary_values");
  std::vector<double> b = breakpoints(ff, e.real());
  // Resolve the Lorentzian-like peak of width |Im E| next to the cut.
  for (double k : {1.0, 10.0, 100.0})
    for (double side : {-1.0, 1.0}) {
      const double w = e.real() + side * k * std::abs(e.imag());
      if (w > b.front() && w < b.back()) b.push_back(w);
    }
  std::sort(b.begin(), b.end());
  auto integrand = [&](double w) { return ff.g_sq(w) / (e - w); };
  quadrature::Settings s;
  s.absolute = 1e-15 * ff.total_weight() / std::max(std::abs(e.imag()), 1e-300);
  return quadrature::integrate_pieces(integrand, b, s);
}

SelfEnergyValue self_energy(const FormFactor& ff, complex e, Sheet sheet) {
  if (!std::isfinite(e.real()) || !std::isfinite(e.imag())) throw Error(ErrorKind::InvalidInput, "E must be finite");
  if (sheet == Sheet::Second) return second_sheet(ff, e);
  if (on_cut(ff, e)) {
    std::ostringstream msg;
    msg << "E = " << e.real() << " lies on the cut [" << ff.support_min() << ", " << ff.support_max()
        << "]; use boundary_values for x +/- i0";
    throw Error(ErrorKind::Boundary, msg.str());
  }
  const complex value = std::visit(
      overloaded{[e](const FlatInterval& f) { return flat_closed_form(f, e); },
                 [e](const ConstantLine& c) {
                   return complex(0.0, e.imag() > 0.0 ? -0.5 * c.gamma : 0.5 * c.gamma);
                 },
                 [&ff, e](const Tabulated&) { return self_energy_quadrature(ff, e); }},
      ff.spec());
  return {e, Sheet::First, value};
}

double principal_value(const FormFactor& ff, double x) {
  if (!ff.inside(x)) {
    std::ostringstream msg;
    msg << "x = " << x << " is not strictly inside the support [" << ff.support_min() << ", "
        << ff.support_max() << "]";
    throw Error(ErrorKind::Endpoint, msg.str());
  }
  return std::visit(
      overloaded{[x](const FlatInterval& f) { return f.g0_sq * std::log((x - f.omega_g) / (f.omega_max - x)); },
                 [](const ConstantLine&) { return 0.0; },
                 [&ff, x](const Tabulated&) {
                   // P int g^2/(x-w) = int (g^2(w) - g^2(x))/(x-w) dw + g^2(x) log|(x-a)/(b-x)|
                   const double gx = ff.g_sq(x);
                   auto regular = [&](double w) { return (ff.g_sq(w) - gx) / (x - w); };
                   const std::vector<double> b = breakpoints(ff, x);
                   quadrature::Settings s;
                   s.absolute = 1e-14 * ff.total_weight();
                   const double smooth = quadrature::integrate_pieces(regular, b, s);
                   return smooth + gx * std::log((x - ff.support_min()) / (ff.support_max() - x));
                 }},
      ff.spec());
}

std::pair<complex, complex> boundary_values(const FormFactor& ff, double x) {
  const double pv = principal_value(ff, x);
  const double jump = kPi * ff.g_sq(x);
  return {complex(pv, -jump), complex(pv, jump)};
}

SelfEnergyValue second_sheet(const FormFactor& ff, complex e) {
  if (e.imag() > 0.0) throw Error(ErrorKind::Domain, "second-sheet evaluation needs Im E <= 0");
  return std::visit(
      overloaded{[e](const FlatInterval& f) {
                   // On the real axis take the lower lip so the result continues Sigma(x + i0).
                   const complex below(e.real(), e.imag() == 0.0 ? -0.0 : e.imag());
                   if (below == complex(f.omega_g, -0.0) || below == complex(f.omega_max, -0.0))
                     throw Error(ErrorKind::Endpoint, "second sheet is singular at the branch points");
                   const complex v = flat_closed_form(f, below) - 2.0 * kPi * kI * f.g0_sq;
                   return SelfEnergyValue{e, Sheet::Second, v};
                 },
                 [e](const ConstantLine& c) { return SelfEnergyValue{e, Sheet::Second, complex(0.0, -0.5 * c.gamma)}; },
                 [](const Tabulated&) -> SelfEnergyValue {
                   throw Error(ErrorKind::UnsupportedContinuation,
                               "tabulated form factors have no analytic continuation to the second sheet");
                 }},
      ff.spec());
}

complex second_sheet_derivative(const FormFactor& ff, complex e) {
  const double h = 1e-6 * std::max(1.0, std::abs(e));
  const complex plus = second_sheet(ff, e + h).value;
  const complex minus = second_sheet(ff, e - h).value;
  return (plus - minus) / (2.0 * h);
}

PoleSolution find_pole(const FormFactor& ff, double omega0, const PoleOptions& opt) {
  if (!std::isfinite(omega0) || !ff.inside(omega0)) {
    std::ostringstream msg;
    msg << "omega0 = " << omega0 << " must lie strictly inside the support [" << ff.support_min() << ", "
        << ff.support_max() << "]";
    throw Error(ErrorKind::InvalidInput, msg.str());
  }
  const double g2 = ff.g_sq(omega0);
  if (!(g2 > 0.0)) throw Error(ErrorKind::Regime, "g^2(omega0) = 0: no decay channel, the level is stationary");
  // Tabulated data is refused here by second_sheet.
  const double box = ff.finite_support() ? ff.support_max() - ff.support_min() : kInfinity;

  auto residual_of = [&](complex e) { return e - omega0 - second_sheet(ff, e).value; };
  auto escaped = [&](complex e) { return !(e.imag() < 0.0) || std::abs(e.imag()) > box || !std::isfinite(e.real()); };

  std::vector<complex> trajectory;
  complex e(omega0, -kPi * g2);
  trajectory.push_back(e);
  std::string method = "damped fixed point";
  int it = 0;
  double res = std::abs(residual_of(e));
  for (; it < opt.max_iterations && res > opt.residual_target; ++it) {
    const complex target = omega0 + second_sheet(ff, e).value;
    e = (1.0 - opt.damping) * e + opt.damping * target;
    trajectory.push_back(e);
    if (escaped(e)) break;
    res = std::abs(residual_of(e));
  }

  if (escaped(e) || res > opt.accept_residual) {
    // Secant iteration on the residual.
    method = "secant";
    complex e0(omega0, -kPi * g2);
    complex e1 = e0 + complex(0.0, -1e-3 * kPi * g2);
    complex r0 = residual_of(e0);
    complex r1 = residual_of(e1);
    for (it = 0; it < opt.max_iterations; ++it) {
      if (r1 == r0) break;
      const complex e2 = e1 - r1 * (e1 - e0) / (r1 - r0);
      e0 = e1;
      r0 = r1;
      e1 = e2;
      trajectory.push_back(e1);
      if (escaped(e1)) break;
      r1 = residual_of(e1);
      if (std::abs(r1) <= opt.residual_target) break;
    }
    e = e1;
    res = escaped(e) ? kInfinity : std::abs(residual_of(e));
  }

  if (escaped(e)) {
    std::ostringstream msg;
    msg << "pole search left the search box (Im E must lie in [-" << box << ", 0)); last iterate "
        << e.real() << (e.imag() < 0 ? " - " : " + ") << std::abs(e.imag()) << "i";
    throw Error(ErrorKind::Regime, msg.str());
  }
  if (!(res <= opt.accept_residual)) {
    std::ostringstream msg;
    msg << "pole search did not converge (residual " << res << "); trajectory:";
    const std::size_t first = trajectory.size() > 8 ? trajectory.size() - 8 : 0;
    for (std::size_t i = first; i < trajectory.size(); ++i)
      msg << " (" << trajectory[i].real() << ", " << trajectory[i].imag() << ")";
    throw Error(ErrorKind::NumericFailure, msg.str());
  }

  PoleSolution p;
  p.e_pole = e;
  p.omega0 = omega0;
  p.delta_omega0 = e.real() - omega0;
  p.gamma = -2.0 * e.imag();
  p.sigma_derivative = second_sheet_derivative(ff, e);
  p.z = 1.0 / std::norm(1.0 - p.sigma_derivative);
  p.residual = res;
  p.iterations = it;
  p.method = method;
  p.form_factor = ff;
  return p;
}

GoldenRule golden_rule(const FormFactor& ff, double omega0) {
  GoldenRule g;
  if (!ff.inside(omega0)) {
    std::ostringstream msg;
    msg << "omega0 = " << omega0 << " is outside the support; no on-shell decay channel";
    g.notice = msg.str();
    return g;
  }
  g.gamma = 2.0 * kPi * ff.g_sq(omega0);
  return g;
}

ContinuumZenoTime zeno_time_continuum(const FormFactor& ff) {
  ContinuumZenoTime z;
  const double w = ff.total_weight();
  if (std::isinf(w)) {
    z.divergent = true;
    z.tau = 0.0;
  } else if (w > 0.0) {
    z.tau = 1.0 / std::sqrt(w);
  }
  return z;
}

complex weisskopf_wigner_amplitude(const PoleSolution& pole, double t) {
  if (t < 0.0) throw Error(ErrorKind::InvalidInput, "t must be >= 0");
  return std::exp(-kI * pole.e_pole * t);
}

std::optional<std::string> first_sheet_warning(const FormFactor& ff, double omega0) {
  if (!ff.finite_support()) return std::nullopt;
  const double width = ff.support_max() - ff.support_min();
  const double probe = ff.support_min() - 1e-6 * width;
  const double sigma = std::abs(self_energy(ff, complex(probe, 0.0), Sheet::First).value);
  if (sigma < omega0 - ff.support_min()) return std::nullopt;
  std::ostringstream msg;
  msg << "|Sigma(omega_g)| ~ " << sigma << " >= omega0 - omega_g = " << omega0 - ff.support_min()
      << "; a first-sheet bound state may carry weight";
  return msg.str();
}

}  // namespace zenolab
