#include "zenolab/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "zenolab/quadrature.hpp"

namespace zenolab {

namespace {

constexpr double kPi = std::numbers::pi;

// Full Gauss-Legendre rule on [-1, 1] from boost's half-rule tables.
template <int N>
void gauss_rule(std::vector<double>& x, std::vector<double>& w) {
  using rule = boost::math::quadrature::gauss<double, N>;
  const auto& a = rule::abscissa();
  const auto& wt = rule::weights();
  x.clear();
  w.clear();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) {
      x.push_back(0.0);
      w.push_back(wt[i]);
    } else {
      x.push_back(a[i]);
      w.push_back(wt[i]);
      x.push_back(-a[i]);
      w.push_back(wt[i]);
    }
  }
}

void legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  switch (n) {
    case 4: gauss_rule<4>(x, w); break;
    case 5: gauss_rule<5>(x, w); break;
    case 6: gauss_rule<6>(x, w); break;
    case 8: gauss_rule<8>(x, w); break;
    case 10: gauss_rule<10>(x, w); break;
    default: throw Error(ErrorKind::InvalidInput, "nodes_per_panel must be one of 4, 5, 6, 8, 10");
  }
}

double on_shell_width(const FormFactor& ff, double omega0) { return 2.0 * kPi * ff.g_sq(omega0); }

}  // namespace

double SpectralDensity::operator()(double x) const {
  if (!ff_.inside(x)) return 0.0;
  const double g2 = ff_.g_sq(x);
  if (g2 == 0.0) return 0.0;
  const double detuning = x - omega0_ - principal_value(ff_, x);
  const double width = kPi * g2;
  return g2 / (detuning * detuning + width * width);
}

double SpectralDensity::mass(double lo, double hi) const {
  lo = std::max(lo, ff_.support_min());
  hi = std::min(hi, ff_.support_max());
  if (!(hi > lo)) return 0.0;
  std::vector<double> b{lo, hi};
  const double g = on_shell_width(ff_, omega0_);
  for (double c : {omega0_ - 10.0 * g, omega0_ - g, omega0_, omega0_ + g, omega0_ + 10.0 * g})
    if (c > lo && c < hi) b.push_back(c);
  if (const auto* t = std::get_if<Tabulated>(&ff_.spec()))
    for (double c : t->omega)
      if (c > lo && c < hi) b.push_back(c);
  std::sort(b.begin(), b.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < b.size(); ++i)
    if (b[i + 1] > b[i])
      total += quadrature::integrate_endpoint_singular([this](double x) { return (*this)(x); }, b[i], b[i + 1]);
  return total;
}

SpectralDensity spectral_density(const FormFactor& ff, double omega0) {
  if (!ff.finite_support())
    throw Error(ErrorKind::InvalidInput, "spectral inversion needs a form factor with finite support");
  if (!ff.inside(omega0)) {
    std::ostringstream msg;
    msg << "omega0 = " << omega0 << " must be embedded in the continuum (" << ff.support_min() << ", "
        << ff.support_max() << ")";
    throw Error(ErrorKind::InvalidInput, msg.str());
  }
  SpectralDensity sd(ff, omega0);
  sd.warning_ = first_sheet_warning(ff, omega0);
  sd.normalization_ = sd.mass(ff.support_min(), ff.support_max());
  if (std::abs(sd.normalization_ - 1.0) > 1e-3) {
    std::ostringstream msg;
    msg << "spectral density integrates to " << sd.normalization_
        << " (expected 1): first-sheet pole or quadrature failure";
    throw Error(ErrorKind::Consistency, msg.str());
  }
  return sd;
}

SurvivalSeries survival_from_spectrum(const SpectralDensity& sd, const std::vector<double>& times,
                                      const InversionOptions& options) {
  double t_max = 0.0;
  for (double t : times) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw Error(ErrorKind::InvalidInput, "times must be finite and >= 0");
    t_max = std::max(t_max, t);
  }
  const FormFactor& ff = sd.form_factor();
  const double a = ff.support_min();
  const double b = ff.support_max();
  const double width = b - a;

  // Resolve both the oscillation and the resonance line.
  double h = width / 256.0;
  const double line = on_shell_width(ff, sd.omega0());
  if (line > 0.0) h = std::min(h, line / 16.0);
  if (t_max > 0.0) h = std::min(h, kPi / (4.0 * t_max));
  const double panels_real = std::ceil(width / h);
  if (panels_real > static_cast<double>(options.max_panels)) {
    std::ostringstream msg;
    msg << "t_max = " << t_max << " needs " << panels_real << " panels (cap " << options.max_panels
        << "); use the regime fitter's asymptotic tail instead";
    throw Error(ErrorKind::Resolution, msg.str());
  }
  const auto panels = static_cast<std::size_t>(panels_real);
  h = width / static_cast<double>(panels);

  std::vector<double> gx;
  std::vector<double> gw;
  legendre(options.nodes_per_panel, gx, gw);
  std::vector<double> node;
  std::vector<double> weight;
  node.reserve(panels * gx.size());
  weight.reserve(panels * gx.size());
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = a + h * static_cast<double>(p);
    const double mid = lo + 0.5 * h;
    for (std::size_t q = 0; q < gx.size(); ++q) {
      const double x = mid + 0.5 * h * gx[q];
      node.push_back(x);
      weight.push_back(0.5 * h * gw[q] * sd(x));
    }
  }

  SurvivalSeries s;
  s.times = times;
  s.amplitude.resize(times.size());
  kernels::fourier_sum(options.backend, node, weight, times, s.amplitude);
  s.probability.resize(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) s.probability[i] = std::norm(s.amplitude[i]);
  return s;
}

void decompose(const SpectralDensity& sd, const PoleSolution& pole, SurvivalSeries& series) {
  if (!(pole.form_factor == sd.form_factor()) || pole.omega0 != sd.omega0())
    throw Error(ErrorKind::InvalidInput, "pole solution and spectral density describe different models");
  const complex residue = 1.0 / (1.0 - pole.sigma_derivative);
  std::vector<complex> pole_part(series.times.size());
  std::vector<complex> cut_part(series.times.size());
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    pole_part[i] = residue * std::exp(-kI * pole.e_pole * series.times[i]);
    cut_part[i] = series.amplitude[i] - pole_part[i];
  }
  series.pole_part = std::move(pole_part);
  series.cut_part = std::move(cut_part);
}

SurvivalSeries decompose(const SpectralDensity& sd, const PoleSolution& pole, const std::vector<double>& times,
                         const InversionOptions& options) {
  SurvivalSeries s = survival_from_spectrum(sd, times, options);
  decompose(sd, pole, s);
  return s;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  if (x.size() < 2) throw Error(ErrorKind::Window, "line fit needs at least two points");
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw Error(ErrorKind::Window, "line fit needs distinct abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.slope * x[i] + f.intercept);
    ss += r * r;
  }
  f.rms_residual = std::sqrt(ss / n);
  return f;
}

RegimeFit fit_regimes(const SurvivalSeries& series, const RegimeOptions& opt) {
  const std::vector<double>& t = series.times;
  const std::vector<double>& p = series.probability;
  const std::size_t n = t.size();
  if (n < 3) throw Error(ErrorKind::Window, "series too short for a regime fit");
  for (std::size_t i = 1; i < n; ++i)
    if (!(t[i] > t[i - 1])) throw Error(ErrorKind::InvalidInput, "regime fit needs a strictly increasing time grid");
  if (!series.pole_part || !series.cut_part)
    throw Error(ErrorKind::Window, "exponential regime needs the pole/cut decomposition");
  const std::vector<complex>& pole = *series.pole_part;
  const std::vector<complex>& cut = *series.cut_part;

  RegimeFit fit;

  // Quadratic region: first pass on 1 - p <= fraction^2, then t <= fraction * tau_Z.
  auto zeno_fit = [&](auto&& keep) {
    std::vector<double> x;
    std::vector<double> y;
    std::size_t last = 0;
    for (std::size_t i = 0; i < n && keep(i); ++i) {
      x.push_back(t[i] * t[i]);
      y.push_back(1.0 - p[i]);
      last = i;
    }
    if (x.size() < 3)
      throw Error(ErrorKind::Window, "series does not resolve the quadratic (Zeno) region: need t << tau_Z");
    return std::pair{fit_line(x, y), last};
  };
  const double frac = opt.zeno_fraction;
  auto [first, first_last] = zeno_fit([&](std::size_t i) { return 1.0 - p[i] <= frac * frac; });
  (void)first_last;
  if (!(first.slope > 0.0)) throw Error(ErrorKind::Window, "no quadratic decay found at short times");
  const double tz_guess = 1.0 / std::sqrt(first.slope);
  auto [quad, quad_last] = zeno_fit([&](std::size_t i) { return t[i] <= frac * tz_guess; });
  if (!(quad.slope > 0.0)) throw Error(ErrorKind::Window, "no quadratic decay found at short times");
  fit.zeno_coefficient = quad.slope;
  fit.zeno_time = 1.0 / std::sqrt(quad.slope);
  fit.t_zeno_end = t[quad_last];
  fit.zeno_window = {t[0], t[quad_last], quad_last + 1, quad.rms_residual};

  // Exponential region: longest run after the Zeno window with |cut| < ratio |pole|.
  std::size_t best_lo = 0;
  std::size_t best_len = 0;
  for (std::size_t i = quad_last + 1; i < n;) {
    if (std::abs(cut[i]) < opt.dominance_ratio * std::abs(pole[i]) && p[i] > 0.0) {
      std::size_t j = i;
      while (j < n && std::abs(cut[j]) < opt.dominance_ratio * std::abs(pole[j]) && p[j] > 0.0) ++j;
      if (j - i > best_len) {
        best_lo = i;
        best_len = j - i;
      }
      i = j;
    } else {
      ++i;
    }
  }
  if (best_len < 3) throw Error(ErrorKind::Window, "no exponential window where the pole dominates the cut");
  {
    std::vector<double> x;
    std::vector<double> y;
    for (std::size_t i = best_lo; i < best_lo + best_len; ++i) {
      x.push_back(t[i]);
      y.push_back(std::log(p[i]));
    }
    const LineFit lf = fit_line(x, y);
    fit.exp_rate = -lf.slope;
    fit.z_fit = std::exp(lf.intercept);
    fit.exp_window = {t[best_lo], t[best_lo + best_len - 1], best_len, lf.rms_residual};
  }
  const std::size_t exp_end = best_lo + best_len;

  // Power-law tail: from the first point after which |pole| < ratio * (running
  // maximum of |cut| over the remaining series) holds to the end.
  std::vector<double> cut_suffix_max(n, 0.0);
  for (std::size_t i = n; i-- > 0;)
    cut_suffix_max[i] = std::max(std::abs(cut[i]), i + 1 < n ? cut_suffix_max[i + 1] : 0.0);
  std::size_t tail_lo = n;
  for (std::size_t i = n; i-- > exp_end;) {
    if (std::abs(pole[i]) < opt.dominance_ratio * cut_suffix_max[i])
      tail_lo = i;
    else
      break;
  }
  if (tail_lo >= n) throw Error(ErrorKind::Window, "series does not reach the power-law tail");
  fit.t_power_start = t[tail_lo];

  // Oscillations in the tail are averaged over geometric bins of equal ratio.
  const double lo = t[tail_lo];
  const double hi = t[n - 1];
  if (!(hi > lo) || !(lo > 0.0)) throw Error(ErrorKind::Window, "power-law tail window is empty");
  const std::size_t bins = opt.tail_bins;
  const double ratio = std::pow(hi / lo, 1.0 / static_cast<double>(bins));
  std::vector<double> lx;
  std::vector<double> ly;
  std::size_t i = tail_lo;
  for (std::size_t k = 0; k < bins; ++k) {
    const double edge = (k + 1 == bins) ? hi * (1.0 + 1e-12) : lo * std::pow(ratio, static_cast<double>(k + 1));
    double sum = 0.0;
    std::size_t count = 0;
    while (i < n && t[i] < edge) {
      sum += p[i];
      ++count;
      ++i;
    }
    if (count >= opt.min_points_per_bin && sum > 0.0) {
      const double centre = lo * std::pow(ratio, static_cast<double>(k) + 0.5);
      lx.push_back(std::log(centre));
      ly.push_back(std::log(sum / static_cast<double>(count)));
    }
  }
  if (lx.size() < 4) throw Error(ErrorKind::Window, "power-law tail is too sparsely sampled for binning");
  const LineFit tail = fit_line(lx, ly);
  fit.power_exponent = tail.slope;
  fit.power_window = {lo, hi, n - tail_lo, tail.rms_residual};
  return fit;
}

std::vector<double> weisskopf_wigner_error(const SurvivalSeries& series, const PoleSolution& pole) {
  std::vector<double> err(series.times.size());
  for (std::size_t i = 0; i < err.size(); ++i)
    err[i] = std::abs(series.probability[i] - pole.z * std::exp(-pole.gamma * series.times[i]));
  return err;
}

std::vector<double> weisskopf_wigner_error(const SpectralDensity& sd, const PoleSolution& pole,
                                           const std::vector<double>& times, const InversionOptions& options) {
  if (!(pole.form_factor == sd.form_factor()) || pole.omega0 != sd.omega0())
    throw Error(ErrorKind::InvalidInput, "pole solution and spectral density describe different models");
  return weisskopf_wigner_error(survival_from_spectrum(sd, times, options), pole);
}

}  // namespace zenolab
