#include <doctest.h>

#include <cmath>
#include <numbers>

#include "zenolab/discrete_oracle.hpp"
#include "zenolab/inversion.hpp"

using namespace zenolab;

namespace {

FormFactor reference() { return FormFactor::flat_interval(0.01, 0.0, 1.0); }

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

// Fine near t = 0, covering the exponential stretch and several decades of tail.
std::vector<double> regime_times() {
  std::vector<double> t;
  for (int i = 0; i <= 200; ++i) t.push_back(0.005 * i);
  for (double s = 1.01; s < 1000.0; s += 0.25) t.push_back(s);
  for (double s = 1000.0; s <= 4000.0; s += 0.5) t.push_back(s);
  return t;
}

struct Reference {
  SpectralDensity sd = spectral_density(reference(), 0.5);
  PoleSolution pole = find_pole(reference(), 0.5);
  SurvivalSeries series = decompose(sd, pole, regime_times());
};

const Reference& shared() {
  static const Reference r;
  return r;
}

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidInput;
}

}  // namespace

TEST_CASE("spectral density") {
  const auto& sd = shared().sd;
  CHECK(std::abs(sd.normalization() - 1.0) <= 1e-6);
  CHECK_FALSE(sd.warning().has_value());
  for (double x : linspace(1e-9, 1.0 - 1e-9, 2001)) CHECK(sd(x) >= 0.0);
  CHECK(sd(-0.1) == 0.0);
  CHECK(sd(1.1) == 0.0);
  CHECK(sd.mass(-5.0, 5.0) == doctest::Approx(sd.normalization()).epsilon(1e-14));

  const auto& pole = shared().pole;
  double best_x = 0.0;
  double best = 0.0;
  double worst_gap = 0.0;
  const double g = pole.gamma;
  auto lorentzian = [&](double x) {
    const double d = x - pole.omega0 - pole.delta_omega0;
    return (g / (2.0 * std::numbers::pi)) / (d * d + 0.25 * g * g);
  };
  for (double x : linspace(0.5 - 5.0 * g, 0.5 + 5.0 * g, 4001)) {
    if (sd(x) > best) {
      best = sd(x);
      best_x = x;
    }
    worst_gap = std::max(worst_gap, std::abs(sd(x) - lorentzian(x)));
  }
  CHECK(std::abs(best_x - 0.5) <= 1e-3);
  MESSAGE("max |S - Lorentzian| / peak = " << worst_gap / lorentzian(0.5));
  CHECK(worst_gap <= 0.06 * lorentzian(0.5));
}

TEST_CASE("narrow line concentrates near the level") {
  const auto ff = FormFactor::flat_interval(1e-4, 0.0, 1.0);
  const auto sd = spectral_density(ff, 0.5);
  const double g = golden_rule(ff, 0.5).gamma;
  auto lorentz_mass = [](double half_widths) { return 2.0 * std::atan(half_widths) / std::numbers::pi; };
  CHECK(lorentz_mass(10.0) == doctest::Approx(0.937).epsilon(1e-3));
  const double within_10_gamma = sd.mass(0.5 - 10.0 * g, 0.5 + 10.0 * g);
  CHECK(within_10_gamma >= 0.9);
  CHECK(within_10_gamma == doctest::Approx(lorentz_mass(20.0)).epsilon(0.01));
  CHECK(sd.mass(0.5 - 5.0 * g, 0.5 + 5.0 * g) == doctest::Approx(lorentz_mass(10.0)).epsilon(0.01));
}

TEST_CASE("spectral density preconditions") {
  CHECK(kind_of([] { spectral_density(FormFactor::constant_line(1.0), 0.0); }) == ErrorKind::InvalidInput);
  CHECK(kind_of([] { spectral_density(reference(), 1.2); }) == ErrorKind::InvalidInput);
  // A bound state split off below threshold takes weight away from the continuum.
  CHECK(kind_of([] { spectral_density(FormFactor::flat_interval(0.05, 0.0, 1.0), 0.02); }) == ErrorKind::Consistency);
}

TEST_CASE("inverted amplitude") {
  const auto& sd = shared().sd;
  const auto s = survival_from_spectrum(sd, {0.0, 0.5});
  CHECK(std::abs(s.amplitude[0] - 1.0) <= 1e-6);
  CHECK(s.probability[0] == doctest::Approx(std::norm(s.amplitude[0])).epsilon(1e-15));

  const double tz = zeno_time_continuum(reference()).tau;
  CHECK(s.times[1] == doctest::Approx(0.05 * tz));
  CHECK((1.0 - s.probability[1]) / (0.5 * 0.5) == doctest::Approx(1.0 / (tz * tz)).epsilon(0.02));

  for (double p : shared().series.probability) {
    CHECK(p >= 0.0);
    CHECK(p <= 1.0 + 1e-6);
  }

  const auto times = linspace(0.0, 300.0, 601);
  const auto serial = survival_from_spectrum(sd, times, {.backend = Backend::Serial});
  const auto parallel = survival_from_spectrum(sd, times, {.backend = Backend::OpenMP});
  double diff = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) diff = std::max(diff, std::abs(serial.amplitude[i] - parallel.amplitude[i]));
  CHECK(diff < 1e-12);

  const auto brute = DiscretizedContinuum(reference(), 0.5, 4000).amplitude(times);
  double sup = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) sup = std::max(sup, std::abs(brute[i] - parallel.amplitude[i]));
  MESSAGE("sup |A - A_4000| on [0, 300] = " << sup);
  CHECK(sup <= 1e-3);

  const auto eight = survival_from_spectrum(sd, times, {.nodes_per_panel = 8});
  for (std::size_t i = 0; i < times.size(); i += 50) CHECK(std::abs(eight.amplitude[i] - parallel.amplitude[i]) < 1e-6);

  CHECK(kind_of([&] { survival_from_spectrum(sd, {1e9}, {.max_panels = 1000}); }) == ErrorKind::Resolution);
  CHECK(kind_of([&] { survival_from_spectrum(sd, {-1.0}); }) == ErrorKind::InvalidInput);
  CHECK(kind_of([&] { survival_from_spectrum(sd, {1.0}, {.nodes_per_panel = 7}); }) == ErrorKind::InvalidInput);
}

TEST_CASE("pole and cut decomposition") {
  const auto& r = shared();
  const auto& s = r.series;
  REQUIRE(s.pole_part.has_value());
  REQUIRE(s.cut_part.has_value());
  CHECK(std::norm((*s.pole_part)[0]) == doctest::Approx(r.pole.z).epsilon(1e-6));
  double worst = 0.0;
  for (std::size_t i = 0; i < s.times.size(); ++i)
    worst = std::max(worst, std::abs(s.amplitude[i] - (*s.pole_part)[i] - (*s.cut_part)[i]));
  CHECK(worst <= 1e-12);

  const double g = r.pole.gamma;
  double max_ratio = 0.0;
  double crossover = -1.0;
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    const double ratio = std::abs((*s.cut_part)[i]) / std::abs((*s.pole_part)[i]);
    if (s.times[i] >= 2.0 / g && s.times[i] <= 8.0 / g) max_ratio = std::max(max_ratio, ratio);
    if (crossover < 0.0 && ratio > 1.0 && s.times[i] > 8.0 / g) crossover = s.times[i];
    if (s.times[i] >= 100.0 / g) CHECK(ratio > 1.0);
  }
  MESSAGE("max |cut|/|pole| on [2/gamma, 8/gamma] = " << max_ratio << ", crossover at t = " << crossover
                                                      << " = " << crossover * g << " / gamma");
  CHECK(max_ratio <= 0.05);
  CHECK(crossover > 0.0);

  const auto other = find_pole(reference(), 0.4);
  SurvivalSeries copy = s;
  CHECK(kind_of([&] { decompose(r.sd, other, copy); }) == ErrorKind::InvalidInput);
  CHECK(kind_of([&] { decompose(r.sd, find_pole(reference().scaled(2.0), 0.5), copy); }) == ErrorKind::InvalidInput);
}

TEST_CASE("three decay regimes") {
  const auto& r = shared();
  const auto fit = fit_regimes(r.series);
  MESSAGE("zeno c = " << fit.zeno_coefficient << ", gamma_fit = " << fit.exp_rate << ", Z_fit = " << fit.z_fit
                      << ", power = " << fit.power_exponent);
  CHECK(fit.exp_rate == doctest::Approx(r.pole.gamma).epsilon(0.02));
  CHECK(fit.z_fit == doctest::Approx(r.pole.z).epsilon(0.02));
  CHECK(fit.zeno_coefficient == doctest::Approx(reference().total_weight()).epsilon(0.02));
  CHECK(fit.zeno_time == doctest::Approx(1.0 / std::sqrt(fit.zeno_coefficient)));
  CHECK(fit.power_exponent == doctest::Approx(-2.0).epsilon(0.075));

  CHECK(fit.zeno_window.t_end < fit.exp_window.t_begin);
  CHECK(fit.exp_window.t_end < fit.power_window.t_begin);
  CHECK(fit.t_zeno_end == fit.zeno_window.t_end);
  CHECK(fit.t_power_start == fit.power_window.t_begin);
  CHECK(fit.zeno_window.t_end <= 0.1 * zeno_time_continuum(reference()).tau * 1.05);
  CHECK(fit.exp_window.points >= 3);

  const double golden = golden_rule(reference(), 0.5).gamma;
  for (double a : {golden, r.pole.gamma, fit.exp_rate})
    for (double b : {golden, r.pole.gamma, fit.exp_rate}) CHECK(std::abs(a - b) <= 0.05 * std::max(a, b));
}

TEST_CASE("regime fitter reports missing regimes") {
  const auto& r = shared();
  auto prefix = [&](std::size_t n) {
    SurvivalSeries s;
    s.times.assign(r.series.times.begin(), r.series.times.begin() + static_cast<long>(n));
    s.amplitude.assign(r.series.amplitude.begin(), r.series.amplitude.begin() + static_cast<long>(n));
    s.probability.assign(r.series.probability.begin(), r.series.probability.begin() + static_cast<long>(n));
    s.pole_part = std::vector<complex>(r.series.pole_part->begin(), r.series.pole_part->begin() + static_cast<long>(n));
    s.cut_part = std::vector<complex>(r.series.cut_part->begin(), r.series.cut_part->begin() + static_cast<long>(n));
    return s;
  };
  CHECK(kind_of([&] { fit_regimes(prefix(900)); }) == ErrorKind::Window);
  SurvivalSeries bare = r.series;
  bare.cut_part.reset();
  CHECK(kind_of([&] { fit_regimes(bare); }) == ErrorKind::Window);
  SurvivalSeries coarse = decompose(r.sd, r.pole, linspace(5.0, 4000.0, 400));
  CHECK(kind_of([&] { fit_regimes(coarse); }) == ErrorKind::Window);
}

TEST_CASE("Weisskopf-Wigner deviation") {
  const auto& r = shared();
  const auto err = weisskopf_wigner_error(r.series, r.pole);
  CHECK(err[0] == doctest::Approx(std::abs(1.0 - r.pole.z)).epsilon(1e-5));
  const double g = r.pole.gamma;
  for (std::size_t i = 0; i < err.size(); ++i) {
    const double t = r.series.times[i];
    const double pole = std::norm((*r.series.pole_part)[i]);
    const double ratio = std::abs((*r.series.cut_part)[i]) / std::abs((*r.series.pole_part)[i]);
    CHECK(pole == doctest::Approx(r.pole.z * std::exp(-g * t)).epsilon(1e-9));
    CHECK(err[i] <= (2.0 * ratio + ratio * ratio) * pole * (1.0 + 1e-9) + 1e-15);
    if (t >= 1.0 / g && t <= 5.0 / g) CHECK(err[i] <= 0.03 * r.series.probability[i]);
    if (t >= 150.0 / g) CHECK(err[i] == doctest::Approx(r.series.probability[i]).epsilon(1e-3));
  }

  const double t5 = 5.0 / r.pole.gamma;
  const auto at5 = survival_from_spectrum(r.sd, {t5}).probability[0];
  const double ww = std::norm(weisskopf_wigner_amplitude(r.pole, t5));
  MESSAGE("t = 5/gamma: p = " << at5 << ", |A_WW|^2 = " << ww << ", Z |A_WW|^2 = " << r.pole.z * ww);
  CHECK(std::abs(r.pole.z * ww - at5) <= 0.03 * at5);
  CHECK(at5 / ww == doctest::Approx(r.pole.z).epsilon(0.03));

  const auto direct = weisskopf_wigner_error(r.sd, r.pole, {t5});
  CHECK(direct[0] == doctest::Approx(std::abs(at5 - r.pole.z * ww)).epsilon(1e-12));
}

TEST_CASE("line fit") {
  const auto f = fit_line({0.0, 1.0, 2.0}, {1.0, 3.0, 5.0});
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.rms_residual == doctest::Approx(0.0));
  CHECK(kind_of([] { fit_line({1.0}, {1.0}); }) == ErrorKind::Window);
  CHECK(kind_of([] { fit_line({1.0, 1.0}, {1.0, 2.0}); }) == ErrorKind::Window);
}
