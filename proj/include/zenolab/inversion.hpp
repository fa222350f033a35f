#pragma once

// Survival amplitude of a level coupled to a continuum, rebuilt from the
// resolvent. Collapsing the Bromwich line onto the cut gives
//
//   A(t) = int S(x) e^{-i x t} dx,
//   S(x) = (i / 2 pi) [G(x + i0) - G(x - i0)],  G(E) = 1 / (E - w0 - Sigma(E)).
//
// With Sigma(x +/- i0) = Delta(x) -/+ i pi g^2(x) this is
//
//   S(x) = g^2(x) / [(x - w0 - Delta(x))^2 + (pi g^2(x))^2],
//
// a non-negative density whose integral is A(0) = 1 when no first-sheet pole
// carries weight.

#include <optional>
#include <vector>

#include "zenolab/kernels.hpp"
#include "zenolab/resolvent.hpp"

namespace zenolab {

class SpectralDensity {
 public:
  const FormFactor& form_factor() const noexcept { return ff_; }
  double omega0() const noexcept { return omega0_; }
  /// int S dx by adaptive quadrature.
  double normalization() const noexcept { return normalization_; }
  const std::optional<std::string>& warning() const noexcept { return warning_; }

  double operator()(double x) const;
  /// Integral of S over [lo, hi] (clipped to the support).
  double mass(double lo, double hi) const;

 private:
  friend SpectralDensity spectral_density(const FormFactor&, double);
  SpectralDensity(FormFactor ff, double omega0) : ff_(std::move(ff)), omega0_(omega0) {}

  FormFactor ff_;
  double omega0_;
  double normalization_ = 0.0;
  std::optional<std::string> warning_;
};

/// Throws a consistency error when |int S - 1| > 1e-3.
SpectralDensity spectral_density(const FormFactor& ff, double omega0);

struct SurvivalSeries {
  std::vector<double> times;
  std::vector<complex> amplitude;
  std::vector<double> probability;
  std::optional<std::vector<complex>> pole_part;
  std::optional<std::vector<complex>> cut_part;
};

struct InversionOptions {
  int nodes_per_panel = 6;
  std::size_t max_panels = 4'000'000;
  Backend backend = Backend::OpenMP;
};

/// A(t) = int S(x) e^{-ixt} dx by fixed-panel Gauss-Legendre quadrature with
/// panel width <= pi / (4 t_max).
SurvivalSeries survival_from_spectrum(const SpectralDensity& sd, const std::vector<double>& times,
                                      const InversionOptions& options = {});

/// Adds pole_part = e^{-i E_pole t} / (1 - Sigma_II'(E_pole)) and
/// cut_part = A - pole_part to an existing series.
void decompose(const SpectralDensity& sd, const PoleSolution& pole, SurvivalSeries& series);
SurvivalSeries decompose(const SpectralDensity& sd, const PoleSolution& pole, const std::vector<double>& times,
                         const InversionOptions& options = {});

struct FitWindow {
  double t_begin = 0.0;
  double t_end = 0.0;
  std::size_t points = 0;
  double rms_residual = 0.0;
};

struct RegimeFit {
  double zeno_coefficient = 0.0;  // 1 - p ~ c t^2
  double zeno_time = 0.0;         // c^{-1/2}
  double exp_rate = 0.0;
  double z_fit = 0.0;
  double power_exponent = 0.0;
  double t_zeno_end = 0.0;
  double t_power_start = 0.0;
  FitWindow zeno_window;
  FitWindow exp_window;
  FitWindow power_window;
};

struct RegimeOptions {
  double zeno_fraction = 0.1;        // quadratic window t <= fraction * tau_Z
  double dominance_ratio = 0.05;     // |cut|/|pole| for the exponential window and its mirror for the tail
  std::size_t tail_bins = 16;
  std::size_t min_points_per_bin = 8;
};

/// Quadratic, exponential and power-law fits of a decomposed series.
RegimeFit fit_regimes(const SurvivalSeries& series, const RegimeOptions& options = {});

/// |p_exact(t) - Z e^{-gamma t}|.
std::vector<double> weisskopf_wigner_error(const SurvivalSeries& series, const PoleSolution& pole);
std::vector<double> weisskopf_wigner_error(const SpectralDensity& sd, const PoleSolution& pole,
                                           const std::vector<double>& times, const InversionOptions& options = {});

/// Least-squares line y = slope x + intercept.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace zenolab
