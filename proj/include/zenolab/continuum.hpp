#pragma once

// Two-level system coupled to a flat one-dimensional continuum (rotating-wave
// approximation), truncated to the window [-W, W] and discretized on n modes.

#include <utility>
#include <vector>

#include "zenolab/kernels.hpp"
#include "zenolab/qdyn.hpp"

namespace zenolab {

class FieldModel {
 public:
  FieldModel(double omega, double gamma, double half_width, long modes, double dt);

  double omega() const noexcept { return omega_; }
  double gamma() const noexcept { return gamma_; }
  double half_width() const noexcept { return half_width_; }
  long modes() const noexcept { return modes_; }
  double dt() const noexcept { return dt_; }

  /// Mode spacing 2W / (n - 1).
  double spacing() const noexcept { return 2.0 * half_width_ / static_cast<double>(modes_ - 1); }
  /// Flat coupling density g = sqrt(Gamma / 2 pi).
  double coupling() const;
  /// Coupling of one normalized discrete mode, sqrt(Gamma dw / 2 pi).
  double mode_coupling() const;
  std::vector<double> mode_frequencies() const;

 private:
  double omega_;
  double gamma_;
  double half_width_;
  long modes_;
  double dt_;
};

/// x |+> + y |-> + sum_k z_k dw |w_k>, with z stored as a density.
struct FieldState {
  complex x{1.0, 0.0};
  complex y{0.0, 0.0};
  std::vector<complex> z;
  double t = 0.0;

  double norm2(double spacing) const;
};

struct FieldRunOptions {
  double total_time = 0.0;
  /// Times at which the full mode vector is kept (rounded to the step grid).
  std::vector<double> snapshot_times;
  Backend backend = Backend::OpenMP;
};

/// Step-resolved history of a run. x, y and the total norm are kept at every
/// step; full states only at the requested snapshots.
struct FieldSeries {
  double dt = 0.0;  // step actually used (total_time / steps)
  std::vector<double> t;
  std::vector<complex> x;
  std::vector<complex> y;
  std::vector<double> norm2;
  std::vector<long> snapshot_step;
  std::vector<FieldState> snapshot;
};

/// Integrates the field equations from x = 1, y = z = 0 with fixed-step RK4.
/// Throws a configuration error when dt * max(W, Omega, Gamma) > 0.1.
FieldSeries simulate_field(const FieldModel& model, const FieldRunOptions& options);

/// Exact evolution under [[0, Omega], [Omega, -i Gamma / 2]] from (1, 0).
std::pair<complex, complex> reduced_dynamics(double omega, double gamma, double t);

struct MemoryKernelReport {
  double max_abs_residual = 0.0;
  double max_abs_z = 0.0;
  double worst_time = 0.0;
  double worst_frequency = 0.0;
};

/// Rebuilds each z_k at every snapshot from the stored y history,
/// z(w, t) = -i g int_0^t e^{-i w (t - s)} y(s) ds, by composite Simpson
/// quadrature on the step grid, and compares with the integrated modes.
MemoryKernelReport memory_kernel_check(const FieldModel& model, const FieldSeries& series,
                                       Backend backend = Backend::OpenMP);

inline constexpr double kFieldResolutionLimit = 0.1;
/// Largest max|w_k| dt accepted by the memory-kernel quadrature.
inline constexpr double kMemoryQuadratureLimit = 0.5;

}  // namespace zenolab
