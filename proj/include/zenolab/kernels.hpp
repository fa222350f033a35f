#pragma once

// Data-parallel inner loops. Every kernel has a serial reference
// implementation and an OpenMP implementation with identical semantics; the
// tests compare the two and bench/ times them.

#include <complex>
#include <span>
#include <vector>

namespace zenolab {

enum class Backend { Serial, OpenMP };

namespace kernels {

using complex = std::complex<double>;

/// Flat-coupled field: x, y and n mode densities z_k at frequencies omega_k.
///   dx/dt = -i Omega y
///   dy/dt = -i (Omega x + g dw sum_k z_k)
///   dz_k/dt = -i (omega_k z_k + g y)
struct FieldCoefficients {
  double omega;
  double coupling;  // g = sqrt(Gamma / 2 pi)
  double spacing;   // dw
  std::span<const double> mode_frequency;
};

/// One classical RK4 step of the field equations, in place. `work` is
/// resized as needed and may be reused between calls.
void field_rk4_step_serial(const FieldCoefficients& c, complex& x, complex& y, std::span<complex> z,
                           double dt, std::vector<complex>& work);
void field_rk4_step_omp(const FieldCoefficients& c, complex& x, complex& y, std::span<complex> z,
                        double dt, std::vector<complex>& work);

/// sum_k |z_k|^2 dw
double mode_norm2_serial(std::span<const complex> z, double spacing);
double mode_norm2_omp(std::span<const complex> z, double spacing);

/// out[i] = sum_j weight[j] exp(-i node[j] t[i])
void fourier_sum_serial(std::span<const double> node, std::span<const double> weight,
                        std::span<const double> times, std::span<complex> out);
void fourier_sum_omp(std::span<const double> node, std::span<const double> weight,
                     std::span<const double> times, std::span<complex> out);

/// out[k] = sum_j w[j] y[j] exp(-i omega_k (m - j) dt) for j = 0..m, with
/// m = y.size() - 1. This is the quadrature of the field memory kernel.
void memory_convolution_serial(std::span<const double> mode_frequency, std::span<const complex> y,
                               std::span<const double> w, double dt, std::span<complex> out);
void memory_convolution_omp(std::span<const double> mode_frequency, std::span<const complex> y,
                            std::span<const double> w, double dt, std::span<complex> out);

/// Roots of the arrow-matrix secular equation
///   f(l) = l - e0 - sum_j c_j^2 / (l - e_j) = 0
/// for strictly increasing e_j: one below e_0, one in each gap, one above
/// e_{n-1}. Also returns the overlap |<0|l>|^2 = 1 / f'(l).
void secular_roots_serial(double e0, std::span<const double> level, std::span<const double> coupling,
                          std::span<double> root, std::span<double> weight);
void secular_roots_omp(double e0, std::span<const double> level, std::span<const double> coupling,
                       std::span<double> root, std::span<double> weight);

// Dispatch helpers.
void field_rk4_step(Backend b, const FieldCoefficients& c, complex& x, complex& y, std::span<complex> z,
                    double dt, std::vector<complex>& work);
double mode_norm2(Backend b, std::span<const complex> z, double spacing);
void fourier_sum(Backend b, std::span<const double> node, std::span<const double> weight,
                 std::span<const double> times, std::span<complex> out);
void memory_convolution(Backend b, std::span<const double> mode_frequency, std::span<const complex> y,
                        std::span<const double> w, double dt, std::span<complex> out);
void secular_roots(Backend b, double e0, std::span<const double> level, std::span<const double> coupling,
                   std::span<double> root, std::span<double> weight);

}  // namespace kernels
}  // namespace zenolab
