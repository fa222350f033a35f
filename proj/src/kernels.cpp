#include "zenolab/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace zenolab::kernels {

namespace {

constexpr complex kI{0.0, 1.0};

// Static partition of [0, n) for thread `t` of `nt`.
inline void chunk(std::size_t n, int t, int nt, std::size_t& lo, std::size_t& hi) {
  const std::size_t base = n / static_cast<std::size_t>(nt);
  const std::size_t extra = n % static_cast<std::size_t>(nt);
  const auto ut = static_cast<std::size_t>(t);
  lo = ut * base + std::min(ut, extra);
  hi = lo + base + (ut < extra ? 1 : 0);
}

// Deterministic parallel sum: per-thread partials over a static partition,
// combined in thread order. Identical thread counts give identical bits.
template <class Body>
complex ordered_sum(std::size_t n, Body&& body) {
  const int max_threads = omp_get_max_threads();
  std::vector<complex> partial(static_cast<std::size_t>(max_threads), complex(0.0, 0.0));
  int used = 1;
#pragma omp parallel
  {
    const int t = omp_get_thread_num();
    const int nt = omp_get_num_threads();
#pragma omp single
    used = nt;
    std::size_t lo = 0;
    std::size_t hi = 0;
    chunk(n, t, nt, lo, hi);
    complex acc(0.0, 0.0);
    for (std::size_t k = lo; k < hi; ++k) acc += body(k);
    partial[static_cast<std::size_t>(t)] = acc;
  }
  complex total(0.0, 0.0);
  for (int t = 0; t < used; ++t) total += partial[static_cast<std::size_t>(t)];
  return total;
}

double secular_value(double l, double e0, std::span<const double> level, std::span<const double> c,
                     double* derivative) {
  double f = l - e0;
  double df = 1.0;
  for (std::size_t j = 0; j < level.size(); ++j) {
    const double inv = 1.0 / (l - level[j]);
    const double c2 = c[j] * c[j];
    f -= c2 * inv;
    df += c2 * inv * inv;
  }
  if (derivative != nullptr) *derivative = df;
  return f;
}

// Safeguarded Newton on a bracket [lo, hi] where f(lo) < 0 < f(hi).
double secular_root_in(double lo, double hi, double e0, std::span<const double> level,
                       std::span<const double> c) {
  double l = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    double df = 0.0;
    const double f = secular_value(l, e0, level, c, &df);
    if (f == 0.0) return l;
    if (f < 0.0)
      lo = l;
    else
      hi = l;
    double next = l - f / df;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double tol = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(next));
    if (std::abs(next - l) <= tol || hi - lo <= tol) return next;
    l = next;
  }
  return l;
}

void secular_one(std::size_t r, double e0, std::span<const double> level, std::span<const double> c,
                 std::span<double> root, std::span<double> weight) {
  const std::size_t n = level.size();
  double lo = 0.0;
  double hi = 0.0;
  double c2sum = 0.0;
  for (double cj : c) c2sum += cj * cj;
  const double reach = std::abs(e0) + std::sqrt(c2sum) + 1.0;
  if (r == 0) {
    hi = std::nextafter(level[0], -std::numeric_limits<double>::infinity());
    lo = std::min(e0, level[0]) - reach;
    while (secular_value(lo, e0, level, c, nullptr) >= 0.0) lo -= 2.0 * (hi - lo);
  } else if (r == n) {
    lo = std::nextafter(level[n - 1], std::numeric_limits<double>::infinity());
    hi = std::max(e0, level[n - 1]) + reach;
    while (secular_value(hi, e0, level, c, nullptr) <= 0.0) hi += 2.0 * (hi - lo);
  } else {
    lo = std::nextafter(level[r - 1], std::numeric_limits<double>::infinity());
    hi = std::nextafter(level[r], -std::numeric_limits<double>::infinity());
  }
  const double l = secular_root_in(lo, hi, e0, level, c);
  double df = 1.0;
  secular_value(l, e0, level, c, &df);
  root[r] = l;
  weight[r] = 1.0 / df;
}

}  // namespace

void field_rk4_step_serial(const FieldCoefficients& c, complex& x, complex& y, std::span<complex> z,
                           double dt, std::vector<complex>& work) {
  const std::size_t n = z.size();
  work.resize(2 * n);
  complex* acc = work.data();
  complex* tmp = work.data() + n;
  const double gw = c.coupling * c.spacing;
  const double h = dt;

  complex s0(0.0, 0.0);
  for (std::size_t k = 0; k < n; ++k) s0 += z[k];
  const complex k1x = -kI * c.omega * y;
  const complex k1y = -kI * (c.omega * x + gw * s0);

  complex s1(0.0, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const complex f = -kI * (c.mode_frequency[k] * z[k] + c.coupling * y);
    acc[k] = f;
    tmp[k] = z[k] + 0.5 * h * f;
    s1 += tmp[k];
  }
  const complex x2 = x + 0.5 * h * k1x;
  const complex y2 = y + 0.5 * h * k1y;
  const complex k2x = -kI * c.omega * y2;
  const complex k2y = -kI * (c.omega * x2 + gw * s1);

  complex s2(0.0, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const complex f = -kI * (c.mode_frequency[k] * tmp[k] + c.coupling * y2);
    acc[k] += 2.0 * f;
    tmp[k] = z[k] + 0.5 * h * f;
    s2 += tmp[k];
  }
  const complex x3 = x + 0.5 * h * k2x;
  const complex y3 = y + 0.5 * h * k2y;
  const complex k3x = -kI * c.omega * y3;
  const complex k3y = -kI * (c.omega * x3 + gw * s2);

  complex s3(0.0, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const complex f = -kI * (c.mode_frequency[k] * tmp[k] + c.coupling * y3);
    acc[k] += 2.0 * f;
    tmp[k] = z[k] + h * f;
    s3 += tmp[k];
  }
  const complex x4 = x + h * k3x;
  const complex y4 = y + h * k3y;
  const complex k4x = -kI * c.omega * y4;
  const complex k4y = -kI * (c.omega * x4 + gw * s3);

  for (std::size_t k = 0; k < n; ++k) {
    const complex f = -kI * (c.mode_frequency[k] * tmp[k] + c.coupling * y4);
    z[k] += (h / 6.0) * (acc[k] + f);
  }
  x += (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
  y += (h / 6.0) * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
}

void field_rk4_step_omp(const FieldCoefficients& c, complex& x, complex& y, std::span<complex> z,
                        double dt, std::vector<complex>& work) {
  const std::size_t n = z.size();
  work.resize(2 * n);
  complex* acc = work.data();
  complex* tmp = work.data() + n;
  const double gw = c.coupling * c.spacing;
  const double h = dt;
  const double* w = c.mode_frequency.data();
  complex* zp = z.data();

  const complex s0 = ordered_sum(n, [&](std::size_t k) { return zp[k]; });
  const complex k1x = -kI * c.omega * y;
  const complex k1y = -kI * (c.omega * x + gw * s0);

  const complex y1 = y;
  const complex s1 = ordered_sum(n, [&](std::size_t k) {
    const complex f = -kI * (w[k] * zp[k] + c.coupling * y1);
    acc[k] = f;
    tmp[k] = zp[k] + 0.5 * h * f;
    return tmp[k];
  });
  const complex x2 = x + 0.5 * h * k1x;
  const complex y2 = y + 0.5 * h * k1y;
  const complex k2x = -kI * c.omega * y2;
  const complex k2y = -kI * (c.omega * x2 + gw * s1);

  const complex s2 = ordered_sum(n, [&](std::size_t k) {
    const complex f = -kI * (w[k] * tmp[k] + c.coupling * y2);
    acc[k] += 2.0 * f;
    tmp[k] = zp[k] + 0.5 * h * f;
    return tmp[k];
  });
  const complex x3 = x + 0.5 * h * k2x;
  const complex y3 = y + 0.5 * h * k2y;
  const complex k3x = -kI * c.omega * y3;
  const complex k3y = -kI * (c.omega * x3 + gw * s2);

  const complex s3 = ordered_sum(n, [&](std::size_t k) {
    const complex f = -kI * (w[k] * tmp[k] + c.coupling * y3);
    acc[k] += 2.0 * f;
    tmp[k] = zp[k] + h * f;
    return tmp[k];
  });
  const complex x4 = x + h * k3x;
  const complex y4 = y + h * k3y;
  const complex k4x = -kI * c.omega * y4;
  const complex k4y = -kI * (c.omega * x4 + gw * s3);

  const auto sn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < sn; ++k) {
    const complex f = -kI * (w[k] * tmp[k] + c.coupling * y4);
    zp[k] += (h / 6.0) * (acc[k] + f);
  }
  x += (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
  y += (h / 6.0) * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
}

double mode_norm2_serial(std::span<const complex> z, double spacing) {
  double s = 0.0;
  for (const complex& zk : z) s += std::norm(zk);
  return s * spacing;
}

double mode_norm2_omp(std::span<const complex> z, double spacing) {
  const complex s = ordered_sum(z.size(), [&](std::size_t k) { return complex(std::norm(z[k]), 0.0); });
  return s.real() * spacing;
}

void fourier_sum_serial(std::span<const double> node, std::span<const double> weight,
                        std::span<const double> times, std::span<complex> out) {
  for (std::size_t i = 0; i < times.size(); ++i) {
    complex acc(0.0, 0.0);
    for (std::size_t j = 0; j < node.size(); ++j) acc += weight[j] * std::exp(-kI * (node[j] * times[i]));
    out[i] = acc;
  }
}

void fourier_sum_omp(std::span<const double> node, std::span<const double> weight,
                     std::span<const double> times, std::span<complex> out) {
  const auto nt = static_cast<std::ptrdiff_t>(times.size());
  const std::size_t n = node.size();
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < nt; ++i) {
    const double t = times[static_cast<std::size_t>(i)];
    double re = 0.0;
    double im = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double phase = node[j] * t;
      re += weight[j] * std::cos(phase);
      im -= weight[j] * std::sin(phase);
    }
    out[static_cast<std::size_t>(i)] = complex(re, im);
  }
}

void memory_convolution_serial(std::span<const double> mode_frequency, std::span<const complex> y,
                               std::span<const double> w, double dt, std::span<complex> out) {
  const std::size_t m = y.size() - 1;
  for (std::size_t k = 0; k < mode_frequency.size(); ++k) {
    complex acc(0.0, 0.0);
    for (std::size_t j = 0; j <= m; ++j) {
      const double lag = static_cast<double>(m - j) * dt;
      acc += w[j] * y[j] * std::exp(-kI * (mode_frequency[k] * lag));
    }
    out[k] = acc;
  }
}

void memory_convolution_omp(std::span<const double> mode_frequency, std::span<const complex> y,
                            std::span<const double> w, double dt, std::span<complex> out) {
  const std::size_t m = y.size() - 1;
  const auto nk = static_cast<std::ptrdiff_t>(mode_frequency.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < nk; ++k) {
    // Horner form: acc <- acc * e^{-i w dt} + w_j y_j.
    const complex step = std::exp(-kI * (mode_frequency[static_cast<std::size_t>(k)] * dt));
    complex acc(0.0, 0.0);
    for (std::size_t j = 0; j <= m; ++j) acc = acc * step + w[j] * y[j];
    out[static_cast<std::size_t>(k)] = acc;
  }
}

void secular_roots_serial(double e0, std::span<const double> level, std::span<const double> coupling,
                          std::span<double> root, std::span<double> weight) {
  for (std::size_t r = 0; r <= level.size(); ++r) secular_one(r, e0, level, coupling, root, weight);
}

void secular_roots_omp(double e0, std::span<const double> level, std::span<const double> coupling,
                       std::span<double> root, std::span<double> weight) {
  const auto nr = static_cast<std::ptrdiff_t>(level.size() + 1);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t r = 0; r < nr; ++r)
    secular_one(static_cast<std::size_t>(r), e0, level, coupling, root, weight);
}

void field_rk4_step(Backend b, const FieldCoefficients& c, complex& x, complex& y, std::span<complex> z,
                    double dt, std::vector<complex>& work) {
  if (b == Backend::Serial)
    field_rk4_step_serial(c, x, y, z, dt, work);
  else
    field_rk4_step_omp(c, x, y, z, dt, work);
}

double mode_norm2(Backend b, std::span<const complex> z, double spacing) {
  return b == Backend::Serial ? mode_norm2_serial(z, spacing) : mode_norm2_omp(z, spacing);
}

void fourier_sum(Backend b, std::span<const double> node, std::span<const double> weight,
                 std::span<const double> times, std::span<complex> out) {
  if (b == Backend::Serial)
    fourier_sum_serial(node, weight, times, out);
  else
    fourier_sum_omp(node, weight, times, out);
}

void memory_convolution(Backend b, std::span<const double> mode_frequency, std::span<const complex> y,
                        std::span<const double> w, double dt, std::span<complex> out) {
  if (b == Backend::Serial)
    memory_convolution_serial(mode_frequency, y, w, dt, out);
  else
    memory_convolution_omp(mode_frequency, y, w, dt, out);
}

void secular_roots(Backend b, double e0, std::span<const double> level, std::span<const double> coupling,
                   std::span<double> root, std::span<double> weight) {
  if (b == Backend::Serial)
    secular_roots_serial(e0, level, coupling, root, weight);
  else
    secular_roots_omp(e0, level, coupling, root, weight);
}

}  // namespace zenolab::kernels
