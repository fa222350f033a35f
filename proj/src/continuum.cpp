#include "zenolab/continuum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "zenolab/measurement.hpp"

namespace zenolab {

FieldModel::FieldModel(double omega, double gamma, double half_width, long modes, double dt)
    : omega_(omega), gamma_(gamma), half_width_(half_width), modes_(modes), dt_(dt) {
  for (double v : {omega, gamma, half_width, dt})
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidInput, "field model parameters must be finite");
  if (gamma < 0.0) throw Error(ErrorKind::InvalidInput, "Gamma must be >= 0");
  if (!(half_width > 0.0)) throw Error(ErrorKind::InvalidInput, "window half-width W must be > 0");
  if (modes < 2) throw Error(ErrorKind::InvalidInput, "field model needs n >= 2 modes");
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidInput, "dt must be > 0");
}

double FieldModel::coupling() const { return std::sqrt(gamma_ / (2.0 * std::numbers::pi)); }

double FieldModel::mode_coupling() const {
  return std::sqrt(gamma_ * spacing() / (2.0 * std::numbers::pi));
}

std::vector<double> FieldModel::mode_frequencies() const {
  std::vector<double> w(static_cast<std::size_t>(modes_));
  const double dw = spacing();
  for (long k = 0; k < modes_; ++k) w[static_cast<std::size_t>(k)] = -half_width_ + dw * static_cast<double>(k);
  w.back() = half_width_;
  return w;
}

double FieldState::norm2(double spacing) const {
  return std::norm(x) + std::norm(y) + kernels::mode_norm2_serial(z, spacing);
}

FieldSeries simulate_field(const FieldModel& model, const FieldRunOptions& options) {
  if (!(options.total_time > 0.0)) throw Error(ErrorKind::InvalidInput, "total time T must be > 0");
  const double fastest = std::max({model.half_width(), std::abs(model.omega()), model.gamma()});
  if (model.dt() * fastest > kFieldResolutionLimit) {
    std::ostringstream msg;
    msg << "resolution guard violated: dt*max(W, Omega, Gamma) = " << model.dt() << "*" << fastest
        << " = " << model.dt() * fastest << " > " << kFieldResolutionLimit;
    throw Error(ErrorKind::Configuration, msg.str());
  }

  const long steps = static_cast<long>(std::ceil(options.total_time / model.dt() - 1e-9));
  const double dt = options.total_time / static_cast<double>(steps);
  const std::vector<double> freq = model.mode_frequencies();
  const kernels::FieldCoefficients coeff{model.omega(), model.coupling(), model.spacing(), freq};

  std::vector<long> snap_steps;
  for (double ts : options.snapshot_times) {
    if (ts < 0.0 || ts > options.total_time * (1.0 + 1e-12))
      throw Error(ErrorKind::InvalidInput, "snapshot time outside [0, T]");
    snap_steps.push_back(std::clamp(static_cast<long>(std::lround(ts / dt)), 0L, steps));
  }
  std::sort(snap_steps.begin(), snap_steps.end());
  snap_steps.erase(std::unique(snap_steps.begin(), snap_steps.end()), snap_steps.end());

  FieldSeries series;
  series.dt = dt;
  const auto count = static_cast<std::size_t>(steps + 1);
  series.t.reserve(count);
  series.x.reserve(count);
  series.y.reserve(count);
  series.norm2.reserve(count);

  FieldState state;
  state.z.assign(freq.size(), complex(0.0, 0.0));
  std::vector<complex> work;
  std::size_t next_snap = 0;

  for (long s = 0;; ++s) {
    state.t = static_cast<double>(s) * dt;
    series.t.push_back(state.t);
    series.x.push_back(state.x);
    series.y.push_back(state.y);
    series.norm2.push_back(std::norm(state.x) + std::norm(state.y) +
                           kernels::mode_norm2(options.backend, state.z, model.spacing()));
    if (next_snap < snap_steps.size() && snap_steps[next_snap] == s) {
      series.snapshot_step.push_back(s);
      series.snapshot.push_back(state);
      ++next_snap;
    }
    if (s == steps) break;
    kernels::field_rk4_step(options.backend, coeff, state.x, state.y, state.z, dt, work);
  }
  return series;
}

std::pair<complex, complex> reduced_dynamics(double omega, double gamma, double t) {
  if (!std::isfinite(gamma) || gamma < 0.0) throw Error(ErrorKind::InvalidInput, "Gamma must be finite and >= 0");
  const TwoLevelAbsorptive sys(omega, gamma / 4.0);
  return {absorptive_amplitude(sys, t), absorptive_lower_amplitude(sys, t)};
}

namespace {

// Composite Simpson weights on m intervals of width h; an odd interval count
// closes with the 3/8 rule over the last three intervals.
std::vector<double> simpson_weights(std::size_t m, double h) {
  std::vector<double> w(m + 1, 0.0);
  if (m == 0) return w;
  if (m == 1) {
    w[0] = w[1] = 0.5 * h;
    return w;
  }
  std::size_t simpson_end = m;
  if (m % 2 == 1) {
    simpson_end = m - 3;
    const double c = 3.0 * h / 8.0;
    w[m - 3] += c;
    w[m - 2] += 3.0 * c;
    w[m - 1] += 3.0 * c;
    w[m] += c;
  }
  for (std::size_t j = 0; j + 2 <= simpson_end; j += 2) {
    w[j] += h / 3.0;
    w[j + 1] += 4.0 * h / 3.0;
    w[j + 2] += h / 3.0;
  }
  return w;
}

}  // namespace

MemoryKernelReport memory_kernel_check(const FieldModel& model, const FieldSeries& series, Backend backend) {
  if (series.snapshot.empty()) throw Error(ErrorKind::InvalidInput, "series carries no mode snapshots");
  const std::vector<double> freq = model.mode_frequencies();
  const double fastest = std::abs(freq.front()) > std::abs(freq.back()) ? std::abs(freq.front()) : std::abs(freq.back());
  if (fastest * series.dt > kMemoryQuadratureLimit) {
    std::ostringstream msg;
    msg << "series too coarse for the memory-kernel quadrature: max|w| dt = " << fastest * series.dt
        << " > " << kMemoryQuadratureLimit;
    throw Error(ErrorKind::Resolution, msg.str());
  }

  MemoryKernelReport report;
  const complex prefactor = -kI * model.coupling();
  std::vector<complex> rebuilt(freq.size());
  for (std::size_t s = 0; s < series.snapshot.size(); ++s) {
    const auto m = static_cast<std::size_t>(series.snapshot_step[s]);
    const FieldState& state = series.snapshot[s];
    if (m == 0) {
      for (const complex& zk : state.z) report.max_abs_residual = std::max(report.max_abs_residual, std::abs(zk));
      continue;
    }
    if (m < 2) throw Error(ErrorKind::Resolution, "snapshot needs at least two steps of y history");
    const std::vector<double> w = simpson_weights(m, series.dt);
    const std::span<const complex> history(series.y.data(), m + 1);
    kernels::memory_convolution(backend, freq, history, w, series.dt, rebuilt);
    for (std::size_t k = 0; k < freq.size(); ++k) {
      const double r = std::abs(prefactor * rebuilt[k] - state.z[k]);
      report.max_abs_z = std::max(report.max_abs_z, std::abs(state.z[k]));
      if (r > report.max_abs_residual) {
        report.max_abs_residual = r;
        report.worst_time = state.t;
        report.worst_frequency = freq[k];
      }
    }
  }
  return report;
}

}  // namespace zenolab
