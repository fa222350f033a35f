#include "zenolab/discrete_oracle.hpp"

#include <cmath>

namespace zenolab {

DiscretizedContinuum::DiscretizedContinuum(const FormFactor& ff, double omega0, std::size_t modes)
    : omega0_(omega0) {
  if (!ff.finite_support()) throw Error(ErrorKind::InvalidInput, "discretization needs a finite support");
  if (modes < 1) throw Error(ErrorKind::InvalidInput, "discretization needs at least one mode");
  const double a = ff.support_min();
  const double dw = (ff.support_max() - a) / static_cast<double>(modes);
  level_.resize(modes);
  coupling_.resize(modes);
  for (std::size_t j = 0; j < modes; ++j) {
    level_[j] = a + (static_cast<double>(j) + 0.5) * dw;
    coupling_[j] = std::sqrt(ff.g_sq(level_[j]) * dw);
  }
}

DiscretizedContinuum::DiscretizedContinuum(double omega0, std::vector<double> level, std::vector<double> coupling)
    : omega0_(omega0), level_(std::move(level)), coupling_(std::move(coupling)) {
  if (level_.empty() || level_.size() != coupling_.size())
    throw Error(ErrorKind::InvalidInput, "levels and couplings must be non-empty and of equal length");
  for (std::size_t j = 1; j < level_.size(); ++j)
    if (!(level_[j] > level_[j - 1])) throw Error(ErrorKind::InvalidInput, "levels must be strictly increasing");
}

Eigen::MatrixXd DiscretizedContinuum::dense() const {
  const auto n = static_cast<Eigen::Index>(level_.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n + 1, n + 1);
  h(0, 0) = omega0_;
  for (Eigen::Index j = 0; j < n; ++j) {
    h(j + 1, j + 1) = level_[static_cast<std::size_t>(j)];
    h(0, j + 1) = h(j + 1, 0) = coupling_[static_cast<std::size_t>(j)];
  }
  return h;
}

DiscretizedContinuum::Spectrum DiscretizedContinuum::spectrum(Backend backend) const {
  Spectrum s;
  s.eigenvalue.resize(level_.size() + 1);
  s.overlap.resize(level_.size() + 1);
  kernels::secular_roots(backend, omega0_, level_, coupling_, s.eigenvalue, s.overlap);
  return s;
}

std::vector<complex> DiscretizedContinuum::amplitude(const std::vector<double>& times, Backend backend) const {
  const Spectrum s = spectrum(backend);
  std::vector<complex> out(times.size());
  kernels::fourier_sum(backend, s.eigenvalue, s.overlap, times, out);
  return out;
}

}  // namespace zenolab
