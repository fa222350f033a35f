#pragma once

// Brute-force reference for the continuum model: the level w0 coupled to N
// discrete levels w_j with real couplings g_j,
//
//   H = w0 |+><+| + sum_j w_j |j><j| + sum_j g_j (|+><j| + |j><+|),
//
// with w_j on a midpoint grid of the support and g_j = sqrt(g^2(w_j) dw).
// Its spectrum follows from the secular equation of the arrow matrix, so the
// survival amplitude is sum_l |<+|l>|^2 e^{-i l t} without any resolvent
// machinery.

#include <vector>

#include "zenolab/kernels.hpp"
#include "zenolab/resolvent.hpp"

namespace zenolab {

class DiscretizedContinuum {
 public:
  DiscretizedContinuum(const FormFactor& ff, double omega0, std::size_t modes);
  DiscretizedContinuum(double omega0, std::vector<double> level, std::vector<double> coupling);

  double omega0() const noexcept { return omega0_; }
  const std::vector<double>& level() const noexcept { return level_; }
  const std::vector<double>& coupling() const noexcept { return coupling_; }

  /// (N+1)x(N+1) Hamiltonian, first row/column the discrete level.
  Eigen::MatrixXd dense() const;

  struct Spectrum {
    std::vector<double> eigenvalue;
    std::vector<double> overlap;  // |<+|l>|^2
  };
  Spectrum spectrum(Backend backend = Backend::OpenMP) const;

  std::vector<complex> amplitude(const std::vector<double>& times, Backend backend = Backend::OpenMP) const;

 private:
  double omega0_;
  std::vector<double> level_;
  std::vector<double> coupling_;
};

}  // namespace zenolab
