#pragma once

// Finite-dimensional dynamics: dense complex operators, propagators, survival
// amplitudes and the energy moments that fix the Zeno time. Units with hbar = 1.

#include <complex>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "zenolab/error.hpp"

namespace zenolab {

using complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr complex kI{0.0, 1.0};

/// Numerical thresholds used by qdyn. Defaults are the module constants; a
/// scenario may override them.
struct Tolerances {
  double unit_norm = 1e-12;   // |norm^2 - 1| for freshly built states
  double hermiticity = 1e-12; // relative to max |entry|
  double series_residual = 1e-13;
  int max_series_terms = 60;
};

class StateVector {
 public:
  explicit StateVector(CVector components);
  StateVector(std::initializer_list<complex> components);

  /// Builds a state and checks that it is normalized within `tol.unit_norm`.
  static StateVector normalized(CVector components, const Tolerances& tol = {});
  /// The canonical basis vector e_index.
  static StateVector basis(Eigen::Index dim, Eigen::Index index);

  Eigen::Index dim() const noexcept { return components_.size(); }
  const CVector& components() const noexcept { return components_; }
  double norm2() const { return components_.squaredNorm(); }
  complex operator[](Eigen::Index i) const { return components_(i); }

 private:
  CVector components_;
};

class OperatorMatrix {
 public:
  /// Declares hermiticity explicitly; a `true` flag is verified.
  OperatorMatrix(CMatrix entries, bool hermitian, const Tolerances& tol = {});

  /// Detects hermiticity from the entries at `tol.hermiticity`.
  static OperatorMatrix detect(CMatrix entries, const Tolerances& tol = {});
  static OperatorMatrix zero(Eigen::Index dim);
  static OperatorMatrix identity(Eigen::Index dim);

  Eigen::Index dim() const noexcept { return entries_.rows(); }
  const CMatrix& entries() const noexcept { return entries_; }
  bool hermitian() const noexcept { return hermitian_; }

  OperatorMatrix operator+(const OperatorMatrix& other) const;
  OperatorMatrix operator-(const OperatorMatrix& other) const;
  OperatorMatrix scaled(complex factor) const;

 private:
  CMatrix entries_;
  bool hermitian_;
};

// Pauli operators in the {|+>, |->} basis; sigma_3 |+> = |+>.
OperatorMatrix sigma1();
OperatorMatrix sigma2();
OperatorMatrix sigma3();

/// Returns H - i V * Identity (scalar optical potential).
OperatorMatrix with_scalar_optical_potential(const OperatorMatrix& h, double v);

struct MomentReport {
  complex mean;
  complex second_moment;
  complex variance;
  double zeno_time;  // +infinity when the variance vanishes
};

/// exp(-i H t). Hermitian inputs use the spectral decomposition, anything
/// else scaling-and-squaring on a truncated Taylor series.
OperatorMatrix propagator(const OperatorMatrix& h, double t, const Tolerances& tol = {});

/// exp(-i H t) psi without forming the adjoint-applied overlap.
StateVector evolve(const OperatorMatrix& h, const StateVector& psi, double t,
                   const Tolerances& tol = {});

complex survival_amplitude(const OperatorMatrix& h, const StateVector& psi0, double t,
                           const Tolerances& tol = {});
double survival_probability(const OperatorMatrix& h, const StateVector& psi0, double t,
                            const Tolerances& tol = {});

MomentReport moments(const OperatorMatrix& h, const StateVector& psi0,
                     const Tolerances& tol = {});

struct ShortTimeRow {
  double dt;
  double one_minus_p;
  double quadratic;  // dt^2 / tau_Z^2
  double residual;   // |one_minus_p - quadratic|
};

struct ShortTimeReport {
  std::vector<ShortTimeRow> rows;
  double fitted_c;  // least-squares C in residual ~ C dt^4
  double zeno_time;
};

/// Tabulates 1 - p(dt) against dt^2/tau_Z^2. Requires a hermitian generator.
ShortTimeReport short_time_check(const OperatorMatrix& h, const StateVector& psi0,
                                 std::span<const double> dts, const Tolerances& tol = {});

/// Random hermitian matrix with entries drawn from a fixed-seed generator.
OperatorMatrix random_hermitian(Eigen::Index dim, std::uint64_t seed);
/// Random normalized state from a fixed-seed generator.
StateVector random_state(Eigen::Index dim, std::uint64_t seed);

}  // namespace zenolab
