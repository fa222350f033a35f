#include "zenolab/qdyn.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace zenolab {

namespace {

bool all_finite(const CMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
  return true;
}

double hermiticity_defect(const CMatrix& m) {
  const double scale = m.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() / scale;
}

double norm1(const CMatrix& m) { return m.cwiseAbs().colwise().sum().maxCoeff(); }

void require_unit_norm(const StateVector& psi) {
  if (std::abs(psi.norm2() - 1.0) > 1e-10) {
    std::ostringstream msg;
    msg << "initial state must be unit-norm, got norm^2 = " << psi.norm2();
    throw Error(ErrorKind::InvalidInput, msg.str());
  }
}

void require_same_dim(const OperatorMatrix& h, const StateVector& psi) {
  if (h.dim() != psi.dim()) {
    std::ostringstream msg;
    msg << "dimension mismatch: operator is " << h.dim() << "x" << h.dim() << ", state has "
        << psi.dim() << " components";
    throw Error(ErrorKind::InvalidInput, msg.str());
  }
}

CMatrix exp_hermitian(const CMatrix& h, double t) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(h);
  if (eig.info() != Eigen::Success)
    throw Error(ErrorKind::NumericFailure, "hermitian eigendecomposition did not converge");
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  CVector phases(lambda.size());
  for (Eigen::Index k = 0; k < lambda.size(); ++k) phases(k) = std::exp(-kI * (lambda(k) * t));
  const CMatrix& v = eig.eigenvectors();
  return v * phases.asDiagonal() * v.adjoint();
}

CMatrix exp_taylor(const CMatrix& a, const Tolerances& tol) {
  const double n1 = norm1(a);
  int squarings = 0;
  if (n1 > 0.5) squarings = static_cast<int>(std::ceil(std::log2(n1 / 0.5)));
  const CMatrix scaled = a / std::ldexp(1.0, squarings);

  const Eigen::Index dim = a.rows();
  CMatrix sum = CMatrix::Identity(dim, dim);
  CMatrix term = CMatrix::Identity(dim, dim);
  double residual = kInfinity;
  for (int k = 1; k <= tol.max_series_terms; ++k) {
    term = term * scaled / static_cast<double>(k);
    sum += term;
    residual = norm1(term) / norm1(sum);
    if (residual <= tol.series_residual) {
      for (int s = 0; s < squarings; ++s) sum = sum * sum;
      return sum;
    }
  }
  std::ostringstream msg;
  msg << "Taylor series for the matrix exponential did not reach residual "
      << tol.series_residual << " in " << tol.max_series_terms
      << " terms (achieved " << residual << ")";
  throw Error(ErrorKind::NumericFailure, msg.str());
}

}  // namespace

StateVector::StateVector(CVector components) : components_(std::move(components)) {
  if (components_.size() < 1) throw Error(ErrorKind::InvalidInput, "state vector must have dim >= 1");
  if (!all_finite(components_))
    throw Error(ErrorKind::InvalidInput, "state vector has non-finite components");
}

StateVector::StateVector(std::initializer_list<complex> components)
    : StateVector(CVector::Map(components.begin(), static_cast<Eigen::Index>(components.size()))) {}

StateVector StateVector::normalized(CVector components, const Tolerances& tol) {
  StateVector psi(std::move(components));
  if (std::abs(psi.norm2() - 1.0) > tol.unit_norm) {
    std::ostringstream msg;
    msg << "state is not normalized: |norm^2 - 1| = " << std::abs(psi.norm2() - 1.0);
    throw Error(ErrorKind::InvalidInput, msg.str());
  }
  return psi;
}

StateVector StateVector::basis(Eigen::Index dim, Eigen::Index index) {
  if (index < 0 || index >= dim) throw Error(ErrorKind::InvalidInput, "basis index out of range");
  CVector v = CVector::Zero(dim);
  v(index) = 1.0;
  return StateVector(std::move(v));
}

OperatorMatrix::OperatorMatrix(CMatrix entries, bool hermitian, const Tolerances& tol)
    : entries_(std::move(entries)), hermitian_(hermitian) {
  if (entries_.rows() < 1 || entries_.rows() != entries_.cols())
    throw Error(ErrorKind::InvalidInput, "operator must be a non-empty square matrix");
  if (!all_finite(entries_))
    throw Error(ErrorKind::InvalidInput, "operator has non-finite entries");
  if (hermitian_ && hermiticity_defect(entries_) > tol.hermiticity) {
    std::ostringstream msg;
    msg << "operator declared hermitian but relative defect is " << hermiticity_defect(entries_);
    throw Error(ErrorKind::InvalidInput, msg.str());
  }
}

OperatorMatrix OperatorMatrix::detect(CMatrix entries, const Tolerances& tol) {
  if (entries.rows() < 1 || entries.rows() != entries.cols())
    throw Error(ErrorKind::InvalidInput, "operator must be a non-empty square matrix");
  if (!all_finite(entries)) throw Error(ErrorKind::InvalidInput, "operator has non-finite entries");
  const bool herm = hermiticity_defect(entries) <= tol.hermiticity;
  return OperatorMatrix(std::move(entries), herm, tol);
}

OperatorMatrix OperatorMatrix::zero(Eigen::Index dim) {
  return OperatorMatrix(CMatrix::Zero(dim, dim), true);
}

OperatorMatrix OperatorMatrix::identity(Eigen::Index dim) {
  return OperatorMatrix(CMatrix::Identity(dim, dim), true);
}

OperatorMatrix OperatorMatrix::operator+(const OperatorMatrix& other) const {
  return OperatorMatrix::detect(entries_ + other.entries_);
}

OperatorMatrix OperatorMatrix::operator-(const OperatorMatrix& other) const {
  return OperatorMatrix::detect(entries_ - other.entries_);
}

OperatorMatrix OperatorMatrix::scaled(complex factor) const {
  return OperatorMatrix::detect(entries_ * factor);
}

OperatorMatrix sigma1() {
  CMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return OperatorMatrix(m, true);
}

OperatorMatrix sigma2() {
  CMatrix m(2, 2);
  m << 0.0, -kI, kI, 0.0;
  return OperatorMatrix(m, true);
}

OperatorMatrix sigma3() {
  CMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return OperatorMatrix(m, true);
}

OperatorMatrix with_scalar_optical_potential(const OperatorMatrix& h, double v) {
  if (v == 0.0) return h;
  CMatrix m = h.entries();
  m.diagonal().array() -= kI * v;
  return OperatorMatrix(std::move(m), false);
}

OperatorMatrix propagator(const OperatorMatrix& h, double t, const Tolerances& tol) {
  if (!std::isfinite(t)) throw Error(ErrorKind::InvalidInput, "propagation time must be finite");
  if (t == 0.0) return OperatorMatrix::identity(h.dim());
  if (h.hermitian()) return OperatorMatrix(exp_hermitian(h.entries(), t), false);
  return OperatorMatrix(exp_taylor(complex(0.0, -t) * h.entries(), tol), false);
}

StateVector evolve(const OperatorMatrix& h, const StateVector& psi, double t, const Tolerances& tol) {
  require_same_dim(h, psi);
  return StateVector(propagator(h, t, tol).entries() * psi.components());
}

complex survival_amplitude(const OperatorMatrix& h, const StateVector& psi0, double t,
                           const Tolerances& tol) {
  require_same_dim(h, psi0);
  require_unit_norm(psi0);
  const CVector& v = psi0.components();
  return v.dot(propagator(h, t, tol).entries() * v);
}

double survival_probability(const OperatorMatrix& h, const StateVector& psi0, double t,
                            const Tolerances& tol) {
  return std::norm(survival_amplitude(h, psi0, t, tol));
}

MomentReport moments(const OperatorMatrix& h, const StateVector& psi0, const Tolerances&) {
  require_same_dim(h, psi0);
  require_unit_norm(psi0);
  const CVector& v = psi0.components();
  const CVector hv = h.entries() * v;
  MomentReport r;
  r.mean = v.dot(hv);
  // <psi|H (H psi)> rather than |H psi|^2 so non-hermitian H is handled too.
  r.second_moment = v.dot(h.entries() * hv);
  r.variance = r.second_moment - r.mean * r.mean;
  if (h.hermitian()) {
    r.mean.imag(0.0);
    r.second_moment.imag(0.0);
    r.variance.imag(0.0);
  }
  const double var = r.variance.real();
  r.zeno_time = var > 0.0 ? 1.0 / std::sqrt(var) : kInfinity;
  return r;
}

ShortTimeReport short_time_check(const OperatorMatrix& h, const StateVector& psi0,
                                 std::span<const double> dts, const Tolerances& tol) {
  if (!h.hermitian())
    throw Error(ErrorKind::ContractViolation,
                "the quadratic short-time law requires a hermitian Hamiltonian");
  const MomentReport m = moments(h, psi0, tol);
  ShortTimeReport report;
  report.zeno_time = m.zeno_time;
  double num = 0.0;
  double den = 0.0;
  for (double dt : dts) {
    if (!(dt >= 0.0)) throw Error(ErrorKind::InvalidInput, "short-time offsets must be >= 0");
    ShortTimeRow row;
    row.dt = dt;
    row.one_minus_p = 1.0 - survival_probability(h, psi0, dt, tol);
    const double inv_tz = std::isinf(m.zeno_time) ? 0.0 : 1.0 / m.zeno_time;
    row.quadratic = dt * dt * inv_tz * inv_tz;
    row.residual = std::abs(row.one_minus_p - row.quadratic);
    if (dt == 0.0) row.residual = std::abs(row.one_minus_p);
    const double dt4 = dt * dt * dt * dt;
    num += row.residual * dt4;
    den += dt4 * dt4;
    report.rows.push_back(row);
  }
  report.fitted_c = den > 0.0 ? num / den : 0.0;
  return report;
}

OperatorMatrix random_hermitian(Eigen::Index dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix m(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index i = 0; i < dim; ++i) m(i, j) = complex(normal(rng), normal(rng));
  CMatrix herm = 0.5 * (m + m.adjoint());
  return OperatorMatrix(herm, true);
}

StateVector random_state(Eigen::Index dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  CVector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = complex(normal(rng), normal(rng));
  v.normalize();
  return StateVector(std::move(v));
}

}  // namespace zenolab
