#include "zenolab/measurement.hpp"

#include <cmath>
#include <sstream>

namespace zenolab {

namespace {

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw Error(ErrorKind::InvalidInput, std::string(what) + " must be finite");
}

void require_hermitian(const OperatorMatrix& h) {
  if (!h.hermitian())
    throw Error(ErrorKind::ContractViolation, "projective-measurement schedules require a hermitian H");
}

// sinh(z)/z, exact at z = 0.
complex sinhc(complex z) {
  if (z == complex(0.0, 0.0)) return 1.0;
  return std::sinh(z) / z;
}

}  // namespace

PulseSchedule::PulseSchedule(double total_time, long pulses) : total_time_(total_time), pulses_(pulses) {
  if (pulses < 1) throw Error(ErrorKind::InvalidInput, "number of pulses must be >= 1");
  if (!std::isfinite(total_time) || total_time < 0.0)
    throw Error(ErrorKind::InvalidInput, "total time must be finite and non-negative");
}

TwoLevelAbsorptive::TwoLevelAbsorptive(double omega, double v) : omega_(omega), v_(v) {
  require_finite(omega, "Omega");
  require_finite(v, "V");
  if (!(omega > 0.0)) throw Error(ErrorKind::InvalidInput, "Omega must be > 0");
  if (v < 0.0) throw Error(ErrorKind::InvalidInput, "V must be >= 0");
  h_ = std::sqrt(complex(v * v - omega * omega, 0.0));
}

OperatorMatrix TwoLevelAbsorptive::hamiltonian() const {
  CMatrix m(2, 2);
  m << 0.0, omega_, omega_, complex(0.0, -2.0 * v_);
  return OperatorMatrix(m, v_ == 0.0);
}

double pulsed_survival(const OperatorMatrix& h, const StateVector& psi0, const PulseSchedule& schedule) {
  require_hermitian(h);
  if (schedule.total_time() == 0.0) return 1.0;
  const double p_tau = survival_probability(h, psi0, schedule.tau());
  return std::pow(p_tau, static_cast<double>(schedule.pulses()));
}

std::vector<PulsedPoint> pulsed_survival_series(const OperatorMatrix& h, const StateVector& psi0,
                                                double total_time, const std::vector<long>& pulses) {
  std::vector<PulsedPoint> out;
  out.reserve(pulses.size());
  for (long n : pulses) out.push_back({n, pulsed_survival(h, psi0, PulseSchedule(total_time, n))});
  return out;
}

double pulsed_trajectory(const OperatorMatrix& h, const StateVector& psi0, double tau, double t) {
  require_hermitian(h);
  if (!(tau > 0.0)) throw Error(ErrorKind::InvalidInput, "measurement interval must be > 0");
  if (t < 0.0) throw Error(ErrorKind::InvalidInput, "time must be >= 0");
  const double completed = std::floor(t / tau);
  const double remainder = t - completed * tau;
  const double p_tau = survival_probability(h, psi0, tau);
  return std::pow(p_tau, completed) * survival_probability(h, psi0, remainder);
}

EffectiveRate effective_rate_pulsed(const OperatorMatrix& h, const StateVector& psi0, double tau) {
  if (!(tau > 0.0)) throw Error(ErrorKind::InvalidInput, "measurement interval must be > 0");
  const double p = survival_probability(h, psi0, tau);
  if (p <= kSurvivalZero) {
    std::ostringstream msg;
    msg << "p(tau) = " << p << " at tau = " << tau << " is a survival zero; gamma_eff diverges";
    throw Error(ErrorKind::DivergentRate, msg.str());
  }
  return {tau, -std::log(p) / tau};
}

double effective_rate_pulsed_reference(const OperatorMatrix& h, const StateVector& psi0, double tau) {
  const MomentReport m = moments(h, psi0);
  if (std::isinf(m.zeno_time)) return 0.0;
  return tau / (m.zeno_time * m.zeno_time);
}

complex absorptive_amplitude(const TwoLevelAbsorptive& sys, double t) {
  require_finite(t, "t");
  if (t < 0.0) throw Error(ErrorKind::InvalidInput, "t must be >= 0");
  const double v = sys.v();
  const complex h = sys.h();
  if (std::abs(h) * t < 1.0) {
    // e^{-Vt}[cosh(ht) + V t sinh(ht)/(ht)], well-conditioned for small |h t|.
    return std::exp(-v * t) * (std::cosh(h * t) + v * t * sinhc(h * t));
  }
  // Split form; V - h is rewritten as Omega^2/(V + h) to avoid cancellation.
  const complex slow = sys.omega() * sys.omega() / (v + h);
  const complex fast = v + h;
  return 0.5 * (1.0 + v / h) * std::exp(-slow * t) + 0.5 * (1.0 - v / h) * std::exp(-fast * t);
}

complex absorptive_lower_amplitude(const TwoLevelAbsorptive& sys, double t) {
  require_finite(t, "t");
  if (t < 0.0) throw Error(ErrorKind::InvalidInput, "t must be >= 0");
  const double v = sys.v();
  const complex h = sys.h();
  if (std::abs(h) * t < 1.0) return -kI * sys.omega() * t * std::exp(-v * t) * sinhc(h * t);
  const complex slow = sys.omega() * sys.omega() / (v + h);
  const complex fast = v + h;
  return -kI * (sys.omega() / (2.0 * h)) * (std::exp(-slow * t) - std::exp(-fast * t));
}

complex absorptive_slow_term(const TwoLevelAbsorptive& sys, double t) {
  const complex h = sys.h();
  if (h == complex(0.0, 0.0))
    throw Error(ErrorKind::Regime, "slow/fast split is undefined at V = Omega");
  const complex slow = sys.omega() * sys.omega() / (sys.v() + h);
  return 0.5 * (1.0 + sys.v() / h) * std::exp(-slow * t);
}

ContinuousRate effective_rate_continuous(const TwoLevelAbsorptive& sys) {
  const double omega = sys.omega();
  const double v = sys.v();
  if (v <= omega) {
    std::ostringstream msg;
    msg << "continuous-measurement rate needs V > Omega (got V = " << v << ", Omega = " << omega << ")";
    throw Error(ErrorKind::Regime, msg.str());
  }
  ContinuousRate rate;
  rate.asymptotic = omega * omega / v;
  // |A|^2 of the slow term decays as exp(-2 (V - h) t); V - h = Omega^2 / (V + h).
  rate.exact = 2.0 * omega * omega / (v + sys.h().real());
  if (v < 5.0 * omega) {
    std::ostringstream msg;
    msg << "V/Omega = " << v / omega << " < 5: Omega^2/V is a poor approximation";
    rate.warning = msg.str();
  }
  return rate;
}

double continuous_strength_from_interval(double tau) {
  if (tau == 0.0 || !std::isfinite(tau)) throw Error(ErrorKind::InvalidInput, "tau must be finite and non-zero");
  if (tau < 0.0) throw Error(ErrorKind::InvalidInput, "tau must be positive");
  return 1.0 / tau;
}

double interval_from_continuous_strength(double v) {
  if (v == 0.0 || !std::isfinite(v)) throw Error(ErrorKind::InvalidInput, "V must be finite and non-zero");
  if (v < 0.0) throw Error(ErrorKind::InvalidInput, "V must be positive");
  return 1.0 / v;
}

}  // namespace zenolab
