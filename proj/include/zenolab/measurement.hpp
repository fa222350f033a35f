#pragma once

// Pulsed (projective) and continuous (absorptive) measurement models.

#include <optional>
#include <string>
#include <vector>

#include "zenolab/qdyn.hpp"

namespace zenolab {

/// N equally spaced projective measurements over a total time t.
class PulseSchedule {
 public:
  PulseSchedule(double total_time, long pulses);

  double total_time() const noexcept { return total_time_; }
  long pulses() const noexcept { return pulses_; }
  double tau() const noexcept { return total_time_ / static_cast<double>(pulses_); }

 private:
  double total_time_;
  long pulses_;
};

/// Two-level system with an absorbing lower level:
/// H = [[0, Omega], [Omega, -2 i V]].
class TwoLevelAbsorptive {
 public:
  TwoLevelAbsorptive(double omega, double v);

  double omega() const noexcept { return omega_; }
  double v() const noexcept { return v_; }
  /// Principal square root of V^2 - Omega^2.
  complex h() const noexcept { return h_; }
  OperatorMatrix hamiltonian() const;

 private:
  double omega_;
  double v_;
  complex h_;
};

struct EffectiveRate {
  double tau;
  double gamma_eff;
};

struct ContinuousRate {
  double asymptotic;  // Omega^2 / V
  double exact;       // 2 (V - h), the slow-pole rate of |A|^2
  std::optional<std::string> warning;
};

/// p(t/N)^N for a hermitian generator.
double pulsed_survival(const OperatorMatrix& h, const StateVector& psi0, const PulseSchedule& schedule);

struct PulsedPoint {
  long pulses;
  double probability;
};

std::vector<PulsedPoint> pulsed_survival_series(const OperatorMatrix& h, const StateVector& psi0,
                                                double total_time, const std::vector<long>& pulses);

/// Survival under measurements every tau, sampled at an arbitrary time:
/// p(tau)^k p(t - k tau) with k = floor(t / tau).
double pulsed_trajectory(const OperatorMatrix& h, const StateVector& psi0, double tau, double t);

/// gamma_eff(tau) = -log p(tau) / tau, taken from the definition.
EffectiveRate effective_rate_pulsed(const OperatorMatrix& h, const StateVector& psi0, double tau);

/// Small-tau reference tau / tau_Z^2.
double effective_rate_pulsed_reference(const OperatorMatrix& h, const StateVector& psi0, double tau);

/// Closed-form survival amplitude of the absorptive two-level system started in |+>.
complex absorptive_amplitude(const TwoLevelAbsorptive& sys, double t);
/// Amplitude on |-> for the same evolution.
complex absorptive_lower_amplitude(const TwoLevelAbsorptive& sys, double t);
/// The slowly decaying term (1/2)(1 + V/h) exp(-(V - h) t) of the amplitude.
complex absorptive_slow_term(const TwoLevelAbsorptive& sys, double t);

ContinuousRate effective_rate_continuous(const TwoLevelAbsorptive& sys);

/// V ~ 1/tau. Both directions are the reciprocal.
double continuous_strength_from_interval(double tau);
double interval_from_continuous_strength(double v);

/// Values at which p(tau) counts as a survival zero.
inline constexpr double kSurvivalZero = 1e-24;

}  // namespace zenolab
