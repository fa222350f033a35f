#pragma once

// Form factors, the self-energy Sigma(E) = int g^2(w) / (E - w) dw on both
// Riemann sheets, the resonance pole and the quantities derived from it.
//
// Sheet convention. With F(z) = int f(E) / (E - z) dE the downward
// continuation through the cut is F_II = F + 2 pi i f. Since Sigma = -F with
// f = g^2, the continuation used here is Sigma_II(E) = Sigma(E) - 2 pi i g^2(E).

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "zenolab/qdyn.hpp"

namespace zenolab {

enum class Sheet { First, Second };

struct FlatInterval {
  double g0_sq;
  double omega_g;
  double omega_max;
  bool operator==(const FlatInterval&) const = default;
};

/// g^2 = gamma / 2 pi on the whole real line.
struct ConstantLine {
  double gamma;
  bool operator==(const ConstantLine&) const = default;
};

/// Piecewise-linear g^2 on a strictly increasing grid; zero outside it.
struct Tabulated {
  std::vector<double> omega;
  std::vector<double> g_sq;
  bool operator==(const Tabulated&) const = default;
};

class FormFactor {
 public:
  using Spec = std::variant<FlatInterval, ConstantLine, Tabulated>;

  static FormFactor flat_interval(double g0_sq, double omega_g, double omega_max);
  static FormFactor constant_line(double gamma);
  static FormFactor tabulated(std::vector<double> omega, std::vector<double> g_sq);

  const Spec& spec() const noexcept { return spec_; }
  std::string kind() const;

  double support_min() const;
  double support_max() const;
  bool finite_support() const;
  /// Strict interior of the support.
  bool inside(double x) const;

  double g_sq(double x) const;
  /// int g^2 dw; +infinity for a constant line.
  double total_weight() const;

  /// Same form factor with g^2 multiplied by `factor`.
  FormFactor scaled(double factor) const;

  bool operator==(const FormFactor&) const = default;

 private:
  explicit FormFactor(Spec spec) : spec_(std::move(spec)) {}
  Spec spec_;
};

struct SelfEnergyValue {
  complex e;
  Sheet sheet;
  complex value;
};

SelfEnergyValue self_energy(const FormFactor& ff, complex e, Sheet sheet);

/// Sigma(x + i0) and Sigma(x - i0) on the first sheet for x inside the support.
std::pair<complex, complex> boundary_values(const FormFactor& ff, double x);

/// Sigma_II(E) for Im E <= 0.
SelfEnergyValue second_sheet(const FormFactor& ff, complex e);

/// Principal value P int g^2(w) / (x - w) dw.
double principal_value(const FormFactor& ff, double x);

/// Direct adaptive quadrature of int g^2(w) / (E - w) dw off the support;
/// kept separate from the closed forms so each can check the other.
complex self_energy_quadrature(const FormFactor& ff, complex e);

struct PoleOptions {
  double damping = 0.5;
  int max_iterations = 200;
  double residual_target = 1e-13;
  double accept_residual = 1e-10;
};

struct PoleSolution {
  complex e_pole;
  double omega0 = 0.0;
  double delta_omega0 = 0.0;
  double gamma = 0.0;
  double z = 0.0;
  complex sigma_derivative;  // Sigma_II'(E_pole)
  double residual = 0.0;
  int iterations = 0;
  std::string method;
  FormFactor form_factor = FormFactor::constant_line(0.0);
};

/// Solves E - w0 - Sigma_II(E) = 0 near w0.
PoleSolution find_pole(const FormFactor& ff, double omega0, const PoleOptions& options = {});

/// Sigma_II'(E) by central differencing with step 1e-6 max(1, |E|).
complex second_sheet_derivative(const FormFactor& ff, complex e);

struct GoldenRule {
  double gamma = 0.0;
  std::optional<std::string> notice;
};

/// 2 pi g^2(w0).
GoldenRule golden_rule(const FormFactor& ff, double omega0);

struct ContinuumZenoTime {
  double tau = kInfinity;
  bool divergent = false;  // the coupling is not normalizable
};

/// (int g^2 dw)^{-1/2}.
ContinuumZenoTime zeno_time_continuum(const FormFactor& ff);

complex weisskopf_wigner_amplitude(const PoleSolution& pole, double t);

/// Loose check for a first-sheet bound state below threshold: compares
/// |Sigma(w_g - 1e-6 width)| against w0 - w_g. Returns a warning if violated.
std::optional<std::string> first_sheet_warning(const FormFactor& ff, double omega0);

}  // namespace zenolab
