#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "zenolab/measurement.hpp"
#include "zenolab/qdyn.hpp"

using namespace zenolab;

namespace {

CMatrix eigen_exponential(const CMatrix& h, double t) {
  Eigen::ComplexEigenSolver<CMatrix> es(h);
  const CMatrix& v = es.eigenvectors();
  CVector phase = (-kI * t * es.eigenvalues().array()).exp();
  return v * phase.asDiagonal() * v.inverse();
}

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

StateVector plus() { return StateVector::basis(2, 0); }

}  // namespace

TEST_CASE("state vectors and operators validate their inputs") {
  CHECK_THROWS_AS(StateVector(CVector(0)), Error);
  CHECK_THROWS_AS(StateVector::normalized(CVector::Constant(2, complex(1.0, 0.0))), Error);
  CHECK(StateVector::normalized(CVector::Constant(2, complex(std::sqrt(0.5), 0.0))).dim() == 2);

  CMatrix bad = CMatrix::Zero(2, 2);
  bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(OperatorMatrix(bad, false), Error);

  CMatrix skew = CMatrix::Zero(2, 2);
  skew(0, 1) = 1.0;
  try {
    OperatorMatrix(skew, true);
    FAIL("expected a hermiticity error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidInput);
  }
  CHECK_FALSE(OperatorMatrix::detect(skew).hermitian());
  CHECK(OperatorMatrix::detect(sigma2().entries()).hermitian());
}

TEST_CASE("propagator") {
  SUBCASE("zero generator gives the identity") {
    const auto u = propagator(OperatorMatrix::zero(2), 7.0);
    CHECK(max_abs(u.entries() - CMatrix::Identity(2, 2)) < 1e-15);
  }
  SUBCASE("rabi half period") {
    const auto u = propagator(sigma1(), std::numbers::pi);
    CHECK(std::abs(u.entries()(0, 0) - complex(-1.0, 0.0)) < 1e-12);
    CHECK(std::abs(u.entries()(1, 1) - complex(-1.0, 0.0)) < 1e-12);
    CHECK(std::abs(u.entries()(0, 1)) < 1e-12);
    CHECK(std::abs(u.entries()(1, 0)) < 1e-12);
  }
  SUBCASE("random hermitian against an independent eigendecomposition") {
    const auto h = random_hermitian(3, 11);
    const auto u = propagator(h, 0.3);
    CHECK(max_abs(u.entries() - eigen_exponential(h.entries(), 0.3)) < 1e-10);
  }
  SUBCASE("non-hermitian generator against the Pade exponential") {
    const auto h = TwoLevelAbsorptive(1.0, 10.0).hamiltonian();
    REQUIRE_FALSE(h.hermitian());
    for (double t : {0.01, 1.0, 3.0, -0.5}) {
      const CMatrix oracle = (complex(0.0, -t) * h.entries()).exp();
      CHECK(max_abs(propagator(h, t).entries() - oracle) < 1e-11 * std::max(1.0, max_abs(oracle)));
    }
  }
  SUBCASE("non-finite time") {
    CHECK_THROWS_AS(propagator(sigma1(), std::nan("")), Error);
  }
}

TEST_CASE("survival amplitude and probability") {
  const auto h = random_hermitian(4, 3);
  const auto psi = random_state(4, 5);
  CHECK(std::abs(survival_amplitude(h, psi, 0.0) - complex(1.0, 0.0)) <= 1e-14);
  CHECK(std::abs(survival_amplitude(sigma1(), plus(), 1.0) - std::cos(1.0)) < 1e-14);
  CHECK(survival_probability(sigma1(), plus(), std::numbers::pi / 2) < 1e-12);
  CHECK(survival_probability(sigma1(), plus(), 0.0) == doctest::Approx(1.0).epsilon(1e-15));

  const auto absorptive = TwoLevelAbsorptive(1.0, 10.0).hamiltonian();
  const CMatrix oracle_u = (complex(0.0, -1.0) * absorptive.entries()).exp();
  const complex oracle = oracle_u(0, 0);
  const complex a = survival_amplitude(absorptive, plus(), 1.0);
  CHECK(std::abs(a - oracle) < 1e-12);
  CHECK(a.real() == doctest::Approx(0.95351).epsilon(1e-4));
  CHECK(std::abs(a.imag()) < 1e-12);
  CHECK(survival_probability(absorptive, plus(), 1.0) == doctest::Approx(0.90918).epsilon(2e-5));

  for (double t = -5.0; t <= 5.0; t += 0.37) CHECK(std::abs(survival_amplitude(h, psi, t)) <= 1.0 + 1e-10);

  CHECK_THROWS_AS(survival_amplitude(h, plus(), 1.0), Error);
  CHECK_THROWS_AS(survival_amplitude(sigma1(), StateVector({complex(1.0), complex(1.0)}), 1.0), Error);
}

TEST_CASE("energy moments and zeno time") {
  const auto r = moments(sigma1().scaled(2.0), plus());
  CHECK(std::abs(r.mean) < 1e-15);
  CHECK(r.variance.real() == doctest::Approx(4.0));
  CHECK(r.zeno_time == doctest::Approx(0.5));

  CMatrix d = CMatrix::Zero(3, 3);
  d.diagonal() << 1.0, 2.0, 3.0;
  const auto e = moments(OperatorMatrix(d, true), StateVector::basis(3, 1));
  CHECK(std::abs(e.variance) < 1e-15);
  CHECK(std::isinf(e.zeno_time));

  const auto raw = random_hermitian(4, 21);
  const double radius = Eigen::SelfAdjointEigenSolver<CMatrix>(raw.entries()).eigenvalues().cwiseAbs().maxCoeff();
  const auto h = raw.scaled(1.0 / radius);
  const auto psi = random_state(4, 22);
  const auto m = moments(h, psi);
  CHECK(std::abs(m.mean.imag()) <= 1e-12 * std::abs(m.mean));
  CHECK(std::abs(m.variance.imag()) <= 1e-12 * std::abs(m.variance));
  CHECK(m.zeno_time == doctest::Approx(1.0 / std::sqrt(m.variance.real())).epsilon(1e-14));
  const double dt = 1e-3;
  const double curvature = (1.0 - survival_probability(h, psi, dt)) / (dt * dt);
  CHECK(std::abs(curvature - m.variance.real()) <= 1e-6);
}

TEST_CASE("short-time check") {
  const double dts[] = {1e-2, 0.0};
  const auto r = short_time_check(sigma1(), plus(), dts);
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[0].one_minus_p == doctest::Approx(1e-4).epsilon(1e-4));
  CHECK(r.rows[0].residual <= 1e-7);
  CHECK(r.rows[1].residual == 0.0);
  // cos^2 dt = 1 - dt^2 + dt^4 / 3 - ..., so the quartic coefficient is 1/3.
  const double fine[] = {1e-3, 2e-3, 5e-3, 1e-2};
  CHECK(short_time_check(sigma1(), plus(), fine).fitted_c == doctest::Approx(1.0 / 3.0).epsilon(1e-3));

  try {
    short_time_check(TwoLevelAbsorptive(1.0, 1.0).hamiltonian(), plus(), dts);
    FAIL("expected a contract violation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ContractViolation);
  }
}

TEST_CASE("propagation invariants") {
  const auto h = random_hermitian(5, 7);
  const auto psi = random_state(5, 8);

  for (double t : {-3.0, 0.1, 1.0, 10.0, 100.0}) CHECK(std::abs(evolve(h, psi, t).norm2() - 1.0) <= 1e-10);

  const auto lossy = with_scalar_optical_potential(h, 0.3);
  double previous = 1.0;
  for (double t = 0.0; t <= 6.0; t += 0.25) {
    const double n = evolve(lossy, psi, t).norm2();
    CHECK(n <= previous + 1e-10);
    previous = n;
    CHECK(survival_probability(lossy, psi, t) ==
          doctest::Approx(std::exp(-0.6 * t) * survival_probability(h, psi, t)).epsilon(1e-10));
  }

  for (const auto& op : {h, lossy}) {
    const CMatrix lhs = propagator(op, 0.7 + 1.9).entries();
    const CMatrix rhs = propagator(op, 1.9).entries() * propagator(op, 0.7).entries();
    CHECK(max_abs(lhs - rhs) <= 1e-9);
  }
}

TEST_CASE("amplitude moves linearly while probability moves quadratically") {
  const auto h = random_hermitian(3, 31) + OperatorMatrix::identity(3).scaled(2.0);
  const auto psi = random_state(3, 32);
  REQUIRE(std::abs(moments(h, psi).mean) > 0.1);
  std::vector<double> x, amp, prob;
  for (double dt = 1e-4; dt <= 1e-2 * 1.0001; dt *= std::pow(10.0, 0.25)) {
    x.push_back(std::log(dt));
    amp.push_back(std::log(std::abs(1.0 - survival_amplitude(h, psi, dt))));
    prob.push_back(std::log(1.0 - survival_probability(h, psi, dt)));
  }
  auto slope = [&](const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sx += x[i];
      sy += y[i];
      sxx += x[i] * x[i];
      sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };
  CHECK(slope(amp) == doctest::Approx(1.0).epsilon(0.05));
  CHECK(slope(prob) == doctest::Approx(2.0).epsilon(0.025));
}
