#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "zenolab/discrete_oracle.hpp"

using namespace zenolab;

TEST_CASE("secular spectrum matches dense diagonalization") {
  const auto ff = FormFactor::flat_interval(0.01, 0.0, 1.0);
  const DiscretizedContinuum dc(ff, 0.5, 200);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dc.dense());
  for (Backend b : {Backend::Serial, Backend::OpenMP}) {
    const auto s = dc.spectrum(b);
    REQUIRE(s.eigenvalue.size() == 201);
    for (Eigen::Index l = 0; l < 201; ++l) {
      const auto i = static_cast<std::size_t>(l);
      CHECK(s.eigenvalue[i] == doctest::Approx(es.eigenvalues()(l)).epsilon(1e-12));
      CHECK(std::abs(s.overlap[i] - es.eigenvectors()(0, l) * es.eigenvectors()(0, l)) < 1e-12);
    }
  }
}

TEST_CASE("oracle amplitude matches the dense propagator") {
  const auto ff = FormFactor::flat_interval(0.02, -1.0, 2.0);
  const DiscretizedContinuum dc(ff, 0.3, 120);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dc.dense());
  const std::vector<double> times{0.0, 0.7, 5.0, 40.0, 300.0};
  const auto a = dc.amplitude(times);
  for (std::size_t i = 0; i < times.size(); ++i) {
    complex dense(0.0);
    for (Eigen::Index l = 0; l < es.eigenvalues().size(); ++l)
      dense += es.eigenvectors()(0, l) * es.eigenvectors()(0, l) *
               std::exp(complex(0.0, -es.eigenvalues()(l) * times[i]));
    CHECK(std::abs(a[i] - dense) < 1e-11);
  }
  CHECK(std::abs(a[0] - 1.0) < 1e-12);
}

TEST_CASE("explicit levels") {
  const DiscretizedContinuum dc(0.0, {-1.0, 1.0}, {0.5, 0.5});
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dc.dense());
  const auto s = dc.spectrum();
  for (Eigen::Index l = 0; l < 3; ++l)
    CHECK(s.eigenvalue[static_cast<std::size_t>(l)] == doctest::Approx(es.eigenvalues()(l)).epsilon(1e-13));
  CHECK_THROWS_AS(DiscretizedContinuum(0.0, {1.0, 0.0}, {0.1, 0.1}), Error);
  CHECK_THROWS_AS(DiscretizedContinuum(0.0, {1.0}, {}), Error);
  CHECK_THROWS_AS(DiscretizedContinuum(FormFactor::constant_line(1.0), 0.0, 10), Error);
}
