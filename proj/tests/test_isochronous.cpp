#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cubicflow/errors.hpp"
#include "cubicflow/integrator.hpp"
#include "cubicflow/isochronous.hpp"
#include "helpers.hpp"

using namespace cubicflow;

TEST_CASE("make_isochronous periods") {
  IsochronousSystem sys =
      make_isochronous(testutil::decoupled_coefficients(), 2.0);
  CHECK(sys.T == doctest::Approx(kPi / 2).epsilon(1e-14));
  CHECK(sys.T_tilde == doctest::Approx(kPi).epsilon(1e-14));
  CHECK_THROWS_AS(make_isochronous(testutil::decoupled_coefficients(), 0.0),
                  ValidationError);
}

TEST_CASE("tau_of_t landmark values") {
  CHECK(std::abs(tau_of_t(1.0, 0.0)) < 1e-15);
  // full turn: tau returns to 0
  CHECK(std::abs(tau_of_t(1.0, kPi)) < 1e-14);
  // quarter of the tilde period: top of the circle
  CHECK(std::abs(tau_of_t(1.0, kPi / 2) - Complex(0, 1)) < 1e-14);
  // small t: tau ~ t
  CHECK(std::abs(tau_of_t(1.0, 1e-4) - Complex(1e-4, 0)) < 1e-7);
}

TEST_CASE("tilde solution is periodic and anti-periodic") {
  std::vector<double> times;
  for (int k = 0; k <= 32; ++k) times.push_back(kTwoPi * k / 32);
  Trajectory traj = solve_tilde(testutil::decoupled_parameters(), 1.0,
                                {0.01, 0}, {0.02, 0}, times);
  REQUIRE(!traj.truncated);
  REQUIRE(traj.states.size() == times.size());
  // t = pi: x_tilde = -x0 (tau closes, phase is -1)
  CHECK(std::abs(traj.states[16].first - Complex(-0.01, 0)) < 1e-10);
  CHECK(std::abs(traj.states[16].second - Complex(-0.02, 0)) < 1e-10);
  // t = 2 pi: full recurrence
  CHECK(std::abs(traj.states[32].first - Complex(0.01, 0)) < 1e-8);
  CHECK(std::abs(traj.states[32].second - Complex(0.02, 0)) < 1e-8);
}

TEST_CASE("tilde solution matches direct integration of the extended system") {
  const ParameterSet p = testutil::decoupled_parameters();
  const CoefficientSet c = forward(p);
  const double omega = 1.0;
  std::vector<double> times;
  for (int k = 0; k <= 16; ++k) times.push_back(kTwoPi * k / 16);
  Trajectory traj = solve_tilde(p, omega, {0.01, 0}, {0.02, 0}, times);
  REQUIRE(!traj.truncated);

  OdeProblem prob;
  prob.dimension = 2;
  prob.initial_state = {{0.01, 0}, {0.02, 0}};
  prob.rel_tol = 1e-11;
  prob.abs_tol = 1e-14;
  prob.rhs = [&c, omega](Complex, const std::vector<Complex>& x,
                         std::vector<Complex>& dx) {
    const auto [r1, r2] = rhs_eval(c, x[0], x[1]);
    dx[0] = Complex(0, omega) * x[0] + r1;
    dx[1] = Complex(0, omega) * x[1] + r2;
  };
  for (double t : times) prob.path.emplace_back(t, 0.0);
  OdeSolution sol = integrate(prob);
  REQUIRE(!sol.blew_up);
  for (size_t k = 0; k < times.size(); ++k) {
    CHECK(std::abs(traj.states[k].first - sol.states[k][0]) < 1e-6);
    CHECK(std::abs(traj.states[k].second - sol.states[k][1]) < 1e-6);
  }
}

TEST_CASE("detect_period finds k = 1 for small data") {
  PeriodReport rep = detect_period(testutil::decoupled_coefficients(), 1.0,
                                   {0.01, 0}, {0.02, 0}, 4, 1e-6);
  CHECK(rep.k == 1);
  REQUIRE(rep.defect_at_kT.size() == 4);
  for (double d : rep.defect_at_kT) CHECK(d < 1e-6);
  CHECK(!rep.blew_up);
}

TEST_CASE("detect_period at an equilibrium") {
  PeriodReport rep = detect_period(testutil::decoupled_coefficients(), 1.0,
                                   {0, 0}, {0, 0}, 2, 1e-9);
  CHECK(rep.k == 1);
}

TEST_CASE("detect_period input validation") {
  CHECK_THROWS_AS(detect_period(testutil::decoupled_coefficients(), 0.0,
                                {0.01, 0}, {0, 0}, 2, 1e-6),
                  ValidationError);
  CHECK_THROWS_AS(detect_period(testutil::decoupled_coefficients(), 1.0,
                                {0.01, 0}, {0, 0}, 0, 1e-6),
                  ValidationError);
}

TEST_CASE("base system closes around the tau circle") {
  // The tau path of the omega = 1 tilde flow is the circle through 0 with
  // center i/2; continuing the base solution around it must return to the
  // start when the exponents are rational.
  const CoefficientSet c = testutil::decoupled_coefficients();
  OdeProblem prob;
  prob.dimension = 2;
  prob.initial_state = {{0.01, 0}, {0.02, 0}};
  prob.rel_tol = 1e-11;
  prob.abs_tol = 1e-14;
  prob.rhs = [&c](Complex, const std::vector<Complex>& x,
                  std::vector<Complex>& dx) {
    const auto [r1, r2] = rhs_eval(c, x[0], x[1]);
    dx[0] = r1;
    dx[1] = r2;
  };
  OdeSolution sol = integrate_circle(prob, 0.5, Complex(0, 0.5), 64);
  REQUIRE(!sol.blew_up);
  CHECK(sol.closure_defect < 1e-8);
}

TEST_CASE("rationality check on the decoupled spectrum") {
  SpectralData spec = spectral({0, 0}, {0, 0}, {0, 0});
  std::array<Fraction, 3> f;
  REQUIRE(rationality_check(spec, 1000, 1e-9, &f));
  // roots are ordered (-1, 0, 1) so the exponents come out (1/2, -1, 1/2)
  CHECK(f[0].num * 2 == f[0].den);
  CHECK(f[1].num == -f[1].den);
  CHECK(f[2].num * 2 == f[2].den);
}

TEST_CASE("rationality check tolerance behavior") {
  SpectralData spec;
  spec.u1 = {-1, 0};
  spec.u2 = {0, 0};
  spec.u3 = {1, 0};
  spec.lambda1 = {0.333333331, 0};
  spec.lambda2 = {-1, 0};
  spec.lambda3 = {0.5, 0};
  std::array<Fraction, 3> f;
  REQUIRE(rationality_check(spec, 1000, 1e-6, &f));
  CHECK(f[0].num == 1);
  CHECK(f[0].den == 3);
  // at a tighter tolerance the perturbed value has no small denominator
  CHECK(!rationality_check(spec, 1000, 1e-12));
}

TEST_CASE("complex exponents are rejected") {
  SpectralData spec = spectral({1, 0}, {1, 0}, {1, 0});
  REQUIRE(!spec.degenerate);
  CHECK(!rationality_check(spec, 1000, 1e-9));
}
