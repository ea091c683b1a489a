#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "cubicflow/errors.hpp"
#include "cubicflow/model.hpp"
#include "cubicflow/solver.hpp"
#include "helpers.hpp"

using namespace cubicflow;

namespace {

std::vector<Complex> real_grid(double t1, int n) {
  std::vector<Complex> g;
  for (int k = 0; k < n; ++k) g.emplace_back(t1 * k / (n - 1), 0.0);
  return g;
}

IvpSpec make_spec(const ParameterSet& p, Complex x1_0, Complex x2_0,
                  double t1, int n) {
  IvpSpec spec;
  spec.parameters = p;
  spec.x1_0 = x1_0;
  spec.x2_0 = x2_0;
  spec.time_grid = real_grid(t1, n);
  return spec;
}

}  // namespace

TEST_CASE("y_exact golden values") {
  CHECK(std::abs(y_exact({1, 0}, {0, 0}) - Complex(1, 0)) < 1e-15);
  CHECK(std::abs(y_exact({1, 0}, {0.375, 0}) - Complex(2, 0)) < 1e-14);
  CHECK(std::abs(y_exact({2, 0}, {1.0 / 32, 0}) -
                 Complex(4.0 / std::sqrt(3.0), 0)) < 1e-13);
  // singular argument
  CHECK_THROWS_AS(y_exact({1, 0}, {0.5, 0}), NumericalError);
}

TEST_CASE("implicit residual at the hand-checked point") {
  SpectralData spec = spectral({0, 0}, {0, 0}, {0, 0});
  const Complex u0(1.5, 0);
  const Complex y0(2, 0);
  const std::array<int, 3> no_winding = {0, 0, 0};
  // t = 0, u = u0: both sides are 1
  CHECK(std::abs(u_implicit_residual(u0, {0, 0}, u0, y0, spec, no_winding)) <
        1e-14);
  // hand value: u(1/32) = 1.963959 gives product 0.75 = 1 - 8/32
  const Complex u(1.963959, 0);
  CHECK(std::abs(u_implicit_residual(u, {1.0 / 32, 0}, u0, y0, spec,
                                     no_winding)) < 1e-5);
  // perturbed u moves the residual by roughly the local slope
  const Complex off = u + Complex(1e-3, 0);
  CHECK(std::abs(u_implicit_residual(off, {1.0 / 32, 0}, u0, y0, spec,
                                     no_winding)) > 1e-4);
}

TEST_CASE("u_of_t on the hand-checked grid") {
  SpectralData spec = spectral({0, 0}, {0, 0}, {0, 0});
  std::vector<Complex> grid = real_grid(1.0 / 32, 9);
  std::vector<Complex> u = u_of_t({1.5, 0}, {2, 0}, spec, grid);
  REQUIRE(u.size() == grid.size());
  CHECK(std::abs(u.front() - Complex(1.5, 0)) < 1e-14);
  // w(t)/y(t) = (12/sqrt(7)) / (4/sqrt(3)) at t = 1/32
  const double expected = (12.0 / std::sqrt(7.0)) / (4.0 / std::sqrt(3.0));
  CHECK(std::abs(u.back() - Complex(expected, 0)) < 1e-9);
}

TEST_CASE("u continuation matches direct integration of the u-flow") {
  // du/dt = y(t)^2 P(u) with P the spectral cubic; dual-method oracle.
  std::mt19937_64 rng(301);
  int done = 0;
  while (done < 20) {
    ParameterSet p = testutil::random_parameters(rng);
    SpectralData spec = spectral(p.gamma1, p.gamma2, p.gamma3);
    if (spec.degenerate) continue;
    const Complex x1_0 = testutil::rand_complex(rng);
    const Complex x2_0 = testutil::rand_complex(rng);
    const Complex y0 = p.a1 * x1_0 + p.a2 * x2_0;
    const Complex w0 = p.b1 * x1_0 + p.b2 * x2_0;
    if (std::abs(y0) < 0.3) continue;
    const Complex u0 = w0 / y0;
    const double t_star = 0.5 / std::norm(y0);  // |1/(2 y0^2)|
    const double horizon = 0.2 * t_star;

    std::vector<Complex> grid = real_grid(horizon, 33);
    std::vector<Complex> u;
    try {
      u = u_of_t(u0, y0, spec, grid);
    } catch (const NumericalError&) {
      continue;  // u-flow blew up inside the horizon; not this test's target
    }

    OdeProblem prob;
    prob.dimension = 1;
    prob.rhs = [&](Complex t, const std::vector<Complex>& v,
                   std::vector<Complex>& dvdt) {
      const Complex y = y_exact(y0, t);
      const Complex uu = v[0];
      dvdt[0] = y * y * (uu - spec.u1) * (uu - spec.u2) * (uu - spec.u3);
    };
    prob.initial_state = {u0};
    prob.path = grid;
    prob.rel_tol = 1e-11;
    prob.abs_tol = 1e-13;
    OdeSolution sol = integrate(prob);
    if (sol.blew_up) continue;
    ++done;
    double scale = 0.0;
    for (size_t k = 0; k < grid.size(); ++k) {
      scale = std::max(scale, std::abs(sol.states[k][0]));
    }
    for (size_t k = 0; k < grid.size(); ++k) {
      CHECK(std::abs(u[k] - sol.states[k][0]) < 1e-8 * std::max(1.0, scale));
    }
  }
}

TEST_CASE("decoupled solve: fixed point path") {
  Trajectory traj = solve_ivp(
      make_spec(testutil::decoupled_parameters(), {1, 0}, {0, 0}, 0.375, 7));
  REQUIRE(!traj.truncated);
  CHECK(std::abs(traj.states.back().first - Complex(2, 0)) < 1e-12);
  CHECK(std::abs(traj.states.back().second) < 1e-12);
}

TEST_CASE("decoupled solve: golden sample at 1/32") {
  Trajectory traj = solve_ivp(
      make_spec(testutil::decoupled_parameters(), {1, 0}, {1, 0}, 1.0 / 32, 5));
  REQUIRE(!traj.truncated);
  const Complex x1 = traj.states.back().first;
  const Complex x2 = traj.states.back().second;
  CHECK(std::abs(x1 - Complex(0.083228, 0)) < 1e-6);
  CHECK(std::abs(x2 - Complex(2.226173, 0)) < 1e-6);
  for (double r : traj.implicit_residuals) CHECK(r < 1e-8);
}

TEST_CASE("equilibrium initial state") {
  Trajectory traj = solve_ivp(
      make_spec(testutil::golden_parameters(), {0, 0}, {0, 0}, 1.0, 11));
  for (const auto& [x1, x2] : traj.states) {
    CHECK(std::abs(x1) == 0.0);
    CHECK(std::abs(x2) == 0.0);
  }
}

TEST_CASE("y0 = 0 path") {
  // a = (1,1): choose x0 with x1 + x2 = 0 so y0 = 0 but w0 != 0.
  Trajectory traj = solve_ivp(
      make_spec(testutil::decoupled_parameters(), {0.5, 0}, {-0.5, 0}, 0.2, 9));
  REQUIRE(!traj.truncated);
  // with y = 0 the state stays on the w-line; check against RK
  auto reference = testutil::rk_reference(
      forward(testutil::decoupled_parameters()), {0.5, 0}, {-0.5, 0},
      {0, 0.025, 0.05, 0.075, 0.1, 0.125, 0.15, 0.175, 0.2});
  for (size_t k = 0; k < traj.states.size(); ++k) {
    CHECK(std::abs(traj.states[k].first - reference[k].first) < 1e-8);
    CHECK(std::abs(traj.states[k].second - reference[k].second) < 1e-8);
  }
}

TEST_CASE("analytic solution matches RK integration of the raw system") {
  std::mt19937_64 rng(311);
  int done = 0;
  while (done < 50) {
    ParameterSet p = testutil::random_parameters(rng);
    SpectralData spec = spectral(p.gamma1, p.gamma2, p.gamma3);
    if (spec.degenerate) continue;
    const Complex x1_0 = testutil::rand_complex(rng, 0.8);
    const Complex x2_0 = testutil::rand_complex(rng, 0.8);
    IvpSpec ivp;
    ivp.parameters = p;
    ivp.x1_0 = x1_0;
    ivp.x2_0 = x2_0;
    const Complex y0 = p.a1 * x1_0 + p.a2 * x2_0;
    if (std::abs(y0) < 0.2) continue;
    // |1 - 2 y0^2 t| >= 0.6 on this range, so the y-factor stays regular
    SingularityReport sing = singularity_time(ivp);
    double horizon = 0.2 / std::norm(y0);
    if (sing.finite && sing.earliest > 0.0) {
      horizon = std::min(horizon, 0.4 * sing.earliest);
    }
    std::vector<double> times;
    for (int k = 0; k < 17; ++k) times.push_back(horizon * k / 16);
    ivp.time_grid = real_grid(horizon, 17);

    Trajectory traj;
    try {
      traj = solve_ivp(ivp);
    } catch (const NumericalError&) {
      continue;
    }
    if (traj.truncated) continue;
    auto reference =
        testutil::rk_reference(forward(p), x1_0, x2_0, times, 1e-12);
    ++done;
    double sup = 0.0, scale = 0.0;
    for (size_t k = 0; k < times.size(); ++k) {
      sup = std::max(sup,
                     std::abs(traj.states[k].first - reference[k].first));
      sup = std::max(sup,
                     std::abs(traj.states[k].second - reference[k].second));
      scale = std::max({scale, std::abs(reference[k].first),
                        std::abs(reference[k].second)});
    }
    CHECK(sup < 1e-6 * std::max(1.0, scale));
    for (double r : traj.implicit_residuals) CHECK(r < 1e-8);
  }
}

TEST_CASE("scaling covariance x(t; eta x0) = eta x(eta^2 t; x0)") {
  std::mt19937_64 rng(321);
  int done = 0;
  while (done < 20) {
    ParameterSet p = testutil::random_parameters(rng);
    const Complex x1_0 = testutil::rand_complex(rng, 0.7);
    const Complex x2_0 = testutil::rand_complex(rng, 0.7);
    IvpSpec probe;
    probe.parameters = p;
    probe.x1_0 = x1_0;
    probe.x2_0 = x2_0;
    const Complex y0 = p.a1 * x1_0 + p.a2 * x2_0;
    if (std::abs(y0) < 0.2) continue;
    SingularityReport sing = singularity_time(probe);
    double horizon = 0.05 / std::norm(y0);  // safe for eta = 2 as well
    if (sing.finite && sing.earliest > 0.0) {
      horizon = std::min(horizon, 0.05 * sing.earliest);
    }

    bool usable = true;
    for (double eta : {0.5, 2.0}) {
      IvpSpec scaled = probe;
      scaled.x1_0 = eta * x1_0;
      scaled.x2_0 = eta * x2_0;
      scaled.time_grid = real_grid(horizon, 9);
      IvpSpec base = probe;
      base.time_grid.clear();
      for (const Complex& t : scaled.time_grid) {
        base.time_grid.push_back(eta * eta * t);
      }
      Trajectory lhs, rhs;
      try {
        lhs = solve_ivp(scaled);
        rhs = solve_ivp(base);
      } catch (const NumericalError&) {
        usable = false;
        break;
      }
      if (lhs.truncated || rhs.truncated) {
        usable = false;
        break;
      }
      for (size_t k = 0; k < lhs.states.size(); ++k) {
        const Complex e1 = lhs.states[k].first - eta * rhs.states[k].first;
        const Complex e2 = lhs.states[k].second - eta * rhs.states[k].second;
        const double scale =
            std::max(1.0, eta * std::abs(rhs.states[k].first) +
                              eta * std::abs(rhs.states[k].second));
        CHECK(std::abs(e1) < 1e-8 * scale);
        CHECK(std::abs(e2) < 1e-8 * scale);
      }
    }
    if (usable) ++done;
  }
}

TEST_CASE("singularity report golden values") {
  IvpSpec ivp;
  ivp.parameters = testutil::decoupled_parameters();
  ivp.x1_0 = {1, 0};
  ivp.x2_0 = {1, 0};
  SingularityReport r = singularity_time(ivp);
  // y0 = 2 gives t*_y = 1/8; the w-factor blows up earlier at 1/18
  CHECK(r.y_singularity_real);
  CHECK(std::abs(r.t_star_y - Complex(1.0 / 8, 0)) < 1e-12);
  CHECK(r.finite);
  CHECK(std::abs(r.earliest - 1.0 / 18) < 1e-3);
}

TEST_CASE("truncation at a real singularity") {
  IvpSpec ivp;
  ivp.parameters = testutil::decoupled_parameters();
  ivp.x1_0 = {1, 0};
  ivp.x2_0 = {1, 0};
  ivp.time_grid = real_grid(0.12, 25);  // crosses t* = 1/18 and 1/8
  Trajectory traj = solve_ivp(ivp);
  CHECK(traj.truncated);
  CHECK(traj.states.size() < 25);
  CHECK(traj.singular_time.real() <= 0.12);
}
