#include "cubicflow/solver.hpp"

#include <algorithm>
#include <cmath>

#include "cubicflow/errors.hpp"
#include "cubicflow/integrator.hpp"

namespace cubicflow {

namespace {

Complex poly_p(const SpectralData& s, Complex u) {
  return (u - s.u1) * (u - s.u2) * (u - s.u3);
}

double root_scale(const SpectralData& s) {
  return std::max({1.0, std::abs(s.u1), std::abs(s.u2), std::abs(s.u3)});
}

// Branch-tracked continuation state for the implicit relation: unwrapped logs
// of the three factors (u - u_j)/(u0 - u_j) and of the right-hand side
// 1 - 2 y0^2 t.
class Continuation {
 public:
  Continuation(Complex u0, Complex y0, const SpectralData& s)
      : s_(s), u0_(u0), y0_(y0), u_(u0), t_(0.0) {
    const double scale = root_scale(s);
    for (Complex uj : {s.u1, s.u2, s.u3}) {
      if (std::abs(u0 - uj) < 1e-12 * scale) {
        throw NumericalError("u continuation: u0 coincides with a root");
      }
    }
    L_ = {Complex{}, Complex{}, Complex{}};
    Ly_ = Complex{};
    lam_ = {s.lambda1, s.lambda2, s.lambda3};
    roots_ = {s.u1, s.u2, s.u3};
  }

  Complex u() const { return u_; }
  Complex y() const { return y0_ * std::exp(-0.5 * Ly_); }

  std::array<int, 3> windings() const {
    std::array<int, 3> w;
    for (int j = 0; j < 3; ++j) {
      w[j] = winding_of(L_[j] + std::log(u0_ - roots_[j]), u_ - roots_[j]);
    }
    return w;
  }

  double residual() const {
    Complex acc{};
    for (int j = 0; j < 3; ++j) acc += -2.0 * lam_[j] * L_[j];
    return std::abs(std::exp(acc) - std::exp(Ly_));
  }

  // Advance to t_next, bisecting as needed. Throws NumericalError on failure.
  void advance(Complex t_next) {
    advance_impl(t_next, 0);
    t_ = t_next;
  }

 private:
  void advance_impl(Complex t_target, int depth) {
    if (depth > 48) {
      throw NumericalError("u continuation: step underflow (branch point?)");
    }
    const Complex u_save = u_;
    const auto L_save = L_;
    const Complex Ly_save = Ly_;
    const Complex t_save = t_;
    if (!try_step(t_target)) {
      u_ = u_save;
      L_ = L_save;
      Ly_ = Ly_save;
      t_ = t_save;
      const Complex mid = t_save + 0.5 * (t_target - t_save);
      advance_impl(mid, depth + 1);
      advance_impl(t_target, depth + 1);
    }
  }

  Complex rhs_factor(Complex t) const {
    return 1.0 - 2.0 * y0_ * y0_ * t;
  }

  // u' = y(t)^2 P(u) with y^2 = y0^2 / (1 - 2 y0^2 t).
  Complex udot(Complex t, Complex u) const {
    return y0_ * y0_ / rhs_factor(t) * poly_p(s_, u);
  }

  bool try_step(Complex t_next) {
    const Complex r_next = rhs_factor(t_next);
    if (std::abs(r_next) < 1e-14) return false;  // y-factor singularity
    Complex Ly_next;
    try {
      Ly_next = tracked_log(r_next, Ly_);
    } catch (const ValidationError&) {
      return false;
    }
    if (std::abs((Ly_next - Ly_).imag()) > 1.2) return false;

    // RK4 predictor on the u-ODE.
    const Complex dt = t_next - t_;
    Complex u = u_;
    {
      const Complex k1 = udot(t_, u);
      const Complex k2 = udot(t_ + 0.5 * dt, u + 0.5 * dt * k1);
      const Complex k3 = udot(t_ + 0.5 * dt, u + 0.5 * dt * k2);
      const Complex k4 = udot(t_ + dt, u + dt * k3);
      u += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (!is_finite(u)) return false;
    const double scale = root_scale(s_);
    if (std::abs(u - u_) > 0.5 * scale + 0.5 * std::abs(u_)) return false;

    // Newton corrector in the log domain.
    auto L = L_;
    for (int iter = 0; iter < 40; ++iter) {
      Complex g = -Ly_next;
      Complex dg{};
      for (int j = 0; j < 3; ++j) {
        const Complex diff = u - roots_[j];
        if (std::abs(diff) < 1e-12 * scale) return false;
        Complex Lj;
        try {
          Lj = tracked_log(diff / (u0_ - roots_[j]), L[j]);
        } catch (const ValidationError&) {
          return false;
        }
        if (std::abs((Lj - L_[j]).imag()) > 2.5) return false;
        L[j] = Lj;
        g += -2.0 * lam_[j] * Lj;
        dg += -2.0 * lam_[j] / diff;
      }
      if (std::abs(g) < 1e-13) {
        u_ = u;
        L_ = L;
        Ly_ = Ly_next;
        return true;
      }
      if (std::abs(dg) < 1e-300) return false;
      const Complex step = g / dg;
      if (!is_finite(step)) return false;
      if (std::abs(step) > 0.5 * scale) return false;  // force subdivision
      u -= step;
    }
    return false;
  }

  const SpectralData& s_;
  Complex u0_, y0_, u_, t_;
  std::array<Complex, 3> L_;
  std::array<Complex, 3> lam_;
  std::array<Complex, 3> roots_;
  Complex Ly_;
};

void check_grid(const std::vector<Complex>& grid) {
  if (grid.empty()) throw ValidationError("time grid is empty");
  if (grid.front() != Complex{}) {
    throw ValidationError("time grid must start at 0");
  }
}

}  // namespace

Complex y_exact(Complex y0, Complex t) {
  const Complex r = 1.0 - 2.0 * y0 * y0 * t;
  if (std::abs(r) < 1e-14) {
    throw NumericalError("y_exact: blow-up at t* = 1/(2 y0^2)");
  }
  return y0 * std::pow(r, -0.5);
}

Complex u_implicit_residual(Complex u, Complex t, Complex u0, Complex y0,
                            const SpectralData& spec,
                            const std::array<int, 3>& winding) {
  if (spec.degenerate) {
    throw ValidationError("u_implicit_residual: degenerate spectrum");
  }
  const std::array<Complex, 3> roots = {spec.u1, spec.u2, spec.u3};
  const std::array<Complex, 3> lam = {spec.lambda1, spec.lambda2,
                                      spec.lambda3};
  const double scale = root_scale(spec);
  Complex prod = 1.0;
  for (int j = 0; j < 3; ++j) {
    const Complex num = u - roots[j];
    const Complex den = u0 - roots[j];
    if (std::abs(num) < 1e-12 * scale || std::abs(den) < 1e-12 * scale) {
      throw NumericalError("u_implicit_residual: factor at a pole");
    }
    prod *= tracked_power(num / den, -2.0 * lam[j], winding[j]);
  }
  return prod - (1.0 - 2.0 * y0 * y0 * t);
}

std::vector<Complex> u_of_t(Complex u0, Complex y0, const SpectralData& spec,
                            const std::vector<Complex>& time_grid) {
  check_grid(time_grid);
  if (spec.degenerate) {
    throw ValidationError("u_of_t: degenerate spectrum");
  }
  std::vector<Complex> out;
  out.reserve(time_grid.size());

  // Fixed point: u0 on a root of the cubic.
  if (std::abs(poly_p(spec, u0)) <
      1e-10 * std::pow(root_scale(spec) + std::abs(u0), 3)) {
    out.assign(time_grid.size(), u0);
    return out;
  }

  Continuation cont(u0, y0, spec);
  out.push_back(u0);
  for (size_t i = 1; i < time_grid.size(); ++i) {
    cont.advance(time_grid[i]);
    out.push_back(cont.u());
  }
  return out;
}

Trajectory solve_ivp(const IvpSpec& spec) {
  spec.parameters.validate();
  check_grid(spec.time_grid);
  const ParameterSet& p = spec.parameters;
  const Complex c = p.cross();
  const Complex y0 = p.a1 * spec.x1_0 + p.a2 * spec.x2_0;
  const Complex w0 = p.b1 * spec.x1_0 + p.b2 * spec.x2_0;
  const double data_scale =
      std::max({std::abs(spec.x1_0), std::abs(spec.x2_0), 1e-300});

  Trajectory traj;
  auto push = [&](Complex t, Complex x1, Complex x2, Complex u,
                  std::array<int, 3> w, double res) {
    traj.times.push_back(t);
    traj.states.emplace_back(x1, x2);
    traj.u_values.push_back(u);
    traj.winding.push_back(w);
    traj.implicit_residuals.push_back(res);
  };

  // Equilibrium.
  if (std::abs(y0) < 1e-14 * data_scale && std::abs(w0) < 1e-14 * data_scale) {
    for (Complex t : spec.time_grid) push(t, 0.0, 0.0, 0.0, {0, 0, 0}, 0.0);
    return traj;
  }

  // y0 = 0: y vanishes identically and w obeys the same cubic blow-up law.
  if (std::abs(y0) < 1e-13 * data_scale * (std::abs(p.a1) + std::abs(p.a2))) {
    Complex Lw{};
    for (Complex t : spec.time_grid) {
      const Complex r = 1.0 - 2.0 * w0 * w0 * t;
      if (std::abs(r) < 1e-14) {
        traj.truncated = true;
        traj.singular_time = t;
        return traj;
      }
      Lw = tracked_log(r, Lw);
      const Complex w = w0 * std::exp(-0.5 * Lw);
      push(t, -p.a2 * w / c, p.a1 * w / c, 0.0, {0, 0, 0}, 0.0);
    }
    return traj;
  }

  const Complex u0 = w0 / y0;
  const SpectralData s = spectral(p.gamma1, p.gamma2, p.gamma3);
  const double uscale = root_scale(s) + std::abs(u0);

  auto emit = [&](Complex t, Complex y, Complex u, std::array<int, 3> w,
                  double res) {
    const Complex wv = u * y;
    push(t, (p.b2 * y - p.a2 * wv) / c, -(p.b1 * y - p.a1 * wv) / c, u, w,
         res);
  };

  // u0 on a root of the cubic: u stays put, only y evolves.
  const bool u_fixed =
      std::abs(poly_p(s, u0)) < 1e-10 * uscale * uscale * uscale;
  if (u_fixed) {
    Complex Ly{};
    for (Complex t : spec.time_grid) {
      const Complex r = 1.0 - 2.0 * y0 * y0 * t;
      if (std::abs(r) < 1e-14) {
        traj.truncated = true;
        traj.singular_time = t;
        return traj;
      }
      Ly = tracked_log(r, Ly);
      emit(t, y0 * std::exp(-0.5 * Ly), u0, {0, 0, 0}, 0.0);
    }
    return traj;
  }

  if (s.degenerate) {
    throw NumericalError(
        "solve_ivp: degenerate spectrum with non-stationary u");
  }

  Continuation cont(u0, y0, s);
  emit(spec.time_grid.front(), y0, u0, {0, 0, 0}, 0.0);
  for (size_t i = 1; i < spec.time_grid.size(); ++i) {
    try {
      cont.advance(spec.time_grid[i]);
    } catch (const NumericalError&) {
      traj.truncated = true;
      traj.singular_time = spec.time_grid[i];
      return traj;
    }
    emit(spec.time_grid[i], cont.y(), cont.u(), cont.windings(),
         cont.residual());
  }
  return traj;
}

SingularityReport singularity_time(const IvpSpec& spec) {
  spec.parameters.validate();
  const ParameterSet& p = spec.parameters;
  const Complex y0 = p.a1 * spec.x1_0 + p.a2 * spec.x2_0;
  const Complex w0 = p.b1 * spec.x1_0 + p.b2 * spec.x2_0;
  const double data_scale =
      std::max({std::abs(spec.x1_0), std::abs(spec.x2_0), 1e-300});

  SingularityReport rep;
  const bool y_zero =
      std::abs(y0) < 1e-13 * data_scale * (std::abs(p.a1) + std::abs(p.a2));
  const Complex driver = y_zero ? w0 : y0;
  if (driver == Complex{}) return rep;  // equilibrium: no singularity

  rep.t_star_y = 1.0 / (2.0 * driver * driver);
  const double mag = std::abs(rep.t_star_y);
  rep.y_singularity_real = std::abs(rep.t_star_y.imag()) < 1e-12 * mag &&
                           rep.t_star_y.real() > 0.0;
  double horizon = rep.y_singularity_real ? 0.995 * rep.t_star_y.real()
                                          : 3.0 * mag;
  if (rep.y_singularity_real) {
    rep.finite = true;
    rep.earliest = rep.t_star_y.real();
  }
  if (y_zero) return rep;

  const SpectralData s = spectral(p.gamma1, p.gamma2, p.gamma3);
  const Complex u0 = w0 / y0;
  const double uscale = root_scale(s) + std::abs(u0);
  if (std::abs(poly_p(s, u0)) < 1e-10 * uscale * uscale * uscale) {
    return rep;  // u stationary: only the y-factor can blow up
  }

  // Scan the u-ODE for finite-time escape of u (w-type blow-up).
  OdeProblem prob;
  prob.dimension = 1;
  prob.initial_state = {u0};
  prob.rel_tol = 1e-8;
  prob.abs_tol = 1e-10;
  prob.rhs = [&](Complex t, const std::vector<Complex>& u,
                 std::vector<Complex>& du) {
    const Complex r = 1.0 - 2.0 * y0 * y0 * t;
    du[0] = y0 * y0 / r * poly_p(s, u[0]);
  };
  const int n = 256;
  for (int k = 0; k <= n; ++k) {
    prob.path.push_back(horizon * static_cast<double>(k) / n);
  }
  const OdeSolution scan = integrate(prob);
  if (scan.blew_up) {
    rep.u_blowup = true;
    rep.t_star_u = scan.blowup_time;
    const double tu = scan.blowup_time.real();
    if (!rep.finite || tu < rep.earliest) {
      rep.finite = true;
      rep.earliest = tu;
    }
  }
  return rep;
}

}  // namespace cubicflow
