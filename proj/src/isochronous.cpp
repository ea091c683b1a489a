#include "cubicflow/isochronous.hpp"

#include <algorithm>
#include <cmath>

#include "cubicflow/errors.hpp"
#include "cubicflow/integrator.hpp"

namespace cubicflow {

IsochronousSystem make_isochronous(const CoefficientSet& base, double omega) {
  if (omega == 0.0 || !std::isfinite(omega)) {
    throw ValidationError("make_isochronous: omega must be nonzero");
  }
  return {base, omega, kPi / std::abs(omega), kTwoPi / std::abs(omega)};
}

Complex tau_of_t(double omega, double t) {
  const Complex two_i_omega(0.0, 2.0 * omega);
  return (std::exp(two_i_omega * t) - 1.0) / two_i_omega;
}

Trajectory solve_tilde(const ParameterSet& params, double omega, Complex x1_0,
                       Complex x2_0, const std::vector<double>& times) {
  if (omega == 0.0) throw ValidationError("solve_tilde: omega must be nonzero");
  if (times.empty() || times.front() != 0.0) {
    throw ValidationError("solve_tilde: time grid must start at 0");
  }

  // Refine so consecutive tau samples subtend a small arc of the circle.
  const double max_dt = kPi / std::abs(omega) / 64.0;
  std::vector<double> fine;
  std::vector<size_t> sample_index;
  fine.push_back(times.front());
  sample_index.push_back(0);
  for (size_t i = 1; i < times.size(); ++i) {
    const double t0 = times[i - 1], t1 = times[i];
    if (!(t1 > t0)) throw ValidationError("solve_tilde: non-monotone grid");
    const int pieces =
        std::max(1, static_cast<int>(std::ceil((t1 - t0) / max_dt)));
    for (int k = 1; k <= pieces; ++k) {
      fine.push_back(t0 + (t1 - t0) * k / pieces);
    }
    sample_index.push_back(fine.size() - 1);
  }

  IvpSpec spec;
  spec.parameters = params;
  spec.x1_0 = x1_0;
  spec.x2_0 = x2_0;
  spec.time_grid.reserve(fine.size());
  for (double t : fine) spec.time_grid.push_back(tau_of_t(omega, t));
  spec.time_grid.front() = Complex{};

  const Trajectory base = solve_ivp(spec);
  Trajectory out;
  out.truncated = base.truncated;
  out.singular_time = base.singular_time;
  for (size_t si = 0; si < sample_index.size(); ++si) {
    const size_t idx = sample_index[si];
    if (idx >= base.states.size()) {
      out.truncated = true;
      break;
    }
    const double t = fine[idx];
    const Complex phase = std::exp(Complex(0.0, omega * t));
    out.times.push_back(t);
    out.states.emplace_back(phase * base.states[idx].first,
                            phase * base.states[idx].second);
    out.u_values.push_back(base.u_values[idx]);
    out.winding.push_back(base.winding[idx]);
    out.implicit_residuals.push_back(base.implicit_residuals[idx]);
  }
  if (out.truncated && out.states.empty()) {
    throw NumericalError("solve_tilde: singularity on the tau path");
  }
  return out;
}

PeriodReport detect_period(const CoefficientSet& coeffs, double omega,
                           Complex x1_0, Complex x2_0, int k_max, double eps) {
  if (k_max < 1) throw ValidationError("detect_period: k_max must be >= 1");
  if (omega == 0.0) throw ValidationError("detect_period: omega must be nonzero");

  const double T_tilde = kTwoPi / std::abs(omega);
  OdeProblem prob;
  prob.dimension = 2;
  prob.initial_state = {x1_0, x2_0};
  prob.rel_tol = 1e-11;
  prob.abs_tol = 1e-13;
  prob.rhs = [&coeffs, omega](Complex, const std::vector<Complex>& x,
                              std::vector<Complex>& dx) {
    const auto [r1, r2] = rhs_eval(coeffs, x[0], x[1]);
    const Complex rot(0.0, omega);
    dx[0] = rot * x[0] + r1;
    dx[1] = rot * x[1] + r2;
  };
  for (int k = 0; k <= k_max; ++k) prob.path.push_back(k * T_tilde);

  const OdeSolution sol = integrate(prob);
  PeriodReport rep;
  if (sol.blew_up) {
    rep.blew_up = true;
    rep.blowup_time = sol.blowup_time;
  }
  const double ref =
      std::max(1.0, std::max(std::abs(x1_0), std::abs(x2_0)));
  for (size_t i = 1; i < sol.states.size(); ++i) {
    const double defect =
        std::max(std::abs(sol.states[i][0] - x1_0),
                 std::abs(sol.states[i][1] - x2_0)) /
        ref;
    rep.defect_at_kT.push_back(defect);
    if (rep.k == 0 && defect < eps) rep.k = static_cast<int>(i);
  }
  return rep;
}

namespace {

bool best_fraction(double x, long long max_den, double tol, Fraction& out) {
  // Continued-fraction convergents.
  double v = x;
  long long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  for (int iter = 0; iter < 64; ++iter) {
    const double a_floor = std::floor(v);
    if (std::abs(a_floor) > 1e15) break;
    const long long a = static_cast<long long>(a_floor);
    const long long h2 = a * h1 + h0;
    const long long k2 = a * k1 + k0;
    if (k2 > max_den || k2 < 0) break;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    if (k1 > 0 &&
        std::abs(x - static_cast<double>(h1) / static_cast<double>(k1)) <
            tol) {
      out = {h1, k1};
      return true;
    }
    const double frac = v - a_floor;
    if (frac < 1e-15) break;
    v = 1.0 / frac;
  }
  return false;
}

}  // namespace

bool rationality_check(const SpectralData& spec, long long max_denominator,
                       double tol, std::array<Fraction, 3>* fractions) {
  if (spec.degenerate) return false;
  const std::array<Complex, 3> lam = {spec.lambda1, spec.lambda2,
                                      spec.lambda3};
  std::array<Fraction, 3> found;
  for (int j = 0; j < 3; ++j) {
    if (std::abs(lam[j].imag()) > tol) return false;
    if (!best_fraction(lam[j].real(), max_denominator, tol, found[j])) {
      return false;
    }
  }
  if (fractions) *fractions = found;
  return true;
}

}  // namespace cubicflow
