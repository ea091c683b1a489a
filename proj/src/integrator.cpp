#include "cubicflow/integrator.hpp"

#include <algorithm>
#include <cmath>

#include "cubicflow/errors.hpp"

namespace cubicflow {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
constexpr double kC[7] = {0.0,     1.0 / 5, 3.0 / 10, 4.0 / 5,
                          8.0 / 9, 1.0,     1.0};
constexpr double kB5[7] = {35.0 / 384,    0.0,  500.0 / 1113, 125.0 / 192,
                           -2187.0 / 6784, 11.0 / 84, 0.0};
constexpr double kB4[7] = {5179.0 / 57600,    0.0,
                           7571.0 / 16695,    393.0 / 640,
                           -92097.0 / 339200, 187.0 / 2100,
                           1.0 / 40};

constexpr double kBlowupNorm = 1e12;

double inf_norm(const std::vector<Complex>& v) {
  double n = 0.0;
  for (const Complex& z : v) n = std::max(n, std::abs(z));
  return n;
}

class Stepper {
 public:
  explicit Stepper(const OdeProblem& p) : p_(p), k_(7), scratch_(p.dimension) {
    for (auto& stage : k_) stage.resize(p.dimension);
  }

  // One accepted adaptive step from (s, y) along direction dir (unit complex
  // time per unit s); h is updated in place. Returns false on underflow.
  bool step(double& s, double s_end, std::vector<Complex>& y, Complex t_base,
            Complex dir, double& h) {
    const double floor = 1e-12 * std::max(1.0, s_end);
    while (true) {
      h = std::min(h, s_end - s);
      if (p_.max_step > 0.0) h = std::min(h, p_.max_step);
      if (h < floor) return false;

      for (int stage = 0; stage < 7; ++stage) {
        scratch_ = y;
        for (int prev = 0; prev < stage; ++prev) {
          const double a = kA[stage][prev];
          if (a == 0.0) continue;
          for (int d = 0; d < p_.dimension; ++d) {
            scratch_[d] += h * a * k_[prev][d];
          }
        }
        const Complex t = t_base + dir * (s + kC[stage] * h);
        p_.rhs(t, scratch_, k_[stage]);
        for (int d = 0; d < p_.dimension; ++d) k_[stage][d] *= dir;
      }

      double err = 0.0;
      std::vector<Complex> y5 = y;
      for (int d = 0; d < p_.dimension; ++d) {
        Complex acc5{}, acc4{};
        for (int stage = 0; stage < 7; ++stage) {
          acc5 += kB5[stage] * k_[stage][d];
          acc4 += kB4[stage] * k_[stage][d];
        }
        y5[d] += h * acc5;
        const double scale =
            p_.abs_tol +
            p_.rel_tol * std::max(std::abs(y[d]), std::abs(y5[d]));
        const double e = std::abs(h * (acc5 - acc4)) / scale;
        err += e * e;
      }
      err = std::sqrt(err / p_.dimension);

      if (err <= 1.0 || !std::isfinite(err)) {
        const bool bad = !std::isfinite(err) || inf_norm(y5) > kBlowupNorm;
        if (bad) {
          // Treat as rejection; shrink until underflow reports blow-up.
          h *= 0.25;
          if (h < floor) return false;
          continue;
        }
        s += h;
        y.swap(y5);
        // PI controller.
        const double e_clamped = std::max(err, 1e-10);
        double factor = 0.9 * std::pow(e_clamped, -0.7 / 5.0) *
                        std::pow(prev_err_, 0.4 / 5.0);
        factor = std::clamp(factor, 0.2, 5.0);
        h *= factor;
        prev_err_ = e_clamped;
        return true;
      }
      h *= std::clamp(0.9 * std::pow(err, -1.0 / 5.0), 0.1, 1.0);
    }
  }

 private:
  const OdeProblem& p_;
  std::vector<std::vector<Complex>> k_;
  std::vector<Complex> scratch_;
  double prev_err_ = 1.0;
};

}  // namespace

OdeSolution integrate(const OdeProblem& problem) {
  if (problem.dimension <= 0 ||
      static_cast<int>(problem.initial_state.size()) != problem.dimension) {
    throw ValidationError("integrate: dimension mismatch");
  }
  if (!problem.rhs) throw ValidationError("integrate: missing right-hand side");
  if (problem.path.empty() || problem.path.front() != Complex{}) {
    throw ValidationError("integrate: path must start at 0");
  }
  if (!(problem.rel_tol > 0.0) || !(problem.abs_tol > 0.0)) {
    throw ValidationError("integrate: tolerances must be positive");
  }

  OdeSolution sol;
  std::vector<Complex> y = problem.initial_state;
  sol.times.push_back(problem.path.front());
  sol.states.push_back(y);

  Stepper stepper(problem);
  for (size_t seg = 1; seg < problem.path.size(); ++seg) {
    const Complex t_base = problem.path[seg - 1];
    const Complex delta = problem.path[seg] - t_base;
    const double span = std::abs(delta);
    if (span == 0.0) {
      sol.times.push_back(problem.path[seg]);
      sol.states.push_back(y);
      continue;
    }
    const Complex dir = delta / span;
    double s = 0.0;
    double h = span / 16.0;
    const double span_slack = 1e-12 * std::max(1.0, span);
    while (span - s > span_slack) {
      if (!stepper.step(s, span, y, t_base, dir, h)) {
        sol.blew_up = true;
        sol.blowup_time = t_base + dir * s;
        return sol;
      }
    }
    sol.times.push_back(problem.path[seg]);
    sol.states.push_back(y);
  }
  return sol;
}

OdeSolution integrate_circle(const OdeProblem& problem, double radius,
                             Complex center, int samples) {
  if (samples < 1) throw ValidationError("integrate_circle: samples < 1");
  if (radius < 0.0) throw ValidationError("integrate_circle: negative radius");

  OdeSolution sol;
  if (radius == 0.0) {
    sol.times.assign(samples + 1, center);
    sol.states.assign(samples + 1, problem.initial_state);
    return sol;
  }

  // Start at the point of the circle nearest the origin (the origin itself
  // when |center| == radius, the case of interest).
  const double theta0 =
      (center == Complex{}) ? 0.0 : std::arg(-center);
  OdeProblem p = problem;
  p.path.clear();
  const Complex start = center + radius * std::exp(Complex(0.0, theta0));
  for (int k = 0; k <= samples; ++k) {
    const double theta = theta0 + kTwoPi * k / samples;
    p.path.push_back(center + radius * std::exp(Complex(0.0, theta)) - start);
  }
  // Shift so the path starts at 0, then shift reported times back.
  OdeSolution raw = integrate(p);
  sol = raw;
  for (Complex& t : sol.times) t += start;
  if (!sol.blew_up && sol.states.size() >= 2) {
    double defect = 0.0;
    const auto& first = sol.states.front();
    const auto& last = sol.states.back();
    for (size_t d = 0; d < first.size(); ++d) {
      defect = std::max(defect, std::abs(last[d] - first[d]));
    }
    sol.closure_defect = defect;
  }
  return sol;
}

}  // namespace cubicflow
