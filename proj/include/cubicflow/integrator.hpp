#pragma once

#include <functional>
#include <vector>

#include "cubicflow/algebra.hpp"

namespace cubicflow {

/// ODE over complex states along a piecewise-linear path in complex time.
/// `path` lists the requested sample points, starting at 0; the solution is
/// reported exactly at those points.
struct OdeProblem {
  int dimension = 0;
  std::function<void(Complex t, const std::vector<Complex>& y,
                     std::vector<Complex>& dydt)>
      rhs;
  std::vector<Complex> initial_state;
  std::vector<Complex> path;
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = 0.0;  // 0 = unrestricted (in path arclength units)
};

struct OdeSolution {
  std::vector<Complex> times;
  std::vector<std::vector<Complex>> states;
  bool blew_up = false;
  Complex blowup_time;
  double closure_defect = 0.0;  // set by integrate_circle
};

/// Adaptive embedded 5(4) pair with PI step control. On blow-up (state norm
/// above 1e12 or step underflow) the solution is truncated at the last good
/// sample and flagged.
OdeSolution integrate(const OdeProblem& problem);

/// Integrates around the circle of given center and radius in complex time,
/// starting (and ending) at the point of the circle closest to the origin.
/// The closure defect ||end - start|| is recorded.
OdeSolution integrate_circle(const OdeProblem& problem, double radius,
                             Complex center, int samples);

}  // namespace cubicflow
