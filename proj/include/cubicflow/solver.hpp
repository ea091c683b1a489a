#pragma once

#include <array>
#include <utility>
#include <vector>

#include "cubicflow/model.hpp"

namespace cubicflow {

struct IvpSpec {
  ParameterSet parameters;
  Complex x1_0, x2_0;
  std::vector<Complex> time_grid;  // path from 0, piecewise linear
};

struct Trajectory {
  std::vector<Complex> times;
  std::vector<std::pair<Complex, Complex>> states;
  std::vector<Complex> u_values;
  std::vector<std::array<int, 3>> winding;
  std::vector<double> implicit_residuals;
  bool truncated = false;
  Complex singular_time;  // valid when truncated
};

/// y0 (1 - 2 y0^2 t)^(-1/2), principal branch.
Complex y_exact(Complex y0, Complex t);

/// Product over the three tracked factors minus (1 - 2 y0^2 t).
Complex u_implicit_residual(Complex u, Complex t, Complex u0, Complex y0,
                            const SpectralData& spec,
                            const std::array<int, 3>& winding);

/// Branch-tracked u(t) along the grid: ODE predictor, log-domain Newton
/// corrector on the implicit relation.
std::vector<Complex> u_of_t(Complex u0, Complex y0, const SpectralData& spec,
                            const std::vector<Complex>& time_grid);

Trajectory solve_ivp(const IvpSpec& spec);

struct SingularityReport {
  Complex t_star_y;          // zero of the y-factor (y0 != 0)
  bool y_singularity_real = false;
  bool u_blowup = false;
  Complex t_star_u;          // valid when u_blowup
  double earliest = 0.0;     // earliest singular time on the positive axis
  bool finite = false;       // false when nothing found on the scanned range
};

SingularityReport singularity_time(const IvpSpec& spec);

}  // namespace cubicflow
