#pragma once

#include <random>
#include <utility>
#include <vector>

#include "cubicflow/integrator.hpp"
#include "cubicflow/model.hpp"

namespace testutil {

using cubicflow::Complex;
using cubicflow::CoefficientSet;
using cubicflow::ParameterSet;

inline Complex rand_complex(std::mt19937_64& rng, double half_width = 1.5) {
  std::uniform_real_distribution<double> d(-half_width, half_width);
  return {d(rng), d(rng)};
}

// Random parameters bounded away from the degenerate strata.
inline ParameterSet random_parameters(std::mt19937_64& rng) {
  ParameterSet p;
  for (;;) {
    p.a1 = rand_complex(rng);
    p.a2 = rand_complex(rng);
    p.b1 = rand_complex(rng);
    p.b2 = rand_complex(rng);
    p.gamma1 = rand_complex(rng);
    p.gamma2 = rand_complex(rng);
    p.gamma3 = rand_complex(rng);
    if (std::abs(p.a1) < 0.3 || std::abs(p.a2) < 0.3 ||
        std::abs(p.b1) < 0.3 || std::abs(p.b2) < 0.3 ||
        std::abs(p.cross()) < 0.3) {
      continue;
    }
    return p;
  }
}

inline ParameterSet golden_parameters() {
  return {{1, 0}, {2, 0}, {3, 0}, {1, 0}, {1, 0}, {1, 0}, {1, 0}};
}

inline ParameterSet decoupled_parameters() {
  return {{1, 0}, {1, 0}, {1, 0}, {2, 0}, {0, 0}, {0, 0}, {0, 0}};
}

inline CoefficientSet decoupled_coefficients() {
  return {{1, 0}, {0, 0}, {-6, 0}, {-6, 0}, {0, 0}, {3, 0}, {9, 0}, {7, 0}};
}

inline double rel_diff(const CoefficientSet& a, const CoefficientSet& b) {
  double num = 0.0, den = 1e-300;
  for (int i = 0; i < 8; ++i) {
    num = std::max(num, std::abs(a.at(i) - b.at(i)));
    den = std::max(den, std::abs(a.at(i)));
  }
  return num / den;
}

// Adaptive RK reference for the raw cubic system on a real grid from 0.
inline std::vector<std::pair<Complex, Complex>> rk_reference(
    const CoefficientSet& coeffs, Complex x1_0, Complex x2_0,
    const std::vector<double>& times, double rel_tol = 1e-11) {
  cubicflow::OdeProblem prob;
  prob.dimension = 2;
  prob.rhs = [&coeffs](Complex, const std::vector<Complex>& y,
                       std::vector<Complex>& dydt) {
    auto [d1, d2] = cubicflow::rhs_eval(coeffs, y[0], y[1]);
    dydt[0] = d1;
    dydt[1] = d2;
  };
  prob.initial_state = {x1_0, x2_0};
  for (double t : times) prob.path.emplace_back(t, 0.0);
  prob.rel_tol = rel_tol;
  prob.abs_tol = rel_tol * 1e-2;
  cubicflow::OdeSolution sol = cubicflow::integrate(prob);
  std::vector<std::pair<Complex, Complex>> out;
  for (const auto& s : sol.states) out.emplace_back(s[0], s[1]);
  return out;
}

}  // namespace testutil
