#pragma once

#include <vector>

#include "cubicflow/model.hpp"

namespace cubicflow {

/// Coefficients of the reduced system (c14 = c21 = 0):
///   dx1/dt = x1 (g11 x1^2 + g12 x1 x2 + g13 x2^2)
///   dx2/dt = x2 (g21 x1^2 + g22 x1 x2 + g23 x2^2)
struct ReducedCoefficients {
  Complex g11, g12, g13;
  Complex g21, g22, g23;

  double norm() const;
  Complex& at(int idx);  // 0..5 == g11,g12,g13,g21,g22,g23
  Complex at(int idx) const;
};

enum class GCoeff { g11 = 0, g12, g13, g21, g22, g23 };

const char* gcoeff_name(GCoeff which);

struct ReducedRadicals {
  Complex G1;       // sqrt(g12^2 + 4 g13 g21 - 2 g12 g22 + g22^2)
  Complex G2;       // sqrt(g12^2 + 12 g21 g23)
  Complex G_ratio;  // sqrt(g11 / g23)
  Complex FR4;      // [g21(g13 - 3g23) - g22(g12 - g22)] sqrt((g12-g22)^2 + 4 g13 g21)
};

ReducedRadicals reduced_radicals(const ReducedCoefficients& g);

CoefficientSet to_full(const ReducedCoefficients& g);
ReducedCoefficients from_full(const CoefficientSet& coeffs);

/// The x1 <-> x2 exchange on the reduced index set.
ReducedCoefficients reduced_swap(const ReducedCoefficients& g);

struct ReducedConstraintReport {
  double residual_alpha = 0.0;      // single alpha-consistency constraint
  double residual_main1 = 0.0;     // first-constraint avatar (degree 3)
  double residual_main2 = 0.0;     // second constraint (degree 4)
  double residual_extra1[2] = {0.0, 0.0};  // both radical signs
  double residual_extra2[2] = {0.0, 0.0};
  bool satisfied = false;  // gated on the two main residuals
};

ReducedConstraintReport reduced_constraint_residuals(
    const ReducedCoefficients& g);

/// Completes a coefficient pair with the displayed closed forms (mirror pairs
/// via the exchange transform). Exact-zero special branches are included.
std::vector<ReducedCoefficients> reduced_pair_solve(
    const ReducedCoefficients& partial, GCoeff first, GCoeff second);

/// a1 = sqrt(g11), a2 = sqrt(g23) (relative sign resolved by round trip),
/// then b and gamma through the general pipeline on the embedded system.
ParameterSet reduced_invert(const ReducedCoefficients& g);

}  // namespace cubicflow
