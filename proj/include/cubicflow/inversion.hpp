#pragma once

#include <utility>
#include <vector>

#include "cubicflow/constraints.hpp"
#include "cubicflow/model.hpp"

namespace cubicflow {

struct InversionResult {
  ParameterSet parameters;
  Complex alpha;
  std::vector<Complex> beta_candidates;
  double triad_spread = 0.0;    // max disagreement across the four gamma triads
  double residual_K = 0.0;   // worst residual of the four K-equations
};

/// alpha = a2/a1 from the three rational expressions; averaged when they
/// agree, with a fallback to the common roots of the three quadratics when
/// all rational forms are 0/0.
Complex alpha_of(const CoefficientSet& coeffs);

/// All viable alpha values (the fallback path can be multivalued).
std::vector<Complex> alpha_candidates(const CoefficientSet& coeffs);

/// a1 = principal sqrt(c11 + alpha c21), a2 from the linear relation with an
/// alpha*a1 fallback; squares cross-checked against the closed forms A_n(C).
std::pair<Complex, Complex> a_of(const CoefficientSet& coeffs, Complex alpha);

/// Candidates (b1, b2) on the slice b1 = 1 (b2 = 1 as fallback) from the
/// cubic reduction of the bracket identity; roots with vanishing
/// c = a1 b2 - a2 b1 are dropped.
std::vector<std::pair<Complex, Complex>> b_of(const CoefficientSet& coeffs,
                                              Complex a1, Complex a2);

struct GammaResult {
  Complex gamma1, gamma2, gamma3;
  double triad_spread = 0.0;
  double worst_residual = 0.0;  // over all four K-equations
};

/// gamma from the four leave-one-out triads of the linear K-system; the triad
/// with the smallest worst-case residual wins.
GammaResult gamma_of(const CoefficientSet& coeffs, Complex a1, Complex a2,
                     Complex b1, Complex b2);

/// gamma from the first displayed triad formulas (used as a cross-check of
/// the linear-solve route).
std::array<Complex, 3> gamma_triad1_closed(const CoefficientSet& coeffs,
                                           Complex a1, Complex a2, Complex b1,
                                           Complex b2);

/// Full pipeline: alpha -> a -> b -> gamma, candidate filtering by the
/// forward-map residual. Requires constraint_residuals(coeffs).satisfied.
InversionResult invert(const CoefficientSet& coeffs);

}  // namespace cubicflow
