#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cubicflow/model.hpp"

namespace cubicflow {

enum class Coeff { c11 = 0, c12, c13, c14, c21, c22, c23, c24 };

const char* coeff_name(Coeff which);
Coeff coeff_from_name(const std::string& name);

/// Scale-normalized residuals of the solvability constraints. The three
/// cross-multiplied alpha relations and the fifth-degree avatar all encode the
/// first constraint; residual_second is the independent second constraint.
struct ConstraintReport {
  double residual_first_a = 0.0;
  double residual_first_b = 0.0;
  double residual_first_c = 0.0;
  double residual_cross = 0.0;
  double residual_second = 0.0;
  bool satisfied = false;
};

inline constexpr double kConstraintTolerance = 1e-9;

ConstraintReport constraint_residuals(const CoefficientSet& coeffs);

/// Candidate values of one coefficient from the first constraint, solved in
/// terms of the other seven. Throws NumericalError when the formula's
/// denominator vanishes.
std::vector<Complex> first_constraint_solve(const CoefficientSet& coeffs, Coeff which);

/// Same, from the second constraint (both radical signs explored).
std::vector<Complex> second_constraint_solve(const CoefficientSet& coeffs, Coeff which);

struct CompletionResult {
  std::vector<CoefficientSet> completions;  // ordered by residual
  int seeds_tried = 0;
};

/// Completes a coefficient pair so that both constraints hold. Closed-form
/// branch formulas are used where available; a damped two-dimensional Newton
/// iteration from deterministic seeds (plus any caller hints) covers the rest.
/// The two indexed entries of `partial` are ignored on input.
CompletionResult complete_pair(
    const CoefficientSet& partial, Coeff first, Coeff second,
    const std::vector<std::pair<Complex, Complex>>& hint_seeds = {});

/// Unnormalized polynomial values LHS - RHS of the two constraints used by the
/// Newton completion (first-constraint avatar 'a' and the second constraint).
std::pair<Complex, Complex> constraint_pair_values(const CoefficientSet& coeffs);

}  // namespace cubicflow
