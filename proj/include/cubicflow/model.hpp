#pragma once

#include <utility>

#include "cubicflow/algebra.hpp"

namespace cubicflow {

/// The eight coefficients of the cubic system
///   dx_n/dt = c_n1 x1^3 + c_n2 x1^2 x2 + c_n3 x1 x2^2 + c_n4 x2^3.
struct CoefficientSet {
  Complex c11, c12, c13, c14;
  Complex c21, c22, c23, c24;

  /// Magnitude scale max |c_nl|.
  double norm() const;

  /// Flat access, index 0..7 == c11,c12,c13,c14,c21,c22,c23,c24.
  Complex& at(int idx);
  Complex at(int idx) const;
};

/// The seven parameters of the solvable decomposition. a1,a2,b1,b2 must be
/// nonzero and c = a1 b2 - a2 b1 must not vanish.
struct ParameterSet {
  Complex a1, a2, b1, b2;
  Complex gamma1, gamma2, gamma3;

  Complex cross() const { return a1 * b2 - a2 * b1; }

  /// Throws ValidationError on a vanishing a_n/b_n or degenerate cross term.
  void validate() const;
};

struct KValues {
  Complex K1, K2, K3, K4;
};

/// Roots u_j of u^3 + g1 u^2 + (g2 - 1) u + g3 and the weights
/// lambda_j = 1 / prod_{l != j} (u_j - u_l). When the roots are too close the
/// weights blow up and `degenerate` is set instead.
struct SpectralData {
  Complex u1, u2, u3;
  Complex lambda1, lambda2, lambda3;
  bool degenerate = false;
};

KValues k_values(const ParameterSet& params);

/// Maps parameters to the coefficient octuple of the solvable system.
CoefficientSet forward(const ParameterSet& params);

SpectralData spectral(Complex gamma1, Complex gamma2, Complex gamma3);

/// The x1 <-> x2 exchange symmetry: c11<->c24, c12<->c23, c13<->c22, c14<->c21.
CoefficientSet swap_symmetry(const CoefficientSet& coeffs);

/// Right-hand side of the system at (x1, x2).
std::pair<Complex, Complex> rhs_eval(const CoefficientSet& coeffs, Complex x1,
                                     Complex x2);

}  // namespace cubicflow
