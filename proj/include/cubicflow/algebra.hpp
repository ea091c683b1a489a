#pragma once

#include <array>
#include <complex>
#include <utility>

namespace cubicflow {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

bool is_finite(Complex z);

// Lexicographic order by real part, then imaginary part.
bool lex_less(Complex a, Complex b);

/// Roots of a monic cubic u^3 + p2 u^2 + p1 u + p0, lexicographically ordered.
/// discriminant_magnitude is the polynomial discriminant normalized by the
/// coefficient scale; values below ~1e-9 signal near-repeated roots.
struct CubicRoots {
  std::array<Complex, 3> roots;
  double discriminant_magnitude = 0.0;
};

CubicRoots solve_cubic(Complex p2, Complex p1, Complex p0);

/// Both roots of the monic quadratic u^2 + p1 u + p0, lexicographically ordered.
std::pair<Complex, Complex> solve_quadratic(Complex p1, Complex p0);

/// base^exponent on the branch selected by an explicit winding count:
/// exp(exponent * (Log(base) + 2*pi*i*winding)). Throws ValidationError on
/// zero base.
Complex tracked_power(Complex base, double exponent, int winding);
Complex tracked_power(Complex base, Complex exponent, int winding);

/// Logarithm of `value` on the branch closest to `previous_log` (phase
/// unwrapping along a path).
Complex tracked_log(Complex value, Complex previous_log);

/// Winding count encoded in an unwrapped logarithm relative to the principal
/// branch.
int winding_of(Complex unwrapped_log, Complex value);

}  // namespace cubicflow
