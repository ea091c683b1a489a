#include "cubicflow/algebra.hpp"

#include <algorithm>
#include <cmath>

#include "cubicflow/errors.hpp"

namespace cubicflow {

bool is_finite(Complex z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

bool lex_less(Complex a, Complex b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

std::pair<Complex, Complex> solve_quadratic(Complex p1, Complex p0) {
  if (!is_finite(p1) || !is_finite(p0)) {
    throw ValidationError("solve_quadratic: non-finite coefficients");
  }
  const Complex disc = p1 * p1 - 4.0 * p0;
  Complex s = std::sqrt(disc);
  // Pick the sign avoiding cancellation in -p1 -/+ s.
  if (std::abs(-p1 + s) < std::abs(-p1 - s)) s = -s;
  const Complex q = 0.5 * (-p1 + s);
  Complex r1 = q;
  Complex r2 = (std::abs(q) > 0.0) ? p0 / q : -p1 - q;
  if (lex_less(r2, r1)) std::swap(r1, r2);
  return {r1, r2};
}

namespace {

Complex principal_cbrt(Complex z) {
  if (z == Complex(0.0, 0.0)) return {};
  return std::exp(std::log(z) / 3.0);
}

void polish_root(Complex p2, Complex p1, Complex p0, Complex& r) {
  for (int it = 0; it < 2; ++it) {
    const Complex f = ((r + p2) * r + p1) * r + p0;
    const Complex df = (3.0 * r + 2.0 * p2) * r + p1;
    if (std::abs(df) == 0.0) break;
    const Complex step = f / df;
    if (!is_finite(step)) break;
    r -= step;
  }
}

}  // namespace

CubicRoots solve_cubic(Complex p2, Complex p1, Complex p0) {
  if (!is_finite(p2) || !is_finite(p1) || !is_finite(p0)) {
    throw ValidationError("solve_cubic: non-finite coefficients");
  }
  // Depressed form v^3 + p v + q with u = v - p2/3.
  const Complex shift = p2 / 3.0;
  const Complex p = p1 - p2 * p2 / 3.0;
  const Complex q = 2.0 * p2 * p2 * p2 / 27.0 - p2 * p1 / 3.0 + p0;

  std::array<Complex, 3> roots;
  if (std::abs(p) == 0.0 && std::abs(q) == 0.0) {
    roots = {-shift, -shift, -shift};
  } else {
    const Complex half_q = 0.5 * q;
    const Complex s = std::sqrt(half_q * half_q + p * p * p / 27.0);
    Complex radicand = -half_q + s;
    if (std::abs(-half_q - s) > std::abs(radicand)) radicand = -half_q - s;
    const Complex cb = principal_cbrt(radicand);
    if (std::abs(cb) == 0.0) {
      // p == 0 here; three cube roots of -q.
      const Complex r0 = principal_cbrt(-q);
      const Complex w(-0.5, std::sqrt(3.0) / 2.0);
      roots = {r0 - shift, r0 * w - shift, r0 * w * w - shift};
    } else {
      const Complex w(-0.5, std::sqrt(3.0) / 2.0);
      Complex c = cb;
      for (int k = 0; k < 3; ++k) {
        roots[k] = c - p / (3.0 * c) - shift;
        c *= w;
      }
    }
  }

  for (auto& r : roots) polish_root(p2, p1, p0, r);
  std::sort(roots.begin(), roots.end(), lex_less);

  // Discriminant of the monic cubic, normalized by the root scale implied by
  // the coefficients so near-degenerate flags are rescaling-invariant.
  const Complex disc = 18.0 * p2 * p1 * p0 - 4.0 * p2 * p2 * p2 * p0 +
                       p2 * p2 * p1 * p1 - 4.0 * p1 * p1 * p1 -
                       27.0 * p0 * p0;
  const double scale =
      std::max({1.0, std::abs(p2), std::sqrt(std::abs(p1)),
                std::cbrt(std::abs(p0))});
  const double scale6 = std::pow(scale, 6);
  return {roots, std::abs(disc) / scale6};
}

Complex tracked_power(Complex base, Complex exponent, int winding) {
  if (base == Complex(0.0, 0.0)) {
    throw ValidationError("tracked_power: zero base");
  }
  const Complex log_branch =
      std::log(base) + Complex(0.0, kTwoPi * static_cast<double>(winding));
  return std::exp(exponent * log_branch);
}

Complex tracked_power(Complex base, double exponent, int winding) {
  return tracked_power(base, Complex(exponent, 0.0), winding);
}

Complex tracked_log(Complex value, Complex previous_log) {
  if (value == Complex(0.0, 0.0)) {
    throw ValidationError("tracked_log: zero value");
  }
  const Complex principal = std::log(value);
  const double turns =
      std::round((previous_log.imag() - principal.imag()) / kTwoPi);
  return principal + Complex(0.0, kTwoPi * turns);
}

int winding_of(Complex unwrapped_log, Complex value) {
  const double principal_im = std::arg(value);
  return static_cast<int>(
      std::lround((unwrapped_log.imag() - principal_im) / kTwoPi));
}

}  // namespace cubicflow
