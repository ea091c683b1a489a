#include "cubicflow/model.hpp"

#include <algorithm>
#include <cmath>

#include "cubicflow/errors.hpp"

namespace cubicflow {

double CoefficientSet::norm() const {
  return std::max({std::abs(c11), std::abs(c12), std::abs(c13), std::abs(c14),
                   std::abs(c21), std::abs(c22), std::abs(c23), std::abs(c24)});
}

Complex& CoefficientSet::at(int idx) {
  switch (idx) {
    case 0: return c11;
    case 1: return c12;
    case 2: return c13;
    case 3: return c14;
    case 4: return c21;
    case 5: return c22;
    case 6: return c23;
    default: return c24;
  }
}

Complex CoefficientSet::at(int idx) const {
  return const_cast<CoefficientSet*>(this)->at(idx);
}

void ParameterSet::validate() const {
  for (const Complex* z : {&a1, &a2, &b1, &b2, &gamma1, &gamma2, &gamma3}) {
    if (!is_finite(*z)) throw ValidationError("ParameterSet: non-finite entry");
  }
  if (a1 == Complex{} || a2 == Complex{} || b1 == Complex{} || b2 == Complex{}) {
    throw ValidationError("ParameterSet: a1, a2, b1, b2 must all be nonzero");
  }
  const double scale = std::abs(a1 * b2) + std::abs(a2 * b1);
  if (std::abs(cross()) < 1e-12 * scale) {
    throw ValidationError("ParameterSet: a1*b2 - a2*b1 vanishes");
  }
}

KValues k_values(const ParameterSet& p) {
  p.validate();
  const Complex &a1 = p.a1, &a2 = p.a2, &b1 = p.b1, &b2 = p.b2;
  const Complex &g1 = p.gamma1, &g2 = p.gamma2, &g3 = p.gamma3;
  KValues k;
  k.K1 = g1 * a1 * b1 * b1 + g2 * a1 * a1 * b1 + g3 * a1 * a1 * a1 + b1 * b1 * b1;
  k.K2 = g1 * (a2 * b1 * b1 + 2.0 * a1 * b1 * b2) +
         g2 * (a1 * a1 * b2 + 2.0 * a1 * a2 * b1) + 3.0 * g3 * a1 * a1 * a2 +
         3.0 * b1 * b1 * b2;
  k.K3 = g1 * (a1 * b2 * b2 + 2.0 * a2 * b1 * b2) +
         g2 * (a2 * a2 * b1 + 2.0 * a1 * a2 * b2) + 3.0 * g3 * a1 * a2 * a2 +
         3.0 * b1 * b2 * b2;
  k.K4 = g1 * a2 * b2 * b2 + g2 * a2 * a2 * b2 + g3 * a2 * a2 * a2 + b2 * b2 * b2;
  return k;
}

CoefficientSet forward(const ParameterSet& p) {
  const KValues k = k_values(p);
  const Complex c = p.cross();
  const Complex &a1 = p.a1, &a2 = p.a2, &b1 = p.b1, &b2 = p.b2;
  CoefficientSet out;
  out.c11 = (a1 * a1 * a1 * b2 - a2 * k.K1) / c;
  out.c21 = (-a1 * a1 * a1 * b1 + a1 * k.K1) / c;
  out.c12 = (3.0 * a1 * a1 * a2 * b2 - a2 * k.K2) / c;
  out.c22 = (-3.0 * a1 * a1 * a2 * b1 + a1 * k.K2) / c;
  out.c13 = (3.0 * a1 * a2 * a2 * b2 - a2 * k.K3) / c;
  out.c23 = (-3.0 * a1 * a2 * a2 * b1 + a1 * k.K3) / c;
  out.c14 = (a2 * a2 * a2 * b2 - a2 * k.K4) / c;
  out.c24 = (-a2 * a2 * a2 * b1 + a1 * k.K4) / c;
  return out;
}

SpectralData spectral(Complex gamma1, Complex gamma2, Complex gamma3) {
  const CubicRoots cubic = solve_cubic(gamma1, gamma2 - 1.0, gamma3);
  SpectralData s;
  s.u1 = cubic.roots[0];
  s.u2 = cubic.roots[1];
  s.u3 = cubic.roots[2];
  const double scale =
      std::max({1.0, std::abs(s.u1), std::abs(s.u2), std::abs(s.u3)});
  const double sep = std::min({std::abs(s.u1 - s.u2), std::abs(s.u2 - s.u3),
                               std::abs(s.u1 - s.u3)});
  if (cubic.discriminant_magnitude < 1e-9 || sep < 1e-9 * scale) {
    s.degenerate = true;
    return s;
  }
  s.lambda1 = 1.0 / ((s.u1 - s.u2) * (s.u1 - s.u3));
  s.lambda2 = 1.0 / ((s.u2 - s.u1) * (s.u2 - s.u3));
  s.lambda3 = 1.0 / ((s.u3 - s.u1) * (s.u3 - s.u2));
  return s;
}

CoefficientSet swap_symmetry(const CoefficientSet& c) {
  return {c.c24, c.c23, c.c22, c.c21, c.c14, c.c13, c.c12, c.c11};
}

std::pair<Complex, Complex> rhs_eval(const CoefficientSet& c, Complex x1,
                                     Complex x2) {
  const Complex x1sq = x1 * x1, x2sq = x2 * x2;
  return {c.c11 * x1sq * x1 + c.c12 * x1sq * x2 + c.c13 * x1 * x2sq +
              c.c14 * x2sq * x2,
          c.c21 * x1sq * x1 + c.c22 * x1sq * x2 + c.c23 * x1 * x2sq +
              c.c24 * x2sq * x2};
}

}  // namespace cubicflow
