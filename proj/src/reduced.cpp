#include "cubicflow/reduced.hpp"

#include <algorithm>
#include <cmath>

#include "cubicflow/errors.hpp"
#include "cubicflow/inversion.hpp"

namespace cubicflow {

namespace {

Complex sq(Complex z) { return z * z; }

}  // namespace

double ReducedCoefficients::norm() const {
  return std::max({std::abs(g11), std::abs(g12), std::abs(g13), std::abs(g21),
                   std::abs(g22), std::abs(g23)});
}

Complex& ReducedCoefficients::at(int idx) {
  switch (idx) {
    case 0: return g11;
    case 1: return g12;
    case 2: return g13;
    case 3: return g21;
    case 4: return g22;
    default: return g23;
  }
}

Complex ReducedCoefficients::at(int idx) const {
  return const_cast<ReducedCoefficients*>(this)->at(idx);
}

const char* gcoeff_name(GCoeff which) {
  static const char* names[6] = {"g11", "g12", "g13", "g21", "g22", "g23"};
  return names[static_cast<int>(which)];
}

ReducedRadicals reduced_radicals(const ReducedCoefficients& g) {
  ReducedRadicals r;
  r.G1 = std::sqrt(sq(g.g12) + 4.0 * g.g13 * g.g21 - 2.0 * g.g12 * g.g22 +
                   sq(g.g22));
  r.G2 = std::sqrt(sq(g.g12) + 12.0 * g.g21 * g.g23);
  if (g.g23 == Complex{}) {
    throw NumericalError("reduced_radicals: g23 = 0, G_ratio undefined");
  }
  r.G_ratio = std::sqrt(g.g11 / g.g23);
  r.FR4 = (g.g21 * (g.g13 - 3.0 * g.g23) - g.g22 * (g.g12 - g.g22)) *
          std::sqrt(sq(g.g12 - g.g22) + 4.0 * g.g13 * g.g21);
  return r;
}

CoefficientSet to_full(const ReducedCoefficients& g) {
  return {g.g11, g.g12, g.g13, 0.0, 0.0, g.g21, g.g22, g.g23};
}

ReducedCoefficients from_full(const CoefficientSet& c) {
  const double scale = c.norm();
  if (std::abs(c.c14) > 1e-12 * scale || std::abs(c.c21) > 1e-12 * scale) {
    throw ValidationError("from_full: coefficients are not of reduced form");
  }
  return {c.c11, c.c12, c.c13, c.c22, c.c23, c.c24};
}

ReducedCoefficients reduced_swap(const ReducedCoefficients& g) {
  return {g.g23, g.g22, g.g21, g.g13, g.g12, g.g11};
}

ReducedConstraintReport reduced_constraint_residuals(
    const ReducedCoefficients& g) {
  const double scale = g.norm();
  if (!(scale > 0.0)) {
    throw ValidationError("reduced_constraint_residuals: zero coefficients");
  }
  const double s3 = scale * scale * scale;
  const double s4 = s3 * scale;
  const double s5 = s4 * scale;
  const Complex &g11 = g.g11, &g12 = g.g12, &g13 = g.g13;
  const Complex &g21 = g.g21, &g22 = g.g22, &g23 = g.g23;

  ReducedConstraintReport rep;
  rep.residual_alpha =
      std::abs(g12 * (g12 * g22 - g13 * g21 - sq(g22) + 3.0 * g21 * g23) -
               g13 * g22 * (3.0 * g11 - g21)) /
      s3;
  rep.residual_main1 =
      std::abs(-3.0 * g11 * g13 * g22 +
               (g12 - g22) * (g12 * g22 - g13 * g21) +
               3.0 * g12 * g21 * g23) /
      s3;
  rep.residual_main2 =
      std::abs(g12 * g22 * (g13 - 3.0 * g23) * (g21 - 3.0 * g11) -
               sq(g12 * g22)) /
      s4;

  const Complex root = std::sqrt(sq(g12 - g22) + 4.0 * g13 * g21);
  const Complex fbase = g21 * (g13 - 3.0 * g23) - g22 * (g12 - g22);
  for (int sign = 0; sign < 2; ++sign) {
    const Complex fr4 = fbase * (sign == 0 ? root : -root);
    rep.residual_extra1[sign] =
        std::abs(-g12 * (2.0 * sq(g22) + g21 * (g13 - 3.0 * g23)) +
                 g22 * (sq(g12) + sq(g22) + 3.0 * g21 * (g13 - g23)) + fr4) /
        s3;
    rep.residual_extra2[sign] =
        std::abs(-sq(sq(g12)) * g22 +
                 g13 * (3.0 * g11 - g21) *
                     (g22 * (sq(g22) + g21 * (g13 - 3.0 * g23)) - fr4) +
                 g12 * sq(g12) * (3.0 * sq(g22) + g21 * (g13 - 3.0 * g23)) +
                 g12 * (-3.0 * sq(g13) * g21 * (g11 - g21) + sq(sq(g22)) -
                        g22 * fr4 - 3.0 * g21 * sq(g22) * g23 +
                        g13 * (9.0 * g21 * g23 * (g11 - g21) -
                               sq(g22) * (6.0 * g11 - 5.0 * g21))) +
                 sq(g12) * (-3.0 * g22 * sq(g22) + fr4 +
                            g22 * (3.0 * g11 * g13 -
                                   g21 * (5.0 * g13 - 6.0 * g23)))) /
        s5;
  }
  rep.satisfied =
      rep.residual_main1 < 1e-9 && rep.residual_main2 < 1e-9;
  return rep;
}

namespace {

bool pair_displayed_reduced(int i, int j) {
  static const int displayed[][2] = {{0, 5}, {1, 4}, {2, 3}, {0, 1}, {0, 2},
                                     {0, 3}, {0, 4}, {1, 2}, {1, 3}};
  for (const auto& p : displayed) {
    if (p[0] == i && p[1] == j) return true;
  }
  return false;
}

void emit(std::vector<std::pair<Complex, Complex>>& out, Complex a, Complex b) {
  if (is_finite(a) && is_finite(b)) out.emplace_back(a, b);
}

std::vector<std::pair<Complex, Complex>> closed_pair_reduced(
    const ReducedCoefficients& g, int i, int j) {
  const Complex &g11 = g.g11, &g12 = g.g12, &g13 = g.g13;
  const Complex &g21 = g.g21, &g22 = g.g22, &g23 = g.g23;
  std::vector<std::pair<Complex, Complex>> out;
  const Complex root1 =
      std::sqrt(sq(g12) + 4.0 * g13 * g21 - 2.0 * g12 * g22 + sq(g22));
  const Complex root2 = std::sqrt(sq(g12) + 12.0 * g21 * g23);

  switch (i * 6 + j) {
    case 0 * 6 + 5:  // (g11, g23), both G1 signs
      if (g13 == Complex{} || g21 == Complex{} || g12 == Complex{}) break;
      for (const Complex r : {root1, -root1}) {
        // g23 follows from the first constraint, which is linear in it once
        // g11 is fixed
        const Complex v11 =
            (sq(g12) + 2.0 * g13 * g21 - g12 * g22 + g12 * r) / (6.0 * g13);
        const Complex v23 =
            (3.0 * v11 * g13 * g22 - (g12 - g22) * (g12 * g22 - g13 * g21)) /
            (3.0 * g12 * g21);
        emit(out, v11, v23);
      }
      break;
    case 1 * 6 + 4: {  // (g12, g22), both sqrt(g11/g23) signs
      if (g23 == Complex{}) break;
      const Complex ratio = std::sqrt(g11 / g23);
      if (ratio == Complex{}) break;
      for (const Complex r : {ratio, -ratio}) {
        emit(out, -(3.0 * g11 - g21) / r, (g13 - 3.0 * g23) * r);
      }
      break;
    }
    case 2 * 6 + 3: {  // (g13, g21)
      if (g23 == Complex{}) break;
      const Complex ratio = std::sqrt(g11 / g23);
      if (ratio == Complex{}) break;
      for (const Complex r : {ratio, -ratio}) {
        emit(out, 3.0 * g23 - g22 / r, 3.0 * g11 - g12 * r);
      }
      break;
    }
    case 0 * 6 + 1: {  // (g11, g12): special branch, then generic
      emit(out, g21 / 3.0, 0.0);
      const Complex d = g13 - 3.0 * g23;
      if (d != Complex{} && g22 != Complex{}) {
        emit(out, sq(g22) * g23 / sq(d),
             (sq(g13) * g21 - 6.0 * g13 * g21 * g23 -
              3.0 * (sq(g22) * g23 - 3.0 * g21 * sq(g23))) /
                 (g22 * d));
      }
      break;
    }
    case 0 * 6 + 2:  // (g11, g13), both G2 signs
      if (g23 == Complex{} || g21 == Complex{}) break;
      for (const Complex r : {root2, -root2}) {
        emit(out, (sq(g12) + 6.0 * g21 * g23 + g12 * r) / (18.0 * g23),
             (g12 * g22 + 6.0 * g21 * g23 - g22 * r) / (2.0 * g21));
      }
      break;
    case 0 * 6 + 3: {  // (g11, g21)
      const Complex d = g13 - 3.0 * g23;
      if (d == Complex{}) break;
      emit(out, sq(g22) * g23 / sq(d),
           g22 * (g12 * d + 3.0 * g22 * g23) / sq(d));
      break;
    }
    case 0 * 6 + 4:  // (g11, g22), both G2 signs
      if (g23 == Complex{}) break;
      for (const Complex r : {root2, -root2}) {
        emit(out, (6.0 * g21 * g23 + g12 * (g12 + r)) / (18.0 * g23),
             -(g13 - 3.0 * g23) * (g12 + r) / (6.0 * g23));
      }
      break;
    case 1 * 6 + 2: {  // (g12, g13)
      if (g23 == Complex{}) break;
      const Complex ratio = std::sqrt(g11 / g23);
      if (ratio == Complex{}) break;
      for (const Complex r : {ratio, -ratio}) {
        emit(out, (3.0 * g11 - g21) / r, 3.0 * g23 - g22 / r);
      }
      break;
    }
    case 1 * 6 + 3:  // (g12, g21)
      emit(out, 0.0, 3.0 * g11);
      break;
    default:
      break;
  }
  return out;
}

}  // namespace

std::vector<ReducedCoefficients> reduced_pair_solve(
    const ReducedCoefficients& partial, GCoeff first, GCoeff second) {
  int i = static_cast<int>(first);
  int j = static_cast<int>(second);
  if (i == j) throw ValidationError("reduced_pair_solve: identical indices");
  if (i > j) std::swap(i, j);

  // Undisplayed pairs go through the exchange transform (index k -> 5 - k).
  if (!pair_displayed_reduced(i, j)) {
    const int mi = 5 - j, mj = 5 - i;
    auto mirrored = reduced_pair_solve(reduced_swap(partial),
                                       static_cast<GCoeff>(mi),
                                       static_cast<GCoeff>(mj));
    for (auto& g : mirrored) g = reduced_swap(g);
    return mirrored;
  }

  const auto candidates = closed_pair_reduced(partial, i, j);
  if (candidates.empty()) {
    throw NumericalError(
        std::string("reduced_pair_solve: displayed formulas inapplicable for "
                    "pair (") +
        gcoeff_name(static_cast<GCoeff>(i)) + ", " +
        gcoeff_name(static_cast<GCoeff>(j)) +
        "); try a different pair or the full complete_pair machinery");
  }

  std::vector<ReducedCoefficients> out;
  for (const auto& [v1, v2] : candidates) {
    ReducedCoefficients g = partial;
    g.at(i) = v1;
    g.at(j) = v2;
    if (!(g.norm() > 0.0)) continue;
    const ReducedConstraintReport rep = reduced_constraint_residuals(g);
    if (rep.residual_main1 > 1e-10 || rep.residual_main2 > 1e-10) continue;
    bool dup = false;
    for (const auto& kept : out) {
      if (std::abs(kept.at(i) - g.at(i)) + std::abs(kept.at(j) - g.at(j)) <
          1e-8 * (1.0 + g.norm())) {
        dup = true;
        break;
      }
    }
    if (!dup) out.push_back(g);
  }
  return out;
}

ParameterSet reduced_invert(const ReducedCoefficients& g) {
  if (g.g11 == Complex{} || g.g23 == Complex{}) {
    throw ValidationError("reduced_invert: g11 and g23 must be nonzero");
  }
  const ReducedConstraintReport rep = reduced_constraint_residuals(g);
  if (!rep.satisfied) {
    throw ConstraintError("reduced_invert: constraints violated");
  }
  const CoefficientSet C = to_full(g);
  const double scale = C.norm();
  const Complex a1 = std::sqrt(g.g11);

  ParameterSet best;
  double best_residual = 1e300;
  for (const Complex a2 : {std::sqrt(g.g23), -std::sqrt(g.g23)}) {
    std::vector<std::pair<Complex, Complex>> bs;
    try {
      bs = b_of(C, a1, a2);
    } catch (const std::runtime_error&) {
      continue;
    }
    for (const auto& [b1, b2] : bs) {
      try {
        const GammaResult gam = gamma_of(C, a1, a2, b1, b2);
        ParameterSet p{a1, a2, b1, b2, gam.gamma1, gam.gamma2, gam.gamma3};
        p.validate();
        const CoefficientSet back = forward(p);
        double diff = 0.0;
        for (int k = 0; k < 8; ++k) {
          diff = std::max(diff, std::abs(back.at(k) - C.at(k)));
        }
        if (diff / scale < best_residual) {
          best_residual = diff / scale;
          best = p;
        }
      } catch (const std::runtime_error&) {
      }
    }
  }
  if (best_residual > 1e-8) {
    throw NumericalError("reduced_invert: no decomposition reproduces the coefficients");
  }
  return best;
}

}  // namespace cubicflow
