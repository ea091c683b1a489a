#include "cubicflow/constraints.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "cubicflow/errors.hpp"

namespace cubicflow {

namespace {

Complex sq(Complex z) { return z * z; }
Complex cu(Complex z) { return z * z * z; }

struct RawConstraints {
  // LHS - RHS of the three cross-multiplied alpha relations (degree 4), the
  // fifth-degree avatar, and the second constraint (degree 4).
  Complex first_a, first_b, first_c, cross5, second;
};

RawConstraints raw_constraints(const CoefficientSet& C) {
  const Complex &c11 = C.c11, &c12 = C.c12, &c13 = C.c13, &c14 = C.c14;
  const Complex &c21 = C.c21, &c22 = C.c22, &c23 = C.c23, &c24 = C.c24;

  const Complex n1 = c12 * c22 - 3.0 * c13 * c21;
  const Complex d1 = 3.0 * (c11 * c22 - c12 * c21 + c21 * c23) - sq(c22);
  const Complex n2 = c13 * c23 - 3.0 * c14 * c22;
  const Complex d2 = c12 * c23 - c13 * c22 - sq(c23) + 3.0 * c22 * c24;
  const Complex n3 = c12 * c23 - 9.0 * c14 * c21;
  const Complex d3 = 3.0 * (c11 * c23 - c13 * c21) + 9.0 * c21 * c24 - c22 * c23;

  RawConstraints r;
  r.first_a = n1 * d2 - n2 * d1;
  r.first_b = n2 * d3 - n3 * d2;
  r.first_c = n3 * d1 - n1 * d3;
  r.cross5 = c14 * (c11 * c23 - c13 * c21) * n1 +
             c21 * (c14 * c22 - c12 * c24) * n2 -
             n3 * (c14 * (c11 * c22 - c12 * c21) +
                   c21 * (c14 * c23 - c13 * c24));
  r.second = (c12 * (c13 - 3.0 * c24) + 3.0 * c14 * (c22 - 3.0 * c11)) *
                 (3.0 * c21 * (c13 - 3.0 * c24) + c23 * (c22 - 3.0 * c11)) -
             sq(n3);
  return r;
}

// The polynomial residuals vanish on a slightly larger set than the solvable
// manifold: points where the only consistent alpha = a2/a1 forces a1^2 =
// c11 + alpha c21 or a2^2 = c24 + c14/alpha to zero satisfy every displayed
// relation yet admit no decomposition. Probe all alpha candidates.
bool decomposable(const CoefficientSet& C) {
  const Complex &c11 = C.c11, &c12 = C.c12, &c13 = C.c13, &c14 = C.c14;
  const Complex &c21 = C.c21, &c22 = C.c22, &c23 = C.c23, &c24 = C.c24;
  const double scale = C.norm();
  const double den_floor = 1e-10 * scale * scale;

  std::vector<Complex> candidates;
  const Complex num[3] = {c12 * c22 - 3.0 * c13 * c21,
                          c13 * c23 - 3.0 * c14 * c22,
                          c12 * c23 - 9.0 * c14 * c21};
  const Complex den[3] = {
      3.0 * (c11 * c22 - c12 * c21 + c21 * c23) - sq(c22),
      c12 * c23 - c13 * c22 - sq(c23) + 3.0 * c22 * c24,
      3.0 * (c11 * c23 - c13 * c21) + 9.0 * c21 * c24 - c22 * c23};
  for (int i = 0; i < 3; ++i) {
    if (std::abs(den[i]) > den_floor) candidates.push_back(num[i] / den[i]);
  }
  const Complex quad[3][3] = {
      {3.0 * c21, 3.0 * c11 - c22, -c12},
      {c22, c12 - c23, -c13},
      {c23, c13 - 3.0 * c24, -3.0 * c14}};
  for (const auto& q : quad) {
    if (std::abs(q[0]) > 1e-10 * scale) {
      auto [r1, r2] = solve_quadratic(q[1] / q[0], q[2] / q[0]);
      candidates.push_back(r1);
      candidates.push_back(r2);
    } else if (std::abs(q[1]) > 1e-10 * scale) {
      candidates.push_back(-q[2] / q[1]);
    }
  }

  for (const Complex alpha : candidates) {
    if (!is_finite(alpha) || std::abs(alpha) < 1e-10) continue;
    bool consistent = true;
    for (const auto& q : quad) {
      const double mag = std::abs(q[0] * alpha * alpha + q[1] * alpha + q[2]);
      const double ref = scale * (1.0 + std::abs(alpha)) *
                         (1.0 + std::abs(alpha));
      if (mag > 1e-7 * ref) {
        consistent = false;
        break;
      }
    }
    if (!consistent) continue;
    const Complex a1sq = c11 + alpha * c21;
    const Complex a2sq = c24 + c14 / alpha;
    if (std::abs(a1sq) > 1e-9 * std::max(1.0, scale) &&
        std::abs(a2sq) > 1e-9 * std::max(1.0, scale)) {
      return true;
    }
  }
  return false;
}

}  // namespace

const char* coeff_name(Coeff which) {
  static const char* names[8] = {"c11", "c12", "c13", "c14",
                                 "c21", "c22", "c23", "c24"};
  return names[static_cast<int>(which)];
}

Coeff coeff_from_name(const std::string& name) {
  for (int i = 0; i < 8; ++i) {
    if (name == coeff_name(static_cast<Coeff>(i))) return static_cast<Coeff>(i);
  }
  throw ValidationError("unknown coefficient name: " + name);
}

ConstraintReport constraint_residuals(const CoefficientSet& C) {
  const double scale = C.norm();
  if (!(scale > 0.0)) {
    throw ValidationError("constraint_residuals: zero coefficient set");
  }
  const double s4 = std::pow(scale, 4);
  const double s5 = std::pow(scale, 5);
  const RawConstraints r = raw_constraints(C);
  ConstraintReport rep;
  rep.residual_first_a = std::abs(r.first_a) / s4;
  rep.residual_first_b = std::abs(r.first_b) / s4;
  rep.residual_first_c = std::abs(r.first_c) / s4;
  rep.residual_cross = std::abs(r.cross5) / s5;
  rep.residual_second = std::abs(r.second) / s4;
  rep.satisfied = rep.residual_first_a < kConstraintTolerance &&
                  rep.residual_first_b < kConstraintTolerance &&
                  rep.residual_first_c < kConstraintTolerance &&
                  rep.residual_cross < kConstraintTolerance &&
                  rep.residual_second < kConstraintTolerance &&
                  decomposable(C);
  return rep;
}

std::pair<Complex, Complex> constraint_pair_values(const CoefficientSet& C) {
  const RawConstraints r = raw_constraints(C);
  return {r.first_a, r.second};
}

namespace {

// Denominator guard relative to the coefficient scale.
void require_denominator(Complex den, double scale, const char* formula) {
  if (std::abs(den) < 1e-12 * std::max(1.0, scale * scale)) {
    throw NumericalError(std::string("formula inapplicable (vanishing "
                                     "denominator): ") + formula);
  }
}

std::vector<Complex> first_constraint_row1(const CoefficientSet& C, int ell) {
  const Complex &c11 = C.c11, &c12 = C.c12, &c13 = C.c13, &c14 = C.c14;
  const Complex &c21 = C.c21, &c22 = C.c22, &c23 = C.c23, &c24 = C.c24;
  const double scale = C.norm();
  switch (ell) {
    case 0: {  // c11
      const Complex den = 3.0 * (3.0 * c14 * c22 - c13 * c23);
      require_denominator(den, scale, "first-constraint c11");
      const Complex num =
          -3.0 * sq(c13) * c21 - sq(c12) * c23 +
          3.0 * c14 * (sq(c22) - 3.0 * c21 * c23) +
          c13 * (c22 * (c12 - c23) + 9.0 * c21 * c24) +
          c12 * (9.0 * c14 * c21 + sq(c23) - 3.0 * c22 * c24);
      return {num / den};
    }
    case 1: {  // c12, quadratic
      require_denominator(2.0 * c23, scale, "first-constraint c12");
      const Complex n = 9.0 * c14 * c21 + c13 * c22 + sq(c23) - 3.0 * c22 * c24;
      const Complex m = 3.0 * sq(c13) * c21 + 9.0 * c11 * c14 * c22 -
                        3.0 * c14 * sq(c22) + 9.0 * c14 * c21 * c23 +
                        c13 * (-3.0 * c11 * c23 + c22 * c23 - 9.0 * c21 * c24);
      const Complex root = std::sqrt(sq(n) - 4.0 * c23 * m);
      return {(n + root) / (2.0 * c23), (n - root) / (2.0 * c23)};
    }
    case 2: {  // c13, quadratic
      require_denominator(6.0 * c21, scale, "first-constraint c13");
      const Complex n =
          9.0 * c21 * c24 + c12 * c22 + 3.0 * c11 * c23 - c22 * c23;
      const Complex m = 3.0 * sq(c22) * c14 - 9.0 * c11 * c14 * c22 +
                        c12 * sq(c23) - 3.0 * c12 * c22 * c24 +
                        9.0 * c12 * c14 * c21 - sq(c12) * c23 -
                        9.0 * c14 * c21 * c23;
      const Complex root = std::sqrt(sq(n) + 12.0 * c21 * m);
      return {(n + root) / (6.0 * c21), (n - root) / (6.0 * c21)};
    }
    default: {  // c14
      const Complex den =
          3.0 * (3.0 * (c11 * c22 - c12 * c21) + 3.0 * c21 * c23 - sq(c22));
      require_denominator(den, scale, "first-constraint c14");
      const Complex num =
          -3.0 * sq(c13) * c21 -
          c12 * (c12 * c23 + 3.0 * c22 * c24 - sq(c23)) +
          c13 * (c12 * c22 + 3.0 * c11 * c23 - c22 * c23 + 9.0 * c21 * c24);
      return {num / den};
    }
  }
}

std::vector<Complex> second_constraint_row1(const CoefficientSet& C, int ell) {
  const Complex &c11 = C.c11, &c12 = C.c12, &c13 = C.c13, &c14 = C.c14;
  const Complex &c21 = C.c21, &c22 = C.c22, &c23 = C.c23, &c24 = C.c24;
  const double scale = C.norm();
  const Complex r1 = std::sqrt(sq(c13 - 3.0 * c24) + 12.0 * c14 * c23);
  const Complex r2 = std::sqrt(sq(3.0 * c11 - c22) + 12.0 * c12 * c21);
  std::vector<Complex> out;
  switch (ell) {
    case 0: {  // c11 with R1
      const Complex den = 18.0 * c14 * c23;
      require_denominator(den, scale, "second-constraint c11");
      for (const Complex r : {r1, -r1}) {
        out.push_back((6.0 * c14 * c22 * c23 +
                       (c12 * c23 + 9.0 * c14 * c21) * (c13 - 3.0 * c24) +
                       (c12 * c23 - 9.0 * c14 * c21) * r) /
                      den);
      }
      return out;
    }
    case 1: {  // c12 with R1
      const Complex den = 2.0 * sq(c23);
      require_denominator(den, scale, "second-constraint c12");
      for (const Complex r : {r1, -r1}) {
        out.push_back(
            (3.0 * sq(c13) * c21 +
             18.0 * c21 * (c14 * c23 - c13 * c24) -
             c13 * c23 * (3.0 * c11 - c22) +
             3.0 * c24 * (c23 * (3.0 * c11 - c22) + 9.0 * c21 * c24) +
             (c23 * (3.0 * c11 - c22) - 3.0 * c13 * c21 + 9.0 * c21 * c24) *
                 r) /
            den);
      }
      return out;
    }
    case 2: {  // c13 with R2
      const Complex den = 6.0 * c12 * c21;
      require_denominator(den, scale, "second-constraint c13");
      for (const Complex r : {r2, -r2}) {
        out.push_back((c12 * c23 * (3.0 * c11 - c22) +
                       9.0 * c21 * (3.0 * c11 * c14 - c14 * c22 +
                                    2.0 * c12 * c24) +
                       (c12 * c23 - 9.0 * c14 * c21) * r) /
                      den);
      }
      return out;
    }
    default: {  // c14 with R2
      const Complex den = 54.0 * sq(c21);
      require_denominator(den, scale, "second-constraint c14");
      for (const Complex r : {r2, -r2}) {
        out.push_back(
            (-3.0 * (3.0 * c11 - c22) * (c13 * c21 - 3.0 * c21 * c24) +
             c23 * (sq(3.0 * c11 - c22) + 6.0 * c12 * c21) +
             (3.0 * c21 * (c13 - 3.0 * c24) - c23 * (3.0 * c11 - c22)) * r) /
            den);
      }
      return out;
    }
  }
}

}  // namespace

std::vector<Complex> first_constraint_solve(const CoefficientSet& C, Coeff which) {
  const int idx = static_cast<int>(which);
  if (idx < 4) return first_constraint_row1(C, idx);
  // Row-two coefficients via the exchange symmetry: c_{2,l} of C sits at
  // c_{1,5-l} of the swapped set.
  return first_constraint_row1(swap_symmetry(C), 7 - idx);
}

std::vector<Complex> second_constraint_solve(const CoefficientSet& C, Coeff which) {
  const int idx = static_cast<int>(which);
  if (idx < 4) return second_constraint_row1(C, idx);
  return second_constraint_row1(swap_symmetry(C), 7 - idx);
}

// ---------------------------------------------------------------------------
// Pair completion.
// ---------------------------------------------------------------------------

namespace {

using PairCandidates = std::vector<std::pair<Complex, Complex>>;

double known_scale(const CoefficientSet& C, int i, int j) {
  double s = 0.0;
  for (int k = 0; k < 8; ++k) {
    if (k == i || k == j) continue;
    s = std::max(s, std::abs(C.at(k)));
  }
  return std::max(s, 1e-300);
}

// Candidate values from the remaining single unknown, once one member of the
// pair has been fixed in closed form. Both constraint appendices are tried.
void append_single_solves(const CoefficientSet& base, int fixed_idx,
                          Complex fixed_value, int open_idx,
                          PairCandidates& out, bool fixed_first) {
  CoefficientSet work = base;
  work.at(fixed_idx) = fixed_value;
  for (auto* solver : {&first_constraint_solve, &second_constraint_solve}) {
    try {
      for (Complex v : (*solver)(work, static_cast<Coeff>(open_idx))) {
        if (fixed_first) {
          out.emplace_back(fixed_value, v);
        } else {
          out.emplace_back(v, fixed_value);
        }
      }
    } catch (const NumericalError&) {
      // That avatar is inapplicable here; others may still work.
    }
  }
}

// All branch values of a Cardano-style nested radical
// (base + s*sqrt(base^2 + 4*inner^3))^(1/3) for both sqrt signs and all three
// cube roots.
std::vector<Complex> cardano_branches(Complex base, Complex inner) {
  std::vector<Complex> out;
  const Complex root = std::sqrt(sq(base) + 4.0 * cu(inner));
  const Complex w(-0.5, std::sqrt(3.0) / 2.0);
  for (const Complex s : {root, -root}) {
    const Complex radicand = base + s;
    if (radicand == Complex{}) continue;
    Complex v = std::exp(std::log(radicand) / 3.0);
    for (int k = 0; k < 3; ++k) {
      out.push_back(v);
      v *= w;
    }
  }
  return out;
}

// Closed-form candidates for the displayed pairs. Index pair (i, j) is
// normalized with i < j; i, j in 0..7 == c11..c14, c21..c24.
PairCandidates closed_form_pair(const CoefficientSet& C, int i, int j) {
  const Complex &c11 = C.c11, &c12 = C.c12, &c13 = C.c13, &c14 = C.c14;
  const Complex &c21 = C.c21, &c22 = C.c22, &c23 = C.c23, &c24 = C.c24;
  PairCandidates out;
  const auto key = i * 8 + j;

  const Complex r1 = std::sqrt(sq(c13 - 3.0 * c24) + 12.0 * c14 * c23);
  const Complex r2 = std::sqrt(sq(3.0 * c11 - c22) + 12.0 * c12 * c21);
  const Complex r4 = std::sqrt(sq(c12 - c23) + 4.0 * c13 * c22);

  switch (key) {
    case 0 * 8 + 7: {  // (c11, c24), both signs of R4
      const Complex den = 6.0 * c13 * c22;
      const Complex den24 = den * (c12 * c22 - 3.0 * c13 * c21);
      if (den == Complex{} || den24 == Complex{}) break;
      for (const Complex r : {r4, -r4}) {
        const Complex v11 =
            (2.0 * c13 * sq(c22) +
             (c12 - c23) * (c12 * c22 + 3.0 * c13 * c21) +
             r * (c12 * c22 - 3.0 * c13 * c21)) /
            den;
        const Complex v24 =
            -(6.0 * cu(c13) * c21 * c22 +
              sq(c13) * (3.0 * c21 * sq(c23) -
                         c12 * (2.0 * sq(c22) + 3.0 * c21 * c23)) +
              (c12 - c23) * (3.0 * c12 * c14 * sq(c22) +
                             c13 * c22 * (c12 * c23 - 9.0 * c14 * c21)) +
              (c13 * c23 - 3.0 * c14 * c22) *
                  (c12 * c22 - 3.0 * c13 * c21) * r) /
            den24;
        out.emplace_back(v11, v24);
      }
      break;
    }
    case 1 * 8 + 6: {  // (c12, c23): c12 closed, c23 via single solves
      const Complex den = c13 - 3.0 * c24;
      if (den == Complex{}) break;
      const Complex v12 = 3.0 * c14 * (3.0 * c11 - c22) / den;
      append_single_solves(C, 1, v12, 6, out, true);
      break;
    }
    case 3 * 8 + 4: {  // (c14, c21), branches a and b
      const Complex dena1 = 3.0 * (3.0 * c11 - c22);
      const Complex dena2 = 3.0 * (c13 - 3.0 * c24);
      if (dena1 != Complex{} && dena2 != Complex{}) {
        out.emplace_back(c12 * (c13 - 3.0 * c24) / dena1,
                         c23 * (3.0 * c11 - c22) / dena2);
      }
      const Complex f = c22 * (c13 - 3.0 * c24) - c23 * (c12 - c23);
      const Complex denb1 = 6.0 * sq(c22);
      const Complex denb2 = 6.0 * f * sq(c13);
      if (denb1 != Complex{} && denb2 != Complex{}) {
        for (const Complex r : {r4, -r4}) {
          const Complex fr4 = f * r;
          const Complex v14 =
              (sq(c12) * c23 -
               c12 * (2.0 * sq(c23) + c22 * (c13 - 3.0 * c24)) +
               c23 * (sq(c23) + 3.0 * c22 * (c13 - c24)) + fr4) /
              denb1;
          const Complex v21 =
              (-sq(sq(c12)) * c23 +
               c13 * (3.0 * c11 - c22) *
                   (c23 * (sq(c23) + c22 * (c13 - 3.0 * c24)) - fr4) +
               cu(c12) * (3.0 * sq(c23) + c22 * (c13 - 3.0 * c24)) +
               c12 * (-3.0 * sq(c13) * c22 * (c11 - c22) + sq(sq(c23)) -
                      c23 * fr4 - 3.0 * c22 * sq(c23) * c24 +
                      c13 * (9.0 * c22 * c24 * (c11 - c22) -
                             sq(c23) * (6.0 * c11 - 5.0 * c22))) +
               sq(c12) * (-3.0 * cu(c23) + fr4 +
                          c23 * (3.0 * c11 * c13 -
                                 c22 * (5.0 * c13 - 6.0 * c24)))) /
              denb2;
          out.emplace_back(v14, v21);
        }
      }
      break;
    }
    case 0 * 8 + 1: {  // (c11, c12), branches a and b
      if (c23 != Complex{}) {
        out.emplace_back((c22 * c23 + 3.0 * c21 * (c13 - 3.0 * c24)) /
                             (3.0 * c23),
                         9.0 * c14 * c21 / c23);
      }
      const Complex den11 = 54.0 * sq(c14) * c23;
      const Complex den12 = 6.0 * c14 * c23;
      if (den11 != Complex{} && den12 != Complex{}) {
        for (const Complex r : {r1, -r1}) {
          const Complex v11 =
              (sq(c13) * c23 * (c13 - 6.0 * c24) +
               27.0 * sq(c14) * c21 * (c13 - 3.0 * c24) +
               9.0 * c23 * (c13 * sq(c24) + c14 * c23 * (c13 - c24)) -
               (c13 * c23 * (c13 - 3.0 * c24) +
                3.0 * c14 * (sq(c23) - 9.0 * c14 * c21)) *
                   r) /
              den11;
          const Complex v12 =
              (c13 * (c13 * c23 + 3.0 * c14 * c22 - 3.0 * c23 * c24) +
               3.0 * c14 * (2.0 * sq(c23) - 3.0 * c22 * c24) +
               (3.0 * c14 * c22 - c13 * c23) * r) /
              den12;
          out.emplace_back(v11, v12);
        }
      }
      break;
    }
    case 0 * 8 + 2: {  // (c11, c13): nested Cardano for c13, then c11
      if (c22 == Complex{}) break;
      const Complex a2 =
          27.0 * c14 * c22 *
              (-9.0 * c14 * cu(c22) + 2.0 * sq(c12) * c22 * c23 -
               3.0 * c12 * c22 * sq(c23) + 3.0 * c22 * cu(c23) +
               3.0 * sq(c22) * c24 * (c12 + 3.0 * c23)) -
          9.0 * c12 * c22 * sq(c23) * c24 * (c12 + 3.0 * c23) +
          27.0 * sq(c22) * c23 * sq(c24) * (c12 - 6.0 * c23) +
          54.0 * cu(c22 * c24) - 2.0 * cu(c12 * c23);
      const Complex a3 =
          9.0 * c14 * sq(c22) * (3.0 * c23 - c12) -
          c12 * c23 * (c12 * c23 + 3.0 * c22 * c24) -
          9.0 * c22 * c24 * (sq(c23) + c22 * c24);
      for (const Complex a4 : cardano_branches(a2, a3)) {
        if (a4 == Complex{}) continue;
        const Complex c13_candidate =
            2.0 * c24 + (c12 * c23 + std::pow(2.0, 1.0 / 3.0) * a3 / a4 -
                         std::pow(2.0, -1.0 / 3.0) * a4) /
                            (3.0 * c22);
        append_single_solves(C, 2, c13_candidate, 0, out, false);
      }
      break;
    }
    case 0 * 8 + 3: {  // (c11, c14), branches a and b
      if (c23 != Complex{} && c21 != Complex{}) {
        out.emplace_back(
            (3.0 * c13 * c21 + c22 * c23 - 9.0 * c21 * c24) / (3.0 * c23),
            c12 * c23 / (9.0 * c21));
      }
      const Complex g = c13 * c22 - c12 * c23 + sq(c23) - 3.0 * c22 * c24;
      const Complex den11 = 6.0 * c13 * c22 * g;
      const Complex den14 = 6.0 * sq(c22);
      if (den11 != Complex{} && den14 != Complex{}) {
        for (const Complex r : {r4, -r4}) {
          const Complex v11 =
              (-cu(c12) * c22 * c23 +
               c13 * (2.0 * sq(c22) - 3.0 * c21 * c23) *
                   (c13 * c22 + sq(c23) - 3.0 * c22 * c24) +
               sq(c12) * (c13 * (sq(c22) - 3.0 * c21 * c23) +
                          c22 * (2.0 * sq(c23) - 3.0 * c22 * c24)) +
               c12 * (3.0 * sq(c13) * c21 * c22 -
                      c22 * c23 * (sq(c23) - 3.0 * c22 * c24) -
                      3.0 * c13 *
                          (c23 * (sq(c22) - 2.0 * c21 * c23) +
                           3.0 * c21 * c22 * c24)) +
               (3.0 * c13 * c21 - c12 * c22) * g * r) /
              den11;
          const Complex v14 =
              (c12 * c23 * (c12 - 2.0 * c23) +
               3.0 * c22 * (c12 * c24 + c23 * (c13 - c24)) -
               c12 * c13 * c22 + cu(c23) + g * r) /
              den14;
          out.emplace_back(v11, v14);
        }
      }
      break;
    }
    case 0 * 8 + 4: {  // (c11, c21)
      if (c14 == Complex{}) break;
      out.emplace_back(
          (c12 * c13 + 3.0 * c14 * c22 - 3.0 * c12 * c24) / (9.0 * c14),
          c12 * c23 / (9.0 * c14));
      break;
    }
    case 0 * 8 + 5: {  // (c11, c22), both signs of R1
      const Complex den11 = 54.0 * sq(c14) * c23;
      const Complex den22 = 18.0 * sq(c14);
      if (den11 == Complex{} || den22 == Complex{}) break;
      for (const Complex r : {r1, -r1}) {
        const Complex v11 =
            (cu(c13) * c23 - 6.0 * sq(c13) * c23 * c24 +
             9.0 * c13 * (3.0 * sq(c14) * c21 + c14 * sq(c23) +
                          c23 * sq(c24)) -
             9.0 * c14 * (sq(c23) * c24 + 9.0 * c14 * c21 * c24) +
             (-sq(c13) * c23 + 3.0 * c13 * c23 * c24 - 3.0 * c14 * sq(c23) +
              27.0 * sq(c14) * c21) *
                 r) /
            den11;
        const Complex v22 =
            (cu(c13) +
             3.0 * c14 * (-c12 * c13 + 3.0 * c13 * c23 + 3.0 * c12 * c24 -
                          3.0 * c23 * c24) +
             3.0 * c13 * c24 * (3.0 * c24 - 2.0 * c13) +
             (c13 * (c13 - 3.0 * c24) - 3.0 * c14 * (c12 - c23)) * r) /
            den22;
        out.emplace_back(v11, v22);
      }
      break;
    }
    case 0 * 8 + 6: {  // (c11, c23): simple branch, then nested Cardano
      if (c14 != Complex{} && c12 != Complex{}) {
        out.emplace_back(
            (c12 * c13 + 3.0 * (c14 * c22 - c12 * c24)) / (9.0 * c14),
            9.0 * c14 * c21 / c12);
      }
      if (c14 != Complex{}) {
        const Complex e1 =
            27.0 * (sq(c12 * c14) *
                        (6.0 * sq(c13) - 2.0 * c12 * c14 - 3.0 * c13 * c24) +
                    9.0 * sq(c13 * c14) * c22 * (3.0 * c24 - c13) +
                    3.0 * c12 * c14 * c24 *
                        (cu(c13) - 9.0 * sq(c14) * c22) +
                    27.0 * cu(c14) * c22 *
                        (3.0 * c14 * c22 - c12 * c13) +
                    c13 * sq(c24) *
                        (3.0 * c12 * c13 * c14 - 45.0 * sq(c14) * c22 +
                         2.0 * sq(c13) * c24));
        const Complex e2 =
            9.0 * (sq(c14) * (9.0 * c22 * (c13 - c24) - sq(c12)) -
                   sq(c13 * c24) - c12 * c13 * c14 * (c13 + c14));
        for (const Complex e3 : cardano_branches(e1, e2)) {
          if (e3 == Complex{}) continue;
          const Complex c23_candidate =
              2.0 * c12 / 3.0 +
              (3.0 * c13 * c24 - std::pow(2.0, 1.0 / 3.0) * e2 / e3 +
               std::pow(2.0, -1.0 / 3.0) * e3) /
                  (9.0 * c14);
          append_single_solves(C, 6, c23_candidate, 0, out, false);
        }
      }
      break;
    }
    case 1 * 8 + 2: {  // (c12, c13): displayed branch a, others numeric
      if (c23 != Complex{} && c21 != Complex{}) {
        out.emplace_back(9.0 * c14 * c21 / c23,
                         (3.0 * c11 * c23 - c22 * c23 + 9.0 * c21 * c24) /
                             (3.0 * c21));
      }
      break;
    }
    case 1 * 8 + 3: {  // (c12, c14): nested Cardano for c12, then c14
      if (c21 == Complex{}) break;
      const Complex b2 =
          27.0 * c13 * sq(c21) *
              (-81.0 * c13 * sq(c21) + 54.0 * sq(c11) * c22 -
               27.0 * c11 * sq(c22) + 9.0 * cu(c22) +
               27.0 * c21 * c23 * (c11 + c22)) -
          2.0 * (cu(c11 * c22) - cu(c21 * c23)) -
          3.0 * c11 * c21 * c22 * c23 *
              (c11 * c22 + sq(c22) - c21 * c23) -
          6.0 * sq(c21 * c22 * c23);
      const Complex b3 =
          -81.0 * c13 * sq(c21) * (c11 - c22) -
          9.0 * c21 * c22 * c23 * (c11 + c22) -
          9.0 * (sq(c11 * c22) + sq(c21 * c23));
      const Complex den14 =
          3.0 * (sq(c22) * (3.0 * c11 - c22) +
                 3.0 * c21 * (c22 * c23 - 3.0 * c13 * c21));
      for (const Complex b4 : cardano_branches(b2, b3)) {
        if (b4 == Complex{}) continue;
        const Complex v12 =
            (2.0 / 3.0) * c21 * c23 +
            (3.0 * c11 * c22 + std::pow(2.0, 1.0 / 3.0) * b3 / b4 -
             std::pow(2.0, -1.0 / 3.0) * b4) /
                (9.0 * c21);
        if (den14 != Complex{}) {
          const Complex v14 =
              (3.0 * sq(c13) * c21 * (3.0 * c11 - 2.0 * c22) -
               9.0 * c11 * c13 * c23 * (c11 - c22) -
               2.0 * c13 * sq(c22) * c23 -
               9.0 * c13 * c21 * c24 * (3.0 * c11 - 2.0 * c22) +
               v12 * (sq(c22) * (c13 - 3.0 * c24) -
                      sq(c23) * (3.0 * c11 - 2.0 * c22) -
                      9.0 * c21 * c23 * c24) +
               sq(v12) * (-3.0 * c21 * (c13 - 3.0 * c24) +
                          c23 * (3.0 * c11 - c22))) /
              den14;
          out.emplace_back(v12, v14);
        }
        append_single_solves(C, 1, v12, 3, out, true);
      }
      break;
    }
    case 1 * 8 + 4: {  // (c12, c21), branches a and b
      if (c13 - 3.0 * c24 != Complex{}) {
        out.emplace_back(3.0 * c14 * (3.0 * c11 - c22) / (c13 - 3.0 * c24),
                         c23 * (3.0 * c11 - c22) /
                             (3.0 * (c13 - 3.0 * c24)));
      }
      const Complex den12 = 6.0 * c14 * c23;
      const Complex den21 = 162.0 * cu(c14);
      if (den12 != Complex{} && den21 != Complex{}) {
        for (const Complex r : {r1, -r1}) {
          const Complex v12 =
              ((c13 - 3.0 * c24) * (c13 * c23 + 3.0 * c14 * c22) +
               6.0 * c14 * sq(c23) + (3.0 * c14 * c22 - c13 * c23) * r) /
              den12;
          const Complex v21 =
              (cu(c13) * (c13 - 9.0 * c24) +
               9.0 * sq(c14) * (2.0 * sq(c23) + 9.0 * c11 * c24) +
               3.0 * c14 * c23 * (9.0 * sq(c24) + 4.0 * sq(c13)) +
               3.0 * sq(c13) * (4.0 * c14 * c23 + 9.0 * sq(c24)) -
               9.0 * c13 *
                   (3.0 * c11 * sq(c14) + 3.0 * cu(c24) +
                    5.0 * c14 * c23 * c24) +
               (-cu(c13) + 6.0 * sq(c13) * c24 - 9.0 * c13 * sq(c24) -
                6.0 * c13 * c14 * c23 +
                9.0 * c14 * (3.0 * c11 * c14 + c23 * c24)) *
                   r) /
              den21;
          out.emplace_back(v12, v21);
        }
      }
      break;
    }
    case 1 * 8 + 5: {  // (c12, c22)
      if (c23 == Complex{}) break;
      out.emplace_back(9.0 * c14 * c21 / c23,
                       3.0 * (c11 * c23 - c13 * c21 + 3.0 * c21 * c24) / c23);
      break;
    }
    case 2 * 8 + 3: {  // (c13, c14), branches a and b
      if (c21 != Complex{}) {
        out.emplace_back((3.0 * c11 * c23 - c22 * c23) / (3.0 * c21),
                         c12 * c23 / (9.0 * c21));
      }
      const Complex den13 = 18.0 * sq(c21);
      const Complex den14 = 162.0 * cu(c21);
      if (den13 != Complex{} && den14 != Complex{}) {
        for (const Complex r : {r2, -r2}) {
          const Complex v13 =
              (c22 * (9.0 * sq(c11) + 9.0 * c12 * c21 + sq(c22) -
                      3.0 * c21 * c23) -
               3.0 * c11 *
                   (3.0 * c12 * c21 + 2.0 * sq(c22) - c21 * c23) +
               (3.0 * c21 * (c12 - c23) + c22 * (3.0 * c11 + c22)) * r) /
              den13;
          const Complex v14 =
              (27.0 * sq(c11) * (c12 * c21 - c11 * c22 + sq(c22)) +
               9.0 * c12 * c21 * (2.0 * c12 * c21 - 5.0 * c11 * c22) +
               sq(c22) * (12.0 * c12 * c21 - 9.0 * c11 * c22 + sq(c22)) +
               sq(c21) * c24 * (81.0 * c11 - 27.0 * c22) -
               (9.0 * c21 * (c11 * c12 + 3.0 * c21 * c24) -
                c22 * (6.0 * c12 * c21 + sq(c22)) +
                3.0 * c11 * c22 * (2.0 * c22 - 3.0 * c11)) *
                   r) /
              den14;
          out.emplace_back(v13, v14);
        }
      }
      break;
    }
    case 2 * 8 + 4: {  // (c13, c21): displayed branch a, others numeric
      if (c12 != Complex{} && c14 != Complex{}) {
        out.emplace_back(
            3.0 * (3.0 * c11 * c14 + c12 * c24 - c14 * c22) / c12,
            c12 * c23 / (9.0 * c14));
      }
      break;
    }
    default:
      break;  // (c13,c22) and mirrors without displayed forms: numeric only.
  }
  return out;
}

bool pair_is_displayed(int i, int j) {
  static const int displayed[][2] = {
      {0, 7}, {1, 6}, {3, 4}, {0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5},
      {0, 6}, {1, 2}, {1, 3}, {1, 4}, {1, 5}, {2, 3}, {2, 4}, {2, 5}};
  for (const auto& p : displayed) {
    if (p[0] == i && p[1] == j) return true;
  }
  return false;
}

// Newton iteration on two coefficients with the remaining six fixed.
// Drives one first-constraint avatar and the second constraint to zero.
bool newton_complete(CoefficientSet work, int i, int j, Complex z1, Complex z2,
                     int avatar, CoefficientSet& result) {
  const auto eval = [&](Complex a, Complex b, Complex& f1, Complex& f2) {
    work.at(i) = a;
    work.at(j) = b;
    const RawConstraints r = raw_constraints(work);
    switch (avatar) {
      case 0: f1 = r.first_a; break;
      case 1: f1 = r.first_b; break;
      case 2: f1 = r.first_c; break;
      default: f1 = r.cross5; break;
    }
    f2 = r.second;
  };

  Complex f1, f2;
  bool acceptable = false;
  eval(z1, z2, f1, f2);
  for (int iter = 0; iter < 80; ++iter) {
    work.at(i) = z1;
    work.at(j) = z2;
    const double scale = std::max(work.norm(), 1e-12);
    const double s4 = std::pow(scale, 4);
    const double s5 = std::pow(scale, 5);
    const double res = std::abs(f1) / (avatar == 3 ? s5 : s4) +
                       std::abs(f2) / s4;
    if (res < 1e-14) {
      result = work;
      return true;
    }
    if (res < 1e-11) {  // close enough; keep polishing but accept on stall
      result = work;
      acceptable = true;
    }
    const double h1 = 1e-7 * (1.0 + std::abs(z1));
    const double h2 = 1e-7 * (1.0 + std::abs(z2));
    Complex f1a, f2a, f1b, f2b;
    eval(z1 + h1, z2, f1a, f2a);
    eval(z1, z2 + h2, f1b, f2b);
    const Complex j11 = (f1a - f1) / h1, j12 = (f1b - f1) / h2;
    const Complex j21 = (f2a - f2) / h1, j22 = (f2b - f2) / h2;
    const Complex det = j11 * j22 - j12 * j21;
    if (std::abs(det) < 1e-30) return acceptable;
    const Complex d1 = (f1 * j22 - f2 * j12) / det;
    const Complex d2 = (j11 * f2 - j21 * f1) / det;

    double damping = 1.0;
    bool stepped = false;
    const double base = std::abs(f1) + std::abs(f2);
    for (int halve = 0; halve < 25; ++halve) {
      Complex t1, t2;
      eval(z1 - damping * d1, z2 - damping * d2, t1, t2);
      if (std::abs(t1) + std::abs(t2) < base || base == 0.0) {
        z1 -= damping * d1;
        z2 -= damping * d2;
        f1 = t1;
        f2 = t2;
        stepped = true;
        break;
      }
      damping *= 0.5;
    }
    if (!stepped) return acceptable;
  }
  return acceptable;
}

// One-variable fallback for degenerate slices where the pair equations are
// rank-deficient (a solution family instead of isolated points). Drives the
// sum of the two constraint values; the residual filter culls false zeros.
bool newton_single(CoefficientSet work, int vary, Complex z,
                   CoefficientSet& result) {
  const auto eval = [&](Complex v) {
    work.at(vary) = v;
    const RawConstraints r = raw_constraints(work);
    return r.first_a + r.second;
  };
  Complex f = eval(z);
  for (int iter = 0; iter < 60; ++iter) {
    work.at(vary) = z;
    const double scale = std::max(work.norm(), 1e-12);
    if (std::abs(f) < 1e-12 * std::pow(scale, 4)) {
      result = work;
      return true;
    }
    const double h = 1e-7 * (1.0 + std::abs(z));
    const Complex df = (eval(z + h) - f) / h;
    if (std::abs(df) < 1e-30) return false;
    const Complex step = f / df;
    double damping = 1.0;
    bool stepped = false;
    for (int halve = 0; halve < 20; ++halve) {
      const Complex trial = eval(z - damping * step);
      if (std::abs(trial) < std::abs(f)) {
        z -= damping * step;
        f = trial;
        stepped = true;
        break;
      }
      damping *= 0.5;
    }
    if (!stepped) return false;
  }
  return false;
}

}  // namespace

CompletionResult complete_pair(
    const CoefficientSet& partial, Coeff first, Coeff second,
    const std::vector<std::pair<Complex, Complex>>& hint_seeds) {
  int i = static_cast<int>(first);
  int j = static_cast<int>(second);
  if (i == j) throw ValidationError("complete_pair: identical indices");
  if (i > j) std::swap(i, j);

  for (int k = 0; k < 8; ++k) {
    if (k == i || k == j) continue;
    if (!is_finite(partial.at(k))) {
      throw ValidationError("complete_pair: non-finite known coefficient");
    }
  }

  // Mirror pairs are solved on the swapped set and swapped back.
  const int mi = 7 - j, mj = 7 - i;
  const bool use_mirror = !pair_is_displayed(i, j) && pair_is_displayed(mi, mj);
  if (use_mirror) {
    std::vector<std::pair<Complex, Complex>> mirrored_hints;
    mirrored_hints.reserve(hint_seeds.size());
    for (const auto& [h1, h2] : hint_seeds) mirrored_hints.emplace_back(h2, h1);
    CompletionResult mirrored =
        complete_pair(swap_symmetry(partial), static_cast<Coeff>(mi),
                      static_cast<Coeff>(mj), mirrored_hints);
    for (auto& c : mirrored.completions) c = swap_symmetry(c);
    return mirrored;
  }

  CompletionResult result;
  PairCandidates seeds;
  PairCandidates closed = closed_form_pair(partial, i, j);

  const double sigma = known_scale(partial, i, j);
  seeds = hint_seeds;
  seeds.insert(seeds.end(), closed.begin(), closed.end());
  const Complex grid[4] = {Complex(sigma, 0), Complex(-sigma, 0),
                           Complex(0, sigma), Complex(0, -sigma)};
  for (const Complex& s1 : grid) {
    for (const Complex& s2 : grid) seeds.emplace_back(s1, s2);
  }
  // Hybrid seeds: park one unknown on a grid value and solve the other from
  // either constraint in closed form, so the start already sits on one of the
  // two varieties.
  const double radii[3] = {0.5 * sigma, sigma, 2.0 * sigma};
  for (const double r : radii) {
    for (int phase = 0; phase < 8; ++phase) {
      const Complex z = std::polar(r, kTwoPi * double(phase) / 8.0 + 0.31);
      append_single_solves(partial, i, z, j, seeds, true);
      append_single_solves(partial, j, z, i, seeds, false);
    }
  }

  std::vector<CoefficientSet> accepted;
  // Exact closed-form candidates first (no Newton), then Newton refinement of
  // every seed.
  for (const auto& [z1, z2] : closed) {
    CoefficientSet c = partial;
    c.at(i) = z1;
    c.at(j) = z2;
    if (!is_finite(z1) || !is_finite(z2)) continue;
    accepted.push_back(c);
  }
  for (const auto& [z1, z2] : seeds) {
    if (!is_finite(z1) || !is_finite(z2)) continue;
    ++result.seeds_tried;
    for (int avatar = 0; avatar < 4; ++avatar) {
      CoefficientSet c;
      if (newton_complete(partial, i, j, z1, z2, avatar, c)) {
        accepted.push_back(c);
        break;
      }
    }
  }

  // Keep only completions satisfying both constraints, dedupe, order by
  // residual then lexicographically.
  struct Scored {
    CoefficientSet coeffs;
    double residual;
  };
  const auto worst_residual = [](const CoefficientSet& c) {
    ConstraintReport rep = constraint_residuals(c);
    return std::max({rep.residual_first_a, rep.residual_first_b, rep.residual_first_c,
                     rep.residual_cross, rep.residual_second});
  };
  bool any_pass = false;
  for (const auto& c : accepted) {
    if (!(c.norm() > 0.0)) continue;
    try {
      if (worst_residual(c) < 1e-8) {
        any_pass = true;
        break;
      }
    } catch (const ValidationError&) {
    }
  }
  if (!any_pass) {
    for (const auto& [z1, z2] : seeds) {
      if (!is_finite(z1) || !is_finite(z2)) continue;
      CoefficientSet c;
      CoefficientSet half = partial;
      half.at(i) = z1;
      if (newton_single(half, j, z2, c)) accepted.push_back(c);
      half = partial;
      half.at(j) = z2;
      if (newton_single(half, i, z1, c)) accepted.push_back(c);
    }
  }
  std::vector<Scored> scored;
  for (const auto& c : accepted) {
    if (!(c.norm() > 0.0)) continue;
    ConstraintReport rep;
    try {
      rep = constraint_residuals(c);
    } catch (const ValidationError&) {
      continue;
    }
    const double worst =
        std::max({rep.residual_first_a, rep.residual_first_b, rep.residual_first_c,
                  rep.residual_cross, rep.residual_second});
    if (worst < 1e-8) scored.push_back({c, worst});
  }
  std::sort(scored.begin(), scored.end(), [&](const Scored& a, const Scored& b) {
    if (a.residual != b.residual) return a.residual < b.residual;
    if (a.coeffs.at(0) != b.coeffs.at(0))
      return lex_less(a.coeffs.at(0), b.coeffs.at(0));
    return lex_less(a.coeffs.at(7), b.coeffs.at(7));
  });
  const double dedupe_tol = 1e-6 * (1.0 + sigma);
  for (const auto& s : scored) {
    bool duplicate = false;
    for (const auto& kept : result.completions) {
      if (std::abs(kept.at(i) - s.coeffs.at(i)) < dedupe_tol &&
          std::abs(kept.at(j) - s.coeffs.at(j)) < dedupe_tol) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) result.completions.push_back(s.coeffs);
  }
  return result;
}

}  // namespace cubicflow
