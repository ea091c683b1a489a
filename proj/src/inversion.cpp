#include "cubicflow/inversion.hpp"

#include <algorithm>
#include <cmath>

#include "cubicflow/errors.hpp"

namespace cubicflow {

namespace {

Complex cu(Complex z) { return z * z * z; }

struct Ratio {
  Complex num, den;
};

std::array<Ratio, 3> alpha_ratios(const CoefficientSet& C) {
  const Complex &c11 = C.c11, &c12 = C.c12, &c13 = C.c13, &c14 = C.c14;
  const Complex &c21 = C.c21, &c22 = C.c22, &c23 = C.c23, &c24 = C.c24;
  return {{{c12 * c22 - 3.0 * c13 * c21,
            3.0 * (c11 * c22 - c12 * c21 + c21 * c23) - c22 * c22},
           {c13 * c23 - 3.0 * c14 * c22,
            c12 * c23 - c13 * c22 - c23 * c23 + 3.0 * c22 * c24},
           {c12 * c23 - 9.0 * c14 * c21,
            3.0 * (c11 * c23 - c13 * c21) + 9.0 * c21 * c24 - c22 * c23}}};
}

// Quadratics q2 a^2 + q1 a + q0 = 0 satisfied by alpha.
std::array<std::array<Complex, 3>, 3> alpha_quadratics(const CoefficientSet& C) {
  const Complex &c11 = C.c11, &c12 = C.c12, &c13 = C.c13, &c14 = C.c14;
  const Complex &c21 = C.c21, &c22 = C.c22, &c23 = C.c23, &c24 = C.c24;
  return {{{3.0 * c21, 3.0 * c11 - c22, -c12},
           {c22, c12 - c23, -c13},
           {c23, c13 - 3.0 * c24, -3.0 * c14}}};
}

}  // namespace

std::vector<Complex> alpha_candidates(const CoefficientSet& C) {
  const double scale = C.norm();
  if (!(scale > 0.0)) throw ValidationError("alpha_of: zero coefficient set");
  const double den_floor = 1e-10 * scale * scale;

  std::vector<Complex> rational;
  for (const Ratio& r : alpha_ratios(C)) {
    if (std::abs(r.den) > den_floor) rational.push_back(r.num / r.den);
  }
  if (!rational.empty()) {
    Complex avg{};
    for (Complex v : rational) avg += v;
    avg /= static_cast<double>(rational.size());
    double spread = 0.0;
    for (Complex v : rational) spread = std::max(spread, std::abs(v - avg));
    if (spread < 1e-8 * (1.0 + std::abs(avg))) return {avg};
    // Disagreeing rational forms on a manifold point should not happen, but
    // fall through to the quadratic route rather than fail outright.
  }

  // Fallback: values satisfying every informative quadratic.
  const auto quads = alpha_quadratics(C);
  std::vector<Complex> roots;
  for (const auto& q : quads) {
    if (std::abs(q[0]) > 1e-12 * scale) {
      auto [r1, r2] = solve_quadratic(q[1] / q[0], q[2] / q[0]);
      roots.push_back(r1);
      roots.push_back(r2);
    } else if (std::abs(q[1]) > 1e-12 * scale) {
      roots.push_back(-q[2] / q[1]);
    }
  }
  std::vector<Complex> accepted;
  for (Complex a : roots) {
    bool ok = true;
    for (const auto& q : quads) {
      const Complex val = (q[0] * a + q[1]) * a + q[2];
      const double qscale =
          std::max({std::abs(q[0]) * std::abs(a) * std::abs(a),
                    std::abs(q[1]) * std::abs(a), std::abs(q[2]), scale * 1e-6});
      if (std::abs(val) > 1e-7 * qscale) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    bool dup = false;
    for (Complex kept : accepted) {
      if (std::abs(kept - a) < 1e-8 * (1.0 + std::abs(a))) {
        dup = true;
        break;
      }
    }
    if (!dup) accepted.push_back(a);
  }
  std::sort(accepted.begin(), accepted.end(), lex_less);
  if (accepted.empty()) {
    throw NumericalError("alpha_of: no consistent alpha value found");
  }
  return accepted;
}

Complex alpha_of(const CoefficientSet& C) { return alpha_candidates(C).front(); }

std::pair<Complex, Complex> a_of(const CoefficientSet& C, Complex alpha) {
  const double scale = C.norm();
  const Complex a1sq = C.c11 + alpha * C.c21;
  if (std::abs(a1sq) < 1e-12 * std::max(1.0, scale)) {
    throw NumericalError("a_of: a1^2 vanishes");
  }
  const Complex a1 = std::sqrt(a1sq);
  const Complex den = 3.0 * a1sq - C.c22;
  Complex a2;
  if (std::abs(den) > 1e-10 * std::max(1.0, scale)) {
    a2 = a1 * C.c12 / den;
  } else {
    a2 = alpha * a1;
  }

  // Cross-check the squares against the closed forms when defined.
  const Complex shared_den = C.c12 * C.c23 - 9.0 * C.c14 * C.c21;
  if (std::abs(shared_den) > 1e-8 * std::max(1.0, scale * scale)) {
    const Complex A1 = (C.c12 * (C.c11 * C.c23 - C.c13 * C.c21) -
                        3.0 * C.c21 * (C.c14 * C.c22 - C.c12 * C.c24)) /
                       shared_den;
    const Complex A2 = (3.0 * C.c14 * (C.c11 * C.c23 - C.c13 * C.c21) -
                        C.c23 * (C.c14 * C.c22 - C.c12 * C.c24)) /
                       shared_den;
    const double ref = std::max(1.0, std::abs(A1) + std::abs(A2));
    if (std::abs(a1 * a1 - A1) > 1e-7 * ref ||
        std::abs(a2 * a2 - A2) > 1e-7 * ref) {
      throw NumericalError("a_of: closed-form cross-check failed");
    }
  }
  return {a1, a2};
}

namespace {

std::pair<Complex, Complex> bb_brackets(const CoefficientSet& C, Complex a1,
                                        Complex a2) {
  const Complex A = cu(a1) * C.c24 - cu(a2) * C.c21 -
                    a1 * a2 * (a1 * C.c23 - a2 * C.c22);
  const Complex B = cu(a1) * C.c14 - cu(a2) * C.c11 -
                    a1 * a2 * (a1 * C.c13 - a2 * C.c12);
  return {A, B};
}

}  // namespace

std::vector<std::pair<Complex, Complex>> b_of(const CoefficientSet& C,
                                              Complex a1, Complex a2) {
  if (a1 == Complex{} || a2 == Complex{}) {
    throw ValidationError("b_of: a1, a2 must be nonzero");
  }
  const auto [A, B] = bb_brackets(C, a1, a2);
  const double cross_floor =
      1e-10 * (std::abs(a1) + std::abs(a2)) * (std::abs(a1) + std::abs(a2));

  std::vector<std::pair<Complex, Complex>> out;
  // Slice b1 = 1: (a1 b2 - a2)^3 = A b2 + B, monic in b2.
  {
    const Complex a1c = cu(a1);
    const CubicRoots roots =
        solve_cubic(-3.0 * a2 / a1, (3.0 * a1 * a2 * a2 - A) / a1c,
                    (-cu(a2) - B) / a1c);
    for (Complex b2 : roots.roots) {
      if (std::abs(a1 * b2 - a2) > cross_floor) out.emplace_back(1.0, b2);
    }
  }
  if (out.empty()) {
    // Slice b2 = 1: (a1 - a2 b1)^3 = A + b1 B, monic in b1.
    const Complex a2c = -cu(a2);
    const CubicRoots roots =
        solve_cubic(3.0 * a1 / a2, -(3.0 * a1 * a1 * a2 + B) / a2c,
                    (cu(a1) - A) / a2c);
    for (Complex b1 : roots.roots) {
      if (std::abs(a1 - a2 * b1) > cross_floor) out.emplace_back(b1, 1.0);
    }
  }
  if (out.empty()) {
    throw NumericalError("b_of: every cubic root degenerates the cross term");
  }
  // Deduplicate (triple roots etc).
  std::vector<std::pair<Complex, Complex>> unique;
  for (const auto& cand : out) {
    bool dup = false;
    for (const auto& kept : unique) {
      if (std::abs(kept.first - cand.first) +
              std::abs(kept.second - cand.second) <
          1e-10 * (1.0 + std::abs(cand.second))) {
        dup = true;
        break;
      }
    }
    if (!dup) unique.push_back(cand);
  }
  return unique;
}

namespace {

// Rows of the linear system M gamma = r implied by the four K-equations.
void k_system(const CoefficientSet& C, Complex a1, Complex a2, Complex b1,
              Complex b2, std::array<std::array<Complex, 3>, 4>& M,
              std::array<Complex, 4>& r) {
  M[0] = {a1 * b1 * b1, a1 * a1 * b1, cu(a1)};
  r[0] = -cu(b1) + b1 * C.c11 + b2 * C.c21;
  M[1] = {a2 * b1 * b1 + 2.0 * a1 * b1 * b2, a1 * a1 * b2 + 2.0 * a1 * a2 * b1,
          3.0 * a1 * a1 * a2};
  r[1] = -3.0 * b1 * b1 * b2 + b1 * C.c12 + b2 * C.c22;
  M[2] = {a1 * b2 * b2 + 2.0 * a2 * b1 * b2, a2 * a2 * b1 + 2.0 * a1 * a2 * b2,
          3.0 * a1 * a2 * a2};
  r[2] = -3.0 * b1 * b2 * b2 + b1 * C.c13 + b2 * C.c23;
  M[3] = {a2 * b2 * b2, a2 * a2 * b2, cu(a2)};
  r[3] = -cu(b2) + b1 * C.c14 + b2 * C.c24;
}

// 3x3 complex solve by Gaussian elimination with partial pivoting.
bool solve3(std::array<std::array<Complex, 3>, 3> m, std::array<Complex, 3> v,
            std::array<Complex, 3>& out) {
  for (int col = 0; col < 3; ++col) {
    int pivot = col;
    for (int row = col + 1; row < 3; ++row) {
      if (std::abs(m[row][col]) > std::abs(m[pivot][col])) pivot = row;
    }
    if (std::abs(m[pivot][col]) < 1e-300) return false;
    std::swap(m[col], m[pivot]);
    std::swap(v[col], v[pivot]);
    for (int row = col + 1; row < 3; ++row) {
      const Complex f = m[row][col] / m[col][col];
      for (int k = col; k < 3; ++k) m[row][k] -= f * m[col][k];
      v[row] -= f * v[col];
    }
  }
  for (int row = 2; row >= 0; --row) {
    Complex s = v[row];
    for (int k = row + 1; k < 3; ++k) s -= m[row][k] * out[k];
    out[row] = s / m[row][row];
  }
  return true;
}

double k_residual(const std::array<std::array<Complex, 3>, 4>& M,
                  const std::array<Complex, 4>& r,
                  const std::array<Complex, 3>& g) {
  double worst = 0.0;
  for (int row = 0; row < 4; ++row) {
    const Complex lhs = M[row][0] * g[0] + M[row][1] * g[1] + M[row][2] * g[2];
    const double scale =
        std::max({1.0, std::abs(M[row][0] * g[0]), std::abs(M[row][1] * g[1]),
                  std::abs(M[row][2] * g[2]), std::abs(r[row])});
    worst = std::max(worst, std::abs(lhs - r[row]) / scale);
  }
  return worst;
}

}  // namespace

GammaResult gamma_of(const CoefficientSet& C, Complex a1, Complex a2,
                     Complex b1, Complex b2) {
  const Complex cross = a1 * b2 - a2 * b1;
  if (cross == Complex{}) throw ValidationError("gamma_of: c vanishes");

  std::array<std::array<Complex, 3>, 4> M;
  std::array<Complex, 4> r;
  k_system(C, a1, a2, b1, b2, M, r);

  std::vector<std::array<Complex, 3>> triads;
  std::vector<double> residuals;
  for (int skip = 3; skip >= 0; --skip) {  // skip=3 first == triad (K1,K2,K3)
    std::array<std::array<Complex, 3>, 3> m;
    std::array<Complex, 3> v;
    int at = 0;
    for (int row = 0; row < 4; ++row) {
      if (row == skip) continue;
      m[at] = M[row];
      v[at] = r[row];
      ++at;
    }
    std::array<Complex, 3> g;
    if (!solve3(m, v, g)) continue;
    triads.push_back(g);
    residuals.push_back(k_residual(M, r, g));
  }
  if (triads.empty()) {
    throw NumericalError("gamma_of: all four triad systems singular");
  }

  double spread = 0.0;
  for (size_t i = 0; i < triads.size(); ++i) {
    for (size_t j = i + 1; j < triads.size(); ++j) {
      for (int k = 0; k < 3; ++k) {
        spread = std::max(spread, std::abs(triads[i][k] - triads[j][k]));
      }
    }
  }
  size_t best = 0;
  for (size_t i = 1; i < triads.size(); ++i) {
    if (residuals[i] < residuals[best]) best = i;
  }
  if (residuals[best] > 1e-7) {
    throw NumericalError("gamma_of: no triad satisfies all four K-equations");
  }
  return {triads[best][0], triads[best][1], triads[best][2], spread,
          residuals[best]};
}

std::array<Complex, 3> gamma_triad1_closed(const CoefficientSet& C, Complex a1,
                                           Complex a2, Complex b1, Complex b2) {
  const Complex &c11 = C.c11, &c12 = C.c12, &c13 = C.c13;
  const Complex &c21 = C.c21, &c22 = C.c22, &c23 = C.c23;
  const Complex c = a1 * b2 - a2 * b1;
  const Complex c2 = c * c;
  const Complex g1 =
      (-3.0 * a2 * a2 * cu(b1) + 6.0 * a1 * a2 * b1 * b1 * b2 -
       3.0 * a1 * a1 * b1 * b2 * b2 +
       3.0 * a2 * a2 * (b1 * c11 + b2 * c21) -
       2.0 * a1 * a2 * (b1 * c12 + b2 * c22) +
       a1 * a1 * (b1 * c13 + b2 * c23)) /
      (a1 * c2);
  const Complex g2 =
      (3.0 * a2 * a2 * b1 * b1 * b1 * b1 - 6.0 * a1 * a2 * cu(b1) * b2 +
       3.0 * (a1 * b1 * b2) * (a1 * b1 * b2) -
       3.0 * a2 * a2 * b1 * (b1 * c11 + b2 * c21) +
       3.0 * a1 * a2 *
           (b1 * b1 * c12 - b2 * b2 * c21 + b1 * b2 * (-c11 + c22)) +
       a1 * a1 *
           (-2.0 * b1 * b1 * c13 + b2 * b2 * c22 +
            b1 * b2 * (c12 - 2.0 * c23))) /
      ((a1 * c) * (a1 * c));
  const Complex g3 =
      (-a2 * a2 * cu(b1) * b1 * b1 + 2.0 * a1 * a2 * b1 * b1 * b1 * b1 * b2 -
       a1 * a1 * cu(b1) * b2 * b2 +
       (a2 * b1) * (a2 * b1) * (b1 * c11 + b2 * c21) -
       a1 * a2 * b1 *
           (b1 * b1 * c12 - b2 * b2 * c21 + b1 * b2 * (-c11 + c22)) +
       a1 * a1 *
           (cu(b1) * c13 + cu(b2) * c21 + b1 * b2 * b2 * (c11 - c22) -
            b1 * b1 * b2 * (c12 - c23))) /
      (cu(a1) * c2);
  return {g1, g2, g3};
}

InversionResult invert(const CoefficientSet& C) {
  const ConstraintReport report = constraint_residuals(C);
  if (!report.satisfied) {
    throw ConstraintError("invert: coefficients violate the solvability constraints");
  }
  const double scale = C.norm();

  struct Candidate {
    InversionResult result;
    double forward_residual;
    bool degenerate_spectrum;
  };
  std::vector<Candidate> candidates;
  std::string last_error = "no alpha candidates";

  for (Complex alpha : alpha_candidates(C)) {
    try {
      const auto [a1, a2] = a_of(C, alpha);
      for (const auto& [b1, b2] : b_of(C, a1, a2)) {
        try {
          const GammaResult g = gamma_of(C, a1, a2, b1, b2);
          ParameterSet p{a1, a2, b1, b2, g.gamma1, g.gamma2, g.gamma3};
          p.validate();
          const CoefficientSet back = forward(p);
          double diff = 0.0;
          for (int k = 0; k < 8; ++k) {
            diff = std::max(diff, std::abs(back.at(k) - C.at(k)));
          }
          const double rel = diff / scale;
          if (rel > 1e-8) continue;
          InversionResult res;
          res.parameters = p;
          res.alpha = a2 / a1;
          if (alpha != Complex{}) res.beta_candidates.push_back(b2 / alpha);
          res.triad_spread = g.triad_spread;
          res.residual_K = g.worst_residual;
          const SpectralData spec = spectral(g.gamma1, g.gamma2, g.gamma3);
          candidates.push_back({res, rel, spec.degenerate});
        } catch (const std::runtime_error& e) {
          last_error = e.what();
        }
      }
    } catch (const std::runtime_error& e) {
      last_error = e.what();
    }
  }
  if (candidates.empty()) {
    throw NumericalError(std::string("invert: no candidate decomposition "
                                     "survived filtering; last failure: ") +
                         last_error);
  }
  // Prefer non-degenerate spectra, then smallest forward residual.
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& x, const Candidate& y) {
                     if (x.degenerate_spectrum != y.degenerate_spectrum) {
                       return !x.degenerate_spectrum;
                     }
                     return x.forward_residual < y.forward_residual;
                   });
  InversionResult chosen = candidates.front().result;
  // Collect beta candidates across surviving decompositions for diagnostics.
  for (size_t i = 1; i < candidates.size(); ++i) {
    for (Complex beta : candidates[i].result.beta_candidates) {
      chosen.beta_candidates.push_back(beta);
    }
  }
  return chosen;
}

}  // namespace cubicflow
