#pragma once

#include <array>
#include <vector>

#include "cubicflow/model.hpp"
#include "cubicflow/solver.hpp"

namespace cubicflow {

/// The rotated/rescaled companion system with the extra i*omega*x term; its
/// generic solutions are periodic with period T_tilde = 2 pi / |omega|.
struct IsochronousSystem {
  CoefficientSet base;
  double omega = 0.0;
  double T = 0.0;        // pi / |omega|
  double T_tilde = 0.0;  // 2 pi / |omega|
};

IsochronousSystem make_isochronous(const CoefficientSet& base, double omega);

struct Fraction {
  long long num = 0;
  long long den = 1;
};

struct PeriodReport {
  int k = 0;  // smallest multiple of T_tilde with recurrence, 0 = none found
  std::vector<double> defect_at_kT;
  bool rational_lambdas = false;
  std::array<Fraction, 3> fractions;
  bool blew_up = false;
  Complex blowup_time;
};

/// tau = (exp(2 i omega t) - 1)/(2 i omega).
Complex tau_of_t(double omega, double t);

/// Tilde solution through the exact base solution: exp(i omega t) x(tau(t)).
/// The tau path is refined internally so the continuation follows the arc.
Trajectory solve_tilde(const ParameterSet& params, double omega, Complex x1_0,
                       Complex x2_0, const std::vector<double>& times);

/// Direct numerical recurrence scan of the extended system at multiples of
/// T_tilde.
PeriodReport detect_period(const CoefficientSet& coeffs, double omega,
                           Complex x1_0, Complex x2_0, int k_max, double eps);

/// Continued-fraction reconstruction of real rational lambda_j; all-or-nothing.
bool rationality_check(const SpectralData& spec, long long max_denominator,
                       double tol, std::array<Fraction, 3>* fractions = nullptr);

}  // namespace cubicflow
