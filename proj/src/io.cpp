#include "cubicflow/io.hpp"

#include <iomanip>

#include "cubicflow/errors.hpp"

namespace cubicflow {

using nlohmann::json;

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return Complex(j[0].get<double>(), j[1].get<double>());
  }
  throw ValidationError("expected a number or [re, im] pair, got " + j.dump());
}

json to_json(const ParameterSet& p) {
  return {{"schema_version", kSchemaVersion},
          {"a1", complex_to_json(p.a1)},
          {"a2", complex_to_json(p.a2)},
          {"b1", complex_to_json(p.b1)},
          {"b2", complex_to_json(p.b2)},
          {"gamma1", complex_to_json(p.gamma1)},
          {"gamma2", complex_to_json(p.gamma2)},
          {"gamma3", complex_to_json(p.gamma3)}};
}

json to_json(const CoefficientSet& c) {
  json out = {{"schema_version", kSchemaVersion}};
  for (int i = 0; i < 8; ++i) {
    out[coeff_name(static_cast<Coeff>(i))] = complex_to_json(c.at(i));
  }
  return out;
}

json to_json(const KValues& k) {
  return {{"K1", complex_to_json(k.K1)},
          {"K2", complex_to_json(k.K2)},
          {"K3", complex_to_json(k.K3)},
          {"K4", complex_to_json(k.K4)}};
}

json to_json(const SpectralData& s) {
  json out = {{"u1", complex_to_json(s.u1)},
              {"u2", complex_to_json(s.u2)},
              {"u3", complex_to_json(s.u3)},
              {"degenerate", s.degenerate}};
  if (!s.degenerate) {
    out["lambda1"] = complex_to_json(s.lambda1);
    out["lambda2"] = complex_to_json(s.lambda2);
    out["lambda3"] = complex_to_json(s.lambda3);
  }
  return out;
}

json to_json(const ConstraintReport& r) {
  return {{"schema_version", kSchemaVersion},
          {"residual_first_a", r.residual_first_a},
          {"residual_first_b", r.residual_first_b},
          {"residual_first_c", r.residual_first_c},
          {"residual_cross", r.residual_cross},
          {"residual_second", r.residual_second},
          {"satisfied", r.satisfied}};
}

json to_json(const InversionResult& r) {
  json betas = json::array();
  for (Complex b : r.beta_candidates) betas.push_back(complex_to_json(b));
  return {{"schema_version", kSchemaVersion},
          {"parameters", to_json(r.parameters)},
          {"alpha", complex_to_json(r.alpha)},
          {"beta_candidates", betas},
          {"triad_spread", r.triad_spread},
          {"residual_K", r.residual_K}};
}

json to_json(const ReducedCoefficients& g) {
  json out = {{"schema_version", kSchemaVersion}};
  for (int i = 0; i < 6; ++i) {
    out[gcoeff_name(static_cast<GCoeff>(i))] = complex_to_json(g.at(i));
  }
  return out;
}

json to_json(const ReducedConstraintReport& r) {
  return {{"schema_version", kSchemaVersion},
          {"residual_alpha", r.residual_alpha},
          {"residual_main_1", r.residual_main1},
          {"residual_main_2", r.residual_main2},
          {"residual_extra_1",
           json::array({r.residual_extra1[0], r.residual_extra1[1]})},
          {"residual_extra_2",
           json::array({r.residual_extra2[0], r.residual_extra2[1]})},
          {"satisfied", r.satisfied}};
}

json to_json(const PeriodReport& r) {
  json fractions = json::array();
  if (r.rational_lambdas) {
    for (const Fraction& f : r.fractions) {
      fractions.push_back(json::array({f.num, f.den}));
    }
  }
  json out = {{"schema_version", kSchemaVersion},
              {"k", r.k},
              {"defect_at_kT", r.defect_at_kT},
              {"rational_lambdas", r.rational_lambdas},
              {"fractions", fractions},
              {"blew_up", r.blew_up}};
  if (r.blew_up) out["blowup_time"] = complex_to_json(r.blowup_time);
  return out;
}

namespace {

Complex field(const json& j, const char* name) {
  if (!j.contains(name)) {
    throw ValidationError(std::string("missing field: ") + name);
  }
  return complex_from_json(j.at(name));
}

}  // namespace

ParameterSet parameter_set_from_json(const json& j) {
  ParameterSet p;
  p.a1 = field(j, "a1");
  p.a2 = field(j, "a2");
  p.b1 = field(j, "b1");
  p.b2 = field(j, "b2");
  p.gamma1 = field(j, "gamma1");
  p.gamma2 = field(j, "gamma2");
  p.gamma3 = field(j, "gamma3");
  return p;
}

CoefficientSet coefficient_set_from_json(const json& j) {
  CoefficientSet c;
  for (int i = 0; i < 8; ++i) {
    c.at(i) = field(j, coeff_name(static_cast<Coeff>(i)));
  }
  return c;
}

ReducedCoefficients reduced_from_json(const json& j) {
  ReducedCoefficients g;
  for (int i = 0; i < 6; ++i) {
    g.at(i) = field(j, gcoeff_name(static_cast<GCoeff>(i)));
  }
  return g;
}

void trajectory_to_csv(std::ostream& os, const Trajectory& traj,
                       const std::vector<std::pair<Complex, Complex>>* oracle) {
  os << "t,re_x1,im_x1,re_x2,im_x2,residual";
  if (oracle) os << ",dev_x1,dev_x2";
  os << "\n";
  os << std::setprecision(17);
  for (size_t i = 0; i < traj.times.size(); ++i) {
    const Complex t = traj.times[i];
    const auto& [x1, x2] = traj.states[i];
    if (std::abs(t.imag()) > 0.0) {
      os << t.real() << '+' << t.imag() << 'i';
    } else {
      os << t.real();
    }
    os << ',' << x1.real() << ',' << x1.imag() << ',' << x2.real() << ','
       << x2.imag() << ',' << traj.implicit_residuals[i];
    if (oracle) {
      const auto& [o1, o2] = (*oracle)[i];
      os << ',' << std::abs(x1 - o1) << ',' << std::abs(x2 - o2);
    }
    os << "\n";
  }
}

}  // namespace cubicflow
