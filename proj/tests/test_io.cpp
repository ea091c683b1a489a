#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "cubicflow/errors.hpp"
#include "cubicflow/io.hpp"
#include "helpers.hpp"

using namespace cubicflow;
using nlohmann::json;

TEST_CASE("complex serialization round trip") {
  const Complex z(1.25, -0.5);
  CHECK(complex_from_json(complex_to_json(z)) == z);
  CHECK(complex_to_json(z).dump() == "[1.25,-0.5]");
}

TEST_CASE("bare numbers are accepted as real values") {
  CHECK(complex_from_json(json(3)) == Complex(3, 0));
  CHECK(complex_from_json(json(-0.25)) == Complex(-0.25, 0));
  CHECK_THROWS_AS(complex_from_json(json("x")), ValidationError);
  CHECK_THROWS_AS(complex_from_json(json::array({1, 2, 3})), ValidationError);
}

TEST_CASE("parameter set round trip") {
  const ParameterSet p = {{1, 2},   {-0.5, 0}, {3, 0},     {0, 1},
                          {0.1, 0}, {0, -0.2}, {1.5, 2.5}};
  const ParameterSet back = parameter_set_from_json(to_json(p));
  CHECK(back.a1 == p.a1);
  CHECK(back.a2 == p.a2);
  CHECK(back.b1 == p.b1);
  CHECK(back.b2 == p.b2);
  CHECK(back.gamma1 == p.gamma1);
  CHECK(back.gamma2 == p.gamma2);
  CHECK(back.gamma3 == p.gamma3);
}

TEST_CASE("coefficient set round trip and bare-number input") {
  const CoefficientSet c = testutil::decoupled_coefficients();
  const CoefficientSet back = coefficient_set_from_json(to_json(c));
  for (int i = 0; i < 8; ++i) CHECK(back.at(i) == c.at(i));

  const json bare = {{"c11", 1}, {"c12", 0}, {"c13", -6}, {"c14", -6},
                     {"c21", 0}, {"c22", 3}, {"c23", 9},  {"c24", 7}};
  const CoefficientSet from_bare = coefficient_set_from_json(bare);
  for (int i = 0; i < 8; ++i) CHECK(from_bare.at(i) == c.at(i));
}

TEST_CASE("missing fields are reported") {
  json j = to_json(testutil::golden_parameters());
  j.erase("b2");
  CHECK_THROWS_WITH_AS(parameter_set_from_json(j), "missing field: b2",
                       ValidationError);
  json c = to_json(testutil::decoupled_coefficients());
  c.erase("c23");
  CHECK_THROWS_AS(coefficient_set_from_json(c), ValidationError);
}

TEST_CASE("reduced coefficients round trip") {
  const ReducedCoefficients g = {{1, 0}, {0, 2}, {-6, 1},
                                 {3, 0}, {9, -4}, {7, 0}};
  const ReducedCoefficients back = reduced_from_json(to_json(g));
  for (int i = 0; i < 6; ++i) CHECK(back.at(i) == g.at(i));
  json j = to_json(g);
  j.erase("g22");
  CHECK_THROWS_AS(reduced_from_json(j), ValidationError);
}

TEST_CASE("report serialization carries the expected keys") {
  ConstraintReport r;
  r.residual_first_a = 0.5;
  r.satisfied = false;
  json j = to_json(r);
  CHECK(j.at("residual_first_a") == 0.5);
  CHECK(j.contains("residual_cross"));
  CHECK(j.contains("residual_second"));
  CHECK(j.at("satisfied") == false);
  CHECK(j.at("schema_version") == kSchemaVersion);

  SpectralData s = spectral({0, 0}, {0, 0}, {0, 0});
  json js = to_json(s);
  CHECK(js.contains("lambda1"));
  s.degenerate = true;
  CHECK(!to_json(s).contains("lambda1"));

  PeriodReport pr;
  pr.k = 1;
  pr.rational_lambdas = true;
  pr.fractions = {{Fraction{1, 2}, Fraction{-1, 1}, Fraction{1, 2}}};
  json jp = to_json(pr);
  CHECK(jp.at("fractions")[0][0] == 1);
  CHECK(jp.at("fractions")[0][1] == 2);
  CHECK(!jp.contains("blowup_time"));
}

TEST_CASE("trajectory CSV layout") {
  Trajectory traj;
  traj.times = {{0, 0}, {0.5, 0}, {1, 0.25}};
  traj.states = {{{1, 0}, {2, 0}}, {{1.5, -1}, {0, 0}}, {{0, 0}, {0, 1}}};
  traj.implicit_residuals = {0, 1e-12, 2e-12};

  std::ostringstream os;
  trajectory_to_csv(os, traj);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "t,re_x1,im_x1,re_x2,im_x2,residual");
  std::getline(is, line);
  CHECK(line == "0,1,0,2,0,0");
  std::getline(is, line);
  CHECK(line.substr(0, 11) == "0.5,1.5,-1,");
  std::getline(is, line);
  CHECK(line.substr(0, 7) == "1+0.25i");  // complex time stamp

  // oracle columns
  std::vector<std::pair<Complex, Complex>> oracle = {
      {{1, 0}, {2, 0}}, {{1.5, -1}, {0, 0}}, {{0, 0}, {0, 1}}};
  std::ostringstream os2;
  trajectory_to_csv(os2, traj, &oracle);
  std::istringstream is2(os2.str());
  std::getline(is2, line);
  CHECK(line == "t,re_x1,im_x1,re_x2,im_x2,residual,dev_x1,dev_x2");
  std::getline(is2, line);
  CHECK(line == "0,1,0,2,0,0,0,0");
}

TEST_CASE("serialization is deterministic") {
  const CoefficientSet c = forward(testutil::golden_parameters());
  CHECK(to_json(c).dump() == to_json(c).dump());
  const json a = to_json(constraint_residuals(c));
  const json b = to_json(constraint_residuals(c));
  CHECK(a.dump() == b.dump());
}
