#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

using nlohmann::json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Runs the CLI binary with args; captures stdout. Stderr goes to a scratch
// file so diagnostics do not pollute the test log.
RunResult run(const std::string& args) {
  static int counter = 0;
  const std::string out_path =
      "cli_test_out_" + std::to_string(counter++) + ".tmp";
  const std::string cmd = std::string(CUBICFLOW_CLI_PATH) + " " + args + " >" +
                          out_path + " 2>cli_test_err.tmp";
  const int status = std::system(cmd.c_str());
  RunResult res;
  res.exit_code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
  res.out = slurp(out_path);
  std::remove(out_path.c_str());
  return res;
}

std::string quoted(const json& j) { return "'" + j.dump() + "'"; }

json golden_params() {
  return {{"a1", 1}, {"a2", 2}, {"b1", 3},     {"b2", 1},
          {"gamma1", 1}, {"gamma2", 1}, {"gamma3", 1}};
}

json decoupled_params() {
  return {{"a1", 1}, {"a2", 1}, {"b1", 1},     {"b2", 2},
          {"gamma1", 0}, {"gamma2", 0}, {"gamma3", 0}};
}

double re(const json& z) { return z.is_array() ? z[0].get<double>() : z.get<double>(); }

}  // namespace

TEST_CASE("forward emits coefficients, K values and spectral data") {
  RunResult r = run("forward --input " + quoted(golden_params()));
  REQUIRE(r.exit_code == 0);
  json out = json::parse(r.out);
  CHECK(re(out["coefficients"]["c11"]) == doctest::Approx(15.8).epsilon(1e-12));
  CHECK(re(out["coefficients"]["c24"]) == doctest::Approx(1.8).epsilon(1e-12));
  CHECK(re(out["K"]["K1"]) == doctest::Approx(40).epsilon(1e-12));
  CHECK(out["spectral"].contains("lambda1"));
}

TEST_CASE("solve reaches the doubling point of the fixed-direction path") {
  json in = decoupled_params();
  in["x0"] = {1, 0};
  RunResult r = run("solve --grid 0:0.375:7 --input " + quoted(in));
  REQUIRE(r.exit_code == 0);
  std::istringstream is(r.out);
  std::string header, line, last;
  std::getline(is, header);
  CHECK(header == "t,re_x1,im_x1,re_x2,im_x2,residual");
  while (std::getline(is, line)) {
    if (!line.empty()) last = line;
  }
  // final row: t=0.375, x1 = 2
  double t, x1re;
  char comma;
  std::istringstream row(last);
  row >> t >> comma >> x1re;
  CHECK(t == doctest::Approx(0.375));
  CHECK(x1re == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("solve --oracle appends small deviation columns") {
  json in = decoupled_params();
  in["x0"] = {1, 0};
  RunResult r = run("solve --oracle --grid 0:0.25:5 --input " + quoted(in));
  REQUIRE(r.exit_code == 0);
  std::istringstream is(r.out);
  std::string header;
  std::getline(is, header);
  CHECK(header == "t,re_x1,im_x1,re_x2,im_x2,residual,dev_x1,dev_x2");
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const size_t last_comma = line.rfind(',');
    const double dev = std::stod(line.substr(last_comma + 1));
    CHECK(dev < 1e-7);
  }
}

TEST_CASE("check flags the all-ones system as unsatisfiable") {
  json ones;
  for (const char* name :
       {"c11", "c12", "c13", "c14", "c21", "c22", "c23", "c24"}) {
    ones[name] = 1;
  }
  RunResult r = run("check --input " + quoted(ones));
  REQUIRE(r.exit_code == 0);
  json out = json::parse(r.out);
  CHECK(out["satisfied"] == false);
}

TEST_CASE("check accepts constructed systems") {
  json in = {{"parameters", golden_params()}};
  RunResult r = run("check --input " + quoted(in));
  REQUIRE(r.exit_code == 0);
  json out = json::parse(r.out);
  CHECK(out["satisfied"] == true);
  CHECK(out["residual_second"].get<double>() < 1e-10);
}

TEST_CASE("invert round trips the golden system") {
  json in = {{"parameters", golden_params()}};
  RunResult r = run("invert --input " + quoted(in));
  REQUIRE(r.exit_code == 0);
  json out = json::parse(r.out);
  CHECK(re(out["alpha"]) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(out["parameters"].contains("gamma3"));
  CHECK(out["residual_K"].get<double>() < 1e-8);
}

TEST_CASE("exit code 2 for invalid input") {
  // degenerate decomposition: a1 b2 - a2 b1 = 0
  json bad = {{"a1", 1}, {"a2", 1}, {"b1", 1},     {"b2", 1},
              {"gamma1", 0}, {"gamma2", 0}, {"gamma3", 0}};
  CHECK(run("forward --input " + quoted(bad)).exit_code == 2);
  CHECK(run("forward --input '{bad json'").exit_code == 2);
  CHECK(run("forward --input no_such_file.json").exit_code == 2);
  json in = decoupled_params();  // no x0
  CHECK(run("solve --grid 0:1:5 --input " + quoted(in)).exit_code == 2);
}

TEST_CASE("exit code 4 for off-manifold inversion") {
  json ones;
  for (const char* name :
       {"c11", "c12", "c13", "c14", "c21", "c22", "c23", "c24"}) {
    ones[name] = 1;
  }
  CHECK(run("invert --input " + quoted(ones)).exit_code == 4);
}

TEST_CASE("complete is deterministic for a fixed seed") {
  json in = {{"parameters", golden_params()},
             {"pair", json::array({"c11", "c24"})}};
  // zero out the pair on the coefficient side: pass coefficients explicitly
  RunResult fwd = run("forward --input " + quoted(golden_params()));
  REQUIRE(fwd.exit_code == 0);
  json coeffs = json::parse(fwd.out)["coefficients"];
  coeffs.erase("schema_version");
  coeffs["c11"] = 0;
  coeffs["c24"] = 0;
  json req = {{"coefficients", coeffs}, {"pair", json::array({"c11", "c24"})}};
  RunResult a = run("complete --seed 7 --input " + quoted(req));
  RunResult b = run("complete --seed 7 --input " + quoted(req));
  REQUIRE(a.exit_code == 0);
  CHECK(a.out == b.out);
  json out = json::parse(a.out);
  REQUIRE(!out["completions"].empty());
  for (const auto& branch : out["completions"]) {
    CHECK(branch["check"]["satisfied"] == true);
  }
}

TEST_CASE("isochron reports recurrence and rational exponents") {
  json in = {{"parameters", decoupled_params()},
             {"x0", json::array({0.01, 0.02})}};
  RunResult r = run("isochron --omega 1 --kmax 2 --input " + quoted(in));
  REQUIRE(r.exit_code == 0);
  json out = json::parse(r.out);
  CHECK(out["k"] == 1);
  CHECK(out["T_tilde"].get<double>() == doctest::Approx(6.283185307179586));
  REQUIRE(out.contains("lambda_fractions"));
  CHECK(out["lambda_fractions"][1][0] == -1);
}

TEST_CASE("reduced check and completion") {
  // the exact special family: g12 = 0, g21 = 3 g11
  json g = {{"g11", 2},  {"g12", 0}, {"g13", -1.5},
            {"g21", 6}, {"g22", 4}, {"g23", 0.5}};
  RunResult r = run("reduced --input " + quoted(g));
  REQUIRE(r.exit_code == 0);
  json out = json::parse(r.out);
  CHECK(out["satisfied"] == true);
  CHECK(out["residual_main_1"] == 0.0);

  json req = g;
  req["g12"] = 0;
  req["g21"] = 0;
  req["action"] = "complete";
  req["pair"] = json::array({"g12", "g21"});
  RunResult c = run("reduced --input " + quoted(req));
  REQUIRE(c.exit_code == 0);
  json cout_json = json::parse(c.out);
  REQUIRE(cout_json["completions"].size() == 1);
  CHECK(re(cout_json["completions"][0]["coefficients"]["g21"]) ==
        doctest::Approx(6.0));
}

TEST_CASE("output goes to a file when requested") {
  const std::string path = "cli_test_forward.json";
  RunResult r = run("forward --output " + path + " --input " +
                    quoted(golden_params()));
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.empty());
  json out = json::parse(slurp(path));
  CHECK(re(out["coefficients"]["c12"]) == doctest::Approx(26.8).epsilon(1e-12));
  std::remove(path.c_str());
}
