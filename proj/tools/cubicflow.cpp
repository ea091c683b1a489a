// cubicflow: construct, solve, invert and probe the solvable cubic systems.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cubicflow/constraints.hpp"
#include "cubicflow/errors.hpp"
#include "cubicflow/integrator.hpp"
#include "cubicflow/inversion.hpp"
#include "cubicflow/io.hpp"
#include "cubicflow/isochronous.hpp"
#include "cubicflow/model.hpp"
#include "cubicflow/reduced.hpp"
#include "cubicflow/solver.hpp"

using nlohmann::json;
using namespace cubicflow;

namespace {

int log_level() {
  const char* env = std::getenv("CUBICFLOW_LOG");
  if (!env || !*env) return 0;
  return std::atoi(env);
}

void log_info(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "[cubicflow] " << msg << "\n";
}

json load_input(const std::string& input) {
  if (input.empty()) throw ValidationError("--input is required");
  if (!input.empty() && input.front() == '{') {
    try {
      return json::parse(input, nullptr, true, true);
    } catch (const json::exception& e) {
      throw ValidationError(std::string("input is not valid JSON: ") + e.what());
    }
  }
  std::ifstream in(input);
  if (!in) throw ValidationError("cannot open input file: " + input);
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("input is not valid JSON: ") + e.what());
  }
}

void emit_text(const std::string& output, const std::string& text) {
  if (output.empty() || output == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(output, std::ios::binary);
  if (!out) throw ValidationError("cannot open output file: " + output);
  out << text;
}

void emit_json(const std::string& output, const json& j) {
  emit_text(output, j.dump(2) + "\n");
}

std::vector<double> parse_grid(const std::string& grid) {
  double t0 = 0.0, t1 = 0.0;
  long n = 0;
  char c1 = 0, c2 = 0;
  std::istringstream is(grid);
  if (!(is >> t0 >> c1 >> t1 >> c2 >> n) || c1 != ':' || c2 != ':' ||
      !is.eof() || n < 2) {
    throw ValidationError("bad --grid, expected t0:t1:n with n >= 2: " + grid);
  }
  std::vector<double> out(static_cast<size_t>(n));
  for (long i = 0; i < n; ++i) {
    out[static_cast<size_t>(i)] = t0 + (t1 - t0) * double(i) / double(n - 1);
  }
  return out;
}

std::vector<double> times_from(const json& in, const std::string& grid) {
  if (!grid.empty()) return parse_grid(grid);
  if (in.contains("times")) {
    std::vector<double> out;
    for (const auto& t : in.at("times")) out.push_back(t.get<double>());
    if (out.empty()) throw ValidationError("\"times\" must be nonempty");
    return out;
  }
  throw ValidationError("no time grid: pass --grid t0:t1:n or a \"times\" array");
}

std::pair<Complex, Complex> initial_state_from(const json& in) {
  if (!in.contains("x0")) throw ValidationError("missing field: x0");
  const json& x0 = in.at("x0");
  if (!x0.is_array() || x0.size() != 2) {
    throw ValidationError("\"x0\" must be a two-element array");
  }
  return {complex_from_json(x0[0]), complex_from_json(x0[1])};
}

CoefficientSet coefficients_from(const json& in) {
  if (in.contains("coefficients")) {
    return coefficient_set_from_json(in.at("coefficients"));
  }
  if (in.contains("parameters")) {
    ParameterSet p = parameter_set_from_json(in.at("parameters"));
    p.validate();
    return forward(p);
  }
  return coefficient_set_from_json(in);
}

// RK reference trajectory of the raw system on a real time grid.
std::vector<std::pair<Complex, Complex>> rk_trajectory(
    const CoefficientSet& coeffs, Complex x1_0, Complex x2_0,
    const std::vector<double>& times, double rel_tol) {
  OdeProblem prob;
  prob.dimension = 2;
  prob.rhs = [&coeffs](Complex, const std::vector<Complex>& y,
                       std::vector<Complex>& dydt) {
    auto [d1, d2] = rhs_eval(coeffs, y[0], y[1]);
    dydt[0] = d1;
    dydt[1] = d2;
  };
  prob.initial_state = {x1_0, x2_0};
  for (double t : times) prob.path.emplace_back(t - times.front(), 0.0);
  prob.rel_tol = rel_tol;
  prob.abs_tol = rel_tol * 1e-2;
  if (std::abs(times.front()) > 0.0) {
    throw ValidationError("reference integration requires a grid from t=0");
  }
  OdeSolution sol = integrate(prob);
  if (sol.blew_up) {
    throw NumericalError("reference integration blew up near t=" +
                         std::to_string(sol.blowup_time.real()));
  }
  std::vector<std::pair<Complex, Complex>> out;
  for (const auto& s : sol.states) out.emplace_back(s[0], s[1]);
  return out;
}

int cmd_forward(const std::string& input, const std::string& output) {
  json in = load_input(input);
  ParameterSet p = parameter_set_from_json(
      in.contains("parameters") ? in.at("parameters") : in);
  p.validate();
  CoefficientSet coeffs = forward(p);
  json out = {{"schema_version", kSchemaVersion},
              {"coefficients", to_json(coeffs)},
              {"K", to_json(k_values(p))},
              {"spectral", to_json(spectral(p.gamma1, p.gamma2, p.gamma3))}};
  emit_json(output, out);
  return 0;
}

int cmd_solve(const std::string& input, const std::string& output,
              const std::string& grid, double tol, bool oracle) {
  json in = load_input(input);
  IvpSpec spec;
  spec.parameters = parameter_set_from_json(
      in.contains("parameters") ? in.at("parameters") : in);
  spec.parameters.validate();
  std::tie(spec.x1_0, spec.x2_0) = initial_state_from(in);
  std::vector<double> times = times_from(in, grid);
  for (double t : times) spec.time_grid.emplace_back(t, 0.0);
  if (std::abs(times.front()) > 0.0) {
    throw ValidationError("time grid must start at 0");
  }
  Trajectory traj = solve_ivp(spec);
  log_info("solve: " + std::to_string(traj.times.size()) + " samples" +
           (traj.truncated ? " (truncated at a singularity)" : ""));
  std::ostringstream csv;
  if (oracle) {
    std::vector<double> kept(times.begin(),
                             times.begin() + long(traj.times.size()));
    auto reference = rk_trajectory(forward(spec.parameters), spec.x1_0,
                                   spec.x2_0, kept, tol > 0 ? tol : 1e-10);
    trajectory_to_csv(csv, traj, &reference);
  } else {
    trajectory_to_csv(csv, traj);
  }
  emit_text(output, csv.str());
  return 0;
}

int cmd_integrate(const std::string& input, const std::string& output,
                  const std::string& grid, double tol) {
  json in = load_input(input);
  CoefficientSet coeffs = coefficients_from(in);
  auto [x1_0, x2_0] = initial_state_from(in);
  std::vector<double> times = times_from(in, grid);
  auto states =
      rk_trajectory(coeffs, x1_0, x2_0, times, tol > 0 ? tol : 1e-10);
  Trajectory traj;
  for (size_t i = 0; i < states.size(); ++i) {
    traj.times.emplace_back(times[i], 0.0);
    traj.states.push_back(states[i]);
    traj.implicit_residuals.push_back(0.0);
  }
  std::ostringstream csv;
  trajectory_to_csv(csv, traj);
  emit_text(output, csv.str());
  return 0;
}

int cmd_invert(const std::string& input, const std::string& output) {
  json in = load_input(input);
  CoefficientSet coeffs = coefficients_from(in);
  InversionResult res = invert(coeffs);
  emit_json(output, to_json(res));
  return 0;
}

int cmd_check(const std::string& input, const std::string& output) {
  json in = load_input(input);
  CoefficientSet coeffs = coefficients_from(in);
  emit_json(output, to_json(constraint_residuals(coeffs)));
  return 0;
}

int cmd_complete(const std::string& input, const std::string& output,
                 uint64_t seed) {
  json in = load_input(input);
  CoefficientSet coeffs = coefficients_from(in);
  if (!in.contains("pair") || !in.at("pair").is_array() ||
      in.at("pair").size() != 2) {
    throw ValidationError("missing \"pair\": two coefficient names to solve for");
  }
  Coeff first = coeff_from_name(in.at("pair")[0].get<std::string>());
  Coeff second = coeff_from_name(in.at("pair")[1].get<std::string>());
  std::vector<std::pair<Complex, Complex>> hints;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double scale = std::max(coeffs.norm(), 1.0);
  for (int i = 0; i < 8; ++i) {
    hints.emplace_back(Complex(unit(rng), unit(rng)) * scale,
                       Complex(unit(rng), unit(rng)) * scale);
  }
  CompletionResult res = complete_pair(coeffs, first, second, hints);
  log_info("complete: " + std::to_string(res.completions.size()) +
           " branches from " + std::to_string(res.seeds_tried) + " seeds");
  json branches = json::array();
  for (const CoefficientSet& c : res.completions) {
    ConstraintReport rep = constraint_residuals(c);
    branches.push_back({{"coefficients", to_json(c)}, {"check", to_json(rep)}});
  }
  emit_json(output, {{"schema_version", kSchemaVersion},
                     {"pair", in.at("pair")},
                     {"seeds_tried", res.seeds_tried},
                     {"completions", branches}});
  return 0;
}

int cmd_isochron(const std::string& input, const std::string& output,
                 double omega, int kmax, double tol) {
  json in = load_input(input);
  if (omega == 0.0) throw ValidationError("--omega must be nonzero");
  CoefficientSet coeffs = coefficients_from(in);
  auto [x1_0, x2_0] = initial_state_from(in);
  const double eps = tol > 0 ? tol : 1e-6;
  PeriodReport rep = detect_period(coeffs, omega, x1_0, x2_0, kmax, eps);
  json out = to_json(rep);
  out["omega"] = omega;
  out["T_tilde"] = kTwoPi / std::abs(omega);
  if (in.contains("parameters")) {
    ParameterSet p = parameter_set_from_json(in.at("parameters"));
    SpectralData spec = spectral(p.gamma1, p.gamma2, p.gamma3);
    std::array<Fraction, 3> fractions;
    if (rationality_check(spec, 1000, 1e-9, &fractions)) {
      json f = json::array();
      for (const Fraction& fr : fractions) {
        f.push_back(json::array({fr.num, fr.den}));
      }
      out["lambda_fractions"] = f;
    }
  }
  emit_json(output, out);
  return 0;
}

int cmd_reduced(const std::string& input, const std::string& output) {
  json in = load_input(input);
  ReducedCoefficients g = reduced_from_json(
      in.contains("coefficients") ? in.at("coefficients") : in);
  const std::string action =
      in.contains("action") ? in.at("action").get<std::string>() : "check";
  if (action == "check") {
    emit_json(output, to_json(reduced_constraint_residuals(g)));
    return 0;
  }
  if (action == "complete") {
    if (!in.contains("pair") || !in.at("pair").is_array() ||
        in.at("pair").size() != 2) {
      throw ValidationError("missing \"pair\": two coefficient names");
    }
    auto gcoeff = [](const std::string& name) {
      for (int i = 0; i < 6; ++i) {
        if (name == gcoeff_name(static_cast<GCoeff>(i))) {
          return static_cast<GCoeff>(i);
        }
      }
      throw ValidationError("unknown reduced coefficient: " + name);
    };
    GCoeff first = gcoeff(in.at("pair")[0].get<std::string>());
    GCoeff second = gcoeff(in.at("pair")[1].get<std::string>());
    auto completions = reduced_pair_solve(g, first, second);
    json branches = json::array();
    for (const ReducedCoefficients& c : completions) {
      branches.push_back({{"coefficients", to_json(c)},
                          {"check", to_json(reduced_constraint_residuals(c))}});
    }
    emit_json(output, {{"schema_version", kSchemaVersion},
                       {"pair", in.at("pair")},
                       {"completions", branches}});
    return 0;
  }
  if (action == "invert") {
    ParameterSet p = reduced_invert(g);
    emit_json(output, to_json(p));
    return 0;
  }
  throw ValidationError("unknown action: " + action +
                        " (expected check, complete or invert)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"solvable two-variable cubic systems: construction, exact "
               "solution, inversion, constraints, isochronous extension"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string input, output, grid;
  double tol = 0.0;
  double omega = 1.0;
  int kmax = 8;
  uint64_t seed = 0;
  bool oracle = false;

  app.add_option("--input", input, "input file path or inline JSON")
      ->configurable(false);
  app.add_option("--output", output, "output file path (default stdout)");
  app.add_option("--tol", tol, "tolerance override");
  app.add_option("--seed", seed, "RNG seed for randomized sweeps");
  app.add_option("--grid", grid, "time grid t0:t1:n (n points, inclusive)");
  app.add_option("--omega", omega, "frequency of the isochronous extension");
  app.add_option("--kmax", kmax, "maximal period multiple to scan");
  app.add_flag("--oracle", oracle,
               "also integrate numerically and append deviation columns");

  auto* forward_cmd = app.add_subcommand(
      "forward", "parameters -> coefficients, K values and spectral data");
  auto* solve_cmd =
      app.add_subcommand("solve", "closed-form trajectory as CSV");
  auto* integrate_cmd =
      app.add_subcommand("integrate", "adaptive RK trajectory as CSV");
  auto* invert_cmd =
      app.add_subcommand("invert", "coefficients -> parameters");
  auto* check_cmd =
      app.add_subcommand("check", "constraint residual report as JSON");
  auto* complete_cmd = app.add_subcommand(
      "complete", "re-solve a coefficient pair from the constraints");
  auto* isochron_cmd = app.add_subcommand(
      "isochron", "periodicity scan of the isochronous extension");
  auto* reduced_cmd = app.add_subcommand(
      "reduced", "reduced-subcase check, completion and inversion");

  CLI11_PARSE(app, argc, argv);

  try {
    if (forward_cmd->parsed()) return cmd_forward(input, output);
    if (solve_cmd->parsed()) return cmd_solve(input, output, grid, tol, oracle);
    if (integrate_cmd->parsed()) return cmd_integrate(input, output, grid, tol);
    if (invert_cmd->parsed()) return cmd_invert(input, output);
    if (check_cmd->parsed()) return cmd_check(input, output);
    if (complete_cmd->parsed()) return cmd_complete(input, output, seed);
    if (isochron_cmd->parsed())
      return cmd_isochron(input, output, omega, kmax, tol);
    if (reduced_cmd->parsed()) return cmd_reduced(input, output);
  } catch (const ValidationError& e) {
    std::cerr << json{{"error", "validation"}, {"message", e.what()}}.dump()
              << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << json{{"error", "numerical"}, {"message", e.what()}}.dump()
              << "\n";
    return 3;
  } catch (const ConstraintError& e) {
    std::cerr << json{{"error", "constraint"}, {"message", e.what()}}.dump()
              << "\n";
    return 4;
  }
  return 1;
}
