#pragma once

#include <ostream>
#include <string>

#include "json.hpp"

#include "cubicflow/constraints.hpp"
#include "cubicflow/inversion.hpp"
#include "cubicflow/isochronous.hpp"
#include "cubicflow/model.hpp"
#include "cubicflow/reduced.hpp"
#include "cubicflow/solver.hpp"

namespace cubicflow {

inline constexpr const char* kSchemaVersion = "1";

// Complex values serialize as [re, im]; bare numbers are accepted on input.
nlohmann::json complex_to_json(Complex z);
Complex complex_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ParameterSet& p);
nlohmann::json to_json(const CoefficientSet& c);
nlohmann::json to_json(const KValues& k);
nlohmann::json to_json(const SpectralData& s);
nlohmann::json to_json(const ConstraintReport& r);
nlohmann::json to_json(const InversionResult& r);
nlohmann::json to_json(const ReducedCoefficients& g);
nlohmann::json to_json(const ReducedConstraintReport& r);
nlohmann::json to_json(const PeriodReport& r);

ParameterSet parameter_set_from_json(const nlohmann::json& j);
CoefficientSet coefficient_set_from_json(const nlohmann::json& j);
ReducedCoefficients reduced_from_json(const nlohmann::json& j);

/// CSV columns: t, re x1, im x1, re x2, im x2, residual; with oracle states
/// two extra deviation columns are appended.
void trajectory_to_csv(std::ostream& os, const Trajectory& traj,
                       const std::vector<std::pair<Complex, Complex>>* oracle =
                           nullptr);

}  // namespace cubicflow
