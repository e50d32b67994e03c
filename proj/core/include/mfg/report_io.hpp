#pragma once

#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "mfg/conditions.hpp"
#include "mfg/harness.hpp"
#include "mfg/model.hpp"
#include "mfg/operator.hpp"

namespace mfg {

/// Shortest decimal string that reads back to the same double; "inf",
/// "-inf" and "nan" for non-finite values.
std::string format_double(double v);

/// JSON number, or the format_double string when v is not finite.
nlohmann::json json_number(double v);

nlohmann::json to_json(const DeclaredConstants& c);
nlohmann::json to_json(const ModelSpec& model);
nlohmann::json to_json(const ContractionConstants& c);
nlohmann::json to_json(const ConditionReport& report);
nlohmann::json to_json(const EquilibriumResult& result, const StateGrid& grid);
nlohmann::json to_json(const StudyReport& report);

/// iter, sup_diff_v, w1_diff_mu, bellman_residual, invariance_residual;
/// the residual columns are filled on the final row only.
void write_trace_csv(std::ostream& os, const EquilibriumResult& result);

/// sweep_var, w1_mu_gap, policy_sup_gap, value_sup_gap, iterations,
/// bellman_residual, invariance_residual, certified
void write_study_csv(std::ostream& os, const StudyReport& report);

}  // namespace mfg
