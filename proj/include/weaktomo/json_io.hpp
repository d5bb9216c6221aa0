#pragma once

#include <string>

#include <json.hpp>

#include "weaktomo/hilbert.hpp"
#include "weaktomo/states.hpp"
#include "weaktomo/statistics.hpp"

namespace weaktomo::json {

// Complex scalars are [re, im]; matrices are row-major nested arrays.
// Non-finite parts serialize as null and parse back as NaN.
nlohmann::json complex_to_json(cplx z);
cplx complex_from_json(const nlohmann::json& j);
nlohmann::json matrix_to_json(const CMat& m);
CMat matrix_from_json(const nlohmann::json& j, Eigen::Index rows, Eigen::Index cols);
nlohmann::json real_matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd real_matrix_from_json(const nlohmann::json& j);

// Throws InvalidStateSpec on any schema violation.
StateSpec parse_state_spec(const nlohmann::json& j);
nlohmann::json state_spec_to_json(const StateSpec& s);

// Accepts inline JSON, "@path" or "fixture:NAME".
StateSpec parse_state_argument(const std::string& arg);

// {"seed":u64,"shots":N} or {"seed":u64,"per_setting":{label:N}}.
ShotPlan parse_shot_plan(const nlohmann::json& j);
nlohmann::json shot_plan_to_json(const ShotPlan& p);

// Inline JSON or "@path".
nlohmann::json load_json_argument(const std::string& arg);

}  // namespace weaktomo::json
