#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "intentgrasp/ambiguity.hpp"
#include "intentgrasp/intent.hpp"
#include "intentgrasp/planner.hpp"
#include "intentgrasp/task_model.hpp"

namespace intentgrasp {

using Json = nlohmann::ordered_json;

/// Serializes with every floating-point number printed to 17 significant
/// digits. indent < 0 gives a single line; numeric arrays always stay on one line.
std::string dump_json(const Json& j, int indent = 2);

Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j);
Json matrix_to_json(const Matrix& m);  // array of rows
Matrix matrix_from_json(const Json& j);

Json schema_to_json(const FeatureSchema& schema);
FeatureSchema schema_from_json(const Json& j);

Json layout_to_json(const ZoneLayout& layout);  // {"tasks": [...], "zones": [...]}
ZoneLayout layout_from_json(const Json& j);

Json model_to_json(const MultiTaskModel& model);
MultiTaskModel model_from_json(const Json& j);

Json report_to_json(const DivergenceReport& report);
DivergenceReport report_from_json(const Json& j);

Json plan_result_to_json(const PlanResult& result, const ZoneLayout& layout);
PlanResult plan_result_from_json(const Json& j);

}  // namespace intentgrasp
