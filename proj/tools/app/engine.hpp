#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "intentgrasp/dataset.hpp"
#include "intentgrasp/intent.hpp"
#include "intentgrasp/json_io.hpp"
#include "intentgrasp/planner.hpp"

namespace intentgrasp::app {

/// A fitted model plus the training samples it came from, when known.
/// Ambiguity reports need the samples for layouts without singleton classes.
struct ModelEntry {
  std::string name;
  std::shared_ptr<const MultiTaskModel> model;
  std::vector<LabeledSample> samples;
};

/// Generates the named built-in dataset and fits a model on it.
ModelEntry builtin_model_entry(const std::string& spec_name, std::optional<std::uint64_t> seed = std::nullopt);

/// Resolves a model argument: an existing model file, a built-in spec name,
/// or an error (IoError for path-like arguments, ValidationError otherwise).
ModelEntry resolve_model(const std::string& name_or_path, std::optional<std::uint64_t> seed = std::nullopt);

/// Layout named "seven", "five", "four" or "full", or a comma list of zones
/// ("U,T,U+T"). `tasks` names the principle tasks.
ZoneLayout parse_layout(const std::string& text, const std::vector<std::string>& tasks);

/// INTENTGRASP_SEED when set and numeric.
std::optional<std::uint64_t> seed_from_environment();

GeneratorSpec generator_spec_from_json(const Json& j);

/// {u, v, inaction, clarification_needed, reconstruction_of_v}. When the
/// threshold is reached, v and its reconstruction are null.
Json intent_json(const ClassificationInput& w, const ZoneLayout& layout,
                 std::optional<double> clarification_threshold = std::nullopt);

/// {name, tasks, zones, zone_names, schema, classes}
Json model_summary_json(const std::string& name, const MultiTaskModel& model);

}  // namespace intentgrasp::app
