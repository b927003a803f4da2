#include "engine.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>

#include "intentgrasp/errors.hpp"

namespace intentgrasp::app {

ModelEntry builtin_model_entry(const std::string& spec_name, std::optional<std::uint64_t> seed) {
  auto spec = builtin_spec(spec_name);
  if (seed) spec.seed = *seed;
  Dataset data = generate(spec);
  auto model = std::make_shared<const MultiTaskModel>(fit_model(data.samples, data.layout, data.schema));
  return {spec_name, std::move(model), std::move(data.samples)};
}

ModelEntry resolve_model(const std::string& name_or_path, std::optional<std::uint64_t> seed) {
  const std::filesystem::path path(name_or_path);
  if (std::filesystem::exists(path)) {
    auto model = std::make_shared<const MultiTaskModel>(load_model(path));
    return {path.stem().string(), std::move(model), {}};
  }
  const auto specs = builtin_specs();
  if (specs.count(name_or_path) != 0) return builtin_model_entry(name_or_path, seed);
  if (name_or_path.find('/') != std::string::npos || path.has_extension()) {
    throw IoError("model file not found: " + name_or_path);
  }
  std::string known;
  for (const auto& [name, spec] : specs) known += (known.empty() ? "" : ", ") + name;
  throw ValidationError("unknown model '" + name_or_path + "' (built-ins: " + known + ")");
}

ZoneLayout parse_layout(const std::string& text, const std::vector<std::string>& tasks) {
  const bool three_cup_tasks = tasks == cup_tasks();
  if (text == "full") return full_layout(tasks);
  if (text == "seven" || text == "five" || text == "four") {
    if (tasks.size() != 3) throw ValidationError("layout '" + text + "' needs exactly three tasks");
    ZoneLayout base = text == "seven" ? seven_zone_layout() : text == "five" ? five_zone_layout() : four_zone_layout();
    return three_cup_tasks ? base : ZoneLayout(tasks, base.zones());
  }
  const ZoneLayout parser(tasks, all_nonempty_subsets(tasks.size()));
  std::vector<TaskSet> zones;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (item.empty()) throw ValidationError("empty zone in layout '" + text + "'");
    zones.push_back(parser.parse(item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  std::sort(zones.begin(), zones.end(), [](TaskSet a, TaskSet b) {
    return a.size() != b.size() ? a.size() < b.size() : a.mask() < b.mask();
  });
  return ZoneLayout(tasks, std::move(zones));
}

std::optional<std::uint64_t> seed_from_environment() {
  const char* raw = std::getenv("INTENTGRASP_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  const std::string text(raw);
  std::uint64_t seed = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), seed);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw ValidationError("INTENTGRASP_SEED is not a nonnegative integer: " + text);
  }
  return seed;
}

GeneratorSpec generator_spec_from_json(const Json& j) {
  try {
    const auto tasks = j.at("tasks").get<std::vector<std::string>>();
    const FeatureSchema schema = j.contains("schema") ? schema_from_json(j.at("schema")) : default_grasp_schema();
    std::vector<ZoneGenerator> zones;
    for (const auto& z : j.at("zones")) {
      zones.push_back({TaskSet(z.at("zone").get<std::uint32_t>()), vector_from_json(z.at("mean")),
                       matrix_from_json(z.at("covariance"))});
    }
    std::vector<TaskSet> masks;
    for (const auto& z : zones) masks.push_back(z.zone);
    std::sort(masks.begin(), masks.end(), [](TaskSet a, TaskSet b) {
      return a.size() != b.size() ? a.size() < b.size() : a.mask() < b.mask();
    });
    GeneratorSpec spec{j.value("object", std::string("object")), ZoneLayout(tasks, masks), schema, std::move(zones)};
    spec.samples_per_zone = j.value("samples_per_zone", spec.samples_per_zone);
    spec.seed = j.value("seed", spec.seed);
    validate(spec);
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed generator spec: ") + e.what());
  }
}

Json intent_json(const ClassificationInput& w, const ZoneLayout& layout, std::optional<double> threshold) {
  if (w.w.size() != layout.task_count()) throw DimensionMismatch("intent w", layout.task_count(), w.w.size());
  const auto u = joint_events(w);
  Json out;
  out["w"] = w.w;
  out["u"] = u.u;
  out["inaction"] = u.inaction();
  try {
    const auto v = target_vector(u, layout, threshold);
    out["v"] = v.v;
    out["clarification_needed"] = false;
    out["reconstruction_of_v"] = reconstruct_intent(v.v, layout).w;
  } catch (const ClarificationNeeded&) {
    out["v"] = nullptr;
    out["clarification_needed"] = true;
    out["reconstruction_of_v"] = nullptr;
  }
  Json names = Json::array();
  for (const auto& z : layout.zones()) names.push_back(layout.name_of(z));
  out["zone_names"] = std::move(names);
  return out;
}

Json model_summary_json(const std::string& name, const MultiTaskModel& model) {
  Json out;
  out["name"] = name;
  const auto layout = layout_to_json(model.layout());
  out["tasks"] = layout.at("tasks");
  out["zones"] = layout.at("zones");
  Json names = Json::array();
  for (const auto& z : model.layout().zones()) names.push_back(model.layout().name_of(z));
  out["zone_names"] = std::move(names);
  out["schema"] = schema_to_json(model.schema());
  Json priors = Json::array();
  for (const auto& c : model.classes()) priors.push_back(c.prior);
  out["priors"] = std::move(priors);
  return out;
}

}  // namespace intentgrasp::app
