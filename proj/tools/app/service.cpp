#include "service.hpp"

#include <cmath>

#include "intentgrasp/ambiguity.hpp"
#include "intentgrasp/errors.hpp"

namespace intentgrasp::app {
namespace {

constexpr const char* kApiVersion = "1";

class HttpError : public std::runtime_error {
 public:
  HttpError(int status, const std::string& message) : std::runtime_error(message), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

HttpResponse json_response(int status, const Json& body) { return {status, "application/json", dump_json(body, -1)}; }

HttpResponse error_response(int status, const std::string& message) {
  return json_response(status, Json{{"error", message}, {"status", status}});
}

Json parse_body(const std::string& body) {
  if (body.empty()) return Json::object();
  Json j = Json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw HttpError(422, "request body must be a JSON object");
  return j;
}

std::vector<double> read_w(const Json& body, std::size_t tasks) {
  if (!body.contains("w") || !body["w"].is_array()) throw HttpError(422, "field 'w' must be an array");
  std::vector<double> w;
  for (const auto& item : body["w"]) {
    if (!item.is_number()) throw HttpError(422, "entries of 'w' must be numbers");
    const double value = item.get<double>();
    if (!(value >= 0.0 && value <= 1.0)) throw HttpError(422, "entries of 'w' must lie in [0, 1]");
    w.push_back(value);
  }
  if (w.size() != tasks) {
    throw HttpError(422, "'w' needs " + std::to_string(tasks) + " entries, got " + std::to_string(w.size()));
  }
  return w;
}

std::optional<double> read_threshold(const Json& body) {
  if (!body.contains("clarification_threshold") || body["clarification_threshold"].is_null()) return std::nullopt;
  if (!body["clarification_threshold"].is_number()) throw HttpError(422, "clarification_threshold must be a number");
  return body["clarification_threshold"].get<double>();
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start < path.size()) {
    const auto slash = path.find('/', start);
    const auto end = slash == std::string::npos ? path.size() : slash;
    if (end > start) parts.push_back(path.substr(start, end - start));
    start = end + 1;
  }
  return parts;
}

}  // namespace

ModelRegistry::ModelRegistry() : current_(std::make_shared<const Snapshot>()) {}

std::shared_ptr<const ModelRegistry::Snapshot> ModelRegistry::snapshot() const {
  std::lock_guard lock(mutex_);
  return current_;
}

std::uint64_t ModelRegistry::publish(ModelEntry entry) {
  auto shared = std::make_shared<const ModelEntry>(std::move(entry));
  std::lock_guard lock(mutex_);
  if (current_->entries.count(shared->name) != 0) throw DuplicateModel(shared->name);
  auto next = std::make_shared<Snapshot>(*current_);
  next->entries.emplace(shared->name, std::move(shared));
  next->version = current_->version + 1;
  current_ = std::move(next);
  return current_->version;
}

Service::Service(ServiceLimits limits) : limits_(limits) {}

void Service::load_builtin_models() {
  for (const auto& [name, spec] : builtin_specs()) registry_.publish(builtin_model_entry(name));
}

HttpResponse Service::handle(const HttpRequest& request) const {
  try {
    const auto parts = split_path(request.path);
    if (parts.size() < 2 || parts[0] != "api") return error_response(404, "no such endpoint: " + request.path);
    const bool get = request.method == "GET";
    const bool post = request.method == "POST";

    if (parts.size() == 2 && parts[1] == "health") {
      return get ? health() : error_response(405, "use GET");
    }
    if (parts[1] != "models") return error_response(404, "no such endpoint: " + request.path);
    if (parts.size() == 2) return get ? list_models() : error_response(405, "use GET");
    if (parts.size() == 3 && parts[2] == "fit") {
      return post ? fit(parse_body(request.body)) : error_response(405, "use POST");
    }
    if (parts.size() != 4) return error_response(404, "no such endpoint: " + request.path);

    // One snapshot per request.
    const auto snapshot = registry_.snapshot();
    const auto found = snapshot->entries.find(parts[2]);
    if (found == snapshot->entries.end()) return error_response(404, "unknown model '" + parts[2] + "'");
    const ModelEntry& entry = *found->second;
    if (parts[3] == "intent") return post ? intent(entry, parse_body(request.body)) : error_response(405, "use POST");
    if (parts[3] == "plan") return post ? plan(entry, parse_body(request.body)) : error_response(405, "use POST");
    if (parts[3] == "ambiguity") return get ? ambiguity(entry) : error_response(405, "use GET");
    return error_response(404, "no such endpoint: " + request.path);
  } catch (const HttpError& e) {
    return error_response(e.status(), e.what());
  } catch (const DuplicateModel& e) {
    return error_response(409, e.what());
  } catch (const IoError& e) {
    return error_response(422, e.what());
  } catch (const Error& e) {
    return error_response(422, e.what());
  } catch (const nlohmann::json::exception& e) {
    return error_response(422, e.what());
  } catch (const std::exception& e) {
    return error_response(500, e.what());
  }
}

HttpResponse Service::health() const {
  const auto snapshot = registry_.snapshot();
  return json_response(200, Json{{"status", "ok"},
                                 {"version", snapshot->version},
                                 {"api_version", kApiVersion},
                                 {"models", snapshot->entries.size()}});
}

HttpResponse Service::list_models() const {
  const auto snapshot = registry_.snapshot();
  Json models = Json::array();
  for (const auto& [name, entry] : snapshot->entries) models.push_back(model_summary_json(name, *entry->model));
  return json_response(200, models);
}

HttpResponse Service::intent(const ModelEntry& entry, const Json& body) const {
  const auto& layout = entry.model->layout();
  const auto w = read_w(body, layout.task_count());
  return json_response(200, intent_json({w}, layout, read_threshold(body)));
}

HttpResponse Service::plan(const ModelEntry& entry, const Json& body) const {
  const auto& model = *entry.model;
  const auto& layout = model.layout();
  const auto w = read_w(body, layout.task_count());
  const auto u = joint_events({w});
  TargetProbabilityVector target;
  try {
    target = target_vector(u, layout, read_threshold(body));
  } catch (const ClarificationNeeded& e) {
    return json_response(200, Json{{"model", entry.name},
                                   {"clarification_needed", true},
                                   {"inaction", e.inaction_probability()}});
  }

  PlanningProblem problem{entry.model, target.v, std::nullopt, std::nullopt, {}};
  if (body.contains("bounds") && !body["bounds"].is_null()) {
    const auto& b = body["bounds"];
    Bounds bounds = default_bounds(model);
    if (b.contains("lower")) bounds.lower = vector_from_json(b["lower"]);
    if (b.contains("upper")) bounds.upper = vector_from_json(b["upper"]);
    problem.bounds = std::move(bounds);
  }
  PlanConfig config;
  if (body.contains("solver")) config.strategy = parse_solver(body["solver"].get<std::string>());
  if (body.contains("seed")) config.seed = body["seed"].get<std::uint64_t>();
  config.max_iterations = limits_.max_iterations;
  if (body.contains("max_iter")) {
    config.max_iterations = std::min(body["max_iter"].get<std::size_t>(), limits_.max_iterations);
  }
  config.time_limit = limits_.plan_timeout;
  const PlanResult result = intentgrasp::plan(problem, config);

  Json doc = plan_result_to_json(result, layout);
  doc["model"] = entry.name;
  doc["w"] = w;
  doc["target"] = target.v;
  doc["inaction"] = target.inaction_probability;
  doc["clarification_needed"] = false;
  return json_response(200, doc);
}

HttpResponse Service::ambiguity(const ModelEntry& entry) const {
  return json_response(200, report_to_json(divergence_matrices(*entry.model, entry.samples)));
}

HttpResponse Service::fit(const Json& body) const {
  if (!body.contains("name") || !body["name"].is_string() || body["name"].get<std::string>().empty()) {
    throw HttpError(422, "field 'name' must be a nonempty string");
  }
  const auto name = body["name"].get<std::string>();
  if (name.find('/') != std::string::npos) throw HttpError(422, "model names cannot contain '/'");
  if (registry_.snapshot()->entries.count(name) != 0) throw DuplicateModel(name);

  const auto load = [&]() -> Dataset {
    if (body.contains("dataset") && body["dataset"].is_string()) {
      return dataset_from_text(body["dataset"].get<std::string>());
    }
    if (body.contains("path") && body["path"].is_string()) {
      if (!limits_.allow_dataset_paths) throw HttpError(422, "dataset paths are disabled on this server");
      return load_dataset(body["path"].get<std::string>());
    }
    throw HttpError(422, "provide 'dataset' (JSON-lines text) or 'path'");
  };
  Dataset data = load();
  const ZoneLayout layout =
      body.contains("layout") ? parse_layout(body["layout"].get<std::string>(), data.layout.tasks()) : data.layout;
  ModelConfig config;
  if (body.value("priors", std::string("count")) == "uniform") config.priors = PriorMode::Uniform;

  ModelEntry entry{name, std::make_shared<const MultiTaskModel>(fit_model(data.samples, layout, data.schema, config)),
                   std::move(data.samples)};
  Json summary = model_summary_json(name, *entry.model);
  const auto version = registry_.publish(std::move(entry));
  summary["version"] = version;
  return json_response(201, summary);
}

}  // namespace intentgrasp::app
