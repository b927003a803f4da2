#include "intentgrasp/json_io.hpp"

#include <cmath>
#include <cstdio>

#include "intentgrasp/dataset.hpp"
#include "intentgrasp/errors.hpp"

namespace intentgrasp {

namespace {

void write_number(const Json& j, std::string& out) {
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ValidationError("cannot serialize a non-finite number");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
  } else {
    out += j.dump();
  }
}

bool is_flat(const Json& j) {
  for (const auto& e : j) {
    if (e.is_structured()) return false;
  }
  return true;
}

void write(const Json& j, int indent, int depth, std::string& out) {
  const bool pretty = indent >= 0;
  auto newline = [&](int level) {
    if (!pretty) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * level), ' ');
  };
  if (j.is_number()) {
    write_number(j, out);
  } else if (j.is_array()) {
    if (j.empty()) {
      out += "[]";
      return;
    }
    const bool inline_items = !pretty || is_flat(j);
    out += '[';
    bool first = true;
    for (const auto& e : j) {
      if (!first) out += inline_items && pretty ? ", " : ",";
      if (!inline_items) newline(depth + 1);
      write(e, indent, depth + 1, out);
      first = false;
    }
    if (!inline_items) newline(depth);
    out += ']';
  } else if (j.is_object()) {
    if (j.empty()) {
      out += "{}";
      return;
    }
    out += '{';
    bool first = true;
    for (const auto& [key, value] : j.items()) {
      if (!first) out += ',';
      newline(depth + 1);
      out += Json(key).dump();
      out += pretty ? ": " : ":";
      write(value, indent, depth + 1, out);
      first = false;
    }
    newline(depth);
    out += '}';
  } else {
    out += j.dump();
  }
}

template <typename T>
T require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("field '") + key + "': " + e.what());
  }
}

const Json& require_node(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
  return j.at(key);
}

}  // namespace

std::string dump_json(const Json& j, int indent) {
  std::string out;
  write(j, indent, 0, out);
  return out;
}

Json vector_to_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vector vector_from_json(const Json& j) {
  if (!j.is_array()) throw FormatError("expected a numeric array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw FormatError("expected a numeric array");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(vector_to_json(m.row(r).transpose()));
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array()) throw FormatError("expected an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return Matrix(0, 0);
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Vector row = vector_from_json(j[static_cast<std::size_t>(r)]);
    if (row.size() != cols) throw FormatError("ragged matrix rows");
    m.row(r) = row.transpose();
  }
  return m;
}

Json schema_to_json(const FeatureSchema& schema) {
  Json features = Json::array();
  for (const auto& f : schema.features()) {
    Json e = {{"name", f.name}, {"unit", f.unit}};
    if (f.observed_range) e["observed_range"] = {f.observed_range->first, f.observed_range->second};
    features.push_back(std::move(e));
  }
  Json groups = Json::array();
  for (const auto& g : schema.unit_norm_groups()) groups.push_back(g);
  return {{"features", std::move(features)}, {"unit_norm_groups", std::move(groups)}};
}

FeatureSchema schema_from_json(const Json& j) {
  const Json& features = require_node(j, "features");
  if (!features.is_array()) throw FormatError("schema features must be an array");
  std::vector<FeatureDescriptor> out;
  for (const auto& f : features) {
    FeatureDescriptor d;
    d.name = require<std::string>(f, "name");
    d.unit = require<std::string>(f, "unit");
    if (f.contains("observed_range")) {
      const auto r = require<std::vector<double>>(f, "observed_range");
      if (r.size() != 2) throw FormatError("observed_range must have two entries");
      d.observed_range = std::make_pair(r[0], r[1]);
    }
    out.push_back(std::move(d));
  }
  const auto groups = j.contains("unit_norm_groups")
                          ? require<std::vector<std::vector<std::size_t>>>(j, "unit_norm_groups")
                          : std::vector<std::vector<std::size_t>>{};
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (auto i : groups[g]) {
      if (i >= out.size()) throw FormatError("unit-norm group index out of range");
      if (out[i].unit_norm_group != -1) throw FormatError("unit-norm groups overlap");
      out[i].unit_norm_group = static_cast<int>(g);
    }
  }
  try {
    return FeatureSchema(std::move(out));
  } catch (const ValidationError& e) {
    throw FormatError(std::string("invalid schema: ") + e.what());
  }
}

Json layout_to_json(const ZoneLayout& layout) {
  Json zones = Json::array();
  for (const auto& z : layout.zones()) zones.push_back(z.mask());
  return {{"tasks", layout.tasks()}, {"zones", std::move(zones)}};
}

ZoneLayout layout_from_json(const Json& j) {
  const auto tasks = require<std::vector<std::string>>(j, "tasks");
  const auto masks = require<std::vector<std::uint32_t>>(j, "zones");
  std::vector<TaskSet> zones(masks.begin(), masks.end());
  try {
    return ZoneLayout(tasks, std::move(zones));
  } catch (const ValidationError& e) {
    throw FormatError(std::string("invalid layout: ") + e.what());
  }
}

Json model_to_json(const MultiTaskModel& model) {
  Json j;
  j["format"] = "intentgrasp-model";
  j["version"] = kModelFormatVersion;
  j["tasks"] = model.layout().tasks();
  Json zones = Json::array();
  for (const auto& z : model.layout().zones()) zones.push_back(z.mask());
  j["zones"] = std::move(zones);
  j["schema"] = schema_to_json(model.schema());
  Json classes = Json::array();
  for (const auto& c : model.classes()) {
    const Matrix& cov = c.gaussian.covariance();
    Json flat = Json::array();
    for (Eigen::Index r = 0; r < cov.rows(); ++r) {
      for (Eigen::Index col = 0; col < cov.cols(); ++col) flat.push_back(cov(r, col));
    }
    classes.push_back({{"zone", c.tasks.mask()},
                       {"prior", c.prior},
                       {"mean", vector_to_json(c.gaussian.mean())},
                       {"covariance", std::move(flat)}});
  }
  j["classes"] = std::move(classes);
  return j;
}

MultiTaskModel model_from_json(const Json& j) {
  if (!j.is_object()) throw FormatError("model document must be a JSON object");
  const int version = require<int>(j, "version");
  if (version != kModelFormatVersion) {
    throw FormatError("unsupported model format version " + std::to_string(version));
  }
  const ZoneLayout layout = layout_from_json(j);
  const FeatureSchema schema = schema_from_json(require_node(j, "schema"));
  const Json& classes = require_node(j, "classes");
  if (!classes.is_array() || classes.size() != layout.zone_count()) {
    throw FormatError("model must list one class per zone");
  }
  const auto d = static_cast<Eigen::Index>(schema.size());
  std::vector<ModelClass> out;
  for (std::size_t k = 0; k < classes.size(); ++k) {
    const Json& c = classes[k];
    const TaskSet zone(require<std::uint32_t>(c, "zone"));
    const Vector mean = vector_from_json(require_node(c, "mean"));
    const Vector flat = vector_from_json(require_node(c, "covariance"));
    if (mean.size() != d || flat.size() != d * d) throw FormatError("class dimensions do not match the schema");
    Matrix cov(d, d);
    for (Eigen::Index r = 0; r < d; ++r) {
      for (Eigen::Index col = 0; col < d; ++col) cov(r, col) = flat[r * d + col];
    }
    try {
      out.push_back({zone, Gaussian(mean, cov), require<double>(c, "prior")});
    } catch (const FormatError&) {
      throw;
    } catch (const Error& e) {
      throw FormatError("class " + std::to_string(k) + ": " + e.what());
    }
  }
  try {
    return MultiTaskModel(layout, schema, std::move(out));
  } catch (const ValidationError& e) {
    throw FormatError(std::string("invalid model: ") + e.what());
  }
}

Json report_to_json(const DivergenceReport& report) {
  Json j;
  j["tasks"] = report.tasks;
  j["nonsymmetric"] = matrix_to_json(report.nonsymmetric);
  j["symmetric"] = matrix_to_json(report.symmetric);
  j["pinsker"] = matrix_to_json(report.pinsker);
  j["eigenvalues"] = report.eigenvalues;
  j["refit_tasks"] = report.refit_tasks;
  return j;
}

DivergenceReport report_from_json(const Json& j) {
  DivergenceReport r;
  r.tasks = require<std::vector<std::string>>(j, "tasks");
  r.nonsymmetric = matrix_from_json(require_node(j, "nonsymmetric"));
  r.symmetric = matrix_from_json(require_node(j, "symmetric"));
  r.pinsker = matrix_from_json(require_node(j, "pinsker"));
  r.eigenvalues = require<std::vector<double>>(j, "eigenvalues");
  if (j.contains("refit_tasks")) r.refit_tasks = require<std::vector<std::string>>(j, "refit_tasks");
  const auto m = static_cast<Eigen::Index>(r.tasks.size());
  for (const Matrix* mat : {&r.nonsymmetric, &r.symmetric, &r.pinsker}) {
    if (mat->rows() != m || mat->cols() != m) throw FormatError("report matrices must be m x m");
  }
  return r;
}

Json plan_result_to_json(const PlanResult& result, const ZoneLayout& layout) {
  Json j;
  j["x"] = vector_to_json(result.x);
  j["posterior"] = vector_to_json(result.posterior);
  j["residual"] = result.residual;
  j["initial_x"] = vector_to_json(result.initial_x);
  j["initial_residual"] = result.initial_residual;
  j["iterations"] = result.iterations;
  j["solver"] = to_string(result.solver);
  j["converged"] = result.converged;
  j["non_converged"] = !result.converged;
  j["feasible"] = result.feasible;
  j["termination"] = result.termination;
  j["trace"] = result.trace;
  const std::vector<double> p(result.posterior.data(), result.posterior.data() + result.posterior.size());
  j["reconstructed_intent"] = reconstruct_intent(p, layout).w;
  return j;
}

PlanResult plan_result_from_json(const Json& j) {
  PlanResult r;
  r.x = vector_from_json(require_node(j, "x"));
  r.posterior = vector_from_json(require_node(j, "posterior"));
  r.residual = require<double>(j, "residual");
  r.initial_x = vector_from_json(require_node(j, "initial_x"));
  r.initial_residual = require<double>(j, "initial_residual");
  r.iterations = require<std::size_t>(j, "iterations");
  r.solver = parse_solver(require<std::string>(j, "solver"));
  r.converged = require<bool>(j, "converged");
  r.feasible = require<bool>(j, "feasible");
  r.termination = require<std::string>(j, "termination");
  r.trace = require<std::vector<double>>(j, "trace");
  return r;
}

}  // namespace intentgrasp
