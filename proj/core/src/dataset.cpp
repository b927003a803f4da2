#include "intentgrasp/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "intentgrasp/errors.hpp"
#include "intentgrasp/json_io.hpp"

namespace intentgrasp {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

void normalize_groups(Vector& x, const std::vector<std::vector<std::size_t>>& groups) {
  for (const auto& g : groups) {
    double sq = 0.0;
    for (auto i : g) sq += x[static_cast<Eigen::Index>(i)] * x[static_cast<Eigen::Index>(i)];
    const double n = std::sqrt(sq);
    if (!(n > 0.0)) throw NumericalError("drew a zero vector for a unit-norm group");
    for (auto i : g) x[static_cast<Eigen::Index>(i)] /= n;
  }
}

Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("malformed " + what + ": " + e.what());
  }
}

}  // namespace

void validate(const GeneratorSpec& spec) {
  const auto d = spec.schema.size();
  if (d == 0) throw ValidationError("generator spec has an empty schema");
  for (const auto& zone : spec.layout.zones()) {
    std::size_t matches = 0;
    for (const auto& g : spec.zones) matches += g.zone == zone ? 1 : 0;
    if (matches != 1) {
      throw ValidationError("generator spec needs exactly one generator for zone " +
                            spec.layout.name_of(zone));
    }
  }
  const auto groups = spec.schema.unit_norm_groups();
  for (const auto& g : spec.zones) {
    if (!spec.layout.has(g.zone)) {
      throw ValidationError("generator for zone " + spec.layout.name_of(g.zone) + " is not in the layout");
    }
    if (static_cast<std::size_t>(g.mean.size()) != d) {
      throw DimensionMismatch("generator mean", d, static_cast<std::size_t>(g.mean.size()));
    }
    for (const auto& group : groups) {
      double sq = 0.0;
      for (auto i : group) sq += g.mean[static_cast<Eigen::Index>(i)] * g.mean[static_cast<Eigen::Index>(i)];
      if (std::abs(std::sqrt(sq) - 1.0) > 1e-9) {
        throw ValidationError("generator mean for zone " + spec.layout.name_of(g.zone) +
                              " is not unit norm on a unit-norm group");
      }
    }
    Gaussian check(g.mean, g.covariance);
    (void)check;
  }
}

Dataset generate(const GeneratorSpec& spec) {
  validate(spec);
  Dataset out{spec.object, spec.layout, spec.schema, spec.seed, {}};
  const auto groups = spec.schema.unit_norm_groups();
  out.samples.reserve(spec.samples_per_zone * spec.layout.zone_count());
  for (const auto& zone : spec.layout.zones()) {
    const auto& gen = *std::find_if(spec.zones.begin(), spec.zones.end(),
                                    [&](const ZoneGenerator& g) { return g.zone == zone; });
    const Gaussian g(gen.mean, gen.covariance);
    auto draws = sample(g, spec.samples_per_zone, splitmix64(spec.seed ^ (std::uint64_t{zone.mask()} << 32)));
    for (auto& x : draws) {
      normalize_groups(x, groups);
      out.samples.push_back({std::move(x), zone});
    }
  }
  return out;
}

GeneratorSpec without_zones(GeneratorSpec spec, const std::vector<TaskSet>& removed) {
  auto zones = spec.layout.zones();
  std::erase_if(zones, [&](TaskSet z) { return std::find(removed.begin(), removed.end(), z) != removed.end(); });
  std::erase_if(spec.zones, [&](const ZoneGenerator& g) {
    return std::find(removed.begin(), removed.end(), g.zone) != removed.end();
  });
  spec.layout = ZoneLayout(spec.layout.tasks(), std::move(zones));
  return spec;
}

GeneratorSpec builtin_spec(const std::string& name) {
  auto specs = builtin_specs();
  const auto it = specs.find(name);
  if (it == specs.end()) throw ValidationError("unknown generator spec '" + name + "'");
  return it->second;
}

std::string dataset_to_text(const Dataset& dataset) {
  Json header;
  header["format"] = "intentgrasp-dataset";
  header["version"] = kDatasetFormatVersion;
  header["object"] = dataset.object;
  header["seed"] = dataset.seed;
  header["tasks"] = dataset.layout.tasks();
  Json zones = Json::array();
  for (const auto& z : dataset.layout.zones()) zones.push_back(z.mask());
  header["zones"] = std::move(zones);
  header["schema"] = schema_to_json(dataset.schema);
  header["count"] = dataset.samples.size();

  std::string out = dump_json(header, -1);
  out += '\n';
  for (const auto& s : dataset.samples) {
    Json rec;
    rec["x"] = vector_to_json(s.x);
    rec["zone"] = s.zone.mask();
    out += dump_json(rec, -1);
    out += '\n';
  }
  return out;
}

Dataset dataset_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.empty()) throw FormatError("dataset file is empty");
  const Json header = parse_json(line, "dataset header");
  if (!header.is_object() || header.value("format", "") != "intentgrasp-dataset") {
    throw FormatError("not an intentgrasp dataset");
  }
  if (!header.contains("version") || !header["version"].is_number_integer() ||
      header["version"].get<int>() != kDatasetFormatVersion) {
    throw FormatError("unsupported dataset format version");
  }
  if (!header.contains("schema")) throw FormatError("dataset header lacks a schema");
  Dataset out{header.value("object", ""), layout_from_json(header),
              schema_from_json(header.at("schema")), header.value("seed", std::uint64_t{0}), {}};
  const auto d = static_cast<Eigen::Index>(out.schema.size());
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const Json rec = parse_json(line, "dataset record on line " + std::to_string(line_no));
    if (!rec.is_object() || !rec.contains("x") || !rec.contains("zone") || !rec["zone"].is_number_unsigned()) {
      throw FormatError("dataset record on line " + std::to_string(line_no) + " lacks x or zone");
    }
    Vector x = vector_from_json(rec["x"]);
    if (x.size() != d) throw FormatError("dataset record on line " + std::to_string(line_no) + " has wrong dimension");
    const TaskSet zone(rec["zone"].get<std::uint32_t>());
    if (zone.empty() || zone.mask() >= (1u << out.layout.task_count())) {
      throw FormatError("dataset record on line " + std::to_string(line_no) + " has an invalid zone");
    }
    out.samples.push_back({std::move(x), zone});
  }
  if (header.contains("count") && header["count"].get<std::size_t>() != out.samples.size()) {
    throw FormatError("dataset is truncated: header promises " + std::to_string(header["count"].get<std::size_t>()) +
                      " records, found " + std::to_string(out.samples.size()));
  }
  return out;
}

std::string model_to_text(const MultiTaskModel& model) { return dump_json(model_to_json(model)) + "\n"; }

MultiTaskModel model_from_text(const std::string& text) {
  return model_from_json(parse_json(text, "model file"));
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading " + path.string());
  return ss.str();
}

void write_text_file_atomic(const std::filesystem::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw IoError("error writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move " + tmp.string() + " to " + path.string());
  }
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  write_text_file_atomic(path, dataset_to_text(dataset));
}

Dataset load_dataset(const std::filesystem::path& path, const std::optional<FeatureSchema>& expected_schema) {
  Dataset d = dataset_from_text(read_text_file(path));
  if (expected_schema && !d.schema.compatible_with(*expected_schema)) {
    throw FormatError("dataset " + path.string() + " uses a different feature schema");
  }
  return d;
}

void save_model(const MultiTaskModel& model, const std::filesystem::path& path) {
  write_text_file_atomic(path, model_to_text(model));
}

MultiTaskModel load_model(const std::filesystem::path& path, const std::optional<FeatureSchema>& expected_schema) {
  MultiTaskModel m = model_from_text(read_text_file(path));
  if (expected_schema && !m.schema().compatible_with(*expected_schema)) {
    throw FormatError("model " + path.string() + " uses a different feature schema");
  }
  return m;
}

}  // namespace intentgrasp
