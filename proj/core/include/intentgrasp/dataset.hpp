#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "intentgrasp/task_model.hpp"

namespace intentgrasp {

struct ZoneGenerator {
  TaskSet zone;
  Vector mean;
  Matrix covariance;
};

/// Recipe for a synthetic labeled grasp dataset.
struct GeneratorSpec {
  std::string object;
  ZoneLayout layout;
  FeatureSchema schema;
  /// One entry per layout zone, in any order.
  std::vector<ZoneGenerator> zones;
  std::size_t samples_per_zone = 200;
  std::uint64_t seed = 7;
};

struct Dataset {
  std::string object;
  ZoneLayout layout;
  FeatureSchema schema;
  std::uint64_t seed = 0;
  std::vector<LabeledSample> samples;
};

void validate(const GeneratorSpec& spec);

/// Draws samples_per_zone poses per layout zone (layout order), renormalizing
/// unit-norm groups after each draw. Deterministic in (spec, seed).
Dataset generate(const GeneratorSpec& spec);

/// cup7, cup5, cup4 and flashlight7.
std::map<std::string, GeneratorSpec> builtin_specs();
GeneratorSpec builtin_spec(const std::string& name);

/// Returns the spec with the given zones removed from its layout and generators.
GeneratorSpec without_zones(GeneratorSpec spec, const std::vector<TaskSet>& removed);

inline constexpr int kDatasetFormatVersion = 1;
inline constexpr int kModelFormatVersion = 1;

/// JSON lines: a header object, then one {"x": [...], "zone": mask} per sample.
std::string dataset_to_text(const Dataset& dataset);
Dataset dataset_from_text(const std::string& text);

std::string model_to_text(const MultiTaskModel& model);
MultiTaskModel model_from_text(const std::string& text);

/// Atomic (temp file + rename) writers and loaders. Loaders throw FormatError
/// on malformed content, unknown versions, or a schema that does not match
/// `expected_schema` when one is given; IoError when the file is unreadable.
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path,
                     const std::optional<FeatureSchema>& expected_schema = std::nullopt);
void save_model(const MultiTaskModel& model, const std::filesystem::path& path);
MultiTaskModel load_model(const std::filesystem::path& path,
                          const std::optional<FeatureSchema>& expected_schema = std::nullopt);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace intentgrasp
