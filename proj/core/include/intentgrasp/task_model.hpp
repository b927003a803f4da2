#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "intentgrasp/gaussian.hpp"
#include "intentgrasp/task_set.hpp"

namespace intentgrasp {

struct FeatureDescriptor {
  std::string name;
  std::string unit;
  /// Index into FeatureSchema::unit_norm_groups(), or -1.
  int unit_norm_group = -1;
  /// Observed training range [min, max], used to derive default plan bounds.
  std::optional<std::pair<double, double>> observed_range;

  bool operator==(const FeatureDescriptor&) const = default;
};

class FeatureSchema {
 public:
  FeatureSchema() = default;
  explicit FeatureSchema(std::vector<FeatureDescriptor> features);

  std::size_t size() const noexcept { return features_.size(); }
  const std::vector<FeatureDescriptor>& features() const noexcept { return features_; }
  const FeatureDescriptor& operator[](std::size_t i) const { return features_.at(i); }

  /// Feature indices per unit-norm group, ordered by group id.
  std::vector<std::vector<std::size_t>> unit_norm_groups() const;

  /// Same names, units and groups; observed ranges are ignored.
  bool compatible_with(const FeatureSchema& other) const;

  FeatureSchema with_observed_ranges(std::span<const Vector> samples) const;

  bool operator==(const FeatureSchema&) const = default;

 private:
  std::vector<FeatureDescriptor> features_;
};

/// palm_x/y/z (m), palm_dir_x/y/z (unit-norm group 0), grip_force (N).
FeatureSchema default_grasp_schema();

struct LabeledSample {
  Vector x;
  /// Exact event the demonstrated pose satisfies.
  TaskSet zone;
};

enum class PriorMode { InclusiveCount, Uniform };

struct ModelConfig {
  MleOptions mle;
  PriorMode priors = PriorMode::InclusiveCount;
};

struct ModelClass {
  TaskSet tasks;
  Gaussian gaussian;
  double prior;
};

/// Per-zone Gaussian classes with priors. Immutable after construction.
class MultiTaskModel {
 public:
  MultiTaskModel(ZoneLayout layout, FeatureSchema schema, std::vector<ModelClass> classes);

  const ZoneLayout& layout() const noexcept { return layout_; }
  const FeatureSchema& schema() const noexcept { return schema_; }
  const std::vector<ModelClass>& classes() const noexcept { return classes_; }
  std::size_t class_count() const noexcept { return classes_.size(); }
  std::size_t dim() const noexcept { return schema_.size(); }

  /// log P(x|k) + log P(k) for every class.
  Vector log_scores(const Vector& x) const;

 private:
  ZoneLayout layout_;
  FeatureSchema schema_;
  std::vector<ModelClass> classes_;
};

/// Inclusive training sets aligned with layout.zones(): a sample labeled S
/// joins every class C with S ⊇ C. Throws UnassignableLabels listing every
/// sample that joins no class.
std::vector<std::vector<Vector>> expand_inclusive_labels(std::span<const LabeledSample> samples,
                                                         const ZoneLayout& layout);

MultiTaskModel fit_model(std::span<const LabeledSample> samples, const ZoneLayout& layout,
                         const FeatureSchema& schema, const ModelConfig& config = {});

/// Robot probability vector P(k|x), normalized in log space.
Vector posterior_vector(const MultiTaskModel& model, const Vector& x);

/// Index of the winning entry of `scores`; near-ties (1e-12 relative) go to
/// the zone with more tasks, then to the lower index.
std::size_t argmax_with_tie_rule(const Vector& scores, const ZoneLayout& layout);

/// Index of the most probable class at x.
std::size_t classify_index(const MultiTaskModel& model, const Vector& x);
TaskSet classify(const MultiTaskModel& model, const Vector& x);

}  // namespace intentgrasp
