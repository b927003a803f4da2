#include "intentgrasp/task_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "intentgrasp/errors.hpp"

namespace intentgrasp {

FeatureSchema::FeatureSchema(std::vector<FeatureDescriptor> features)
    : features_(std::move(features)) {
  if (features_.empty()) throw ValidationError("feature schema is empty");
  int max_group = -1;
  for (const auto& f : features_) {
    if (f.name.empty()) throw ValidationError("feature names must be nonempty");
    if (f.unit_norm_group < -1) throw ValidationError("invalid unit-norm group id");
    max_group = std::max(max_group, f.unit_norm_group);
    if (f.observed_range && !(f.observed_range->first <= f.observed_range->second)) {
      throw ValidationError("observed range of " + f.name + " is inverted");
    }
  }
  for (int g = 0; g <= max_group; ++g) {
    const auto members = std::count_if(features_.begin(), features_.end(),
                                       [g](const auto& f) { return f.unit_norm_group == g; });
    if (members < 2) {
      throw ValidationError("unit-norm group " + std::to_string(g) + " needs at least 2 features");
    }
  }
}

std::vector<std::vector<std::size_t>> FeatureSchema::unit_norm_groups() const {
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < features_.size(); ++i) {
    const int g = features_[i].unit_norm_group;
    if (g < 0) continue;
    if (groups.size() <= static_cast<std::size_t>(g)) groups.resize(static_cast<std::size_t>(g) + 1);
    groups[static_cast<std::size_t>(g)].push_back(i);
  }
  return groups;
}

bool FeatureSchema::compatible_with(const FeatureSchema& other) const {
  if (size() != other.size()) return false;
  for (std::size_t i = 0; i < size(); ++i) {
    const auto& a = features_[i];
    const auto& b = other.features_[i];
    if (a.name != b.name || a.unit != b.unit || a.unit_norm_group != b.unit_norm_group) return false;
  }
  return true;
}

FeatureSchema FeatureSchema::with_observed_ranges(std::span<const Vector> samples) const {
  if (samples.empty()) return *this;
  auto features = features_;
  for (std::size_t i = 0; i < features.size(); ++i) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& s : samples) {
      lo = std::min(lo, s[static_cast<Eigen::Index>(i)]);
      hi = std::max(hi, s[static_cast<Eigen::Index>(i)]);
    }
    features[i].observed_range = std::make_pair(lo, hi);
  }
  return FeatureSchema(std::move(features));
}

FeatureSchema default_grasp_schema() {
  return FeatureSchema({
      {"palm_x", "m", -1, std::nullopt},
      {"palm_y", "m", -1, std::nullopt},
      {"palm_z", "m", -1, std::nullopt},
      {"palm_dir_x", "1", 0, std::nullopt},
      {"palm_dir_y", "1", 0, std::nullopt},
      {"palm_dir_z", "1", 0, std::nullopt},
      {"grip_force", "N", -1, std::nullopt},
  });
}

MultiTaskModel::MultiTaskModel(ZoneLayout layout, FeatureSchema schema,
                               std::vector<ModelClass> classes)
    : layout_(std::move(layout)), schema_(std::move(schema)), classes_(std::move(classes)) {
  if (classes_.size() != layout_.zone_count()) {
    throw DimensionMismatch("model classes", layout_.zone_count(), classes_.size());
  }
  double total = 0.0;
  for (std::size_t k = 0; k < classes_.size(); ++k) {
    const auto& c = classes_[k];
    if (c.tasks != layout_.zone(k)) {
      throw ValidationError("class " + std::to_string(k) + " does not match layout zone order");
    }
    if (c.gaussian.dim() != schema_.size()) {
      throw DimensionMismatch("class " + layout_.name_of(c.tasks) + " Gaussian", schema_.size(),
                              c.gaussian.dim());
    }
    if (!(c.prior > 0.0) || !std::isfinite(c.prior)) {
      throw ValidationError("class " + layout_.name_of(c.tasks) + " prior must be positive");
    }
    total += c.prior;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw ValidationError("class priors sum to " + std::to_string(total) + ", not 1");
  }
}

Vector MultiTaskModel::log_scores(const Vector& x) const {
  if (static_cast<std::size_t>(x.size()) != dim()) {
    throw DimensionMismatch("feature vector", dim(), static_cast<std::size_t>(x.size()));
  }
  Vector s(static_cast<Eigen::Index>(classes_.size()));
  for (std::size_t k = 0; k < classes_.size(); ++k) {
    s[static_cast<Eigen::Index>(k)] = classes_[k].gaussian.log_pdf(x) + std::log(classes_[k].prior);
  }
  return s;
}

std::vector<std::vector<Vector>> expand_inclusive_labels(std::span<const LabeledSample> samples,
                                                         const ZoneLayout& layout) {
  std::vector<std::vector<Vector>> sets(layout.zone_count());
  std::vector<std::size_t> unassignable;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const TaskSet label = samples[i].zone;
    if (label.empty()) throw ValidationError("sample " + std::to_string(i) + " has an empty zone label");
    bool assigned = false;
    for (std::size_t k = 0; k < layout.zone_count(); ++k) {
      if (label.is_superset_of(layout.zone(k))) {
        sets[k].push_back(samples[i].x);
        assigned = true;
      }
    }
    if (!assigned) unassignable.push_back(i);
  }
  if (!unassignable.empty()) throw UnassignableLabels(std::move(unassignable));
  return sets;
}

MultiTaskModel fit_model(std::span<const LabeledSample> samples, const ZoneLayout& layout,
                         const FeatureSchema& schema, const ModelConfig& config) {
  for (const auto& s : samples) {
    if (static_cast<std::size_t>(s.x.size()) != schema.size()) {
      throw DimensionMismatch("training sample", schema.size(), static_cast<std::size_t>(s.x.size()));
    }
    if (s.zone.mask() >= (1u << layout.task_count())) {
      throw ValidationError("sample zone label uses tasks outside the layout");
    }
  }
  const auto sets = expand_inclusive_labels(samples, layout);

  std::size_t total = 0;
  for (const auto& s : sets) total += s.size();

  std::vector<ModelClass> classes;
  classes.reserve(sets.size());
  for (std::size_t k = 0; k < sets.size(); ++k) {
    const std::string name = layout.name_of(layout.zone(k));
    if (sets[k].empty()) throw InsufficientSamples(name, 0, schema.size() + 1);
    Gaussian g = fit_mle(sets[k], config.mle, name);
    const double prior = config.priors == PriorMode::Uniform
                             ? 1.0 / static_cast<double>(sets.size())
                             : static_cast<double>(sets[k].size()) / static_cast<double>(total);
    classes.push_back({layout.zone(k), std::move(g), prior});
  }

  // Renormalize so the priors sum to one to the last ulp.
  double sum = 0.0;
  for (const auto& c : classes) sum += c.prior;
  for (auto& c : classes) c.prior /= sum;

  std::vector<Vector> all;
  all.reserve(samples.size());
  for (const auto& s : samples) all.push_back(s.x);
  return MultiTaskModel(layout, schema.with_observed_ranges(all), std::move(classes));
}

Vector posterior_vector(const MultiTaskModel& model, const Vector& x) {
  const Vector s = model.log_scores(x);
  const double top = s.maxCoeff();
  if (!std::isfinite(top) || s.hasNaN()) {
    throw LikelihoodUnderflow("every class likelihood underflows at the query pose");
  }
  Vector p = (s.array() - top).exp();
  p /= p.sum();
  return p;
}

std::size_t argmax_with_tie_rule(const Vector& scores, const ZoneLayout& layout) {
  if (static_cast<std::size_t>(scores.size()) != layout.zone_count()) {
    throw DimensionMismatch("score vector", layout.zone_count(), static_cast<std::size_t>(scores.size()));
  }
  const double top = scores.maxCoeff();
  const double tol = 1e-12 * std::max(1.0, std::abs(top));
  std::size_t best = layout.zone_count();
  for (std::size_t k = 0; k < layout.zone_count(); ++k) {
    if (scores[static_cast<Eigen::Index>(k)] < top - tol) continue;
    if (best == layout.zone_count() || layout.zone(k).size() > layout.zone(best).size()) best = k;
  }
  return best;
}

std::size_t classify_index(const MultiTaskModel& model, const Vector& x) {
  return argmax_with_tie_rule(posterior_vector(model, x), model.layout());
}

TaskSet classify(const MultiTaskModel& model, const Vector& x) {
  return model.layout().zone(classify_index(model, x));
}

}  // namespace intentgrasp
