#include "intentgrasp/intent.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "intentgrasp/errors.hpp"

namespace intentgrasp {

std::size_t HumanProbabilityVector::task_count() const noexcept {
  return u.empty() ? 0 : static_cast<std::size_t>(std::countr_zero(u.size()));
}

void validate(const ClassificationInput& input) {
  if (input.w.empty() || input.w.size() > kMaxTasks) {
    throw ValidationError("classification input needs between 1 and " + std::to_string(kMaxTasks) +
                          " task probabilities");
  }
  for (std::size_t i = 0; i < input.w.size(); ++i) {
    const double w = input.w[i];
    if (!(w >= 0.0 && w <= 1.0)) {
      throw ValidationError("task probability w[" + std::to_string(i) + "] = " + std::to_string(w) +
                            " is outside [0,1]");
    }
  }
}

HumanProbabilityVector joint_events(const ClassificationInput& input) {
  validate(input);
  const std::size_t m = input.w.size();
  HumanProbabilityVector out;
  out.u.resize(std::size_t{1} << m);
  for (std::uint32_t mask = 0; mask < out.u.size(); ++mask) {
    double p = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      p *= ((mask >> i) & 1u) ? input.w[i] : 1.0 - input.w[i];
    }
    out.u[mask] = p;
  }
  return out;
}

TargetProbabilityVector target_vector(const HumanProbabilityVector& u, const ZoneLayout& layout,
                                      std::optional<double> clarification_threshold) {
  if (u.u.size() != (std::size_t{1} << layout.task_count())) {
    throw DimensionMismatch("human probability vector", std::size_t{1} << layout.task_count(),
                            u.u.size());
  }
  double total = 0.0;
  for (double p : u.u) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw ValidationError("human probability vector has invalid entries");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ValidationError("human probability vector does not sum to 1");

  TargetProbabilityVector out;
  out.inaction_probability = u.inaction();
  if (clarification_threshold && out.inaction_probability >= *clarification_threshold) {
    throw ClarificationNeeded(out.inaction_probability, *clarification_threshold);
  }

  double denom = 0.0;
  out.v.reserve(layout.zone_count());
  for (const auto& zone : layout.zones()) {
    out.v.push_back(u[zone]);
    denom += u[zone];
  }
  if (!(denom > 0.0)) {
    throw DegenerateIntent("no zone of the layout carries intent probability mass");
  }
  for (double& v : out.v) v /= denom;
  return out;
}

ClassificationInput reconstruct_intent(const std::vector<double>& p, const ZoneLayout& layout) {
  if (p.size() != layout.zone_count()) {
    throw DimensionMismatch("probability vector", layout.zone_count(), p.size());
  }
  ClassificationInput out;
  out.w.assign(layout.task_count(), 0.0);
  for (std::size_t k = 0; k < p.size(); ++k) {
    for (std::size_t t = 0; t < layout.task_count(); ++t) {
      if (layout.zone(k).contains(t)) out.w[t] += p[k];
    }
  }
  return out;
}

}  // namespace intentgrasp
