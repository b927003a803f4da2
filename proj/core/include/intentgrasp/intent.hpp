#pragma once

#include <optional>
#include <vector>

#include "intentgrasp/task_set.hpp"

namespace intentgrasp {

/// Per-task probabilities w from an upstream intent classifier, each in [0,1].
struct ClassificationInput {
  std::vector<double> w;
};

/// Joint probability of every task-combination event, indexed by bitmask.
/// Entry 0 is the inaction event.
struct HumanProbabilityVector {
  std::vector<double> u;

  std::size_t task_count() const noexcept;
  double operator[](TaskSet s) const { return u.at(s.mask()); }
  double inaction() const { return u.at(0); }
};

/// Joint-event mass restricted to a layout's zones and renormalized.
struct TargetProbabilityVector {
  std::vector<double> v;
  double inaction_probability = 0.0;
};

void validate(const ClassificationInput& input);

/// u(S) = Π_{i∈S} w_i · Π_{j∉S} (1 − w_j), assuming independent task classifiers.
HumanProbabilityVector joint_events(const ClassificationInput& input);

/// v_k = u(zone_k) / Σ_j u(zone_j) over the layout's zones. The inaction
/// event and any event absent from the layout are dropped before
/// normalizing. Throws ClarificationNeeded when u(∅) ≥ threshold, and
/// DegenerateIntent when every zone has zero mass.
TargetProbabilityVector target_vector(const HumanProbabilityVector& u, const ZoneLayout& layout,
                                      std::optional<double> clarification_threshold = std::nullopt);

/// Per-task marginal w'_t = Σ_{k : t ∈ zone_k} p_k.
ClassificationInput reconstruct_intent(const std::vector<double>& p, const ZoneLayout& layout);

}  // namespace intentgrasp
