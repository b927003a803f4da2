#include "intentgrasp/errors.hpp"

#include <sstream>
#include <utility>

namespace intentgrasp {

DimensionMismatch::DimensionMismatch(const std::string& what, std::size_t expected,
                                     std::size_t actual)
    : ValidationError(what + ": expected dimension " + std::to_string(expected) + ", got " +
                      std::to_string(actual)),
      expected_(expected),
      actual_(actual) {}

InsufficientSamples::InsufficientSamples(std::string class_name, std::size_t have,
                                         std::size_t need)
    : ValidationError("class " + class_name + " has " + std::to_string(have) +
                      " training samples, needs at least " + std::to_string(need)),
      class_name_(std::move(class_name)) {}

namespace {

std::string describe_unassignable(const std::vector<std::size_t>& indices) {
  std::ostringstream os;
  os << indices.size() << " sample(s) have a zone label that is a superset of no class in the layout"
     << " (first index " << (indices.empty() ? 0 : indices.front()) << ")";
  return os.str();
}

}  // namespace

UnassignableLabels::UnassignableLabels(std::vector<std::size_t> sample_indices)
    : ValidationError(describe_unassignable(sample_indices)), indices_(std::move(sample_indices)) {}

ClarificationNeeded::ClarificationNeeded(double inaction_probability, double threshold)
    : Error("inaction probability " + std::to_string(inaction_probability) +
            " reached clarification threshold " + std::to_string(threshold)),
      inaction_(inaction_probability),
      threshold_(threshold) {}

MissingTaskPopulation::MissingTaskPopulation(const std::string& task)
    : ValidationError("layout has no singleton class {" + task +
                      "} and no training samples were supplied to fit its population") {}

}  // namespace intentgrasp
