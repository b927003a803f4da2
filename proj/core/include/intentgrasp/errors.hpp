#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace intentgrasp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller supplied inputs that violate a precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public ValidationError {
 public:
  DimensionMismatch(const std::string& what, std::size_t expected, std::size_t actual);

  std::size_t expected() const noexcept { return expected_; }
  std::size_t actual() const noexcept { return actual_; }

 private:
  std::size_t expected_;
  std::size_t actual_;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Covariance could not be Cholesky-factorized.
class NotPositiveDefinite : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Every class log-likelihood is -inf (or NaN) at the query point.
class LikelihoodUnderflow : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class InsufficientSamples : public ValidationError {
 public:
  InsufficientSamples(std::string class_name, std::size_t have, std::size_t need);

  const std::string& class_name() const noexcept { return class_name_; }

 private:
  std::string class_name_;
};

/// Training samples whose zone label is a superset of no class in the layout.
class UnassignableLabels : public ValidationError {
 public:
  explicit UnassignableLabels(std::vector<std::size_t> sample_indices);

  const std::vector<std::size_t>& sample_indices() const noexcept { return indices_; }

 private:
  std::vector<std::size_t> indices_;
};

/// All zones of the layout carry zero joint-event mass.
class DegenerateIntent : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Inaction mass reached the configured clarification threshold.
class ClarificationNeeded : public Error {
 public:
  ClarificationNeeded(double inaction_probability, double threshold);

  double inaction_probability() const noexcept { return inaction_; }
  double threshold() const noexcept { return threshold_; }

 private:
  double inaction_;
  double threshold_;
};

class MissingTaskPopulation : public ValidationError {
 public:
  explicit MissingTaskPopulation(const std::string& task);
};

/// Malformed, truncated, wrong-version or wrong-schema persisted artifact.
class FormatError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace intentgrasp
