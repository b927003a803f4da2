#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace intentgrasp::app {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 2,
  kExitIo = 3,
};

struct Console {
  std::ostream& out;
  std::ostream& err;
  bool json = false;
};

struct GenerateOptions {
  /// Built-in spec name or a JSON generator-spec file.
  std::string spec;
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples_per_zone;
};

struct FitOptions {
  std::filesystem::path data;
  /// Defaults to the dataset's own layout.
  std::optional<std::string> layout;
  std::optional<std::filesystem::path> out;
  bool uniform_priors = false;
  bool diagonal = false;
  std::optional<double> ridge;
};

struct IntentOptions {
  std::string model;
  std::vector<double> w;
  std::optional<double> clarify_threshold;
  std::optional<std::uint64_t> seed;
};

struct PlanOptions {
  std::string model;
  std::vector<double> w;
  std::string solver = "pgd";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> max_iterations;
  std::optional<std::vector<double>> lower;
  std::optional<std::vector<double>> upper;
  std::optional<double> clarify_threshold;
  std::optional<double> time_limit_seconds;
  std::optional<std::filesystem::path> out;
};

struct AmbiguityOptions {
  std::string model;
  /// Training data for layouts that lack singleton task classes.
  std::optional<std::filesystem::path> data;
  std::optional<std::uint64_t> seed;
};

int cmd_generate(const GenerateOptions& options, Console& console);
int cmd_fit(const FitOptions& options, Console& console);
int cmd_intent(const IntentOptions& options, Console& console);
int cmd_plan(const PlanOptions& options, Console& console);
int cmd_ambiguity(const AmbiguityOptions& options, Console& console);
int cmd_reproduce_tables(Console& console);

/// Runs `body`, mapping library exceptions to exit codes and a message on
/// console.err: I/O and file-format errors give 3, everything else 2.
int run_command(const std::function<int()>& body, Console& console);

}  // namespace intentgrasp::app
