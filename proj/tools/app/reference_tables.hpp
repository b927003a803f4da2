#pragma once

#include <string>
#include <vector>

#include "intentgrasp/json_io.hpp"

namespace intentgrasp::app {

/// One published number recomputed from the intent arithmetic.
struct TableCheck {
  std::string group;
  std::string label;
  double expected = 0.0;
  double computed = 0.0;
  double tolerance = 0.0;
  /// Informational rows are reported but never fail the run.
  bool asserted = true;

  bool pass() const;
};

struct TableReport {
  std::vector<TableCheck> checks;

  bool passed() const;
  std::size_t failures() const;
};

TableReport reproduce_reference_tables();

Json to_json(const TableReport& report);
std::string to_text(const TableReport& report);

}  // namespace intentgrasp::app
