#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "cubewright/table.hpp"

namespace cubewright {

enum class MissingPolicy { Error, MapToUnknown };

/// Pre-processing spec: column projection plus per-column value
/// canonicalization through a synonym map.
struct CleaningSpec {
  std::vector<std::string> keep_columns;  // normalized names, output order
  // column -> raw value -> canonical value; all values in canonical form
  std::map<std::string, std::map<std::string, std::string>> synonyms;
  MissingPolicy on_missing = MissingPolicy::Error;

  /// Loads the JSON form:
  ///   {"keep": [...],
  ///    "synonyms": {"TYPE_OF_CAKE": {"VANILA": "VANILLA"}},
  ///    "on_missing": "error" | "unknown"}
  static CleaningSpec from_json_text(const std::string& text);

  /// Throws ConfigError when keep_columns is empty or a synonym map chains
  /// (a canonical value that is itself remapped elsewhere).
  void validate() const;
};

/// Schema of clean()'s output for a given input schema.
Schema cleaned_schema(const Schema& input, const CleaningSpec& spec);

/// Projects to keep_columns (in spec order), applies synonym maps to
/// categorical values, and handles empty cells per on_missing. Row count and
/// order are preserved. Throws CleanError on unknown columns or, under the
/// Error policy, on an empty cell.
Table clean(const Table& table, const CleaningSpec& spec);

struct Violation {
  std::size_t row = 0;  // 0-based row index
  std::string column;
  std::string value;

  bool operator==(const Violation&) const = default;
};

/// Reports every cell whose display value falls outside the declared domain
/// of its column. Violations are data, not errors; an unknown domain column
/// is an error.
std::vector<Violation> validate_domains(
    const Table& table, const std::map<std::string, std::set<std::string>>& domains);

}  // namespace cubewright
