#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cubewright/types.hpp"

namespace cubewright {

/// Canonical column name: trimmed, uppercased, internal whitespace runs
/// collapsed to a single underscore. FNAME/LNAME are accepted as aliases of
/// FIRSTNAME/LASTNAME.
std::string normalize_name(std::string_view raw);

/// Column type hints keyed by normalized column name.
using TypeHints = std::map<std::string, ColumnType>;

struct Column {
  std::string name;
  ColumnType type = ColumnType::Categorical;

  bool operator==(const Column&) const = default;
};

struct Schema {
  std::vector<Column> columns;

  std::optional<std::size_t> index_of(std::string_view name) const;

  bool operator==(const Schema&) const = default;
};

/// Parses a comma-separated header line. Columns without a hint default to
/// Categorical. Throws CsvError on an empty header or a duplicate name after
/// normalization.
Schema parse_schema(std::string_view header_line, const TypeHints& hints);

}  // namespace cubewright
