#pragma once

#include <cstddef>
#include <vector>

#include "cubewright/schema.hpp"

namespace cubewright {

using Record = std::vector<Value>;

/// In-memory relational table. Immutable by convention once built; safe to
/// share across threads.
struct Table {
  Schema schema;
  std::vector<Record> rows;

  std::size_t num_rows() const { return rows.size(); }
  std::size_t num_columns() const { return schema.columns.size(); }

  bool operator==(const Table&) const = default;
};

}  // namespace cubewright
