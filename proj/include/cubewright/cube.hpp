#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cubewright/table.hpp"

namespace cubewright {

/// Granularity of a date dimension, finest first.
enum class DateLevel { Day, Month, Year };

std::string_view to_string(DateLevel level);
std::optional<DateLevel> date_level_from_string(std::string_view text);

/// One categorical axis: a name plus an ordered member list (dictionary
/// encoding). Observed dimensions list members in first-seen row order;
/// declared dimensions preserve the supplied order and may carry members
/// that never occur in the data.
class Dimension {
public:
  Dimension() = default;
  Dimension(std::string name, ColumnType type, DateLevel level, bool declared,
            std::vector<std::string> members);

  const std::string& name() const { return name_; }
  ColumnType type() const { return type_; }
  DateLevel level() const { return level_; }
  bool declared() const { return declared_; }
  const std::vector<std::string>& members() const { return members_; }
  std::uint32_t size() const { return static_cast<std::uint32_t>(members_.size()); }

  std::optional<std::uint32_t> index_of(std::string_view member) const;

  bool operator==(const Dimension& other) const;

private:
  friend class Cube;

  std::uint32_t add_member(std::string member);

  std::string name_;
  ColumnType type_ = ColumnType::Categorical;
  DateLevel level_ = DateLevel::Day;
  bool declared_ = false;
  std::vector<std::string> members_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

/// Optional declared member lists, keyed by normalized column name.
using DeclaredMembers = std::map<std::string, std::vector<std::string>>;

/// Two-dimensional projection of a cube with marginal totals.
struct CrossTab {
  enum class Axis { Row, Col };

  struct Margin {
    std::string member;
    std::uint64_t count = 0;
    bool tied = false;

    bool operator==(const Margin&) const = default;
  };

  Dimension row_dim;
  Dimension col_dim;
  std::vector<std::vector<std::uint64_t>> counts;  // [row][col], dense
  std::vector<std::uint64_t> row_totals;
  std::vector<std::uint64_t> col_totals;
  std::uint64_t grand_total = 0;

  /// Member with the maximal marginal total on the given axis. Ties go to
  /// the first member in dimension order, with `tied` set.
  Margin argmax(Axis axis) const;
};

/// Sparse multidimensional count cube. Stored cells are the distinct member
/// combinations with their multiplicities (every stored count >= 1); the
/// dense view reads absent combinations as zero. All operations return new
/// cubes; a cube is immutable after construction and safe to share across
/// threads.
///
/// Cubes built from a table keep a reference to it plus a log of the value
/// restrictions applied by slice/dice, which is what makes drill-down
/// (a recomputation from base data) possible.
class Cube {
public:
  using Coordinate = std::vector<std::uint32_t>;
  using CellMap = std::map<Coordinate, std::uint64_t>;  // lexicographic order

  Cube() = default;

  const std::vector<Dimension>& dims() const { return dims_; }
  const CellMap& cells() const { return cells_; }
  std::uint64_t total() const;
  bool has_base() const { return base_ != nullptr; }

  const Dimension* find_dim(std::string_view name) const;

  /// Count at a full coordinate of member values; zero when the combination
  /// is not stored. Throws CubeError when a value is not a member.
  std::uint64_t cell(const std::vector<std::string>& coordinate) const;

  /// Fixes one dimension to a single member, dropping that dimension.
  Cube slice(std::string_view dim, std::string_view value) const;

  /// Restricts dimensions to member subsets; dimensionality is unchanged and
  /// member order is preserved.
  Cube dice(const std::map<std::string, std::vector<std::string>>& keep) const;

  /// Aggregates a dimension away by summing. The grand total is preserved.
  Cube rollup(std::string_view drop_dim) const;

  /// Regroups the first date dimension to a coarser level (day -> month ->
  /// year); resulting members are chronological. Rolling up to the current
  /// level is the identity.
  Cube rollup_date(DateLevel to_level) const;

  /// Restores a previously removed dimension by recomputing from the base
  /// table, re-applying every recorded slice/dice restriction.
  Cube drilldown(std::string_view dim) const;

  /// Restores the date dimension to a finer level, recomputing from base.
  Cube drilldown_date(DateLevel to_level) const;

  /// Dense 2-D projection over two distinct dimensions; any further
  /// dimensions are rolled up first.
  CrossTab crosstab(std::string_view row_dim, std::string_view col_dim) const;

  /// JSON document: dimension list with members, then an array of
  /// (coordinate indices, count) pairs. Imported cubes carry no base table,
  /// so drill-down is unavailable on them.
  std::string to_json_text(int indent = -1) const;
  static Cube from_json_text(const std::string& text);

  /// Semantic equality: dimensions and cells. The base reference and the
  /// restriction log are not compared.
  bool operator==(const Cube& other) const;

private:
  friend Cube build_cube(Table table, const std::vector<std::string>& dim_columns,
                         const DeclaredMembers& declared);

  struct Restriction {
    std::string column;
    ColumnType type = ColumnType::Categorical;
    DateLevel level = DateLevel::Day;
    std::vector<std::string> allowed;  // ordered
  };

  std::size_t dim_index(std::string_view name) const;  // throws CubeError
  Cube rebuild(const std::vector<std::pair<std::string, DateLevel>>& dim_specs) const;

  std::vector<Dimension> dims_;
  CellMap cells_;
  std::shared_ptr<const Table> base_;
  std::vector<std::string> base_columns_;  // build-order dim columns
  DeclaredMembers declared_;
  std::vector<Restriction> restrictions_;
};

/// Builds the count cube of a table over the given Categorical/Date columns.
/// Entries in `declared` replace the observed member list of that dimension;
/// an observed value outside a declared list is an error.
Cube build_cube(Table table, const std::vector<std::string>& dim_columns,
                const DeclaredMembers& declared = {});

}  // namespace cubewright
