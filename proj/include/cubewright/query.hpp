#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cubewright/cube.hpp"
#include "cubewright/errors.hpp"

namespace cubewright::query {

// Pipeline query language, one stage per operation, stages joined by '|':
//
//   query := stage ("|" stage)*
//   stage := "slice" NAME "=" VALUE
//          | "dice" NAME "in" "{" VALUE ("," VALUE)* "}"
//          | "rollup" NAME
//          | "rollup" "date" "to" ("month" | "year")
//          | "drilldown" NAME
//          | "drilldown" "date" "to" ("day" | "month" | "year")
//          | "crosstab" NAME "x" NAME
//          | "top" ("row" | "col")
//
// Keywords and names are case-insensitive; names are normalized like schema
// columns. VALUE may be double-quoted to contain spaces (\" and \\ escape).
// A crosstab may only be followed by a single top stage.

struct Slice {
  std::string dim;
  std::string value;
  bool operator==(const Slice&) const = default;
};

struct Dice {
  std::string dim;
  std::vector<std::string> values;
  bool operator==(const Dice&) const = default;
};

struct Rollup {
  std::string dim;
  bool operator==(const Rollup&) const = default;
};

struct RollupDate {
  DateLevel level = DateLevel::Month;
  bool operator==(const RollupDate&) const = default;
};

struct Drilldown {
  std::variant<std::string, DateLevel> target;
  bool operator==(const Drilldown&) const = default;
};

struct CrossTabStage {
  std::string row_dim;
  std::string col_dim;
  bool operator==(const CrossTabStage&) const = default;
};

struct Top {
  CrossTab::Axis axis = CrossTab::Axis::Row;
  bool operator==(const Top&) const = default;
};

using Stage = std::variant<Slice, Dice, Rollup, RollupDate, Drilldown, CrossTabStage, Top>;

struct QueryAst {
  std::vector<Stage> stages;
  bool operator==(const QueryAst&) const = default;
};

struct ParseError {
  std::size_t position = 0;  // character offset into the input
  std::string expected;
  std::string found;

  std::string to_string() const;
  /// Message plus the offending line with a caret under the position.
  std::string render(std::string_view source) const;
};

using ParseOutcome = std::variant<QueryAst, ParseError>;

/// Total over arbitrary byte strings: always an AST or a positioned
/// ParseError, never an exception.
ParseOutcome parse_query(std::string_view text);

/// Canonical text form; parse_query(print_query(ast)) == ast.
std::string print_query(const QueryAst& ast);

/// Cube-module error re-thrown with the failing stage attached.
class QueryExecError : public Error {
public:
  QueryExecError(std::size_t stage_index, std::string_view stage_word, const std::string& what);
  /// 1-based index of the failing stage.
  std::size_t stage_index() const { return stage_index_; }

private:
  std::size_t stage_index_;
};

using QueryResult = std::variant<Cube, CrossTab, CrossTab::Margin>;

/// Applies stages left to right; the result type is decided by the final
/// stage. Throws QueryExecError.
QueryResult execute(const QueryAst& ast, const Cube& cube);

}  // namespace cubewright::query
