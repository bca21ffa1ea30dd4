#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cubewright/table.hpp"

namespace cubewright {

struct SkippedRow {
  std::size_t line = 0;  // 1-based, counting the header as line 1
  std::string reason;
};

struct CsvReadResult {
  Table table;
  std::vector<SkippedRow> skipped;
};

// The CSV dialect is deliberately small: comma separator, no quoting, first
// line is the header, empty lines ignored. Cells are trimmed; Categorical
// values are uppercased; Date cells accept D/M/YYYY (whitespace tolerated)
// or ISO YYYY-MM-DD.

/// Incremental record reader over a stream positioned past the header line.
/// Blank lines are skipped. Throws CsvError with a 1-based line number.
class CsvRowReader {
public:
  CsvRowReader(std::istream& in, const Schema& schema, std::size_t header_lines = 1)
      : in_(&in), schema_(&schema), line_no_(header_lines) {}

  /// Next data record, or nullopt at end of stream.
  std::optional<Record> next();

  std::size_t line_number() const { return line_no_; }

private:
  std::istream* in_;
  const Schema* schema_;
  std::size_t line_no_;
};

/// Parses a stream whose header must match `schema` after normalization.
/// Throws CsvError with a 1-based line number on the first malformed row.
Table parse_csv(std::istream& in, const Schema& schema);

/// Like parse_csv but skips malformed rows, reporting each one.
CsvReadResult parse_csv_lenient(std::istream& in, const Schema& schema);

/// Header and body in one pass; the schema is derived from the header line
/// using `hints` (see parse_schema).
Table load_csv(std::istream& in, const TypeHints& hints);
Table load_csv_file(const std::filesystem::path& path, const TypeHints& hints);
CsvReadResult load_csv_file_lenient(const std::filesystem::path& path, const TypeHints& hints);

/// Canonical serialization: ISO dates, '\n' line endings, header first.
/// parse_csv(write_csv(t)) == t for every table produced by the parser.
/// Values containing the separator or a newline are rejected.
void write_csv(const Table& table, std::ostream& out);
void write_csv_file(const Table& table, const std::filesystem::path& path);
std::string to_csv_text(const Table& table);

}  // namespace cubewright
