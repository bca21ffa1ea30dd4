#include "cubewright/csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "cubewright/errors.hpp"

namespace cubewright {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

Value convert_cell(std::string_view cell, ColumnType type) {
  switch (type) {
    case ColumnType::Date:
      return Date::parse(cell);
    case ColumnType::Integer: {
      std::string t = trim(cell);
      std::int64_t v = 0;
      auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
      if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
        throw Error("unparseable integer '" + std::string(cell) + "'");
      }
      return v;
    }
    case ColumnType::Categorical:
      return canonical_value(cell);
    case ColumnType::Text:
      return trim(cell);
  }
  throw Error("unknown column type");
}

bool next_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

Record parse_row(std::string_view line, const Schema& schema, std::size_t line_no) {
  auto fields = split_fields(line);
  if (fields.size() != schema.columns.size()) {
    throw CsvError(line_no, "expected " + std::to_string(schema.columns.size()) +
                                " fields, got " + std::to_string(fields.size()));
  }
  Record record;
  record.reserve(fields.size());
  for (std::size_t i = 0; i < fields.size(); ++i) {
    try {
      record.push_back(convert_cell(fields[i], schema.columns[i].type));
    } catch (const Error& e) {
      throw CsvError(line_no, "column '" + schema.columns[i].name + "': " + e.what());
    }
  }
  return record;
}

void read_body(std::istream& in, const Schema& schema, Table& table,
               std::vector<SkippedRow>* skipped) {
  CsvRowReader reader(in, schema);
  for (;;) {
    try {
      auto record = reader.next();
      if (!record) break;
      table.rows.push_back(std::move(*record));
    } catch (const CsvError& e) {
      if (!skipped) throw;
      skipped->push_back({reader.line_number(), e.what()});
    }
  }
}

std::string read_header(std::istream& in) {
  std::string line;
  if (!next_line(in, line) || trim(line).empty()) {
    throw CsvError(1, "missing header");
  }
  return line;
}

void check_header_matches(const std::string& header, const Schema& schema) {
  auto fields = split_fields(header);
  if (fields.size() != schema.columns.size()) {
    throw CsvError(1, "header has " + std::to_string(fields.size()) + " columns, schema has " +
                          std::to_string(schema.columns.size()));
  }
  for (std::size_t i = 0; i < fields.size(); ++i) {
    std::string name = normalize_name(fields[i]);
    if (name != schema.columns[i].name) {
      throw CsvError(1, "header does not match schema: expected '" + schema.columns[i].name +
                            "', found '" + name + "'");
    }
  }
}

}  // namespace

std::optional<Record> CsvRowReader::next() {
  std::string line;
  while (next_line(*in_, line)) {
    ++line_no_;
    if (trim(line).empty()) continue;
    return parse_row(line, *schema_, line_no_);
  }
  return std::nullopt;
}

Table parse_csv(std::istream& in, const Schema& schema) {
  check_header_matches(read_header(in), schema);
  Table table{schema, {}};
  read_body(in, schema, table, nullptr);
  return table;
}

CsvReadResult parse_csv_lenient(std::istream& in, const Schema& schema) {
  check_header_matches(read_header(in), schema);
  CsvReadResult result{{schema, {}}, {}};
  read_body(in, schema, result.table, &result.skipped);
  return result;
}

Table load_csv(std::istream& in, const TypeHints& hints) {
  Schema schema = parse_schema(read_header(in), hints);
  Table table{std::move(schema), {}};
  read_body(in, table.schema, table, nullptr);
  return table;
}

Table load_csv_file(const std::filesystem::path& path, const TypeHints& hints) {
  std::ifstream in(path);
  if (!in) {
    throw CsvError("cannot open '" + path.string() + "'");
  }
  return load_csv(in, hints);
}

CsvReadResult load_csv_file_lenient(const std::filesystem::path& path, const TypeHints& hints) {
  std::ifstream in(path);
  if (!in) {
    throw CsvError("cannot open '" + path.string() + "'");
  }
  Schema schema = parse_schema(read_header(in), hints);
  CsvReadResult result{{std::move(schema), {}}, {}};
  read_body(in, result.table.schema, result.table, &result.skipped);
  return result;
}

void write_csv(const Table& table, std::ostream& out) {
  for (std::size_t i = 0; i < table.schema.columns.size(); ++i) {
    if (i > 0) out.put(',');
    out << table.schema.columns[i].name;
  }
  out.put('\n');
  for (const Record& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::string text = to_display(row[i]);
      if (text.find_first_of(",\n\r") != std::string::npos) {
        throw CsvError("value '" + text + "' contains a separator or newline (unsupported)");
      }
      if (i > 0) out.put(',');
      out << text;
    }
    out.put('\n');
  }
  if (!out) {
    throw CsvError("write failure");
  }
}

void write_csv_file(const Table& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw CsvError("cannot write '" + path.string() + "'");
  }
  write_csv(table, out);
}

std::string to_csv_text(const Table& table) {
  std::ostringstream out;
  write_csv(table, out);
  return out.str();
}

}  // namespace cubewright
