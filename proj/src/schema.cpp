#include "cubewright/schema.hpp"

#include <cctype>
#include <set>

#include "cubewright/errors.hpp"

namespace cubewright {

std::string normalize_name(std::string_view raw) {
  std::string trimmed = trim(raw);
  std::string out;
  out.reserve(trimmed.size());
  bool in_space = false;
  for (char c : trimmed) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      in_space = true;
      continue;
    }
    if (in_space) {
      out.push_back('_');
      in_space = false;
    }
    out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  // Header aliases: the order-form fields are spelled both ways in the wild.
  if (out == "FNAME") return "FIRSTNAME";
  if (out == "LNAME") return "LASTNAME";
  return out;
}

std::optional<std::size_t> Schema::index_of(std::string_view name) const {
  std::string normalized = normalize_name(name);
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == normalized) return i;
  }
  return std::nullopt;
}

Schema parse_schema(std::string_view header_line, const TypeHints& hints) {
  if (trim(header_line).empty()) {
    throw CsvError("empty header");
  }

  TypeHints normalized_hints;
  for (const auto& [name, type] : hints) {
    normalized_hints[normalize_name(name)] = type;
  }

  Schema schema;
  std::set<std::string> seen;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = header_line.find(',', start);
    std::string_view cell = pos == std::string_view::npos
                                ? header_line.substr(start)
                                : header_line.substr(start, pos - start);
    std::string name = normalize_name(cell);
    if (name.empty()) {
      throw CsvError("empty column name in header");
    }
    if (!seen.insert(name).second) {
      throw CsvError("duplicate column name '" + name + "' after normalization");
    }
    auto hint = normalized_hints.find(name);
    schema.columns.push_back(
        {name, hint == normalized_hints.end() ? ColumnType::Categorical : hint->second});
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return schema;
}

}  // namespace cubewright
