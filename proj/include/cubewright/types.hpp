#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace cubewright {

enum class ColumnType { Date, Categorical, Integer, Text };

std::string_view to_string(ColumnType type);
std::optional<ColumnType> column_type_from_string(std::string_view text);

/// Calendar date at day precision. Canonical text form is ISO YYYY-MM-DD;
/// the parser additionally accepts day-first D/M/YYYY with stray whitespace
/// inside the cell ("29/ 3/2011").
struct Date {
  int year = 0;
  int month = 0;
  int day = 0;

  static bool valid(int year, int month, int day);
  static Date parse(std::string_view text);  // throws Error

  std::string iso() const;        // YYYY-MM-DD
  std::string iso_month() const;  // YYYY-MM
  std::string iso_year() const;   // YYYY

  auto operator<=>(const Date&) const = default;
};

/// One typed cell. Strings carry Categorical and Text columns.
using Value = std::variant<std::string, std::int64_t, Date>;

/// Canonical display form: ISO for dates, decimal for integers, the string
/// itself otherwise.
std::string to_display(const Value& value);

std::string trim(std::string_view text);
std::string to_upper(std::string_view text);

/// Canonical form of a categorical value: trimmed and uppercased.
std::string canonical_value(std::string_view raw);

}  // namespace cubewright
