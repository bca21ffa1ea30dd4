#include "cubewright/types.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <vector>

#include "cubewright/errors.hpp"

namespace cubewright {

std::string_view to_string(ColumnType type) {
  switch (type) {
    case ColumnType::Date: return "date";
    case ColumnType::Categorical: return "categorical";
    case ColumnType::Integer: return "integer";
    case ColumnType::Text: return "text";
  }
  return "categorical";
}

std::optional<ColumnType> column_type_from_string(std::string_view text) {
  std::string t = to_upper(trim(text));
  if (t == "DATE") return ColumnType::Date;
  if (t == "CATEGORICAL") return ColumnType::Categorical;
  if (t == "INTEGER") return ColumnType::Integer;
  if (t == "TEXT") return ColumnType::Text;
  return std::nullopt;
}

std::string trim(std::string_view text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  return std::string(text.substr(begin, end - begin));
}

std::string to_upper(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return out;
}

std::string canonical_value(std::string_view raw) { return to_upper(trim(raw)); }

namespace {

bool is_leap(int year) { return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0; }

int days_in_month(int year, int month) {
  static constexpr std::array<int, 12> kDays = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (month < 1 || month > 12) return 0;
  if (month == 2 && is_leap(year)) return 29;
  return kDays[static_cast<std::size_t>(month - 1)];
}

bool parse_int_field(std::string_view digits, int& out) {
  if (digits.empty() || digits.size() > 4) return false;
  for (char c : digits) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), out);
  return ec == std::errc() && ptr == digits.data() + digits.size();
}

std::vector<std::string_view> split_on(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(text.substr(start));
      break;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
  return parts;
}

}  // namespace

bool Date::valid(int year, int month, int day) {
  return year >= 1 && year <= 9999 && month >= 1 && month <= 12 && day >= 1 &&
         day <= days_in_month(year, month);
}

Date Date::parse(std::string_view text) {
  // Tolerate whitespace anywhere in the cell ("29/ 3/2011").
  std::string compact;
  compact.reserve(text.size());
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) compact.push_back(c);
  }

  int y = 0, m = 0, d = 0;
  bool shape_ok = false;
  if (compact.find('-') != std::string::npos) {
    auto parts = split_on(compact, '-');
    shape_ok = parts.size() == 3 && parts[0].size() == 4 && parse_int_field(parts[0], y) &&
               parse_int_field(parts[1], m) && parse_int_field(parts[2], d);
  } else if (compact.find('/') != std::string::npos) {
    auto parts = split_on(compact, '/');
    shape_ok = parts.size() == 3 && parse_int_field(parts[0], d) && parse_int_field(parts[1], m) &&
               parts[2].size() == 4 && parse_int_field(parts[2], y);
  }
  if (!shape_ok) {
    throw Error("unparseable date '" + std::string(text) + "'");
  }
  if (!valid(y, m, d)) {
    throw Error("invalid calendar date '" + std::string(text) + "'");
  }
  return Date{y, m, d};
}

std::string Date::iso() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
  return buf;
}

std::string Date::iso_month() const {
  char buf[12];
  std::snprintf(buf, sizeof(buf), "%04d-%02d", year, month);
  return buf;
}

std::string Date::iso_year() const {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "%04d", year);
  return buf;
}

std::string to_display(const Value& value) {
  struct Visitor {
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(const Date& d) const { return d.iso(); }
  };
  return std::visit(Visitor{}, value);
}

}  // namespace cubewright
