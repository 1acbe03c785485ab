#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace tabtrawl {

// Calendar date, already validated (month 1-12, day valid for month/year).
struct Date {
  int32_t year = 0;
  uint8_t month = 1;
  uint8_t day = 1;
  auto operator<=>(const Date&) const = default;
};

struct Timestamp {
  Date date;
  uint8_t hour = 0;
  uint8_t minute = 0;
  uint8_t second = 0;
  uint32_t nanos = 0;
  // Offset from UTC in minutes; kNoOffset when the source had no zone.
  static constexpr int32_t kNoOffset = INT32_MIN;
  int32_t utc_offset_min = kNoOffset;
  auto operator<=>(const Timestamp&) const = default;
};

// One table cell. Missing data has the single representation Null
// (monostate); empty strings, whitespace-only strings and NaN floats are
// normalized to Null at parse time.
using CellValue =
    std::variant<std::monostate, bool, int64_t, double, std::string, Date, Timestamp>;

enum class CellType : uint8_t {
  Null = 0,
  Bool = 1,
  Int = 2,
  Float = 3,
  Text = 4,
  Date = 5,
  Timestamp = 6,
};

inline CellType cell_type(const CellValue& v) {
  return static_cast<CellType>(v.index());
}

std::string_view cell_type_name(CellType t);

// Parses raw text into the most specific cell type. Order of attempts:
// missing tokens, bool, integer, float (NaN collapses to Null), date,
// timestamp, text. Integers require the strict form [+-]?(0|[1-9][0-9]*);
// zero-padded strings like "007" stay text.
CellValue parse_cell(std::string_view raw);

// Canonical text rendering. Null -> "nan", Bool -> "true"/"false",
// Float -> shortest round-trip decimal, Date/Timestamp -> ISO-8601.
// Text returns the stored bytes unchanged.
std::string render_cell(const CellValue& v);

std::string format_double(double v);

// Replaces invalid UTF-8 sequences with U+FFFD. Returns the number of
// replacements made.
size_t sanitize_utf8(std::string& text);

bool is_missing_token(std::string_view raw);

std::optional<Date> parse_date(std::string_view raw);
std::optional<Timestamp> parse_timestamp(std::string_view raw);

}  // namespace tabtrawl
