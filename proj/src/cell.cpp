#include "tabtrawl/cell.hpp"

#include <array>
#include <cassert>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace tabtrawl {

namespace {

bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f';
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

int to_int(std::string_view s) {
  int v = 0;
  for (char c : s) v = v * 10 + (c - '0');
  return v;
}

bool valid_ymd(int year, int month, int day) {
  if (month < 1 || month > 12 || day < 1) return false;
  static constexpr std::array<int, 12> lengths = {31, 28, 31, 30, 31, 30,
                                                  31, 31, 30, 31, 30, 31};
  int max_day = lengths[static_cast<size_t>(month - 1)];
  bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
  if (month == 2 && leap) max_day = 29;
  return day <= max_day;
}

std::optional<int64_t> parse_strict_int(std::string_view s) {
  std::string_view digits = s;
  if (!digits.empty() && (digits.front() == '+' || digits.front() == '-'))
    digits.remove_prefix(1);
  if (!all_digits(digits)) return std::nullopt;
  if (digits.size() > 1 && digits.front() == '0') return std::nullopt;
  int64_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data() + (s.front() == '+' ? 1 : 0),
                                   s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::optional<double> parse_full_double(std::string_view s) {
  if (s.empty() || is_ascii_space(s.front())) return std::nullopt;
  std::string buf(s);
  char* end = nullptr;
  errno = 0;
  double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size()) return std::nullopt;
  return v;
}

void append_padded(std::string& out, int value, int width) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%0*d", width, value);
  out += buf;
}

}  // namespace

std::string_view cell_type_name(CellType t) {
  switch (t) {
    case CellType::Null: return "null";
    case CellType::Bool: return "bool";
    case CellType::Int: return "int";
    case CellType::Float: return "float";
    case CellType::Text: return "text";
    case CellType::Date: return "date";
    case CellType::Timestamp: return "timestamp";
  }
  return "?";
}

bool is_missing_token(std::string_view raw) {
  if (raw == "None") return true;
  for (char c : raw)
    if (!is_ascii_space(c)) return false;
  return true;  // empty or whitespace-only
}

std::optional<Date> parse_date(std::string_view raw) {
  // Accepted forms: YYYY-MM-DD, YYYY/MM/DD, MM/DD/YYYY.
  auto make = [](std::string_view y, std::string_view m, std::string_view d)
      -> std::optional<Date> {
    if (y.size() != 4 || m.size() < 1 || m.size() > 2 || d.size() < 1 || d.size() > 2)
      return std::nullopt;
    if (!all_digits(y) || !all_digits(m) || !all_digits(d)) return std::nullopt;
    int year = to_int(y), month = to_int(m), day = to_int(d);
    if (!valid_ymd(year, month, day)) return std::nullopt;
    return Date{year, static_cast<uint8_t>(month), static_cast<uint8_t>(day)};
  };
  size_t a = raw.find_first_of("-/");
  if (a == std::string_view::npos) return std::nullopt;
  char sep = raw[a];
  size_t b = raw.find(sep, a + 1);
  if (b == std::string_view::npos) return std::nullopt;
  std::string_view p0 = raw.substr(0, a);
  std::string_view p1 = raw.substr(a + 1, b - a - 1);
  std::string_view p2 = raw.substr(b + 1);
  if (sep == '-') return make(p0, p1, p2);
  if (p0.size() == 4) return make(p0, p1, p2);       // YYYY/MM/DD
  return make(p2, p0, p1);                           // MM/DD/YYYY
}

std::optional<Timestamp> parse_timestamp(std::string_view raw) {
  // ISO form: date, 'T' or ' ', HH:MM[:SS[.frac]], optional Z or +-HH:MM.
  size_t sep = raw.find_first_of("T ");
  if (sep == std::string_view::npos) return std::nullopt;
  auto date = parse_date(raw.substr(0, sep));
  if (!date) return std::nullopt;
  std::string_view rest = raw.substr(sep + 1);

  Timestamp ts;
  ts.date = *date;

  // Trailing zone designator.
  if (!rest.empty() && (rest.back() == 'Z' || rest.back() == 'z')) {
    ts.utc_offset_min = 0;
    rest.remove_suffix(1);
  } else {
    size_t zone = rest.find_first_of("+-");
    if (zone != std::string_view::npos) {
      std::string_view z = rest.substr(zone);
      if (z.size() != 6 || z[3] != ':' || !all_digits(z.substr(1, 2)) ||
          !all_digits(z.substr(4, 2)))
        return std::nullopt;
      int mins = to_int(z.substr(1, 2)) * 60 + to_int(z.substr(4, 2));
      if (to_int(z.substr(1, 2)) > 23 || to_int(z.substr(4, 2)) > 59) return std::nullopt;
      ts.utc_offset_min = (z[0] == '-') ? -mins : mins;
      rest = rest.substr(0, zone);
    }
  }

  if (rest.size() < 5 || rest[2] != ':') return std::nullopt;
  if (!all_digits(rest.substr(0, 2)) || !all_digits(rest.substr(3, 2))) return std::nullopt;
  int hour = to_int(rest.substr(0, 2));
  int minute = to_int(rest.substr(3, 2));
  int second = 0;
  uint32_t nanos = 0;
  std::string_view tail = rest.substr(5);
  if (!tail.empty()) {
    if (tail.size() < 3 || tail[0] != ':' || !all_digits(tail.substr(1, 2)))
      return std::nullopt;
    second = to_int(tail.substr(1, 2));
    tail = tail.substr(3);
    if (!tail.empty()) {
      if (tail[0] != '.' || tail.size() < 2 || tail.size() > 10 ||
          !all_digits(tail.substr(1)))
        return std::nullopt;
      std::string_view frac = tail.substr(1);
      uint64_t scale = 1'000'000'000ULL;
      uint64_t v = 0;
      for (char c : frac) {
        v = v * 10 + static_cast<uint64_t>(c - '0');
        scale /= 10;
      }
      nanos = static_cast<uint32_t>(v * scale);
    }
  }
  if (hour > 23 || minute > 59 || second > 60) return std::nullopt;
  ts.hour = static_cast<uint8_t>(hour);
  ts.minute = static_cast<uint8_t>(minute);
  ts.second = static_cast<uint8_t>(second);
  ts.nanos = nanos;
  return ts;
}

CellValue parse_cell(std::string_view raw) {
  if (is_missing_token(raw)) return std::monostate{};
  if (raw == "true" || raw == "True" || raw == "TRUE") return true;
  if (raw == "false" || raw == "False" || raw == "FALSE") return false;
  if (auto i = parse_strict_int(raw)) return *i;
  if (auto d = parse_full_double(raw)) {
    if (std::isnan(*d)) return std::monostate{};
    return *d;
  }
  if (auto date = parse_date(raw)) return *date;
  if (auto ts = parse_timestamp(raw)) return *ts;
  return std::string(raw);
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  assert(ec == std::errc());
  return std::string(buf, ptr);
}

std::string render_cell(const CellValue& v) {
  switch (cell_type(v)) {
    case CellType::Null:
      return "nan";
    case CellType::Bool:
      return std::get<bool>(v) ? "true" : "false";
    case CellType::Int:
      return std::to_string(std::get<int64_t>(v));
    case CellType::Float:
      return format_double(std::get<double>(v));
    case CellType::Text:
      return std::get<std::string>(v);
    case CellType::Date: {
      const Date& d = std::get<Date>(v);
      std::string out;
      append_padded(out, d.year, 4);
      out += '-';
      append_padded(out, d.month, 2);
      out += '-';
      append_padded(out, d.day, 2);
      return out;
    }
    case CellType::Timestamp: {
      const Timestamp& ts = std::get<Timestamp>(v);
      std::string out = render_cell(CellValue(ts.date));
      out += 'T';
      append_padded(out, ts.hour, 2);
      out += ':';
      append_padded(out, ts.minute, 2);
      out += ':';
      append_padded(out, ts.second, 2);
      if (ts.nanos != 0) {
        char frac[16];
        std::snprintf(frac, sizeof frac, ".%09u", ts.nanos);
        std::string_view f(frac);
        while (f.back() == '0') f.remove_suffix(1);
        out += f;
      }
      if (ts.utc_offset_min != Timestamp::kNoOffset) {
        if (ts.utc_offset_min == 0) {
          out += 'Z';
        } else {
          int mins = ts.utc_offset_min;
          out += mins < 0 ? '-' : '+';
          mins = std::abs(mins);
          append_padded(out, mins / 60, 2);
          out += ':';
          append_padded(out, mins % 60, 2);
        }
      }
      return out;
    }
  }
  return {};
}

size_t sanitize_utf8(std::string& text) {
  static constexpr std::string_view kReplacement = "\xEF\xBF\xBD";
  std::string out;
  size_t replaced = 0;
  size_t i = 0;
  const size_t n = text.size();
  auto cont = [&](size_t j) {
    return j < n && (static_cast<unsigned char>(text[j]) & 0xC0) == 0x80;
  };
  while (i < n) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    size_t len = 0;
    uint32_t cp = 0;
    if (c < 0x80) {
      len = 1;
      cp = c;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    }
    bool ok = len > 0;
    for (size_t j = 1; ok && j < len; ++j) {
      if (!cont(i + j))
        ok = false;
      else
        cp = (cp << 6) | (static_cast<unsigned char>(text[i + j]) & 0x3F);
    }
    if (ok) {
      // Reject overlong encodings, surrogates and out-of-range code points.
      static constexpr uint32_t kMin[5] = {0, 0, 0x80, 0x800, 0x10000};
      if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) ok = false;
    }
    if (ok) {
      out.append(text, i, len);
      i += len;
    } else {
      out += kReplacement;
      ++replaced;
      ++i;
    }
  }
  if (replaced != 0) text = std::move(out);
  return replaced;
}

}  // namespace tabtrawl
