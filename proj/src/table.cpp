#include "tabtrawl/table.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

namespace tabtrawl {

namespace {

constexpr char kMagic[4] = {'T', 'T', 'C', '1'};
constexpr uint32_t kVersion = 1;

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<uint8_t>& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void put_i64(std::vector<uint8_t>& out, int64_t v) { put_u64(out, static_cast<uint64_t>(v)); }

void put_i32(std::vector<uint8_t>& out, int32_t v) { put_u32(out, static_cast<uint32_t>(v)); }

void put_bytes(std::vector<uint8_t>& out, std::string_view s) {
  put_u64(out, s.size());
  out.insert(out.end(), s.begin(), s.end());
}

class ByteReader {
 public:
  ByteReader(const uint8_t* data, size_t size) : data_(data), size_(size) {}

  uint32_t u32() {
    uint32_t v = 0;
    need(4);
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(data_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  uint64_t u64() {
    uint64_t v = 0;
    need(8);
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(data_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
  }
  int64_t i64() { return static_cast<int64_t>(u64()); }
  int32_t i32() { return static_cast<int32_t>(u32()); }
  uint8_t u8() {
    need(1);
    return data_[pos_++];
  }
  std::string bytes() {
    uint64_t len = u64();
    need(len);
    std::string s(reinterpret_cast<const char*>(data_ + pos_), len);
    pos_ += len;
    return s;
  }
  bool done() const { return pos_ == size_; }

 private:
  void need(uint64_t n) {
    if (pos_ + n > size_) throw UnsupportedFormat("truncated columnar payload");
  }
  const uint8_t* data_;
  size_t size_;
  size_t pos_ = 0;
};

void append_cell(std::vector<uint8_t>& out, const CellValue& v) {
  out.push_back(static_cast<uint8_t>(cell_type(v)));
  switch (cell_type(v)) {
    case CellType::Null:
      break;
    case CellType::Bool:
      out.push_back(std::get<bool>(v) ? 1 : 0);
      break;
    case CellType::Int:
      put_i64(out, std::get<int64_t>(v));
      break;
    case CellType::Float: {
      double d = std::get<double>(v);
      uint64_t bits;
      std::memcpy(&bits, &d, sizeof bits);
      put_u64(out, bits);
      break;
    }
    case CellType::Text:
      put_bytes(out, std::get<std::string>(v));
      break;
    case CellType::Date: {
      const Date& d = std::get<Date>(v);
      put_i32(out, d.year);
      out.push_back(d.month);
      out.push_back(d.day);
      break;
    }
    case CellType::Timestamp: {
      const Timestamp& ts = std::get<Timestamp>(v);
      put_i32(out, ts.date.year);
      out.push_back(ts.date.month);
      out.push_back(ts.date.day);
      out.push_back(ts.hour);
      out.push_back(ts.minute);
      out.push_back(ts.second);
      put_u32(out, ts.nanos);
      put_i32(out, ts.utc_offset_min);
      break;
    }
  }
}

CellValue read_cell(ByteReader& in) {
  auto tag = static_cast<CellType>(in.u8());
  switch (tag) {
    case CellType::Null:
      return std::monostate{};
    case CellType::Bool:
      return in.u8() != 0;
    case CellType::Int:
      return in.i64();
    case CellType::Float: {
      uint64_t bits = in.u64();
      double d;
      std::memcpy(&d, &bits, sizeof d);
      return d;
    }
    case CellType::Text:
      return in.bytes();
    case CellType::Date: {
      Date d;
      d.year = in.i32();
      d.month = in.u8();
      d.day = in.u8();
      return d;
    }
    case CellType::Timestamp: {
      Timestamp ts;
      ts.date.year = in.i32();
      ts.date.month = in.u8();
      ts.date.day = in.u8();
      ts.hour = in.u8();
      ts.minute = in.u8();
      ts.second = in.u8();
      ts.nanos = in.u32();
      ts.utc_offset_min = in.i32();
      return ts;
    }
  }
  throw UnsupportedFormat("unknown cell type tag");
}

std::string sha256_hex(const std::vector<uint8_t>& payload) {
  std::array<unsigned char, 32> digest{};
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  EVP_DigestUpdate(ctx, payload.data(), payload.size());
  EVP_DigestFinal_ex(ctx, digest.data(), &len);
  EVP_MD_CTX_free(ctx);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out(64, '0');
  for (size_t i = 0; i < 32; ++i) {
    out[2 * i] = hex[digest[i] >> 4];
    out[2 * i + 1] = hex[digest[i] & 0xF];
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UnreadableFile("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw UnreadableFile("read failure on " + path);
  return std::move(buf).str();
}

// Comparable encoding used for distinct counts; cheaper than a full
// comparator over the variant.
std::string distinct_key(const CellValue& v) {
  std::string k(1, static_cast<char>(cell_type(v)));
  k += render_cell(v);
  return k;
}

TableArtifact from_columnar_payload(ByteReader& in) {
  TableArtifact t;
  uint32_t n_cols = in.u32();
  uint64_t n_rows = in.u64();
  t.headers.resize(n_cols);
  t.columns.assign(n_cols, {});
  for (uint32_t c = 0; c < n_cols; ++c) {
    t.headers[c].name = in.bytes();
    t.headers[c].declared_type = static_cast<CellType>(in.u8());
    t.columns[c].reserve(n_rows);
  }
  for (uint64_t r = 0; r < n_rows; ++r)
    for (uint32_t c = 0; c < n_cols; ++c) t.columns[c].push_back(read_cell(in));
  for (uint32_t c = 0; c < n_cols; ++c)
    t.headers[c] = make_column_meta(std::move(t.headers[c].name), t.columns[c]);
  return t;
}

}  // namespace

ColumnMeta make_column_meta(std::string name, const std::vector<CellValue>& cells) {
  ColumnMeta meta;
  meta.is_unnamed = name.rfind("Unnamed:", 0) == 0;
  meta.name = std::move(name);
  size_t nulls = 0;
  std::set<std::string> distinct;
  std::map<CellType, uint64_t> votes;
  for (const CellValue& v : cells) {
    if (cell_type(v) == CellType::Null) {
      ++nulls;
      continue;
    }
    ++votes[cell_type(v)];
    distinct.insert(distinct_key(v));
  }
  meta.missing_fraction = cells.empty() ? 0.0 : static_cast<double>(nulls) / cells.size();
  meta.distinct_count = distinct.size();
  if (votes.empty()) {
    meta.declared_type = CellType::Null;
  } else {
    uint64_t best = 0;
    for (auto& [type, count] : votes) best = std::max(best, count);
    size_t winners = 0;
    CellType winner = CellType::Text;
    for (auto& [type, count] : votes)
      if (count == best) {
        ++winners;
        winner = type;
      }
    meta.declared_type = winners == 1 ? winner : CellType::Text;
  }
  return meta;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  size_t i = 0;
  const size_t n = text.size();
  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
  };
  while (i < n) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < n && text[i + 1] == '"') {
          field += '"';
          i += 2;
        } else {
          in_quotes = false;
          ++i;
        }
      } else {
        field += c;
        ++i;
      }
    } else if (c == '"' && !field_started && field.empty()) {
      in_quotes = true;
      field_started = true;
      ++i;
    } else if (c == ',') {
      end_field();
      ++i;
    } else if (c == '\r' && i + 1 < n && text[i + 1] == '\n') {
      end_record();
      i += 2;
    } else if (c == '\n') {
      end_record();
      ++i;
    } else {
      field += c;
      field_started = true;
      ++i;
    }
  }
  if (in_quotes) throw RaggedRows("unterminated quoted field");
  // Final record when the file does not end with a newline.
  if (field_started || !field.empty() || !record.empty()) end_record();

  if (!records.empty()) {
    size_t width = records[0].size();
    for (size_t r = 1; r < records.size(); ++r)
      if (records[r].size() != width)
        throw RaggedRows("record " + std::to_string(r) + " has " +
                         std::to_string(records[r].size()) + " fields, expected " +
                         std::to_string(width));
  }
  return records;
}

TableArtifact table_from_fields(std::vector<std::string> header,
                                std::vector<std::vector<std::string>> rows) {
  TableArtifact t;
  uint64_t replacements = 0;
  const size_t n_cols = header.size();
  t.headers.resize(n_cols);
  t.columns.assign(n_cols, {});
  for (size_t c = 0; c < n_cols; ++c) {
    replacements += sanitize_utf8(header[c]);
    t.columns[c].reserve(rows.size());
  }
  for (auto& row : rows) {
    if (row.size() != n_cols) throw RaggedRows("row width mismatch");
    for (size_t c = 0; c < n_cols; ++c) {
      replacements += sanitize_utf8(row[c]);
      t.columns[c].push_back(parse_cell(row[c]));
    }
  }
  for (size_t c = 0; c < n_cols; ++c)
    t.headers[c] = make_column_meta(std::move(header[c]), t.columns[c]);
  t.provenance.utf8_replacements = replacements;
  t.content_key = content_hash(t);
  return t;
}

TableArtifact ingest_table(const std::string& path, TableFormat format) {
  std::string raw = read_file(path);
  TableArtifact t;
  switch (format) {
    case TableFormat::Csv: {
      auto records = parse_csv(raw);
      if (records.empty()) throw UnsupportedFormat("empty CSV: " + path);
      std::vector<std::string> header = std::move(records[0]);
      records.erase(records.begin());
      t = table_from_fields(std::move(header), std::move(records));
      break;
    }
    case TableFormat::Columnar: {
      if (raw.size() < 8 || std::memcmp(raw.data(), kMagic, 4) != 0)
        throw UnsupportedFormat("bad columnar magic in " + path);
      ByteReader head(reinterpret_cast<const uint8_t*>(raw.data()) + 4, 4);
      if (head.u32() != kVersion) throw UnsupportedFormat("bad columnar version");
      ByteReader in(reinterpret_cast<const uint8_t*>(raw.data()) + 8, raw.size() - 8);
      t = from_columnar_payload(in);
      if (!in.done()) throw UnsupportedFormat("trailing bytes in " + path);
      t.content_key = content_hash(t);
      break;
    }
  }
  t.provenance.source_path = path;
  t.state = FilterState::Raw;
  return t;
}

std::vector<uint8_t> canonical_bytes(const TableArtifact& t) {
  std::vector<uint8_t> out;
  put_u32(out, static_cast<uint32_t>(t.n_cols()));
  put_u64(out, t.n_rows());
  for (const ColumnMeta& h : t.headers) {
    put_bytes(out, h.name);
    out.push_back(static_cast<uint8_t>(h.declared_type));
  }
  const size_t rows = t.n_rows();
  const size_t cols = t.n_cols();
  for (size_t r = 0; r < rows; ++r)
    for (size_t c = 0; c < cols; ++c) append_cell(out, t.columns[c][r]);
  return out;
}

std::string content_hash(const TableArtifact& t) { return sha256_hex(canonical_bytes(t)); }

void write_columnar(const TableArtifact& t, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UnreadableFile("cannot write " + path);
  out.write(kMagic, 4);
  std::vector<uint8_t> head;
  put_u32(head, kVersion);
  out.write(reinterpret_cast<const char*>(head.data()), static_cast<std::streamsize>(head.size()));
  auto payload = canonical_bytes(t);
  out.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size()));
  if (!out) throw UnreadableFile("write failure on " + path);
}

TableStats compute_stats(const TableArtifact& t) {
  if (t.state == FilterState::Rejected)
    throw std::invalid_argument("compute_stats on rejected table");
  TableStats stats;
  stats.n_rows = t.n_rows();
  stats.n_cols = t.n_cols();
  stats.columns.reserve(t.n_cols());
  uint64_t nulls = 0;
  for (size_t c = 0; c < t.n_cols(); ++c) {
    for (const CellValue& v : t.columns[c])
      if (cell_type(v) == CellType::Null) ++nulls;
    ColumnMeta meta = make_column_meta(t.headers[c].name, t.columns[c]);
    ++stats.dtype_histogram[meta.declared_type];
    stats.columns.push_back(std::move(meta));
  }
  const uint64_t cells = stats.n_rows * stats.n_cols;
  stats.missing_fraction = cells == 0 ? 0.0 : static_cast<double>(nulls) / static_cast<double>(cells);
  return stats;
}

}  // namespace tabtrawl
