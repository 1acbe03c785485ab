#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "tabtrawl/cell.hpp"

namespace tabtrawl {

struct ColumnMeta {
  std::string name;
  CellType declared_type = CellType::Null;
  double missing_fraction = 0.0;
  uint64_t distinct_count = 0;  // distinct non-null values
  bool is_unnamed = false;      // name starts with "Unnamed:"
};

enum class FilterState { Raw, Accepted, Rejected };

struct Provenance {
  std::string source_path;
  uint32_t shard_id = 0;
  uint64_t utf8_replacements = 0;
};

// Immutable once ingested; filter stages build new artifacts instead of
// mutating. content_key identifies the ingested content and is carried
// through filtering unchanged.
struct TableArtifact {
  std::string content_key;  // 64 lowercase hex chars (SHA-256)
  std::vector<ColumnMeta> headers;
  std::vector<std::vector<CellValue>> columns;  // column-major, equal lengths
  Provenance provenance;
  FilterState state = FilterState::Raw;
  std::string rejection_rule;

  size_t n_cols() const { return headers.size(); }
  size_t n_rows() const { return columns.empty() ? 0 : columns[0].size(); }
  const CellValue& cell(size_t row, size_t col) const { return columns[col][row]; }
};

struct TableStats {
  uint64_t n_rows = 0;
  uint64_t n_cols = 0;
  double missing_fraction = 0.0;
  std::map<CellType, uint64_t> dtype_histogram;  // keyed by declared type
  std::vector<ColumnMeta> columns;               // refreshed metadata
};

enum class TableFormat { Csv, Columnar };

struct UnreadableFile : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnsupportedFormat : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RaggedRows : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Reads a table from disk, normalizes missing values, infers per-column
// types (majority vote over non-null cells, ties to text) and computes the
// content key. The result is in state Raw.
TableArtifact ingest_table(const std::string& path, TableFormat format);

// Builds a table directly from parsed string fields (header row + data
// rows). Used by the CSV path and by tests.
TableArtifact table_from_fields(std::vector<std::string> header,
                                std::vector<std::vector<std::string>> rows);

// SHA-256 of the canonical byte serialization (headers then cells in
// row-major order, every cell tagged with its type). Row order matters:
// permuted rows hash differently.
std::string content_hash(const TableArtifact& t);

// Canonical columnar container. write_columnar emits exactly the hashed
// payload behind a small magic/version header, so ingest(write(t)) == t.
void write_columnar(const TableArtifact& t, const std::string& path);

std::vector<uint8_t> canonical_bytes(const TableArtifact& t);

// Refreshes per-column metadata and summarizes shape, missingness and the
// declared-dtype histogram. Rejects tables in state Rejected.
TableStats compute_stats(const TableArtifact& t);

// Recomputes missing_fraction / distinct_count / declared_type for one column.
ColumnMeta make_column_meta(std::string name, const std::vector<CellValue>& cells);

// RFC 4180 parser (quoted fields, "" escapes, CR LF or LF). Throws
// RaggedRows when records have unequal widths.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

}  // namespace tabtrawl
