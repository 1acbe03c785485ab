#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "tabtrawl/table.hpp"

namespace tabtrawl {

// Thresholds for the three filter levels. Key names in the JSON config file
// match the field names below; docs/filter-rules.md maps each threshold to
// the rule it controls.
struct FilterConfig {
  int64_t min_rows = 64;
  int64_t max_rows = 1000;
  int64_t min_cols = 2;
  int64_t max_cols = 512;
  int64_t max_header_chars = 256;
  double table_pii_cell_fraction = 0.01;
  double table_missing_fraction = 0.10;
  double unnamed_col_fraction = 0.5;
  double col_missing_fraction = 0.5;
  double row_missing_fraction = 0.5;
  double english_threshold = 0.5;
  double code_threshold = 0.5;

  void validate() const;  // throws std::invalid_argument
};

struct RuleCounter {
  uint64_t evaluated = 0;
  uint64_t removed = 0;
};

// Per-rule bookkeeping. For a single table, `rejection_rule` names the first
// failing table-level rule; corpus-level aggregation merges counters.
struct FilterReport {
  std::map<std::string, RuleCounter> rules;
  bool accepted = false;
  std::string rejection_rule;

  void count(const std::string& rule, uint64_t removed = 0);
  void merge(const FilterReport& other);
};

// Rule identifiers, in evaluation order.
namespace rules {
inline constexpr std::string_view kTableEnglish = "table.english";
inline constexpr std::string_view kTableSchema = "table.schema_heterogeneity";
inline constexpr std::string_view kTableRowCount = "table.row_count";
inline constexpr std::string_view kTableParseError = "table.parse_error";
inline constexpr std::string_view kTablePii = "table.pii";
inline constexpr std::string_view kTableCode = "table.code";
inline constexpr std::string_view kTableUnnamed = "table.unnamed_columns";
inline constexpr std::string_view kTableMissing = "table.missing";
inline constexpr std::string_view kTableColumnCount = "table.column_count";
inline constexpr std::string_view kTableRowCountFinal = "table.row_count_final";
inline constexpr std::string_view kColLongHeader = "col.long_header";
inline constexpr std::string_view kColNumericName = "col.numeric_name";
inline constexpr std::string_view kColMissing = "col.missing";
inline constexpr std::string_view kColNonEnglish = "col.non_english";
inline constexpr std::string_view kColConstant = "col.constant";
inline constexpr std::string_view kRowMissing = "row.missing";
inline constexpr std::string_view kRowDuplicate = "row.duplicate";
inline constexpr std::string_view kRowPii = "row.pii";
inline constexpr std::string_view kRowCode = "row.code";
inline constexpr std::string_view kRowHierarchy = "row.hierarchy_marker";
}  // namespace rules

// --- text scorers ---------------------------------------------------------
// All scorers are deterministic. They can be swapped for learned models via
// FilterHooks without touching the rule pipeline.

// Likelihood that `text` is English, in [0,1]. Combines the fraction of
// tokens found in a bundled stopword list with the hit rate of common
// English character trigrams. Empty input scores 0.
double english_score(std::string_view text);

// True when the text contains an email address or a phone number. Phone
// numbers need 7-15 digits plus at least one separator or a leading "+";
// bare integers, decimals and ISO dates do not match.
bool detect_pii(std::string_view text);

// Heuristic code likelihood in [0,1]: programming keywords, symbol density
// and camelCase-call density.
double code_score(std::string_view text);

// Row-level code detection: a fixed set of structural patterns
// (import/def/function statements, "#include", "();", "){", "};", "=>").
// Narrower than code_score so that rows with mild code fragments inside an
// otherwise clean table can still be caught.
bool detect_code(std::string_view text);

// Word lists backing english_score; exposed so tests can build independent
// oracles over the same bundles.
std::span<const std::string_view> english_stopwords();
std::span<const std::string_view> english_trigrams();

struct FilterHooks {
  std::function<double(std::string_view)> english = english_score;
  std::function<double(std::string_view)> code = code_score;
  std::function<bool(std::string_view)> row_code = detect_code;
  std::function<bool(std::string_view)> pii = detect_pii;
};

// --- filter stages --------------------------------------------------------

struct TableFilterResult {
  bool accepted = false;
  std::string rule;  // first failing rule when rejected
  FilterReport report;
};

struct ColumnFilterResult {
  TableArtifact table;           // columns removed, metadata refreshed
  FilterReport report;
  bool rejected = false;         // column-count bound violated afterwards
  std::string rule;
  std::map<std::string, std::string> removed;  // column name -> rule id
};

struct RowFilterResult {
  TableArtifact table;
  FilterReport report;
  bool rejected = false;  // row count fell below min_rows afterwards
  std::string rule;
  std::map<uint64_t, std::string> removed;  // original row index -> rule id
};

// Table-level rules in fixed order: english, schema heterogeneity, row
// count bounds, parse-error heuristic, PII cell fraction, code cells,
// unnamed-column fraction, overall missing fraction.
TableFilterResult apply_table_filters(const TableArtifact& t, const FilterConfig& cfg,
                                      const FilterHooks& hooks = {});

// Column rules in fixed order: long header, numeric name, missing fraction,
// non-English text, constant value; then the column-count bounds re-check.
ColumnFilterResult apply_column_filters(const TableArtifact& t, const FilterConfig& cfg,
                                        const FilterHooks& hooks = {});

// Row rules in fixed order: missing fraction, exact duplicates (first kept),
// PII cells, code cells, hierarchy marker; then the min-row re-check.
RowFilterResult apply_row_filters(const TableArtifact& t, const FilterConfig& cfg,
                                  const FilterHooks& hooks = {});

struct FilteredTable {
  TableArtifact table;  // state Accepted or Rejected
  FilterReport report;
};

// Runs all three stages in order and settles the table's filter state.
FilteredTable filter_table(const TableArtifact& t, const FilterConfig& cfg,
                           const FilterHooks& hooks = {});

}  // namespace tabtrawl
