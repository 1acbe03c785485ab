#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "tabtrawl/table.hpp"

namespace tabtrawl {

// Inverted map from column name to the training tables carrying it, plus
// per-table schema facts. Names are compared byte-exact after the ingestion
// UTF-8 normalization; each table contributes a distinct name once.
class SchemaIndex {
 public:
  void add(const std::string& table_key, const std::vector<std::string>& column_names,
           uint64_t n_cols);
  void add(const TableArtifact& t);

  size_t n_tables() const { return tables_.size(); }
  const std::vector<std::string>* postings(const std::string& name) const;

  struct TableInfo {
    std::set<std::string> names;
    uint64_t n_cols = 0;
  };
  const std::map<std::string, TableInfo>& tables() const { return tables_; }

  // Sorted on-disk map: {"tables": {key: {"n_cols": n, "names": [...]}}}.
  void save(const std::string& path) const;
  static SchemaIndex load(const std::string& path);

 private:
  std::map<std::string, TableInfo> tables_;
  std::map<std::string, std::vector<std::string>> postings_;  // name -> sorted keys
};

SchemaIndex build_index(const std::vector<TableArtifact>& corpus);

struct CheckResult {
  bool fuzzy = false;   // some training table's names cover all probe names
  bool strict = false;  // ...and its column count matches n_eval_cols
  std::vector<std::string> fuzzy_keys;
  std::vector<std::string> strict_keys;
};

// Schema-overlap probe. Intersects posting lists starting from the rarest
// name, so cost is bounded by the smallest list.
CheckResult check(const std::set<std::string>& eval_cols, uint64_t n_eval_cols,
                  const SchemaIndex& idx);

struct SuiteTable {
  std::string benchmark;
  std::string name;
  std::set<std::string> column_names;
  uint64_t n_cols = 0;
};

struct BenchmarkOverlap {
  std::string benchmark;
  uint64_t n_tables = 0;
  uint64_t fuzzy = 0;
  uint64_t strict = 0;
};

struct ContamReport {
  std::vector<BenchmarkOverlap> rows;  // sorted by benchmark name
  std::map<std::string, CheckResult> per_table;  // "benchmark/name" -> result
  std::string to_text() const;
};

ContamReport contamination_report(const std::vector<SuiteTable>& suite,
                                  const SchemaIndex& idx);

}  // namespace tabtrawl
