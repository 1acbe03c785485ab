#include "tabtrawl/contam.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace tabtrawl {

void SchemaIndex::add(const std::string& table_key,
                      const std::vector<std::string>& column_names, uint64_t n_cols) {
  TableInfo& info = tables_[table_key];
  info.n_cols = n_cols;
  for (const std::string& name : column_names) {
    if (!info.names.insert(name).second) continue;  // distinct names only
    auto& list = postings_[name];
    auto at = std::lower_bound(list.begin(), list.end(), table_key);
    if (at == list.end() || *at != table_key) list.insert(at, table_key);
  }
}

void SchemaIndex::add(const TableArtifact& t) {
  std::vector<std::string> names;
  names.reserve(t.n_cols());
  for (const ColumnMeta& h : t.headers) names.push_back(h.name);
  add(t.content_key, names, t.n_cols());
}

const std::vector<std::string>* SchemaIndex::postings(const std::string& name) const {
  auto it = postings_.find(name);
  return it == postings_.end() ? nullptr : &it->second;
}

void SchemaIndex::save(const std::string& path) const {
  nlohmann::json doc;
  doc["format"] = "schema-index/1";
  nlohmann::json tables = nlohmann::json::object();
  for (const auto& [key, info] : tables_) {
    nlohmann::json entry;
    entry["n_cols"] = info.n_cols;
    entry["names"] = std::vector<std::string>(info.names.begin(), info.names.end());
    tables[key] = std::move(entry);
  }
  doc["tables"] = std::move(tables);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw UnreadableFile("cannot write index to " + path);
  out << doc.dump(2) << '\n';
}

SchemaIndex SchemaIndex::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UnreadableFile("cannot open index at " + path);
  nlohmann::json doc = nlohmann::json::parse(in);
  if (doc.value("format", "") != std::string("schema-index/1"))
    throw UnsupportedFormat("not a schema index: " + path);
  SchemaIndex idx;
  for (const auto& [key, entry] : doc.at("tables").items()) {
    std::vector<std::string> names;
    for (const auto& n : entry.at("names")) names.push_back(n.get<std::string>());
    idx.add(key, names, entry.at("n_cols").get<uint64_t>());
  }
  return idx;
}

SchemaIndex build_index(const std::vector<TableArtifact>& corpus) {
  SchemaIndex idx;
  for (const TableArtifact& t : corpus) idx.add(t);
  return idx;
}

CheckResult check(const std::set<std::string>& eval_cols, uint64_t n_eval_cols,
                  const SchemaIndex& idx) {
  CheckResult res;
  if (eval_cols.empty()) throw std::invalid_argument("empty probe column set");

  std::vector<const std::vector<std::string>*> lists;
  lists.reserve(eval_cols.size());
  for (const std::string& name : eval_cols) {
    const auto* list = idx.postings(name);
    if (list == nullptr) return res;  // some name never occurs: no match possible
    lists.push_back(list);
  }
  std::sort(lists.begin(), lists.end(),
            [](const auto* a, const auto* b) { return a->size() < b->size(); });

  std::vector<std::string> candidates = *lists.front();
  for (size_t i = 1; i < lists.size() && !candidates.empty(); ++i) {
    std::vector<std::string> narrowed;
    for (const std::string& key : candidates)
      if (std::binary_search(lists[i]->begin(), lists[i]->end(), key))
        narrowed.push_back(key);
    candidates = std::move(narrowed);
  }
  res.fuzzy_keys = std::move(candidates);
  res.fuzzy = !res.fuzzy_keys.empty();
  for (const std::string& key : res.fuzzy_keys)
    if (idx.tables().at(key).n_cols == n_eval_cols) res.strict_keys.push_back(key);
  res.strict = !res.strict_keys.empty();
  return res;
}

ContamReport contamination_report(const std::vector<SuiteTable>& suite,
                                  const SchemaIndex& idx) {
  ContamReport report;
  std::map<std::string, BenchmarkOverlap> rows;
  for (const SuiteTable& t : suite) {
    CheckResult res = check(t.column_names, t.n_cols, idx);
    BenchmarkOverlap& row = rows[t.benchmark];
    row.benchmark = t.benchmark;
    ++row.n_tables;
    if (res.fuzzy) ++row.fuzzy;
    if (res.strict) ++row.strict;
    report.per_table[t.benchmark + "/" + t.name] = std::move(res);
  }
  for (auto& [name, row] : rows) report.rows.push_back(std::move(row));
  return report;
}

std::string ContamReport::to_text() const {
  std::ostringstream out;
  auto pct = [](uint64_t part, uint64_t total) {
    if (total == 0) return std::string("0.0%");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f%%",
                  100.0 * static_cast<double>(part) / static_cast<double>(total));
    return std::string(buf);
  };
  out << "benchmark            tables   fuzzy           strict\n";
  for (const BenchmarkOverlap& row : rows) {
    char line[160];
    std::snprintf(line, sizeof line, "%-20s %-8llu %-4llu (%-6s)   %-4llu (%-6s)\n",
                  row.benchmark.c_str(), static_cast<unsigned long long>(row.n_tables),
                  static_cast<unsigned long long>(row.fuzzy),
                  pct(row.fuzzy, row.n_tables).c_str(),
                  static_cast<unsigned long long>(row.strict),
                  pct(row.strict, row.n_tables).c_str());
    out << line;
  }
  return out.str();
}

}  // namespace tabtrawl
