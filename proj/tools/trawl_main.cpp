// Corpus pipeline driver: shard discovery, filtering, task selection,
// serialization and packing, plus manifest inspection and schema-overlap
// checks. Exit codes: 0 ok, 2 config error, 3 I/O error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tabtrawl/contam.hpp"
#include "tabtrawl/eval.hpp"
#include "tabtrawl/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tabtrawl;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

int cmd_run(const std::string& config_path, unsigned workers_override, bool quiet) {
  PipelineConfig cfg = PipelineConfig::from_json_file(config_path);
  if (workers_override > 0) cfg.workers = workers_override;
  if (const char* env = std::getenv("TRAWL_WORKERS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) cfg.workers = static_cast<unsigned>(v);
  }
  StageTimings timings;
  CorpusManifest manifest = run_pipeline(cfg, &timings);
  if (!quiet) {
    std::cout << "shards: " << manifest.shards.size() << ", accepted tables: "
              << manifest.tables_accepted << ", rejected: " << manifest.tables_rejected
              << ", duplicates: " << manifest.tables_duplicate << "\n";
    std::cout << "manifest: " << (fs::path(cfg.output_dir) / "manifest.json").string()
              << "\n";
  }
  return 0;
}

int cmd_stats(const std::string& manifest_path, const std::string& json_out) {
  CorpusManifest manifest = CorpusManifest::from_json_file(manifest_path);
  std::cout << corpus_stats_text(manifest);
  if (!json_out.empty()) {
    std::ofstream out(json_out, std::ios::trunc);
    if (!out) throw IoError("cannot write " + json_out);
    out << manifest.to_json_text();
  }
  return 0;
}

int cmd_inspect(const std::string& key, const std::string& out_dir, size_t head) {
  fs::path path = fs::path(out_dir) / "tables" / (key + ".tcol");
  if (!fs::exists(path)) throw IoError("no stored table for key " + key);
  TableArtifact t = ingest_table(path.string(), TableFormat::Columnar);
  TableStats stats = compute_stats(t);
  std::cout << "key: " << t.content_key << "\n";
  std::cout << "shape: " << stats.n_rows << " rows x " << stats.n_cols << " cols, missing "
            << format_double(stats.missing_fraction) << "\n";
  for (const ColumnMeta& meta : stats.columns)
    std::cout << "  " << meta.name << " (" << cell_type_name(meta.declared_type)
              << ", missing " << format_double(meta.missing_fraction) << ", distinct "
              << meta.distinct_count << ")\n";
  for (size_t r = 0; r < std::min(head, t.n_rows()); ++r) {
    std::cout << "  row " << r << ":";
    for (size_t c = 0; c < t.n_cols(); ++c) std::cout << " " << render_cell(t.cell(r, c));
    std::cout << "\n";
  }
  return 0;
}

int cmd_contam_index(const std::vector<std::string>& inputs, const std::string& out_path) {
  SchemaIndex idx;
  for (const std::string& file : expand_inputs(inputs)) {
    fs::path p(file);
    TableFormat format =
        p.extension() == ".tcol" ? TableFormat::Columnar : TableFormat::Csv;
    idx.add(ingest_table(file, format));
  }
  idx.save(out_path);
  std::cout << "indexed " << idx.n_tables() << " tables -> " << out_path << "\n";
  return 0;
}

int cmd_contam_check(const std::string& index_path, const std::string& suite_dir,
                     const std::string& out_path) {
  SchemaIndex idx = SchemaIndex::load(index_path);
  std::vector<SuiteTable> suite;
  std::vector<fs::path> csvs;
  for (const auto& entry : fs::directory_iterator(suite_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".csv")
      csvs.push_back(entry.path());
  std::sort(csvs.begin(), csvs.end());
  for (const fs::path& csv : csvs) {
    TableArtifact t = ingest_table(csv.string(), TableFormat::Csv);
    SuiteTable st;
    st.name = csv.stem().string();
    st.benchmark = "default";
    for (const char* ext : {".json", ".yaml", ".yml"}) {
      fs::path meta = fs::path(csv).replace_extension(ext);
      if (!fs::exists(meta) || std::string_view(ext) != ".json") continue;
      std::ifstream in(meta);
      json doc = json::parse(in);
      st.benchmark = doc.value("benchmark", "default");
    }
    for (const ColumnMeta& h : t.headers) st.column_names.insert(h.name);
    st.n_cols = t.n_cols();
    suite.push_back(std::move(st));
  }
  ContamReport report = contamination_report(suite, idx);
  std::cout << report.to_text();
  if (!out_path.empty()) {
    json doc;
    doc["format"] = "contamination-report/1";
    json rows = json::array();
    for (const BenchmarkOverlap& row : report.rows)
      rows.push_back({{"benchmark", row.benchmark},
                      {"tables", row.n_tables},
                      {"fuzzy", row.fuzzy},
                      {"strict", row.strict}});
    doc["benchmarks"] = std::move(rows);
    json tables = json::object();
    for (const auto& [name, res] : report.per_table)
      tables[name] = {{"fuzzy", res.fuzzy},
                      {"strict", res.strict},
                      {"fuzzy_keys", res.fuzzy_keys},
                      {"strict_keys", res.strict_keys}};
    doc["tables"] = std::move(tables);
    std::ofstream out(out_path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + out_path);
    out << doc.dump(2) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tabular corpus pipeline"};
  app.require_subcommand(1);

  std::string config_path;
  unsigned workers_override = 0;
  bool quiet = false;
  CLI::App* run = app.add_subcommand("run", "run the pipeline over input shards");
  run->add_option("--config", config_path, "pipeline config (JSON)")->required();
  run->add_option("--workers", workers_override, "override configured worker count");
  run->add_flag("--quiet", quiet, "suppress progress output");

  std::string manifest_path;
  std::string stats_json;
  CLI::App* stats = app.add_subcommand("stats", "summarize a pipeline manifest");
  stats->add_option("--manifest", manifest_path, "manifest.json path")->required();
  stats->add_option("--json", stats_json, "also write the report as JSON");

  std::string inspect_key;
  std::string inspect_out;
  size_t inspect_head = 5;
  CLI::App* inspect = app.add_subcommand("inspect", "show a stored table by content key");
  inspect->add_option("key", inspect_key, "table content key")->required();
  inspect->add_option("--out", inspect_out, "pipeline output directory")->required();
  inspect->add_option("--rows", inspect_head, "preview row count");

  CLI::App* contam = app.add_subcommand("contam", "schema-overlap contamination tools");
  contam->require_subcommand(1);
  std::vector<std::string> index_inputs;
  std::string index_out;
  CLI::App* contam_index = contam->add_subcommand("index", "build a schema index");
  contam_index->add_option("--inputs", index_inputs, "table files or globs")->required();
  contam_index->add_option("--out", index_out, "index output path")->required();

  std::string check_index;
  std::string check_suite;
  std::string check_out;
  CLI::App* contam_check =
      contam->add_subcommand("check", "check a benchmark suite against an index");
  contam_check->add_option("--index", check_index, "schema index path")->required();
  contam_check->add_option("--suite", check_suite, "benchmark suite directory")->required();
  contam_check->add_option("--out", check_out, "report output path (JSON)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, workers_override, quiet);
    if (stats->parsed()) return cmd_stats(manifest_path, stats_json);
    if (inspect->parsed()) return cmd_inspect(inspect_key, inspect_out, inspect_head);
    if (contam_index->parsed()) return cmd_contam_index(index_inputs, index_out);
    if (contam_check->parsed()) return cmd_contam_check(check_index, check_suite, check_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const UnreadableFile& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
