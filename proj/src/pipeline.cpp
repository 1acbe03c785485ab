#include "tabtrawl/pipeline.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <thread>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "tabtrawl/rng.hpp"
#include "tabtrawl/serialize.hpp"
#include "tabtrawl/tasks.hpp"

namespace tabtrawl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr size_t kChunkShards = 64;  // fixed so results do not depend on workers

bool wildcard_match(std::string_view pattern, std::string_view name) {
  // '*' only; no escaping. Classic two-pointer scan with backtracking.
  size_t p = 0, n = 0, star = std::string_view::npos, mark = 0;
  while (n < name.size()) {
    if (p < pattern.size() && (pattern[p] == name[n])) {
      ++p;
      ++n;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = n;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      n = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

// Runs fn(i) for i in [0, n) on up to `workers` threads. Exceptions must be
// handled inside fn; slots keep results ordered.
void parallel_for(size_t n, unsigned workers, const std::function<void(size_t)>& fn) {
  workers = std::max(1u, workers);
  if (workers == 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  size_t n_threads = std::min<size_t>(workers, n);
  pool.reserve(n_threads);
  for (size_t t = 0; t < n_threads; ++t) {
    pool.emplace_back([&] {
      for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

std::optional<TableFormat> format_for(const fs::path& p) {
  auto ext = p.extension().string();
  if (ext == ".csv") return TableFormat::Csv;
  if (ext == ".tcol") return TableFormat::Columnar;
  return std::nullopt;
}

// Per-shard intermediate state, kept in shard order for deterministic output.
struct ShardWork {
  ShardRecord record;
  std::optional<TableArtifact> ingested;
  std::optional<FilteredTable> filtered;
  std::optional<PredictionTask> task;
  std::string task_error;
  std::vector<SerializedExample> examples;
  uint64_t rows_skipped_null_target = 0;
  RowGroup group;  // tokenized rows for packing
};

Histogram bucketize(const std::vector<double>& values, const std::vector<double>& edges,
                    const std::vector<std::string>& labels) {
  Histogram h;
  h.bucket_labels = labels;
  h.counts.assign(labels.size(), 0);
  for (double v : values) {
    size_t bucket = 0;
    while (bucket + 1 < edges.size() && v >= edges[bucket + 1]) ++bucket;
    ++h.counts[bucket];
  }
  return h;
}

json histogram_to_json(const Histogram& h) {
  json obj = json::object();
  for (size_t i = 0; i < h.bucket_labels.size(); ++i) obj[h.bucket_labels[i]] = h.counts[i];
  return obj;
}

Histogram histogram_from_json(const json& obj) {
  Histogram h;
  for (const auto& [label, count] : obj.items()) {
    h.bucket_labels.push_back(label);
    h.counts.push_back(count.get<uint64_t>());
  }
  return h;
}

json spans_json(const SerializedExample& ex) {
  json spans;
  spans["prefix"] = {0, ex.prefix_end};
  spans["features"] = {ex.prefix_end, ex.features_end};
  spans["suffix"] = {ex.features_end, ex.suffix_end};
  spans["answer"] = {ex.suffix_end, ex.text.size()};
  return spans;
}

class Stopwatch {
 public:
  explicit Stopwatch(StageTimings* timings, std::string stage)
      : timings_(timings), stage_(std::move(stage)),
        start_(std::chrono::steady_clock::now()) {}
  ~Stopwatch() {
    if (timings_ == nullptr) return;
    auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_);
    timings_->seconds[stage_] += elapsed.count();
  }

 private:
  StageTimings* timings_;
  std::string stage_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

void PipelineConfig::validate() const {
  if (inputs.empty()) throw ConfigError("inputs must not be empty");
  if (output_dir.empty()) throw ConfigError("output_dir must be set");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (l_max == 0) throw ConfigError("l_max must be positive");
  try {
    filter.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("bad filter config: ") + e.what());
  }
}

PipelineConfig PipelineConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }

  static const std::unordered_set<std::string> known = {
      "inputs", "output_dir", "seed", "l_max", "workers", "stages", "tokenizer", "filter"};
  for (const auto& [key, value] : doc.items())
    if (!known.contains(key)) throw ConfigError("unknown config key: " + key);

  PipelineConfig cfg;
  try {
    for (const auto& item : doc.at("inputs")) cfg.inputs.push_back(item.get<std::string>());
    cfg.output_dir = doc.at("output_dir").get<std::string>();
    cfg.seed = doc.value("seed", 0ULL);
    cfg.l_max = doc.value("l_max", 8192u);
    cfg.workers = doc.value("workers", 1u);
    cfg.tokenizer_path = doc.value("tokenizer", std::string{});
    std::string stages = doc.value("stages", "pack");
    if (stages == "filter")
      cfg.stages = StageDepth::Filter;
    else if (stages == "tasks")
      cfg.stages = StageDepth::Tasks;
    else if (stages == "serialize")
      cfg.stages = StageDepth::Serialize;
    else if (stages == "pack")
      cfg.stages = StageDepth::Pack;
    else
      throw ConfigError("stages must be one of filter|tasks|serialize|pack");

    if (doc.contains("filter")) {
      static const std::unordered_set<std::string> filter_keys = {
          "min_rows", "max_rows", "min_cols", "max_cols", "max_header_chars",
          "table_pii_cell_fraction", "table_missing_fraction", "unnamed_col_fraction",
          "col_missing_fraction", "row_missing_fraction", "english_threshold",
          "code_threshold"};
      const json& f = doc.at("filter");
      for (const auto& [key, value] : f.items())
        if (!filter_keys.contains(key)) throw ConfigError("unknown filter key: " + key);
      FilterConfig& fc = cfg.filter;
      fc.min_rows = f.value("min_rows", fc.min_rows);
      fc.max_rows = f.value("max_rows", fc.max_rows);
      fc.min_cols = f.value("min_cols", fc.min_cols);
      fc.max_cols = f.value("max_cols", fc.max_cols);
      fc.max_header_chars = f.value("max_header_chars", fc.max_header_chars);
      fc.table_pii_cell_fraction = f.value("table_pii_cell_fraction", fc.table_pii_cell_fraction);
      fc.table_missing_fraction = f.value("table_missing_fraction", fc.table_missing_fraction);
      fc.unnamed_col_fraction = f.value("unnamed_col_fraction", fc.unnamed_col_fraction);
      fc.col_missing_fraction = f.value("col_missing_fraction", fc.col_missing_fraction);
      fc.row_missing_fraction = f.value("row_missing_fraction", fc.row_missing_fraction);
      fc.english_threshold = f.value("english_threshold", fc.english_threshold);
      fc.code_threshold = f.value("code_threshold", fc.code_threshold);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

std::vector<std::string> expand_inputs(const std::vector<std::string>& inputs) {
  std::vector<std::string> files;
  for (const std::string& input : inputs) {
    if (input.find('*') != std::string::npos) {
      fs::path pattern(input);
      fs::path dir = pattern.parent_path().empty() ? fs::path(".") : pattern.parent_path();
      if (dir.string().find('*') != std::string::npos)
        throw ConfigError("wildcards are only supported in the filename: " + input);
      if (!fs::is_directory(dir)) continue;
      for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() &&
            wildcard_match(pattern.filename().string(), entry.path().filename().string()))
          files.push_back(entry.path().string());
    } else if (fs::is_directory(input)) {
      for (const auto& entry : fs::directory_iterator(input))
        if (entry.is_regular_file()) files.push_back(entry.path().string());
    } else {
      files.push_back(input);
    }
  }
  std::sort(files.begin(), files.end());
  files.erase(std::unique(files.begin(), files.end()), files.end());
  return files;
}

CorpusManifest run_pipeline(const PipelineConfig& cfg, StageTimings* timings) {
  cfg.validate();
  if (timings != nullptr) timings->workers = cfg.workers;

  std::vector<std::string> files = expand_inputs(cfg.inputs);

  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) throw IoError("cannot create output directory " + cfg.output_dir);
  fs::create_directories(fs::path(cfg.output_dir) / "tables", ec);
  if (ec) throw IoError("cannot create tables directory");

  Tokenizer tokenizer =
      cfg.tokenizer_path.empty() ? Tokenizer::bundled()
                                 : Tokenizer::from_vocab_file(cfg.tokenizer_path);

  CorpusManifest manifest;
  manifest.seed = cfg.seed;
  manifest.l_max = cfg.l_max;
  manifest.stages = cfg.stages;

  std::ofstream tasks_out;
  std::ofstream serialized_out;
  if (cfg.stages >= StageDepth::Tasks)
    tasks_out.open(fs::path(cfg.output_dir) / "tasks.jsonl", std::ios::trunc);
  if (cfg.stages >= StageDepth::Serialize)
    serialized_out.open(fs::path(cfg.output_dir) / "serialized.jsonl", std::ios::trunc);

  std::unordered_set<std::string> seen_keys;
  std::vector<RowGroup> groups;
  std::vector<double> rows_hist, cols_hist, missing_hist;
  std::map<std::string, uint64_t> dtype_counts;

  for (size_t chunk_start = 0; chunk_start < files.size(); chunk_start += kChunkShards) {
    const size_t chunk_end = std::min(files.size(), chunk_start + kChunkShards);
    std::vector<ShardWork> work(chunk_end - chunk_start);

    {
      Stopwatch sw(timings, "ingest");
      parallel_for(work.size(), cfg.workers, [&](size_t i) {
        ShardWork& w = work[i];
        const std::string& path = files[chunk_start + i];
        w.record.shard_id = static_cast<uint32_t>(chunk_start + i);
        w.record.path = path;
        auto format = format_for(path);
        if (!format) {
          w.record.status = "error";
          w.record.error = "unsupported extension";
          return;
        }
        try {
          TableArtifact t = ingest_table(path, *format);
          t.provenance.shard_id = w.record.shard_id;
          w.record.content_key = t.content_key;
          w.record.status = "ok";
          w.ingested = std::move(t);
        } catch (const std::exception& e) {
          w.record.status = "error";
          w.record.error = e.what();
        }
      });
    }

    {
      // Content-hash dedup before any filtering; first occurrence (in shard
      // order) wins, independent of worker count.
      Stopwatch sw(timings, "dedup");
      for (ShardWork& w : work) {
        if (!w.ingested) continue;
        ++manifest.tables_ingested;
        manifest.rows_ingested += w.ingested->n_rows();
        if (!seen_keys.insert(w.ingested->content_key).second) {
          w.record.status = "duplicate";
          w.ingested.reset();
          ++manifest.tables_duplicate;
        }
      }
    }

    {
      Stopwatch sw(timings, "process");
      parallel_for(work.size(), cfg.workers, [&](size_t i) {
        ShardWork& w = work[i];
        if (!w.ingested) return;
        w.filtered = filter_table(*w.ingested, cfg.filter);
        if (w.filtered->table.state != FilterState::Accepted) return;
        if (cfg.stages < StageDepth::Tasks) return;
        const TableArtifact& table = w.filtered->table;
        try {
          w.task = build_training_task(table, mix_seed(cfg.seed, table.content_key));
        } catch (const std::exception& e) {
          w.task_error = e.what();
          return;
        }
        if (cfg.stages < StageDepth::Serialize) return;
        w.group.table_key = table.content_key;
        for (size_t r = 0; r < table.n_rows(); ++r) {
          if (row_label(table, *w.task, r).empty()) {
            ++w.rows_skipped_null_target;
            continue;
          }
          SerializedExample ex = serialize_row(table, *w.task, r, true);
          if (cfg.stages >= StageDepth::Pack) {
            TokenizedRow row;
            row.row_index = r;
            row.ids = tokenizer.encode(ex.text);
            w.group.rows.push_back(std::move(row));
          }
          w.examples.push_back(std::move(ex));
        }
      });
    }

    {
      Stopwatch sw(timings, "write");
      for (ShardWork& w : work) {
        manifest.shards.push_back(w.record);
        if (!w.filtered) continue;
        manifest.filter_report.merge(w.filtered->report);
        const TableArtifact& table = w.filtered->table;
        if (table.state == FilterState::Rejected) {
          ++manifest.tables_rejected;
          ++manifest.rejections[table.rejection_rule];
          continue;
        }
        ++manifest.tables_accepted;
        manifest.rows_accepted += table.n_rows();
        TableStats stats = compute_stats(table);
        rows_hist.push_back(static_cast<double>(stats.n_rows));
        cols_hist.push_back(static_cast<double>(stats.n_cols));
        missing_hist.push_back(stats.missing_fraction);
        for (const auto& [type, count] : stats.dtype_histogram)
          dtype_counts[std::string(cell_type_name(type))] += count;
        write_columnar(table, (fs::path(cfg.output_dir) / "tables" /
                               (table.content_key + ".tcol"))
                                  .string());

        if (cfg.stages >= StageDepth::Tasks) {
          if (!w.task) {
            ++manifest.tables_task_failed;
            continue;
          }
          json line;
          line["table_key"] = table.content_key;
          line["target_index"] = w.task->target_col;
          line["target_column"] = table.headers[w.task->target_col].name;
          line["kind"] = w.task->kind == TaskKind::Categorical ? "categorical"
                                                               : "binned_continuous";
          line["labels"] = w.task->label_set;
          line["boundaries"] = w.task->bin_boundaries;
          tasks_out << line.dump() << '\n';
        }
        if (cfg.stages >= StageDepth::Serialize) {
          manifest.rows_skipped_null_target += w.rows_skipped_null_target;
          for (const SerializedExample& ex : w.examples) {
            json line;
            line["table_key"] = ex.table_key;
            line["row"] = ex.row;
            line["text"] = ex.text;
            line["target"] = ex.target_text;
            line["spans"] = spans_json(ex);
            serialized_out << line.dump() << '\n';
            ++manifest.rows_serialized;
          }
        }
        if (cfg.stages >= StageDepth::Pack && !w.group.rows.empty())
          groups.push_back(std::move(w.group));
      }
    }
  }

  if (cfg.stages >= StageDepth::Pack) {
    Stopwatch sw(timings, "pack");
    PackOptions opt;
    opt.l_max = cfg.l_max;
    opt.seed = cfg.seed;
    PackResult packed = pack_rows(groups, opt);
    manifest.packing = packed.stats;
    std::ofstream packed_out(fs::path(cfg.output_dir) / "packed.jsonl", std::ios::trunc);
    for (const PackedSequence& seq : packed.sequences) {
      json line;
      line["token_ids"] = seq.token_ids;
      json segs = json::array();
      for (const Segment& s : seq.segments)
        segs.push_back({{"start", s.start}, {"end", s.end}, {"table_key", s.table_key}});
      line["segments"] = std::move(segs);
      json spans = json::array();
      for (const LossSpan& s : seq.loss_spans) {
        spans.push_back({s.start, s.end});
        manifest.tokens_loss += s.end - s.start;
      }
      line["loss_spans"] = std::move(spans);
      line["pad_start"] = seq.pad_start;
      packed_out << line.dump() << '\n';
    }
    manifest.tokens_total = packed.stats.total_tokens - packed.stats.pad_tokens;
    if (!packed_out) throw IoError("write failure on packed.jsonl");
  }

  // Shape and missingness histograms over accepted tables.
  manifest.histograms["rows_per_table"] = bucketize(
      rows_hist, {0, 8, 16, 32, 64, 128, 256, 512, 1001},
      {"1-7", "8-15", "16-31", "32-63", "64-127", "128-255", "256-511", "512-1000", ">1000"});
  manifest.histograms["cols_per_table"] =
      bucketize(cols_hist, {0, 2, 4, 8, 16, 32, 64, 128, 513},
                {"1", "2-3", "4-7", "8-15", "16-31", "32-63", "64-127", "128-512", ">512"});
  manifest.histograms["missing_fraction"] = bucketize(
      missing_hist, {0, 0.02, 0.04, 0.06, 0.08, 0.101},
      {"0-2%", "2-4%", "4-6%", "6-8%", "8-10%", ">10%"});
  Histogram dtypes;
  for (const auto& [name, count] : dtype_counts) {
    dtypes.bucket_labels.push_back(name);
    dtypes.counts.push_back(count);
  }
  manifest.histograms["column_dtypes"] = std::move(dtypes);

  std::ofstream manifest_out(fs::path(cfg.output_dir) / "manifest.json", std::ios::trunc);
  manifest_out << manifest.to_json_text();
  if (!manifest_out) throw IoError("write failure on manifest.json");

  if (timings != nullptr) {
    json tj;
    tj["workers"] = timings->workers;
    tj["seconds"] = timings->seconds;
    std::ofstream timings_out(fs::path(cfg.output_dir) / "timings.json", std::ios::trunc);
    timings_out << tj.dump(2) << '\n';
  }
  return manifest;
}

std::string CorpusManifest::to_json_text() const {
  json doc;
  doc["format"] = "corpus-manifest/1";
  doc["seed"] = seed;
  doc["l_max"] = l_max;
  static constexpr std::array<const char*, 4> kStageNames = {"filter", "tasks", "serialize",
                                                             "pack"};
  doc["stages"] = kStageNames[static_cast<size_t>(stages)];

  json shard_list = json::array();
  for (const ShardRecord& s : shards) {
    json entry;
    entry["id"] = s.shard_id;
    entry["path"] = s.path;
    entry["status"] = s.status;
    if (!s.error.empty()) entry["error"] = s.error;
    if (!s.content_key.empty()) entry["content_key"] = s.content_key;
    shard_list.push_back(std::move(entry));
  }
  doc["shards"] = std::move(shard_list);

  doc["tables"] = {{"ingested", tables_ingested},     {"duplicates", tables_duplicate},
                   {"accepted", tables_accepted},     {"rejected", tables_rejected},
                   {"task_failed", tables_task_failed}};
  doc["rows"] = {{"ingested", rows_ingested},
                 {"accepted", rows_accepted},
                 {"serialized", rows_serialized},
                 {"skipped_null_target", rows_skipped_null_target}};
  doc["tokens"] = {{"total", tokens_total}, {"loss", tokens_loss}};

  json report = json::object();
  for (const auto& [rule, counter] : filter_report.rules)
    report[rule] = {{"evaluated", counter.evaluated}, {"removed", counter.removed}};
  doc["filter_report"] = std::move(report);
  doc["rejections"] = rejections;

  json hists = json::object();
  for (const auto& [name, hist] : histograms) hists[name] = histogram_to_json(hist);
  doc["histograms"] = std::move(hists);

  doc["packing"] = {{"sequences", l_max == 0 ? 0 : packing.total_tokens / l_max},
                    {"rows_packed", packing.rows_packed},
                    {"rows_too_long", packing.rows_too_long},
                    {"pad_tokens", packing.pad_tokens},
                    {"padding_fraction", packing.padding_fraction},
                    {"mean_rows_per_sequence", packing.mean_rows_per_sequence}};
  return doc.dump(2) + "\n";
}

CorpusManifest CorpusManifest::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path);
  json doc = json::parse(in);
  if (doc.value("format", "") != std::string("corpus-manifest/1"))
    throw ConfigError("not a corpus manifest: " + path);
  CorpusManifest m;
  m.seed = doc.value("seed", 0ULL);
  m.l_max = doc.value("l_max", 0u);
  std::string stages = doc.value("stages", "pack");
  m.stages = stages == "filter"      ? StageDepth::Filter
             : stages == "tasks"     ? StageDepth::Tasks
             : stages == "serialize" ? StageDepth::Serialize
                                     : StageDepth::Pack;
  for (const auto& entry : doc.at("shards")) {
    ShardRecord s;
    s.shard_id = entry.value("id", 0u);
    s.path = entry.value("path", "");
    s.status = entry.value("status", "");
    s.error = entry.value("error", "");
    s.content_key = entry.value("content_key", "");
    m.shards.push_back(std::move(s));
  }
  m.tables_ingested = doc["tables"].value("ingested", 0ULL);
  m.tables_duplicate = doc["tables"].value("duplicates", 0ULL);
  m.tables_accepted = doc["tables"].value("accepted", 0ULL);
  m.tables_rejected = doc["tables"].value("rejected", 0ULL);
  m.tables_task_failed = doc["tables"].value("task_failed", 0ULL);
  m.rows_ingested = doc["rows"].value("ingested", 0ULL);
  m.rows_accepted = doc["rows"].value("accepted", 0ULL);
  m.rows_serialized = doc["rows"].value("serialized", 0ULL);
  m.rows_skipped_null_target = doc["rows"].value("skipped_null_target", 0ULL);
  m.tokens_total = doc["tokens"].value("total", 0ULL);
  m.tokens_loss = doc["tokens"].value("loss", 0ULL);
  for (const auto& [rule, counter] : doc.at("filter_report").items()) {
    m.filter_report.rules[rule].evaluated = counter.value("evaluated", 0ULL);
    m.filter_report.rules[rule].removed = counter.value("removed", 0ULL);
  }
  for (const auto& [rule, count] : doc.at("rejections").items())
    m.rejections[rule] = count.get<uint64_t>();
  for (const auto& [name, hist] : doc.at("histograms").items())
    m.histograms[name] = histogram_from_json(hist);
  const json& p = doc.at("packing");
  m.packing.rows_packed = p.value("rows_packed", 0ULL);
  m.packing.rows_too_long = p.value("rows_too_long", 0ULL);
  m.packing.pad_tokens = p.value("pad_tokens", 0ULL);
  m.packing.padding_fraction = p.value("padding_fraction", 0.0);
  m.packing.mean_rows_per_sequence = p.value("mean_rows_per_sequence", 0.0);
  return m;
}

std::string corpus_stats_text(const CorpusManifest& m) {
  std::ostringstream out;
  out << "tables: ingested " << m.tables_ingested << ", duplicates " << m.tables_duplicate
      << ", accepted " << m.tables_accepted << ", rejected " << m.tables_rejected << "\n";
  out << "rows:   ingested " << m.rows_ingested << ", accepted " << m.rows_accepted
      << ", serialized " << m.rows_serialized << "\n";
  out << "tokens: " << m.tokens_total << " total, " << m.tokens_loss << " under loss\n";
  if (m.tables_ingested > 0) {
    double rate = 100.0 *
                  static_cast<double>(m.tables_rejected + m.tables_duplicate) /
                  static_cast<double>(m.tables_ingested);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", rate);
    out << "table removal rate: " << buf << "%\n";
  }
  out << "\nrejections by rule:\n";
  for (const auto& [rule, count] : m.rejections) out << "  " << rule << ": " << count << "\n";
  for (const auto& [name, hist] : m.histograms) {
    out << "\n" << name << ":\n";
    for (size_t i = 0; i < hist.bucket_labels.size(); ++i)
      out << "  " << hist.bucket_labels[i] << ": " << hist.counts[i] << "\n";
  }
  if (m.packing.rows_packed > 0) {
    out << "\npacking: " << m.packing.rows_packed << " rows, padding fraction "
        << format_double(m.packing.padding_fraction) << ", mean rows/sequence "
        << format_double(m.packing.mean_rows_per_sequence) << ", dropped too-long "
        << m.packing.rows_too_long << "\n";
  }
  return out.str();
}

}  // namespace tabtrawl
