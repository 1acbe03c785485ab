#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tabtrawl/filters.hpp"
#include "tabtrawl/pack.hpp"
#include "tabtrawl/table.hpp"

namespace tabtrawl {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// How far the pipeline runs; each stage implies the previous ones.
enum class StageDepth { Filter = 0, Tasks = 1, Serialize = 2, Pack = 3 };

struct PipelineConfig {
  std::vector<std::string> inputs;  // files, directories, or "*" globs
  std::string output_dir;
  FilterConfig filter;
  uint64_t seed = 0;
  uint32_t l_max = 8192;
  unsigned workers = 1;
  StageDepth stages = StageDepth::Pack;
  std::string tokenizer_path;  // empty: built-in tokenizer

  static PipelineConfig from_json_file(const std::string& path);  // throws ConfigError
  void validate() const;
};

struct ShardRecord {
  uint32_t shard_id = 0;
  std::string path;
  std::string status;  // "ok", "duplicate", or "error"
  std::string error;
  std::string content_key;
};

struct Histogram {
  std::vector<std::string> bucket_labels;
  std::vector<uint64_t> counts;
};

struct CorpusManifest {
  uint64_t seed = 0;
  uint32_t l_max = 8192;
  StageDepth stages = StageDepth::Pack;

  std::vector<ShardRecord> shards;
  uint64_t tables_ingested = 0;
  uint64_t tables_duplicate = 0;
  uint64_t tables_accepted = 0;
  uint64_t tables_rejected = 0;
  uint64_t tables_task_failed = 0;  // accepted but no usable prediction target
  uint64_t rows_ingested = 0;
  uint64_t rows_accepted = 0;
  uint64_t rows_serialized = 0;
  uint64_t rows_skipped_null_target = 0;
  uint64_t tokens_total = 0;
  uint64_t tokens_loss = 0;

  FilterReport filter_report;                    // merged over all tables
  std::map<std::string, uint64_t> rejections;    // rule -> tables rejected
  std::map<std::string, Histogram> histograms;   // rows/cols/missing/dtypes
  PackStats packing;

  std::string to_json_text() const;  // deterministic (sorted keys)
  static CorpusManifest from_json_file(const std::string& path);
};

// Stage wall-clock seconds; written separately from the manifest so that
// pipeline outputs stay byte-identical across runs and worker counts.
struct StageTimings {
  std::map<std::string, double> seconds;
  unsigned workers = 1;
};

// Runs ingest -> dedup -> filters -> target selection -> serialization ->
// tokenize+pack over all input shards, writing artifacts and manifest.json
// under cfg.output_dir. Deterministic in (inputs, config, seed) for any
// worker count. Per-shard failures are recorded, not fatal.
CorpusManifest run_pipeline(const PipelineConfig& cfg, StageTimings* timings = nullptr);

// Human-readable report over a manifest (histograms documented in
// docs/file-formats.md).
std::string corpus_stats_text(const CorpusManifest& manifest);

// Expands glob patterns ("dir/*.csv"), directories and plain paths into a
// sorted, de-duplicated file list.
std::vector<std::string> expand_inputs(const std::vector<std::string>& inputs);

}  // namespace tabtrawl
