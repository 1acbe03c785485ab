#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "support/synthetic.hpp"
#include "tabtrawl/pipeline.hpp"
#include "tabtrawl/serialize.hpp"

using namespace tabtrawl;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

PipelineConfig base_config(const fs::path& in, const fs::path& out) {
  PipelineConfig cfg;
  cfg.inputs = {(in / "*.csv").string()};
  cfg.output_dir = out.string();
  cfg.seed = 7;
  cfg.l_max = 2048;
  cfg.workers = 2;
  cfg.stages = StageDepth::Pack;
  return cfg;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// All output bytes except timings.json, keyed by relative path.
std::map<std::string, std::string> output_bytes(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    if (entry.path().filename() == "timings.json") continue;
    out[fs::relative(entry.path(), dir).string()] = slurp(entry.path());
  }
  return out;
}

}  // namespace

TEST_CASE("empty input yields an empty manifest") {
  fs::path in = fresh_dir("pl_empty_in");
  fs::path out = fresh_dir("pl_empty_out");
  CorpusManifest manifest = run_pipeline(base_config(in, out));
  CHECK(manifest.tables_ingested == 0);
  CHECK(manifest.tables_accepted == 0);
  CHECK(manifest.shards.empty());
  CHECK(fs::exists(out / "manifest.json"));
}

TEST_CASE("small corpus end to end") {
  fs::path in = fresh_dir("pl_small_in");
  fs::path out = fresh_dir("pl_small_out");
  auto corpus = testing::make_violation_corpus(in.string(), 5, /*n_clean=*/12);

  StageTimings timings;
  CorpusManifest manifest = run_pipeline(base_config(in, out), &timings);

  size_t expect_accepted = 0;
  for (const auto& truth : corpus.tables)
    if (truth.accepted) ++expect_accepted;
  CHECK(manifest.tables_ingested == corpus.tables.size());
  CHECK(manifest.tables_accepted == expect_accepted);
  CHECK(manifest.tables_rejected == corpus.tables.size() - expect_accepted);

  SUBCASE("accepted tables are stored and inspectable by key") {
    size_t stored = 0;
    for (const auto& entry : fs::directory_iterator(out / "tables")) {
      ++stored;
      TableArtifact t = ingest_table(entry.path().string(), TableFormat::Columnar);
      CHECK(entry.path().stem().string() == t.content_key);
    }
    CHECK(stored == expect_accepted);
  }
  SUBCASE("serialized examples slice back to their targets") {
    std::ifstream lines(out / "serialized.jsonl");
    std::string line;
    size_t n = 0;
    while (std::getline(lines, line)) {
      json doc = json::parse(line);
      CHECK(extract_answer(doc.at("text").get<std::string>()) ==
            doc.at("target").get<std::string>());
      ++n;
    }
    CHECK(n == manifest.rows_serialized);
    CHECK(n > 0);
  }
  SUBCASE("packed sequences reconcile with the manifest") {
    std::ifstream lines(out / "packed.jsonl");
    std::string line;
    uint64_t rows = 0;
    while (std::getline(lines, line)) {
      json doc = json::parse(line);
      rows += doc.at("loss_spans").size();
      CHECK(doc.at("token_ids").size() == 2048);
    }
    CHECK(rows == manifest.packing.rows_packed);
  }
  SUBCASE("timings cover the stages") {
    CHECK(timings.seconds.contains("ingest"));
    CHECK(timings.seconds.contains("process"));
    CHECK(timings.seconds.contains("pack"));
    CHECK(fs::exists(out / "timings.json"));
  }
}

TEST_CASE("duplicate shards are removed by content hash, first wins") {
  fs::path in = fresh_dir("pl_dup_in");
  fs::path out = fresh_dir("pl_dup_out");
  TableArtifact t = testing::make_clean_table(3, 80);
  testing::write_csv(t, (in / "a_first.csv").string());
  testing::write_csv(t, (in / "b_second.csv").string());

  CorpusManifest manifest = run_pipeline(base_config(in, out));
  CHECK(manifest.tables_ingested == 2);
  CHECK(manifest.tables_duplicate == 1);
  CHECK(manifest.tables_accepted == 1);
  REQUIRE(manifest.shards.size() == 2);
  CHECK(manifest.shards[0].status == "ok");        // a_first sorts first and wins
  CHECK(manifest.shards[1].status == "duplicate");
}

TEST_CASE("corrupt shards are isolated") {
  fs::path in = fresh_dir("pl_bad_in");
  fs::path out = fresh_dir("pl_bad_out");
  testing::write_csv(testing::make_clean_table(4, 90), (in / "good.csv").string());
  {
    std::ofstream bad(in / "bad.csv", std::ios::trunc);
    bad << "a,b\n1,2\n1,2,3\n";  // ragged
  }
  CorpusManifest manifest = run_pipeline(base_config(in, out));
  REQUIRE(manifest.shards.size() == 2);
  CHECK(manifest.shards[0].status == "error");  // bad.csv sorts first
  CHECK(manifest.shards[1].status == "ok");
  CHECK(manifest.tables_accepted == 1);
}

TEST_CASE("outputs are byte-identical across runs and worker counts") {
  fs::path in = fresh_dir("pl_det_in");
  testing::make_violation_corpus(in.string(), 17, /*n_clean=*/10);

  std::map<std::string, std::string> reference;
  for (int run = 0; run < 3; ++run) {
    for (unsigned workers : {1u, 2u}) {
      fs::path out = fresh_dir("pl_det_out");
      PipelineConfig cfg = base_config(in, out);
      cfg.workers = workers;
      run_pipeline(cfg);
      auto bytes = output_bytes(out);
      if (reference.empty()) {
        reference = bytes;
        CHECK(reference.size() > 3);
      } else {
        REQUIRE(bytes.size() == reference.size());
        for (const auto& [path, content] : reference) {
          CAPTURE(path);
          CHECK(bytes.at(path) == content);
        }
      }
    }
  }
}

TEST_CASE("stage toggles form a prefix of the stage order") {
  fs::path in = fresh_dir("pl_stage_in");
  testing::write_csv(testing::make_clean_table(6, 90), (in / "t.csv").string());

  fs::path out = fresh_dir("pl_stage_filter");
  PipelineConfig cfg = base_config(in, out);
  cfg.stages = StageDepth::Filter;
  run_pipeline(cfg);
  CHECK(fs::exists(out / "tables"));
  CHECK_FALSE(fs::exists(out / "tasks.jsonl"));
  CHECK_FALSE(fs::exists(out / "packed.jsonl"));

  fs::path out2 = fresh_dir("pl_stage_tasks");
  cfg.output_dir = out2.string();
  cfg.stages = StageDepth::Tasks;
  run_pipeline(cfg);
  CHECK(fs::exists(out2 / "tasks.jsonl"));
  CHECK_FALSE(fs::exists(out2 / "serialized.jsonl"));
}

TEST_CASE("config file parsing and validation errors") {
  fs::path dir = fresh_dir("pl_cfg");
  fs::path good = dir / "good.json";
  {
    std::ofstream out(good, std::ios::trunc);
    out << R"({"inputs": ["x/*.csv"], "output_dir": ")" << (dir / "out").string()
        << R"(", "seed": 3, "workers": 2, "stages": "serialize",)"
        << R"( "filter": {"min_rows": 32}})";
  }
  PipelineConfig cfg = PipelineConfig::from_json_file(good.string());
  CHECK(cfg.seed == 3);
  CHECK(cfg.stages == StageDepth::Serialize);
  CHECK(cfg.filter.min_rows == 32);

  fs::path unknown = dir / "unknown.json";
  {
    std::ofstream out(unknown, std::ios::trunc);
    out << R"({"inputs": ["x"], "output_dir": "y", "surprise": 1})";
  }
  CHECK_THROWS_AS(PipelineConfig::from_json_file(unknown.string()), ConfigError);

  fs::path bad_filter = dir / "bad_filter.json";
  {
    std::ofstream out(bad_filter, std::ios::trunc);
    out << R"({"inputs": ["x"], "output_dir": "y", "filter": {"min_rows": 100, "max_rows": 5}})";
  }
  CHECK_THROWS_AS(PipelineConfig::from_json_file(bad_filter.string()), ConfigError);
  CHECK_THROWS_AS(PipelineConfig::from_json_file((dir / "absent.json").string()),
                  ConfigError);
}

TEST_CASE("manifest report is deterministic and reloadable") {
  fs::path in = fresh_dir("pl_mani_in");
  testing::write_csv(testing::make_clean_table(9, 90), (in / "t.csv").string());
  fs::path out = fresh_dir("pl_mani_out");
  CorpusManifest manifest = run_pipeline(base_config(in, out));

  CorpusManifest reloaded = CorpusManifest::from_json_file((out / "manifest.json").string());
  CHECK(reloaded.to_json_text() == manifest.to_json_text());
  CHECK(reloaded.tables_accepted == manifest.tables_accepted);
  CHECK(corpus_stats_text(reloaded) == corpus_stats_text(manifest));

  // Histogram totals equal the accepted-table count.
  uint64_t total = 0;
  for (uint64_t c : manifest.histograms.at("rows_per_table").counts) total += c;
  CHECK(total == manifest.tables_accepted);
}

TEST_CASE("input expansion: globs, directories, files") {
  fs::path dir = fresh_dir("pl_glob");
  std::ofstream(dir / "a.csv") << "x\n1\n";
  std::ofstream(dir / "b.csv") << "x\n2\n";
  std::ofstream(dir / "c.txt") << "nope";

  auto by_glob = expand_inputs({(dir / "*.csv").string()});
  CHECK(by_glob.size() == 2);
  auto by_dir = expand_inputs({dir.string()});
  CHECK(by_dir.size() == 3);
  auto dedup = expand_inputs({(dir / "a.csv").string(), (dir / "*.csv").string()});
  CHECK(dedup.size() == 2);
  CHECK(std::is_sorted(by_dir.begin(), by_dir.end()));
}
