#include "tabtrawl/eval.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>

#include <boost/math/special_functions/beta.hpp>
#include <nlohmann/json.hpp>
#include <yaml-cpp/yaml.h>

#include "tabtrawl/rng.hpp"

namespace tabtrawl {

namespace fs = std::filesystem;

std::pair<double, double> clopper_pearson(uint64_t n, uint64_t successes, double confidence) {
  if (n == 0) throw EmptyRecords("interval over zero records");
  if (successes > n) throw std::invalid_argument("successes > n");
  const double alpha = 1.0 - confidence;
  const auto s = static_cast<double>(successes);
  const auto nn = static_cast<double>(n);
  double lo = 0.0;
  double hi = 1.0;
  if (successes > 0) lo = boost::math::ibeta_inv(s, nn - s + 1.0, alpha / 2.0);
  if (successes < n) hi = boost::math::ibeta_inv(s + 1.0, nn - s, 1.0 - alpha / 2.0);
  return {lo, hi};
}

ScoreResult score(std::span<const EvalRecord> records) {
  if (records.empty()) throw EmptyRecords("no evaluation records");
  ScoreResult out;
  out.n = records.size();
  for (const EvalRecord& r : records)
    if (r.exact_match) ++out.successes;
  out.accuracy = static_cast<double>(out.successes) / static_cast<double>(out.n);
  std::tie(out.ci_low, out.ci_high) = clopper_pearson(out.n, out.successes);
  return out;
}

double random_baseline(const PredictionTask& task) {
  if (task.label_set.empty()) throw std::invalid_argument("empty label set");
  return 1.0 / static_cast<double>(task.label_set.size());
}

namespace {

int first_reach(std::span<const CurvePoint> curve, double alpha, std::string_view which) {
  std::vector<CurvePoint> sorted(curve.begin(), curve.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const CurvePoint& a, const CurvePoint& b) { return a.k < b.k; });
  for (const CurvePoint& p : sorted)
    if (p.accuracy >= alpha) return p.k;
  throw LevelNotReached(std::string(which) + " never reaches level " + format_double(alpha));
}

}  // namespace

double relative_sample_efficiency(std::span<const CurvePoint> f, std::span<const CurvePoint> g,
                                  double alpha) {
  int nf = first_reach(f, alpha, "first curve");
  int ng = first_reach(g, alpha, "second curve");
  if (nf == ng) return 1.0;
  if (nf == 0) return std::numeric_limits<double>::infinity();
  return static_cast<double>(ng) / static_cast<double>(nf);
}

uint64_t trial_shot_seed(const EvalTask& task, int trial) {
  return mix_seed(task.seed, static_cast<uint64_t>(trial) + 0x7152u);
}

KShotPrompt build_kshot_prompt(const EvalTask& task, int k, size_t query_row,
                               uint64_t shot_seed) {
  if (k < 0) throw std::invalid_argument("negative shot count");
  if (static_cast<size_t>(k) > task.train_rows.size())
    throw InsufficientShots("need " + std::to_string(k) + " shots, train split has " +
                            std::to_string(task.train_rows.size()));
  KShotPrompt out;
  std::vector<SerializedExample> shots;
  for (size_t pick : sample_prefix(task.train_rows.size(), static_cast<size_t>(k), shot_seed)) {
    size_t row = task.train_rows[pick];
    out.shot_rows.push_back(row);
    shots.push_back(serialize_row(task.table, task.task, row, true));
  }
  SerializedExample query = serialize_row(task.table, task.task, query_row, false);
  out.prompt = concat_shots(shots, query);
  std::string answer = row_label(task.table, task.task, query_row);
  if (answer.empty()) throw MissingTarget("query row has no target label");
  out.gold = answer + std::string(kEndCompletion);
  return out;
}

bool feasible(const EvalTask& task, int k, const Tokenizer& tok, uint32_t l_max,
              int n_trials) {
  if (static_cast<size_t>(k) > task.train_rows.size()) return false;
  for (int trial = 0; trial < std::max(1, n_trials); ++trial) {
    uint64_t seed = trial_shot_seed(task, trial);
    for (size_t row : task.test_rows) {
      KShotPrompt p = build_kshot_prompt(task, k, row, seed);
      if (tok.encode(p.prompt + p.gold).size() > l_max) return false;
    }
    if (k == 0) break;  // no shot variance at k = 0
  }
  return true;
}

TrialOutcome trial_protocol(const EvalTask& task, int k, const CompletionLookup& completions,
                            int n_trials) {
  if (n_trials <= 0) throw std::invalid_argument("n_trials must be positive");
  TrialOutcome out;
  std::vector<EvalRecord> all;
  for (int trial = 0; trial < n_trials; ++trial) {
    uint64_t seed = trial_shot_seed(task, trial);
    std::vector<EvalRecord> batch;
    for (size_t row : task.test_rows) {
      KShotPrompt p = build_kshot_prompt(task, k, row, seed);
      EvalRecord rec;
      rec.prompt = std::move(p.prompt);
      rec.gold = std::move(p.gold);
      rec.k = k;
      rec.trial = trial;
      rec.row = row;
      if (auto text = completions(k, trial, row)) {
        rec.produced = *text;
      } else {
        ++out.missing_completions;
      }
      rec.exact_match = rec.produced == rec.gold;
      batch.push_back(std::move(rec));
    }
    out.per_trial.push_back(score(batch).accuracy);
    all.insert(all.end(), std::make_move_iterator(batch.begin()),
               std::make_move_iterator(batch.end()));
  }
  ScoreResult pooled = score(all);
  out.ci_low = pooled.ci_low;
  out.ci_high = pooled.ci_high;
  out.n = pooled.n;
  out.successes = pooled.successes;
  double sum = 0.0;
  for (double a : out.per_trial) sum += a;
  out.mean_accuracy = sum / static_cast<double>(out.per_trial.size());
  return out;
}

namespace {

bool row_has_usable_target(const TableArtifact& t, size_t target, bool regression, size_t row) {
  const CellValue& v = t.columns[target][row];
  if (cell_type(v) == CellType::Null) return false;
  if (!regression) return true;
  return cell_type(v) == CellType::Int || cell_type(v) == CellType::Float;
}

}  // namespace

EvalTask make_eval_task(TableArtifact table, const std::string& name,
                        const std::string& benchmark, const std::string& target_column,
                        bool regression, const SuiteOptions& opts) {
  EvalTask task;
  task.name = name;
  task.benchmark = benchmark;
  task.seed = mix_seed(opts.seed, name);

  size_t target = table.n_cols();
  for (size_t c = 0; c < table.n_cols(); ++c)
    if (table.headers[c].name == target_column) target = c;
  if (target == table.n_cols())
    throw std::invalid_argument("target column '" + target_column + "' not in " + name);

  std::vector<size_t> usable;
  for (size_t r = 0; r < table.n_rows(); ++r)
    if (row_has_usable_target(table, target, regression, r)) usable.push_back(r);
  if (usable.size() < 2)
    throw std::invalid_argument("task " + name + " has fewer than two usable rows");

  // Test rows are drawn once; everything else becomes the shot pool.
  std::vector<size_t> perm = sample_prefix(usable.size(), usable.size(),
                                           mix_seed(task.seed, "split"));
  size_t n_test = std::min(opts.max_test_examples, usable.size() / 2);
  n_test = std::max<size_t>(n_test, 1);
  for (size_t i = 0; i < perm.size(); ++i)
    (i < n_test ? task.test_rows : task.train_rows).push_back(usable[perm[i]]);
  std::sort(task.test_rows.begin(), task.test_rows.end());
  std::sort(task.train_rows.begin(), task.train_rows.end());

  task.task.table_key = table.content_key;
  task.task.target_col = target;
  for (size_t c = 0; c < table.n_cols(); ++c)
    if (c != target) task.task.feature_cols.push_back(c);

  if (regression) {
    task.task.kind = TaskKind::BinnedContinuous;
    std::vector<double> train_values;
    for (size_t r : task.train_rows) {
      const CellValue& v = table.columns[target][r];
      train_values.push_back(cell_type(v) == CellType::Int
                                 ? static_cast<double>(std::get<int64_t>(v))
                                 : std::get<double>(v));
    }
    QuantileBins bins = quantile_bins(std::move(train_values), 4);
    task.task.bin_boundaries = std::move(bins.boundaries);
    task.task.label_set = std::move(bins.labels);
  } else {
    task.task.kind = TaskKind::Categorical;
    // Label order: first appearance over the train split in row order.
    std::set<std::string> seen;
    for (size_t r : task.train_rows) {
      std::string label = render_cell(table.columns[target][r]);
      if (seen.insert(label).second) task.task.label_set.push_back(std::move(label));
    }
    if (task.task.label_set.empty())
      throw std::invalid_argument("task " + name + " has no train labels");
  }
  task.table = std::move(table);
  return task;
}

std::vector<EvalTask> load_suite(const std::string& dir, const SuiteOptions& opts) {
  if (!fs::is_directory(dir)) throw UnreadableFile("suite directory not found: " + dir);
  struct Meta {
    std::string target;
    bool regression = false;
    std::string benchmark;
    size_t max_test;
  };
  auto parse_json_meta = [&](const fs::path& p, Meta& m) {
    std::ifstream in(p);
    nlohmann::json doc = nlohmann::json::parse(in);
    m.target = doc.at("target").get<std::string>();
    m.regression = doc.value("task_type", "categorical") == std::string("regression");
    m.benchmark = doc.value("benchmark", "default");
    m.max_test = doc.value("max_test_examples", opts.max_test_examples);
  };
  auto parse_yaml_meta = [&](const fs::path& p, Meta& m) {
    YAML::Node doc = YAML::LoadFile(p.string());
    m.target = doc["target"].as<std::string>();
    m.regression =
        doc["task_type"] && doc["task_type"].as<std::string>() == "regression";
    m.benchmark = doc["benchmark"] ? doc["benchmark"].as<std::string>() : "default";
    m.max_test = doc["max_test_examples"] ? doc["max_test_examples"].as<size_t>()
                                          : opts.max_test_examples;
  };

  std::vector<fs::path> csvs;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".csv")
      csvs.push_back(entry.path());
  std::sort(csvs.begin(), csvs.end());

  std::vector<EvalTask> tasks;
  for (const fs::path& csv : csvs) {
    Meta meta;
    meta.max_test = opts.max_test_examples;
    fs::path base = csv;
    bool found = false;
    for (const char* ext : {".json", ".yaml", ".yml"}) {
      fs::path candidate = base.replace_extension(ext);
      if (fs::exists(candidate)) {
        if (std::string_view(ext) == ".json")
          parse_json_meta(candidate, meta);
        else
          parse_yaml_meta(candidate, meta);
        found = true;
        break;
      }
    }
    if (!found)
      throw UnreadableFile("no metadata (.json/.yaml/.yml) next to " + csv.string());
    SuiteOptions task_opts = opts;
    task_opts.max_test_examples = meta.max_test;
    TableArtifact table = ingest_table(csv.string(), TableFormat::Csv);
    tasks.push_back(make_eval_task(std::move(table), csv.stem().string(), meta.benchmark,
                                   meta.target, meta.regression, task_opts));
  }
  return tasks;
}

}  // namespace tabtrawl
