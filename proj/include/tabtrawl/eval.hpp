#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tabtrawl/serialize.hpp"
#include "tabtrawl/table.hpp"
#include "tabtrawl/tasks.hpp"
#include "tabtrawl/tokenizer.hpp"

namespace tabtrawl {

struct EmptyRecords : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InsufficientShots : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct LevelNotReached : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A benchmark table with its prediction target and frozen splits. Test rows
// are drawn once per task (at most 128 by default); shot rows are re-drawn
// from the train split on every trial. For regression sources the target is
// discretized into train-split quartiles.
struct EvalTask {
  std::string name;
  std::string benchmark;
  TableArtifact table;
  PredictionTask task;
  std::vector<size_t> train_rows;
  std::vector<size_t> test_rows;
  uint64_t seed = 0;  // derived from (suite seed, task name)
};

struct EvalRecord {
  std::string prompt;
  std::string gold;      // answer text plus the end-of-completion marker
  std::string produced;
  bool exact_match = false;  // byte equality, terminator included
  int k = 0;
  int trial = 0;
  uint64_t row = 0;
};

struct ScoreResult {
  double accuracy = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
  uint64_t n = 0;
  uint64_t successes = 0;
};

// Exact (Clopper-Pearson) two-sided binomial interval.
std::pair<double, double> clopper_pearson(uint64_t n, uint64_t successes,
                                          double confidence = 0.95);

ScoreResult score(std::span<const EvalRecord> records);  // throws EmptyRecords

double random_baseline(const PredictionTask& task);  // 1 / |label_set|

struct CurvePoint {
  int k = 0;
  double accuracy = 0.0;
};

// N(g, alpha) / N(f, alpha), where N is the smallest shot count on the grid
// whose accuracy reaches alpha (no interpolation). Identical first-reach
// points give 1; throws LevelNotReached when either curve stays below alpha.
double relative_sample_efficiency(std::span<const CurvePoint> f,
                                  std::span<const CurvePoint> g, double alpha);

struct KShotPrompt {
  std::string prompt;
  std::string gold;
  std::vector<size_t> shot_rows;
};

uint64_t trial_shot_seed(const EvalTask& task, int trial);

// Serializes k shots (sampled without replacement from the train split using
// `shot_seed`) followed by the unanswered query row. Shots for smaller k are
// a prefix of the shots for larger k under the same seed.
KShotPrompt build_kshot_prompt(const EvalTask& task, int k, size_t query_row,
                               uint64_t shot_seed);

// True when every (trial, test row) prompt plus its gold completion fits in
// l_max tokens.
bool feasible(const EvalTask& task, int k, const Tokenizer& tok, uint32_t l_max,
              int n_trials = 10);

// Supplies the model output for (k, trial, row); nullopt counts as a miss.
using CompletionLookup =
    std::function<std::optional<std::string>(int k, int trial, uint64_t row)>;

struct TrialOutcome {
  double mean_accuracy = 0.0;
  double ci_low = 0.0;   // pooled over all trials
  double ci_high = 1.0;
  uint64_t n = 0;
  uint64_t successes = 0;
  uint64_t missing_completions = 0;
  std::vector<double> per_trial;
};

// Runs n_trials independent shot draws against externally produced
// completions and aggregates exact-match accuracy.
TrialOutcome trial_protocol(const EvalTask& task, int k, const CompletionLookup& completions,
                            int n_trials = 10);

struct SuiteOptions {
  uint64_t seed = 0;
  size_t max_test_examples = 128;
};

// Loads benchmark tasks from a directory of <name>.csv files, each with
// <name>.json / .yaml / .yml metadata ("target", "task_type", optional
// "benchmark" and "max_test_examples").
std::vector<EvalTask> load_suite(const std::string& dir, const SuiteOptions& opts);

// Builds one task from an already-ingested table.
EvalTask make_eval_task(TableArtifact table, const std::string& name,
                        const std::string& benchmark, const std::string& target_column,
                        bool regression, const SuiteOptions& opts);

}  // namespace tabtrawl
