// Few-shot evaluation driver: prompt emission, exact-match scoring against
// externally produced completions, and accuracy-curve reports.
// Exit codes: 0 ok, 2 config error, 3 I/O error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tabtrawl/eval.hpp"
#include "tabtrawl/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tabtrawl;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct CommonOpts {
  std::string suite_dir;
  std::vector<int> shots = {0, 1, 2, 4, 8, 16, 32};
  int trials = 10;
  uint64_t seed = 0;
  uint32_t l_max = 8192;
  size_t max_test = 128;
  std::string tokenizer_path;
};

Tokenizer make_tokenizer(const CommonOpts& opts) {
  return opts.tokenizer_path.empty() ? Tokenizer::bundled()
                                     : Tokenizer::from_vocab_file(opts.tokenizer_path);
}

std::vector<EvalTask> load_tasks(const CommonOpts& opts) {
  SuiteOptions so;
  so.seed = opts.seed;
  so.max_test_examples = opts.max_test;
  return load_suite(opts.suite_dir, so);
}

int cmd_prompts(const CommonOpts& opts, const std::string& out_path) {
  Tokenizer tok = make_tokenizer(opts);
  std::ofstream out(out_path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + out_path);
  uint64_t emitted = 0;
  uint64_t skipped_infeasible = 0;
  for (const EvalTask& task : load_tasks(opts)) {
    for (int k : opts.shots) {
      if (!feasible(task, k, tok, opts.l_max, opts.trials)) {
        ++skipped_infeasible;
        continue;
      }
      for (int trial = 0; trial < opts.trials; ++trial) {
        uint64_t seed = trial_shot_seed(task, trial);
        for (size_t row : task.test_rows) {
          KShotPrompt p = build_kshot_prompt(task, k, row, seed);
          json line;
          line["task"] = task.name;
          line["benchmark"] = task.benchmark;
          line["k"] = k;
          line["trial"] = trial;
          line["row"] = row;
          line["prompt"] = p.prompt;
          line["gold"] = p.gold;
          out << line.dump() << '\n';
          ++emitted;
        }
      }
    }
  }
  std::cout << "wrote " << emitted << " prompts to " << out_path << " ("
            << skipped_infeasible << " infeasible task/shot pairs skipped)\n";
  return 0;
}

// Completions keyed by (task, k, trial, row).
using CompletionMap = std::map<std::tuple<std::string, int, int, uint64_t>, std::string>;

CompletionMap load_completions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open completions: " + path);
  CompletionMap map;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ConfigError("completions line " + std::to_string(line_no) + ": " + e.what());
    }
    map[{doc.at("task").get<std::string>(), doc.at("k").get<int>(),
         doc.at("trial").get<int>(), doc.at("row").get<uint64_t>()}] =
        doc.at("text").get<std::string>();
  }
  return map;
}

int cmd_score(const CommonOpts& opts, const std::string& completions_path,
              const std::string& out_path) {
  Tokenizer tok = make_tokenizer(opts);
  CompletionMap completions = load_completions(completions_path);
  std::vector<EvalTask> tasks = load_tasks(opts);

  json doc;
  doc["format"] = "eval-results/1";
  doc["seed"] = opts.seed;
  doc["l_max"] = opts.l_max;
  doc["trials"] = opts.trials;
  doc["shots"] = opts.shots;
  json benchmarks = json::object();

  for (const EvalTask& task : tasks) {
    json entry;
    entry["task"] = task.name;
    entry["n_classes"] = task.task.label_set.size();
    entry["random_baseline"] = random_baseline(task.task);
    entry["n_test"] = task.test_rows.size();
    json per_k = json::object();
    for (int k : opts.shots) {
      json cell;
      if (!feasible(task, k, tok, opts.l_max, opts.trials)) {
        cell["feasible"] = false;  // reported as NA in text output
      } else {
        auto lookup = [&](int kk, int trial, uint64_t row) -> std::optional<std::string> {
          auto it = completions.find({task.name, kk, trial, row});
          if (it == completions.end()) return std::nullopt;
          return it->second;
        };
        TrialOutcome outcome = trial_protocol(task, k, lookup, opts.trials);
        cell["feasible"] = true;
        cell["accuracy"] = outcome.mean_accuracy;
        cell["ci_low"] = outcome.ci_low;
        cell["ci_high"] = outcome.ci_high;
        cell["n"] = outcome.n;
        cell["successes"] = outcome.successes;
        cell["missing_completions"] = outcome.missing_completions;
        cell["per_trial"] = outcome.per_trial;
      }
      per_k[std::to_string(k)] = std::move(cell);
    }
    entry["shots"] = std::move(per_k);
    if (!benchmarks.contains(task.benchmark)) benchmarks[task.benchmark] = json::array();
    benchmarks[task.benchmark].push_back(std::move(entry));
  }
  doc["benchmarks"] = std::move(benchmarks);

  std::ofstream out(out_path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + out_path);
  out << doc.dump(2) << '\n';
  std::cout << "scored " << tasks.size() << " tasks -> " << out_path << "\n";
  return 0;
}

struct MeanCurve {
  std::vector<CurvePoint> points;
  size_t n_tasks = 0;
};

// Mean accuracy per shot count over tasks feasible for the whole shot range.
MeanCurve mean_curve(const json& results) {
  MeanCurve curve;
  std::vector<int> shots;
  for (const auto& k : results.at("shots")) shots.push_back(k.get<int>());
  std::map<int, double> sums;
  for (const auto& [bench, tasks] : results.at("benchmarks").items()) {
    for (const auto& task : tasks) {
      bool all_feasible = true;
      for (int k : shots)
        if (!task.at("shots").at(std::to_string(k)).value("feasible", false))
          all_feasible = false;
      if (!all_feasible) continue;
      ++curve.n_tasks;
      for (int k : shots)
        sums[k] += task.at("shots").at(std::to_string(k)).value("accuracy", 0.0);
    }
  }
  for (int k : shots)
    curve.points.push_back(
        {k, curve.n_tasks == 0 ? 0.0 : sums[k] / static_cast<double>(curve.n_tasks)});
  return curve;
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return json::parse(in);
}

int cmd_curves(const std::string& results_path, const std::string& baseline_path,
               double alpha) {
  json results = load_json(results_path);

  // Per-task table with the NA convention for infeasible shot counts.
  std::vector<int> shots;
  for (const auto& k : results.at("shots")) shots.push_back(k.get<int>());
  std::cout << "task";
  for (int k : shots) std::cout << "\tk=" << k;
  std::cout << "\trandom\n";
  for (const auto& [bench, tasks] : results.at("benchmarks").items()) {
    for (const auto& task : tasks) {
      std::cout << bench << "/" << task.at("task").get<std::string>();
      for (int k : shots) {
        const json& cell = task.at("shots").at(std::to_string(k));
        if (cell.value("feasible", false)) {
          char buf[16];
          std::snprintf(buf, sizeof buf, "%.4f", cell.value("accuracy", 0.0));
          std::cout << '\t' << buf;
        } else {
          std::cout << "\tNA";
        }
      }
      char buf[16];
      std::snprintf(buf, sizeof buf, "%.4f", task.value("random_baseline", 0.0));
      std::cout << '\t' << buf << "\n";
    }
  }

  MeanCurve main_curve = mean_curve(results);
  std::cout << "\nmean over " << main_curve.n_tasks << " fully-feasible tasks:\n";
  for (const CurvePoint& p : main_curve.points)
    std::cout << "  k=" << p.k << ": " << format_double(p.accuracy) << "\n";

  if (!baseline_path.empty()) {
    MeanCurve base_curve = mean_curve(load_json(baseline_path));
    try {
      double ratio = relative_sample_efficiency(main_curve.points, base_curve.points, alpha);
      std::cout << "\nrelative sample efficiency at level " << format_double(alpha) << ": "
                << format_double(ratio) << "\n";
    } catch (const LevelNotReached& e) {
      std::cout << "\nrelative sample efficiency at level " << format_double(alpha)
                << ": NA (" << e.what() << ")\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"few-shot evaluation toolkit"};
  app.require_subcommand(1);

  CommonOpts opts;
  auto add_common = [&](CLI::App* cmd, bool need_suite) {
    if (need_suite)
      cmd->add_option("--suite", opts.suite_dir, "benchmark suite directory")->required();
    cmd->add_option("--shots", opts.shots, "shot counts (default 0 1 2 4 8 16 32)");
    cmd->add_option("--trials", opts.trials, "trials per shot count (default 10)");
    cmd->add_option("--seed", opts.seed, "suite seed");
    cmd->add_option("--l-max", opts.l_max, "context window in tokens");
    cmd->add_option("--max-test", opts.max_test, "test rows per task cap (default 128)");
    cmd->add_option("--tokenizer", opts.tokenizer_path, "vocabulary file (JSON)");
  };

  std::string prompts_out;
  CLI::App* prompts = app.add_subcommand("prompts", "emit k-shot prompts as JSONL");
  add_common(prompts, true);
  prompts->add_option("--out", prompts_out, "output JSONL path")->required();

  std::string completions_path;
  std::string score_out;
  CLI::App* score_cmd =
      app.add_subcommand("score", "score external completions by exact match");
  add_common(score_cmd, true);
  score_cmd->add_option("--completions", completions_path, "completions JSONL")->required();
  score_cmd->add_option("--out", score_out, "results JSON path")->required();

  std::string results_path;
  std::string baseline_path;
  double alpha = 0.6;
  CLI::App* curves = app.add_subcommand("curves", "accuracy curves from a results file");
  curves->add_option("--results", results_path, "results JSON")->required();
  curves->add_option("--baseline", baseline_path, "second results JSON to compare against");
  curves->add_option("--alpha", alpha, "accuracy level for sample-efficiency ratio");

  CLI11_PARSE(app, argc, argv);

  try {
    if (prompts->parsed()) return cmd_prompts(opts, prompts_out);
    if (score_cmd->parsed()) return cmd_score(opts, completions_path, score_out);
    if (curves->parsed()) return cmd_curves(results_path, baseline_path, alpha);
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
