#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "tabtrawl/table.hpp"

namespace tabtrawl {

enum class TaskKind { Categorical, BinnedContinuous };

// A table plus the column chosen as prediction target. For continuous
// targets the label set names quantile intervals over bin_boundaries.
struct PredictionTask {
  std::string table_key;
  size_t target_col = 0;
  TaskKind kind = TaskKind::Categorical;
  std::vector<std::string> label_set;      // non-empty, deduplicated
  std::vector<double> bin_boundaries;      // ascending; empty for categorical
  std::vector<size_t> feature_cols;        // all non-target columns, table order
};

struct NoCandidates : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateDistribution : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Columns usable as prediction targets. Excluded: all-distinct non-numeric
// columns, "Unnamed:" columns, columns holding any date/time value, columns
// with a rendered value longer than 256 characters, constant columns.
// Excluded columns stay in the table as features. Throws NoCandidates when
// nothing qualifies.
std::vector<size_t> candidate_targets(const TableArtifact& t);

// Picks the target among candidates: when both categorical (text/bool) and
// continuous (int/float) candidates exist, a categorical one is chosen with
// probability 0.9, then uniformly within the kind. Deterministic in `seed`.
std::pair<size_t, TaskKind> choose_target(const TableArtifact& t,
                                          const std::vector<size_t>& candidates,
                                          uint64_t seed);

struct QuantileBins {
  std::vector<double> boundaries;       // n_bins - 1 ascending values
  std::vector<std::string> labels;      // "less than b", "between a and b", ...
};

// Nearest-rank quantile boundaries at ranks i/n_bins. Requires at least
// n_bins distinct finite values and strictly increasing boundaries; throws
// DegenerateDistribution otherwise.
QuantileBins quantile_bins(std::vector<double> values, int n_bins);

// Interval index for v over bins (-inf, b1], (b1, b2], ..., (b_last, inf).
// Values equal to a boundary fall into the lower bin.
size_t bin_value(double v, const std::vector<double>& boundaries);

// Full task construction for a filtered table: candidate selection, target
// choice, and label-set assembly (first-appearance order for categorical
// labels; 3-8 quantile bins drawn uniformly for continuous targets).
PredictionTask build_training_task(const TableArtifact& t, uint64_t seed);

// Numeric view of a column: int and float cells as doubles, everything else
// skipped.
std::vector<double> numeric_values(const TableArtifact& t, size_t col);

// Target label for one row, or empty when the target cell cannot be
// labeled (null, or non-numeric under a binned task).
std::string row_label(const TableArtifact& t, const PredictionTask& task, size_t row);

}  // namespace tabtrawl
