#include "tabtrawl/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "tabtrawl/rng.hpp"

namespace tabtrawl {

namespace {

constexpr size_t kMaxLabelChars = 256;

bool is_numeric_type(CellType t) { return t == CellType::Int || t == CellType::Float; }

bool is_temporal_type(CellType t) { return t == CellType::Date || t == CellType::Timestamp; }

bool column_has_temporal(const std::vector<CellValue>& cells) {
  return std::any_of(cells.begin(), cells.end(),
                     [](const CellValue& v) { return is_temporal_type(cell_type(v)); });
}

}  // namespace

std::vector<size_t> candidate_targets(const TableArtifact& t) {
  std::vector<size_t> out;
  const size_t rows = t.n_rows();
  for (size_t c = 0; c < t.n_cols(); ++c) {
    const ColumnMeta meta = make_column_meta(t.headers[c].name, t.columns[c]);
    if (meta.is_unnamed) continue;
    if (is_temporal_type(meta.declared_type) || column_has_temporal(t.columns[c])) continue;
    if (meta.distinct_count <= 1) continue;  // constant (or all-null)
    size_t non_null = 0;
    bool too_long = false;
    for (const CellValue& v : t.columns[c]) {
      if (cell_type(v) == CellType::Null) continue;
      ++non_null;
      if (render_cell(v).size() > kMaxLabelChars) {
        too_long = true;
        break;
      }
    }
    if (too_long || non_null == 0) continue;
    // All-distinct columns are identifier-like unless numeric.
    if (!is_numeric_type(meta.declared_type) && meta.distinct_count == non_null &&
        non_null == rows)
      continue;
    out.push_back(c);
  }
  if (out.empty()) throw NoCandidates("no usable target columns");
  return out;
}

std::pair<size_t, TaskKind> choose_target(const TableArtifact& t,
                                          const std::vector<size_t>& candidates,
                                          uint64_t seed) {
  if (candidates.empty()) throw NoCandidates("empty candidate list");
  std::vector<size_t> categorical;
  std::vector<size_t> continuous;
  for (size_t c : candidates) {
    CellType ty = make_column_meta(t.headers[c].name, t.columns[c]).declared_type;
    (is_numeric_type(ty) ? continuous : categorical).push_back(c);
  }
  SplitMix64 rng(seed);
  const std::vector<size_t>* pool = nullptr;
  if (categorical.empty()) {
    pool = &continuous;
  } else if (continuous.empty()) {
    pool = &categorical;
  } else {
    pool = rng.next_double() < 0.9 ? &categorical : &continuous;
  }
  size_t col = (*pool)[rng.next_below(pool->size())];
  TaskKind kind = (pool == &continuous) ? TaskKind::BinnedContinuous : TaskKind::Categorical;
  return {col, kind};
}

QuantileBins quantile_bins(std::vector<double> values, int n_bins) {
  if (n_bins < 2) throw std::invalid_argument("n_bins must be at least 2");
  std::erase_if(values, [](double v) { return !std::isfinite(v); });
  std::sort(values.begin(), values.end());
  size_t distinct = 0;
  for (size_t i = 0; i < values.size(); ++i)
    if (i == 0 || values[i] != values[i - 1]) ++distinct;
  if (distinct < static_cast<size_t>(n_bins))
    throw DegenerateDistribution("fewer distinct values than bins");

  QuantileBins out;
  const size_t n = values.size();
  for (int i = 1; i < n_bins; ++i) {
    // Nearest-rank quantile: the ceil(n*i/n_bins)-th order statistic.
    size_t rank = (n * static_cast<size_t>(i) + static_cast<size_t>(n_bins) - 1) /
                  static_cast<size_t>(n_bins);
    out.boundaries.push_back(values[rank - 1]);
  }
  for (size_t i = 1; i < out.boundaries.size(); ++i)
    if (out.boundaries[i] <= out.boundaries[i - 1])
      throw DegenerateDistribution("equal adjacent boundaries");

  out.labels.push_back("less than " + format_double(out.boundaries.front()));
  for (size_t i = 0; i + 1 < out.boundaries.size(); ++i)
    out.labels.push_back("between " + format_double(out.boundaries[i]) + " and " +
                         format_double(out.boundaries[i + 1]));
  out.labels.push_back("greater than " + format_double(out.boundaries.back()));
  return out;
}

size_t bin_value(double v, const std::vector<double>& boundaries) {
  // Count of boundaries strictly below v; boundary values land in the lower bin.
  return static_cast<size_t>(
      std::lower_bound(boundaries.begin(), boundaries.end(), v) - boundaries.begin());
}

std::vector<double> numeric_values(const TableArtifact& t, size_t col) {
  std::vector<double> out;
  for (const CellValue& v : t.columns[col]) {
    if (cell_type(v) == CellType::Int)
      out.push_back(static_cast<double>(std::get<int64_t>(v)));
    else if (cell_type(v) == CellType::Float)
      out.push_back(std::get<double>(v));
  }
  return out;
}

PredictionTask build_training_task(const TableArtifact& t, uint64_t seed) {
  auto candidates = candidate_targets(t);
  auto [target, kind] = choose_target(t, candidates, seed);

  PredictionTask task;
  task.table_key = t.content_key;
  task.target_col = target;
  task.kind = kind;
  for (size_t c = 0; c < t.n_cols(); ++c)
    if (c != target) task.feature_cols.push_back(c);

  if (kind == TaskKind::BinnedContinuous) {
    SplitMix64 rng(mix_seed(seed, "bins"));
    int n_bins = 3 + static_cast<int>(rng.next_below(6));  // uniform over [3,8]
    QuantileBins bins = quantile_bins(numeric_values(t, target), n_bins);
    task.bin_boundaries = std::move(bins.boundaries);
    task.label_set = std::move(bins.labels);
  } else {
    std::set<std::string> seen;
    for (const CellValue& v : t.columns[target]) {
      if (cell_type(v) == CellType::Null) continue;
      std::string label = render_cell(v);
      if (seen.insert(label).second) task.label_set.push_back(std::move(label));
    }
  }
  return task;
}

std::string row_label(const TableArtifact& t, const PredictionTask& task, size_t row) {
  const CellValue& v = t.columns[task.target_col][row];
  if (cell_type(v) == CellType::Null) return {};
  if (task.kind == TaskKind::Categorical) return render_cell(v);
  double x;
  if (cell_type(v) == CellType::Int)
    x = static_cast<double>(std::get<int64_t>(v));
  else if (cell_type(v) == CellType::Float)
    x = std::get<double>(v);
  else
    return {};
  return task.label_set[bin_value(x, task.bin_boundaries)];
}

}  // namespace tabtrawl
