#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "tabtrawl/tokenizer.hpp"

namespace tabtrawl {

// Half-open token range holding consecutive rows of one table. Attention is
// causal within a segment and blocked across segments, giving the
// block-lower-triangular mask; the segment list is the mask's wire form.
struct Segment {
  uint32_t start = 0;
  uint32_t end = 0;
  std::string table_key;
  bool operator==(const Segment&) const = default;
};

// Half-open token range covered by the training loss: the tokens after a
// row's end-of-input marker up to and including its end-of-completion
// marker.
struct LossSpan {
  uint32_t start = 0;
  uint32_t end = 0;
  bool operator==(const LossSpan&) const = default;
};

struct PackedSequence {
  std::vector<uint32_t> token_ids;  // always l_max long; pad ids after pad_start
  std::vector<Segment> segments;    // disjoint, ordered, covering [0, pad_start)
  std::vector<LossSpan> loss_spans;
  uint32_t pad_start = 0;
};

struct TokenizedRow {
  uint64_t row_index = 0;
  std::vector<uint32_t> ids;
};

struct RowGroup {
  std::string table_key;
  std::vector<TokenizedRow> rows;
};

struct PackOptions {
  uint32_t l_max = 8192;
  uint64_t seed = 0;
  // When set, every row becomes its own segment (plain per-sample causal
  // attention instead of row-causal attention).
  bool per_row_segments = false;
};

struct PackStats {
  uint64_t rows_packed = 0;
  uint64_t rows_too_long = 0;  // rows longer than l_max, dropped
  uint64_t pad_tokens = 0;
  uint64_t total_tokens = 0;  // sequences * l_max
  double padding_fraction = 0.0;
  double mean_rows_per_sequence = 0.0;
};

struct PackResult {
  std::vector<PackedSequence> sequences;
  PackStats stats;
};

struct MalformedRow : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MaskTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Greedy first-fit packing. Table groups are visited in an order shuffled by
// `seed`; each group's rows extend the current segment until a row would
// overflow l_max, at which point the sequence is padded and a fresh one is
// opened (long tables continue there as a new segment). Rows are never split.
PackResult pack_rows(const std::vector<RowGroup>& groups, const PackOptions& opt);

// Recomputes loss spans from the token stream: one span per marker pair
// inside each segment. Throws MalformedRow when markers are unbalanced.
std::vector<LossSpan> loss_spans(const PackedSequence& seq);

// Dense attention matrix (row-major, token count squared) for inspection and
// tests. attend(i,j) <=> j <= i and both positions share a segment; pad
// attends to and is attended by nothing. Refuses sequences longer than 512.
std::vector<uint8_t> dense_mask(const PackedSequence& seq);

// The table-shuffle order used by pack_rows for a given seed.
std::vector<size_t> pack_order(size_t n_groups, uint64_t seed);

}  // namespace tabtrawl
