#include "tabtrawl/pack.hpp"

#include <algorithm>
#include <numeric>

#include "tabtrawl/rng.hpp"

namespace tabtrawl {

namespace {

void validate_row_markers(const TokenizedRow& row, const std::string& table_key) {
  size_t n_in = 0;
  size_t n_done = 0;
  size_t in_pos = 0;
  size_t done_pos = 0;
  for (size_t i = 0; i < row.ids.size(); ++i) {
    if (row.ids[i] == Tokenizer::kEndInputId) {
      ++n_in;
      in_pos = i;
    } else if (row.ids[i] == Tokenizer::kEndCompletionId) {
      ++n_done;
      done_pos = i;
    }
  }
  if (n_in != 1 || n_done != 1 || done_pos <= in_pos)
    throw MalformedRow("row " + std::to_string(row.row_index) + " of table " + table_key +
                       " must contain one end-of-input marker followed by one "
                       "end-of-completion marker");
}

}  // namespace

std::vector<size_t> pack_order(size_t n_groups, uint64_t seed) {
  std::vector<size_t> order(n_groups);
  std::iota(order.begin(), order.end(), size_t{0});
  SplitMix64 rng(mix_seed(seed, "pack-order"));
  shuffle(order, rng);
  return order;
}

PackResult pack_rows(const std::vector<RowGroup>& groups, const PackOptions& opt) {
  if (opt.l_max == 0) throw std::invalid_argument("l_max must be positive");
  PackResult out;

  PackedSequence cur;
  bool segment_open = false;

  auto flush = [&] {
    if (cur.token_ids.empty()) return;
    cur.pad_start = static_cast<uint32_t>(cur.token_ids.size());
    cur.token_ids.resize(opt.l_max, Tokenizer::kPadId);
    cur.loss_spans = loss_spans(cur);
    out.stats.pad_tokens += opt.l_max - cur.pad_start;
    out.sequences.push_back(std::move(cur));
    cur = PackedSequence{};
    segment_open = false;
  };

  for (size_t gi : pack_order(groups.size(), opt.seed)) {
    const RowGroup& group = groups[gi];
    segment_open = false;
    for (const TokenizedRow& row : group.rows) {
      if (row.ids.size() > opt.l_max) {
        ++out.stats.rows_too_long;
        continue;
      }
      validate_row_markers(row, group.table_key);
      if (cur.token_ids.size() + row.ids.size() > opt.l_max) {
        flush();
      }
      if (!segment_open || opt.per_row_segments) {
        cur.segments.push_back(Segment{static_cast<uint32_t>(cur.token_ids.size()),
                                       static_cast<uint32_t>(cur.token_ids.size()),
                                       group.table_key});
        segment_open = true;
      }
      cur.token_ids.insert(cur.token_ids.end(), row.ids.begin(), row.ids.end());
      cur.segments.back().end = static_cast<uint32_t>(cur.token_ids.size());
      ++out.stats.rows_packed;
    }
  }
  flush();

  out.stats.total_tokens = static_cast<uint64_t>(out.sequences.size()) * opt.l_max;
  out.stats.padding_fraction =
      out.stats.total_tokens == 0
          ? 0.0
          : static_cast<double>(out.stats.pad_tokens) / static_cast<double>(out.stats.total_tokens);
  out.stats.mean_rows_per_sequence =
      out.sequences.empty()
          ? 0.0
          : static_cast<double>(out.stats.rows_packed) / static_cast<double>(out.sequences.size());
  return out;
}

std::vector<LossSpan> loss_spans(const PackedSequence& seq) {
  std::vector<LossSpan> spans;
  for (const Segment& seg : seq.segments) {
    bool pending = false;
    uint32_t pending_pos = 0;
    for (uint32_t i = seg.start; i < seg.end; ++i) {
      uint32_t id = seq.token_ids[i];
      if (id == Tokenizer::kEndInputId) {
        if (pending) throw MalformedRow("nested end-of-input marker at " + std::to_string(i));
        pending = true;
        pending_pos = i;
      } else if (id == Tokenizer::kEndCompletionId) {
        if (!pending)
          throw MalformedRow("end-of-completion without end-of-input at " + std::to_string(i));
        spans.push_back(LossSpan{pending_pos + 1, i + 1});
        pending = false;
      }
    }
    if (pending)
      throw MalformedRow("unterminated row in segment starting at " +
                         std::to_string(seg.start));
  }
  return spans;
}

std::vector<uint8_t> dense_mask(const PackedSequence& seq) {
  const size_t n = seq.token_ids.size();
  if (n > 512)
    throw MaskTooLarge("dense mask limited to 512 tokens, got " + std::to_string(n));
  // Map every position to its segment; pad and gaps stay unassigned.
  std::vector<int32_t> owner(n, -1);
  for (size_t s = 0; s < seq.segments.size(); ++s)
    for (uint32_t i = seq.segments[s].start; i < seq.segments[s].end; ++i)
      owner[i] = static_cast<int32_t>(s);
  std::vector<uint8_t> mask(n * n, 0);
  for (size_t i = 0; i < n; ++i) {
    if (owner[i] < 0) continue;
    for (size_t j = 0; j <= i; ++j)
      if (owner[j] == owner[i]) mask[i * n + j] = 1;
  }
  return mask;
}

}  // namespace tabtrawl
