#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tabtrawl {

struct UnknownId : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Reversible tokenizer with atomic marker tokens. Id layout:
//   0            pad
//   1            "||"
//   2            "<|endinput|>"
//   3            "<|endcompletion|>"
//   4..259       raw bytes (fallback)
//   260..        vocabulary pieces
// Text is segmented into marker tokens, alphanumeric runs, whitespace runs
// and single punctuation characters; pieces found in the vocabulary become
// one id, everything else falls back to bytes, so decode(encode(s)) == s
// for any UTF-8 input. Markers are matched first and never split or merged.
//
// The default build carries a small built-in word list. An external
// vocabulary can be loaded from JSON, either {"words": [...]} for plain
// word lookup or {"vocab": [...], "merges": ["a b", ...]} for byte-level
// merge encoding, which gives realistic token counts for evaluation
// feasibility checks.
class Tokenizer {
 public:
  static constexpr uint32_t kPadId = 0;
  static constexpr uint32_t kChoiceSepId = 1;
  static constexpr uint32_t kEndInputId = 2;
  static constexpr uint32_t kEndCompletionId = 3;
  static constexpr uint32_t kByteBase = 4;
  static constexpr uint32_t kVocabBase = 260;

  static Tokenizer bundled();
  static Tokenizer from_vocab_file(const std::string& path);

  std::vector<uint32_t> encode(std::string_view text) const;
  std::string decode(std::span<const uint32_t> ids) const;

  size_t vocab_size() const { return kVocabBase + pieces_.size(); }

 private:
  Tokenizer() = default;

  void add_piece(std::string piece);
  void encode_piece(std::string_view piece, std::vector<uint32_t>& out) const;

  std::vector<std::string> pieces_;                 // id - kVocabBase -> piece
  std::map<std::string, uint32_t, std::less<>> piece_ids_;
  std::map<std::pair<std::string, std::string>, uint32_t> merge_ranks_;
  bool use_merges_ = false;
};

}  // namespace tabtrawl
