#include "tabtrawl/tokenizer.hpp"

#include <array>
#include <fstream>

#include <nlohmann/json.hpp>

#include "tabtrawl/serialize.hpp"

namespace tabtrawl {

namespace {

bool is_word_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
         c == '_';
}

bool is_space_char(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

constexpr std::array<std::string_view, 3> kMarkers = {
    // Longest first so greedy matching picks the full marker.
    "<|endcompletion|>", "<|endinput|>", "||"};

constexpr std::array<uint32_t, 3> kMarkerIds = {Tokenizer::kEndCompletionId,
                                                Tokenizer::kEndInputId,
                                                Tokenizer::kChoiceSepId};

// Built-in pieces: the grammar's template words, frequent function words and
// common single characters. Everything else costs one id per byte.
constexpr std::array<std::string_view, 92> kBundledPieces = {
    " ",    "\n",      ".",      ",",       ":",        "?",      "!",
    "'",    "-",       "Predict", "predict", "the",     "The",    "value",
    "of",   "What",    "what",   "is",      "nan",      "true",   "false",
    "less", "than",    "between", "greater", "and",     "a",      "an",
    "in",   "on",      "at",     "to",      "for",      "with",   "from",
    "by",   "as",      "it",     "this",    "that",     "these",  "those",
    "was",  "were",    "are",    "be",      "been",     "has",    "have",
    "had",  "not",     "no",     "yes",     "or",       "but",    "if",
    "then", "so",      "we",     "you",     "they",     "he",     "she",
    "his",  "her",     "their",  "our",     "its",      "all",    "any",
    "each", "more",    "most",   "other",   "some",     "such",   "only",
    "own",  "same",    "can",    "will",    "just",     "should", "now",
    "name", "city",    "year",   "type",    "count",    "total",  "price",
    "date"};

}  // namespace

void Tokenizer::add_piece(std::string piece) {
  if (piece_ids_.contains(piece)) return;
  piece_ids_.emplace(piece, static_cast<uint32_t>(kVocabBase + pieces_.size()));
  pieces_.push_back(std::move(piece));
}

Tokenizer Tokenizer::bundled() {
  Tokenizer t;
  for (std::string_view piece : kBundledPieces) t.add_piece(std::string(piece));
  return t;
}

Tokenizer Tokenizer::from_vocab_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open vocabulary file: " + path);
  nlohmann::json doc = nlohmann::json::parse(in);
  Tokenizer t;
  if (doc.contains("words")) {
    for (const auto& w : doc.at("words")) t.add_piece(w.get<std::string>());
    return t;
  }
  if (!doc.contains("vocab"))
    throw std::runtime_error("vocabulary file needs a \"words\" or \"vocab\" key");
  for (const auto& w : doc.at("vocab")) t.add_piece(w.get<std::string>());
  if (doc.contains("merges")) {
    t.use_merges_ = true;
    uint32_t rank = 0;
    for (const auto& line : doc.at("merges")) {
      std::string s = line.get<std::string>();
      size_t sep = s.find(' ');
      if (sep == std::string::npos || sep == 0 || sep + 1 >= s.size())
        throw std::runtime_error("bad merge entry: " + s);
      t.merge_ranks_.emplace(std::make_pair(s.substr(0, sep), s.substr(sep + 1)), rank++);
    }
  }
  return t;
}

void Tokenizer::encode_piece(std::string_view piece, std::vector<uint32_t>& out) const {
  if (auto it = piece_ids_.find(piece); it != piece_ids_.end()) {
    out.push_back(it->second);
    return;
  }
  if (!use_merges_) {
    for (unsigned char c : piece) out.push_back(kByteBase + c);
    return;
  }
  // Byte-level merge encoding: start from single bytes, repeatedly apply the
  // lowest-ranked adjacent merge.
  std::vector<std::string> units;
  units.reserve(piece.size());
  for (char c : piece) units.emplace_back(1, c);
  while (units.size() > 1) {
    uint32_t best_rank = UINT32_MAX;
    size_t best_pos = 0;
    for (size_t i = 0; i + 1 < units.size(); ++i) {
      auto it = merge_ranks_.find({units[i], units[i + 1]});
      if (it != merge_ranks_.end() && it->second < best_rank) {
        best_rank = it->second;
        best_pos = i;
      }
    }
    if (best_rank == UINT32_MAX) break;
    units[best_pos] += units[best_pos + 1];
    units.erase(units.begin() + static_cast<ptrdiff_t>(best_pos) + 1);
  }
  for (const std::string& unit : units) {
    if (auto it = piece_ids_.find(unit); it != piece_ids_.end()) {
      out.push_back(it->second);
    } else {
      for (unsigned char c : unit) out.push_back(kByteBase + c);
    }
  }
}

std::vector<uint32_t> Tokenizer::encode(std::string_view text) const {
  std::vector<uint32_t> out;
  size_t i = 0;
  const size_t n = text.size();
  while (i < n) {
    bool matched = false;
    for (size_t m = 0; m < kMarkers.size(); ++m) {
      if (text.compare(i, kMarkers[m].size(), kMarkers[m]) == 0) {
        out.push_back(kMarkerIds[m]);
        i += kMarkers[m].size();
        matched = true;
        break;
      }
    }
    if (matched) continue;
    size_t start = i;
    if (is_word_char(text[i])) {
      while (i < n && is_word_char(text[i])) ++i;
    } else if (is_space_char(text[i])) {
      while (i < n && is_space_char(text[i])) ++i;
      // A whitespace run may hide no markers ('<', '|' are not whitespace),
      // so taking the maximal run is safe.
    } else {
      ++i;  // single punctuation / non-ASCII lead byte
    }
    encode_piece(text.substr(start, i - start), out);
  }
  return out;
}

std::string Tokenizer::decode(std::span<const uint32_t> ids) const {
  std::string out;
  for (uint32_t id : ids) {
    if (id == kPadId) continue;
    if (id == kChoiceSepId) {
      out += kChoiceSep;
    } else if (id == kEndInputId) {
      out += kEndInput;
    } else if (id == kEndCompletionId) {
      out += kEndCompletion;
    } else if (id >= kByteBase && id < kVocabBase) {
      out += static_cast<char>(id - kByteBase);
    } else if (id >= kVocabBase && id - kVocabBase < pieces_.size()) {
      out += pieces_[id - kVocabBase];
    } else {
      throw UnknownId("token id " + std::to_string(id) + " outside vocabulary");
    }
  }
  return out;
}

}  // namespace tabtrawl
