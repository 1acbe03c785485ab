#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "tabtrawl/rng.hpp"
#include "tabtrawl/serialize.hpp"
#include "tabtrawl/tokenizer.hpp"

using namespace tabtrawl;

TEST_CASE("marker strings tokenize atomically") {
  Tokenizer tok = Tokenizer::bundled();
  auto ids = tok.encode("<|endinput|>snow<|endcompletion|>");
  REQUIRE(ids.size() >= 3);
  CHECK(ids.front() == Tokenizer::kEndInputId);
  CHECK(ids.back() == Tokenizer::kEndCompletionId);
  size_t eid = 0, ecid = 0, sep = 0;
  for (uint32_t id : ids) {
    if (id == Tokenizer::kEndInputId) ++eid;
    if (id == Tokenizer::kEndCompletionId) ++ecid;
    if (id == Tokenizer::kChoiceSepId) ++sep;
  }
  CHECK(eid == 1);
  CHECK(ecid == 1);
  CHECK(sep == 0);

  auto with_sep = tok.encode("a || b ||");
  size_t seps = 0;
  for (uint32_t id : with_sep)
    if (id == Tokenizer::kChoiceSepId) ++seps;
  CHECK(seps == 2);
}

TEST_CASE("encode of empty text is empty") {
  CHECK(Tokenizer::bundled().encode("").empty());
}

TEST_CASE("round-trip identity on random utf-8 strings") {
  Tokenizer tok = Tokenizer::bundled();
  SplitMix64 rng(31);
  for (int trial = 0; trial < 1000; ++trial) {
    std::string s;
    size_t len = rng.next_below(120);
    for (size_t i = 0; i < len; ++i) {
      switch (rng.next_below(6)) {
        case 0: s += static_cast<char>('a' + rng.next_below(26)); break;
        case 1: s += ' '; break;
        case 2: s += static_cast<char>('0' + rng.next_below(10)); break;
        case 3: s += "\xC3\xA9"; break;            // é
        case 4: s += "\xE2\x8C\x8A"; break;        // ⌊
        case 5: s += static_cast<char>('!' + rng.next_below(14)); break;
      }
    }
    CHECK(tok.decode(tok.encode(s)) == s);
  }
}

TEST_CASE("round-trip holds on grammar text and embedded markers") {
  Tokenizer tok = Tokenizer::bundled();
  for (const char* s :
       {"Predict the value of weather:\nsun || rain || snow ||\n",
        "The city is oslo.\nWhat is the value of weather?\n",
        "a<|endinput|>b<|endcompletion|>c", "|||", "| |", "<|end", "⌊ nested ⌊"})
    CHECK(tok.decode(tok.encode(s)) == s);
}

TEST_CASE("decode rejects ids outside the vocabulary") {
  Tokenizer tok = Tokenizer::bundled();
  std::vector<uint32_t> bad = {static_cast<uint32_t>(tok.vocab_size())};
  CHECK_THROWS_AS(tok.decode(bad), UnknownId);
}

TEST_CASE("pad ids decode to nothing") {
  Tokenizer tok = Tokenizer::bundled();
  std::vector<uint32_t> ids = tok.encode("hi");
  ids.push_back(Tokenizer::kPadId);
  ids.insert(ids.begin(), Tokenizer::kPadId);
  CHECK(tok.decode(ids) == "hi");
}

TEST_CASE("word vocabulary compresses known words to single ids") {
  Tokenizer tok = Tokenizer::bundled();
  auto one = tok.encode("the");
  CHECK(one.size() == 1);
  CHECK(one[0] >= Tokenizer::kVocabBase);
  // Unknown words fall back to bytes.
  auto bytes = tok.encode("zxqv");
  CHECK(bytes.size() == 4);
  for (uint32_t id : bytes) {
    CHECK(id >= Tokenizer::kByteBase);
    CHECK(id < Tokenizer::kVocabBase);
  }
}

TEST_CASE("external vocabulary with merges") {
  namespace fs = std::filesystem;
  fs::path path = fs::temp_directory_path() / "vocab_merges.json";
  {
    std::ofstream out(path, std::ios::trunc);
    out << R"({"vocab": ["hu", "hug", "gs", "s", "h", "u", "g"],)"
        << R"( "merges": ["h u", "hu g", "g s"]})";
  }
  Tokenizer tok = Tokenizer::from_vocab_file(path.string());

  // "hugs" -> merges produce "hug" + "s", both vocabulary entries.
  auto ids = tok.encode("hugs");
  CHECK(ids.size() == 2);
  CHECK(tok.decode(ids) == "hugs");

  // Unmergeable text still round-trips through byte fallback.
  CHECK(tok.decode(tok.encode("xyz hugs xyz")) == "xyz hugs xyz");

  // Markers stay atomic under the external vocabulary too.
  auto marked = tok.encode("hug<|endinput|>s");
  CHECK(std::count(marked.begin(), marked.end(), Tokenizer::kEndInputId) == 1);
}

TEST_CASE("external word-list vocabulary") {
  namespace fs = std::filesystem;
  fs::path path = fs::temp_directory_path() / "vocab_words.json";
  {
    std::ofstream out(path, std::ios::trunc);
    out << R"({"words": ["weather", "rain", " "]})";
  }
  Tokenizer tok = Tokenizer::from_vocab_file(path.string());
  auto ids = tok.encode("rain weather");
  CHECK(ids.size() == 3);
  CHECK(tok.decode(ids) == "rain weather");
}
