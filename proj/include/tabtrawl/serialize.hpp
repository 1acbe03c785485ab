#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "tabtrawl/table.hpp"
#include "tabtrawl/tasks.hpp"

namespace tabtrawl {

// Marker strings; the tokenizer maps each to a single id.
inline constexpr std::string_view kEndInput = "<|endinput|>";
inline constexpr std::string_view kEndCompletion = "<|endcompletion|>";
inline constexpr std::string_view kChoiceSep = "||";

// One row rendered as prompt text. The full text, in byte offsets, is
//   [0, prefix_end)            "Predict the value of <target>:\n<labels>\n"
//   [prefix_end, features_end) "The <key> is <value>.\n" per feature column
//   [features_end, suffix_end) "What is the value of <target>?\n<labels>\n"
//   [suffix_end, text.size())  "<|endinput|>" + answer + "<|endcompletion|>"
// The answer segment stops after "<|endinput|>" when serialized without the
// answer. See docs/serialization-grammar.md for the frozen grammar.
struct SerializedExample {
  std::string text;
  size_t prefix_end = 0;
  size_t features_end = 0;
  size_t suffix_end = 0;
  std::string target_text;  // answer without the surrounding markers
  std::string table_key;
  uint64_t row = 0;
  bool has_answer = false;
};

struct MissingTarget : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MixedTasks : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Renders one row of the task's table. Null features render as "nan".
// Throws MissingTarget when include_answer is set and the target cell has no
// usable label.
SerializedExample serialize_row(const TableArtifact& t, const PredictionTask& task,
                                uint64_t row, bool include_answer);

// Concatenates answered shots followed by the unanswered query, with no
// separators beyond each shot's own end-of-completion marker. All examples
// must come from the same task's table.
std::string concat_shots(const std::vector<SerializedExample>& shots,
                         const SerializedExample& query);

// Slices the answer text back out of a full serialization: the bytes
// between the final end-of-input marker and the end-of-completion marker.
std::string extract_answer(std::string_view full_text);

}  // namespace tabtrawl
