#include "tabtrawl/serialize.hpp"

namespace tabtrawl {

namespace {

std::string label_block(const std::vector<std::string>& labels) {
  std::string out;
  for (const std::string& label : labels) {
    out += label;
    out += " || ";
  }
  if (!out.empty()) {
    out.resize(out.size() - 4);
    out += " ||";
  }
  return out;
}

}  // namespace

SerializedExample serialize_row(const TableArtifact& t, const PredictionTask& task,
                                uint64_t row, bool include_answer) {
  if (row >= t.n_rows()) throw std::out_of_range("row index outside table");
  const std::string& target_name = t.headers[task.target_col].name;
  const std::string labels = label_block(task.label_set);

  SerializedExample ex;
  ex.table_key = t.content_key;
  ex.row = row;
  ex.has_answer = include_answer;

  ex.text = "Predict the value of ";
  ex.text += target_name;
  ex.text += ":\n";
  ex.text += labels;
  ex.text += '\n';
  ex.prefix_end = ex.text.size();

  for (size_t c : task.feature_cols) {
    ex.text += "The ";
    ex.text += t.headers[c].name;
    ex.text += " is ";
    ex.text += render_cell(t.columns[c][row]);
    ex.text += ".\n";
  }
  ex.features_end = ex.text.size();

  ex.text += "What is the value of ";
  ex.text += target_name;
  ex.text += "?\n";
  ex.text += labels;
  ex.text += '\n';
  ex.suffix_end = ex.text.size();

  ex.text += kEndInput;
  if (include_answer) {
    ex.target_text = row_label(t, task, row);
    if (ex.target_text.empty())
      throw MissingTarget("row " + std::to_string(row) + " has no target label");
    ex.text += ex.target_text;
    ex.text += kEndCompletion;
  }
  return ex;
}

std::string concat_shots(const std::vector<SerializedExample>& shots,
                         const SerializedExample& query) {
  if (query.has_answer) throw std::invalid_argument("query must not carry an answer");
  std::string out;
  for (const SerializedExample& shot : shots) {
    if (!shot.has_answer) throw std::invalid_argument("shot without an answer");
    if (shot.table_key != query.table_key)
      throw MixedTasks("shot from table " + shot.table_key + ", query from " +
                       query.table_key);
    out += shot.text;
  }
  out += query.text;
  return out;
}

std::string extract_answer(std::string_view full_text) {
  size_t start = full_text.rfind(kEndInput);
  if (start == std::string_view::npos) throw std::invalid_argument("no end-of-input marker");
  start += kEndInput.size();
  size_t stop = full_text.find(kEndCompletion, start);
  if (stop == std::string_view::npos)
    throw std::invalid_argument("no end-of-completion marker");
  return std::string(full_text.substr(start, stop - start));
}

}  // namespace tabtrawl
