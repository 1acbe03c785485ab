#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tabtrawl/contam.hpp"
#include "tabtrawl/eval.hpp"
#include "tabtrawl/filters.hpp"
#include "tabtrawl/pack.hpp"
#include "tabtrawl/pipeline.hpp"
#include "tabtrawl/serialize.hpp"
#include "tabtrawl/table.hpp"
#include "tabtrawl/tasks.hpp"
#include "tabtrawl/tokenizer.hpp"

namespace py = pybind11;
using namespace tabtrawl;

namespace {

TableFormat parse_format(const std::string& format) {
  if (format == "csv") return TableFormat::Csv;
  if (format == "columnar") return TableFormat::Columnar;
  throw std::invalid_argument("format must be 'csv' or 'columnar'");
}

py::object cell_to_py(const CellValue& v) {
  switch (cell_type(v)) {
    case CellType::Null:
      return py::none();
    case CellType::Bool:
      return py::bool_(std::get<bool>(v));
    case CellType::Int:
      return py::int_(std::get<int64_t>(v));
    case CellType::Float:
      return py::float_(std::get<double>(v));
    default:
      return py::str(render_cell(v));
  }
}

FilterConfig config_from_dict(const py::dict& d) {
  FilterConfig cfg;
  for (auto item : d) {
    std::string key = py::cast<std::string>(item.first);
    if (key == "min_rows") cfg.min_rows = py::cast<int64_t>(item.second);
    else if (key == "max_rows") cfg.max_rows = py::cast<int64_t>(item.second);
    else if (key == "min_cols") cfg.min_cols = py::cast<int64_t>(item.second);
    else if (key == "max_cols") cfg.max_cols = py::cast<int64_t>(item.second);
    else if (key == "max_header_chars") cfg.max_header_chars = py::cast<int64_t>(item.second);
    else if (key == "table_pii_cell_fraction") cfg.table_pii_cell_fraction = py::cast<double>(item.second);
    else if (key == "table_missing_fraction") cfg.table_missing_fraction = py::cast<double>(item.second);
    else if (key == "unnamed_col_fraction") cfg.unnamed_col_fraction = py::cast<double>(item.second);
    else if (key == "col_missing_fraction") cfg.col_missing_fraction = py::cast<double>(item.second);
    else if (key == "row_missing_fraction") cfg.row_missing_fraction = py::cast<double>(item.second);
    else if (key == "english_threshold") cfg.english_threshold = py::cast<double>(item.second);
    else if (key == "code_threshold") cfg.code_threshold = py::cast<double>(item.second);
    else throw std::invalid_argument("unknown filter key: " + key);
  }
  return cfg;
}

py::dict report_to_dict(const FilterReport& report) {
  py::dict rules;
  for (const auto& [rule, counter] : report.rules) {
    py::dict entry;
    entry["evaluated"] = counter.evaluated;
    entry["removed"] = counter.removed;
    rules[py::str(rule)] = entry;
  }
  py::dict out;
  out["rules"] = rules;
  out["accepted"] = report.accepted;
  out["rejection_rule"] = report.rejection_rule;
  return out;
}

py::dict task_to_dict(const PredictionTask& task) {
  py::dict d;
  d["table_key"] = task.table_key;
  d["target_col"] = task.target_col;
  d["kind"] = task.kind == TaskKind::Categorical ? "categorical" : "binned_continuous";
  d["labels"] = task.label_set;
  d["boundaries"] = task.bin_boundaries;
  d["feature_cols"] = task.feature_cols;
  return d;
}

py::dict packed_to_dict(const PackedSequence& seq) {
  py::dict d;
  d["token_ids"] = seq.token_ids;
  py::list segs;
  for (const Segment& s : seq.segments) {
    py::dict seg;
    seg["start"] = s.start;
    seg["end"] = s.end;
    seg["table_key"] = s.table_key;
    segs.append(seg);
  }
  d["segments"] = segs;
  py::list spans;
  for (const LossSpan& s : seq.loss_spans) spans.append(py::make_tuple(s.start, s.end));
  d["loss_spans"] = spans;
  d["pad_start"] = seq.pad_start;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "tabular corpus compilation and evaluation toolkit";

  py::class_<TableArtifact>(m, "Table")
      .def_property_readonly("content_key", [](const TableArtifact& t) { return t.content_key; })
      .def_property_readonly("n_rows", [](const TableArtifact& t) { return t.n_rows(); })
      .def_property_readonly("n_cols", [](const TableArtifact& t) { return t.n_cols(); })
      .def_property_readonly("column_names",
                             [](const TableArtifact& t) {
                               std::vector<std::string> names;
                               for (const ColumnMeta& h : t.headers) names.push_back(h.name);
                               return names;
                             })
      .def_property_readonly("state",
                             [](const TableArtifact& t) {
                               switch (t.state) {
                                 case FilterState::Raw: return "raw";
                                 case FilterState::Accepted: return "accepted";
                                 case FilterState::Rejected: return "rejected";
                               }
                               return "?";
                             })
      .def_property_readonly("rejection_rule",
                             [](const TableArtifact& t) { return t.rejection_rule; })
      .def("cell", [](const TableArtifact& t, size_t row, size_t col) {
        if (row >= t.n_rows() || col >= t.n_cols()) throw py::index_error();
        return cell_to_py(t.cell(row, col));
      })
      .def("stats", [](const TableArtifact& t) {
        TableStats stats = compute_stats(t);
        py::dict d;
        d["n_rows"] = stats.n_rows;
        d["n_cols"] = stats.n_cols;
        d["missing_fraction"] = stats.missing_fraction;
        py::dict hist;
        for (const auto& [type, count] : stats.dtype_histogram)
          hist[py::str(std::string(cell_type_name(type)))] = count;
        d["dtype_histogram"] = hist;
        return d;
      });

  m.def("ingest_table",
        [](const std::string& path, const std::string& format) {
          return ingest_table(path, parse_format(format));
        },
        py::arg("path"), py::arg("format") = "csv");
  m.def("content_hash", &content_hash);
  m.def("write_columnar", &write_columnar);

  m.def("english_score", [](const std::string& s) { return english_score(s); });
  m.def("detect_pii", [](const std::string& s) { return detect_pii(s); });
  m.def("code_score", [](const std::string& s) { return code_score(s); });
  m.def("detect_code", [](const std::string& s) { return detect_code(s); });

  m.def("filter_table",
        [](const TableArtifact& t, const py::dict& config) {
          FilteredTable result = filter_table(t, config_from_dict(config));
          return py::make_tuple(result.table, report_to_dict(result.report));
        },
        py::arg("table"), py::arg("config") = py::dict());

  m.def("candidate_targets", &candidate_targets);
  m.def("choose_target",
        [](const TableArtifact& t, const std::vector<size_t>& candidates, uint64_t seed) {
          auto [col, kind] = choose_target(t, candidates, seed);
          return py::make_tuple(col, kind == TaskKind::Categorical ? "categorical"
                                                                   : "binned_continuous");
        });
  m.def("quantile_bins", [](std::vector<double> values, int n_bins) {
    QuantileBins bins = quantile_bins(std::move(values), n_bins);
    return py::make_tuple(bins.boundaries, bins.labels);
  });
  m.def("bin_value", &bin_value);
  m.def("build_training_task", [](const TableArtifact& t, uint64_t seed) {
    return task_to_dict(build_training_task(t, seed));
  });

  m.def("serialize_row",
        [](const TableArtifact& t, const py::dict& task_dict, uint64_t row,
           bool include_answer) {
          PredictionTask task;
          task.table_key = py::cast<std::string>(task_dict["table_key"]);
          task.target_col = py::cast<size_t>(task_dict["target_col"]);
          task.kind = py::cast<std::string>(task_dict["kind"]) == "categorical"
                          ? TaskKind::Categorical
                          : TaskKind::BinnedContinuous;
          task.label_set = py::cast<std::vector<std::string>>(task_dict["labels"]);
          task.bin_boundaries = py::cast<std::vector<double>>(task_dict["boundaries"]);
          task.feature_cols = py::cast<std::vector<size_t>>(task_dict["feature_cols"]);
          SerializedExample ex = serialize_row(t, task, row, include_answer);
          py::dict d;
          d["text"] = ex.text;
          d["target"] = ex.target_text;
          d["spans"] = py::dict(
              py::arg("prefix") = py::make_tuple(0, ex.prefix_end),
              py::arg("features") = py::make_tuple(ex.prefix_end, ex.features_end),
              py::arg("suffix") = py::make_tuple(ex.features_end, ex.suffix_end),
              py::arg("answer") = py::make_tuple(ex.suffix_end, ex.text.size()));
          d["row"] = ex.row;
          d["table_key"] = ex.table_key;
          return d;
        },
        py::arg("table"), py::arg("task"), py::arg("row"), py::arg("include_answer") = true);
  m.def("extract_answer", [](const std::string& text) { return extract_answer(text); });

  py::class_<Tokenizer>(m, "Tokenizer")
      .def_static("bundled", &Tokenizer::bundled)
      .def_static("from_vocab_file", &Tokenizer::from_vocab_file)
      .def("encode", [](const Tokenizer& t, const std::string& s) { return t.encode(s); })
      .def("decode",
           [](const Tokenizer& t, const std::vector<uint32_t>& ids) { return t.decode(ids); })
      .def_property_readonly("vocab_size", &Tokenizer::vocab_size)
      .def_property_readonly_static("PAD_ID", [](py::object) { return Tokenizer::kPadId; })
      .def_property_readonly_static("END_INPUT_ID",
                                    [](py::object) { return Tokenizer::kEndInputId; })
      .def_property_readonly_static("END_COMPLETION_ID",
                                    [](py::object) { return Tokenizer::kEndCompletionId; });

  m.def("pack_rows",
        [](const std::vector<std::pair<std::string, std::vector<std::vector<uint32_t>>>>&
               raw_groups,
           uint32_t l_max, uint64_t seed, bool per_row_segments) {
          std::vector<RowGroup> groups;
          for (const auto& [key, rows] : raw_groups) {
            RowGroup g;
            g.table_key = key;
            for (size_t i = 0; i < rows.size(); ++i)
              g.rows.push_back(TokenizedRow{i, rows[i]});
            groups.push_back(std::move(g));
          }
          PackOptions opt;
          opt.l_max = l_max;
          opt.seed = seed;
          opt.per_row_segments = per_row_segments;
          PackResult result = pack_rows(groups, opt);
          py::list sequences;
          for (const PackedSequence& seq : result.sequences)
            sequences.append(packed_to_dict(seq));
          py::dict stats;
          stats["rows_packed"] = result.stats.rows_packed;
          stats["rows_too_long"] = result.stats.rows_too_long;
          stats["padding_fraction"] = result.stats.padding_fraction;
          stats["mean_rows_per_sequence"] = result.stats.mean_rows_per_sequence;
          return py::make_tuple(sequences, stats);
        },
        py::arg("groups"), py::arg("l_max"), py::arg("seed") = 0,
        py::arg("per_row_segments") = false);

  m.def("dense_mask", [](const py::dict& packed) {
    PackedSequence seq;
    seq.token_ids = py::cast<std::vector<uint32_t>>(packed["token_ids"]);
    for (auto seg : packed["segments"]) {
      Segment s;
      s.start = py::cast<uint32_t>(seg["start"]);
      s.end = py::cast<uint32_t>(seg["end"]);
      s.table_key = py::cast<std::string>(seg["table_key"]);
      seq.segments.push_back(std::move(s));
    }
    std::vector<uint8_t> mask = dense_mask(seq);
    const size_t n = seq.token_ids.size();
    py::list out;
    for (size_t i = 0; i < n; ++i) {
      py::list row;
      for (size_t j = 0; j < n; ++j) row.append(static_cast<bool>(mask[i * n + j]));
      out.append(row);
    }
    return out;
  });

  m.def("clopper_pearson", &clopper_pearson, py::arg("n"), py::arg("successes"),
        py::arg("confidence") = 0.95);
  m.def("relative_sample_efficiency",
        [](const std::vector<std::pair<int, double>>& f,
           const std::vector<std::pair<int, double>>& g, double alpha) {
          std::vector<CurvePoint> cf, cg;
          for (auto [k, a] : f) cf.push_back({k, a});
          for (auto [k, a] : g) cg.push_back({k, a});
          return relative_sample_efficiency(cf, cg, alpha);
        });

  py::class_<SchemaIndex>(m, "SchemaIndex")
      .def(py::init<>())
      .def("add",
           [](SchemaIndex& idx, const std::string& key,
              const std::vector<std::string>& names, uint64_t n_cols) {
             idx.add(key, names, n_cols);
           })
      .def("add_table", [](SchemaIndex& idx, const TableArtifact& t) { idx.add(t); })
      .def("check",
           [](const SchemaIndex& idx, const std::vector<std::string>& names,
              uint64_t n_cols) {
             CheckResult res =
                 check(std::set<std::string>(names.begin(), names.end()), n_cols, idx);
             py::dict d;
             d["fuzzy"] = res.fuzzy;
             d["strict"] = res.strict;
             d["fuzzy_keys"] = res.fuzzy_keys;
             d["strict_keys"] = res.strict_keys;
             return d;
           })
      .def("save", &SchemaIndex::save)
      .def_static("load", &SchemaIndex::load)
      .def_property_readonly("n_tables", &SchemaIndex::n_tables);

  m.def("run_pipeline", [](const std::string& config_path) {
    PipelineConfig cfg = PipelineConfig::from_json_file(config_path);
    CorpusManifest manifest = run_pipeline(cfg);
    py::dict d;
    d["tables_ingested"] = manifest.tables_ingested;
    d["tables_duplicate"] = manifest.tables_duplicate;
    d["tables_accepted"] = manifest.tables_accepted;
    d["tables_rejected"] = manifest.tables_rejected;
    d["rows_serialized"] = manifest.rows_serialized;
    d["padding_fraction"] = manifest.packing.padding_fraction;
    return d;
  });

  py::register_exception<RaggedRows>(m, "RaggedRowsError");
  py::register_exception<NoCandidates>(m, "NoCandidatesError");
  py::register_exception<DegenerateDistribution>(m, "DegenerateDistributionError");
  py::register_exception<MissingTarget>(m, "MissingTargetError");
  py::register_exception<MixedTasks>(m, "MixedTasksError");
  py::register_exception<MalformedRow>(m, "MalformedRowError");
  py::register_exception<UnknownId>(m, "UnknownIdError");
}
