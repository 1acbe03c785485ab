"""Tabular corpus compilation and few-shot evaluation toolkit.

The heavy lifting lives in the C++ extension; this package re-exports the
main operations: table ingestion and hashing, quality filters, target
selection and quantile binning, prompt serialization, tokenization and
sequence packing with row-causal attention segments, exact-match scoring,
and schema-overlap contamination checks.
"""

from tabtrawl._core import (
    DegenerateDistributionError,
    MalformedRowError,
    MissingTargetError,
    MixedTasksError,
    NoCandidatesError,
    RaggedRowsError,
    SchemaIndex,
    Table,
    Tokenizer,
    UnknownIdError,
    bin_value,
    build_training_task,
    candidate_targets,
    choose_target,
    clopper_pearson,
    code_score,
    content_hash,
    dense_mask,
    detect_code,
    detect_pii,
    english_score,
    extract_answer,
    filter_table,
    ingest_table,
    pack_rows,
    quantile_bins,
    relative_sample_efficiency,
    run_pipeline,
    serialize_row,
    write_columnar,
)

__all__ = [
    "DegenerateDistributionError",
    "MalformedRowError",
    "MissingTargetError",
    "MixedTasksError",
    "NoCandidatesError",
    "RaggedRowsError",
    "SchemaIndex",
    "Table",
    "Tokenizer",
    "UnknownIdError",
    "bin_value",
    "build_training_task",
    "candidate_targets",
    "choose_target",
    "clopper_pearson",
    "code_score",
    "content_hash",
    "dense_mask",
    "detect_code",
    "detect_pii",
    "english_score",
    "extract_answer",
    "filter_table",
    "ingest_table",
    "pack_rows",
    "quantile_bins",
    "relative_sample_efficiency",
    "run_pipeline",
    "serialize_row",
    "write_columnar",
]

__version__ = "0.1.0"
