"""Benchmark harness for knowledge-graph matching.

Streaming N-Triples ingest, label-equivalence baseline matchers, gold
standard construction from interwiki links and crowd judgments, partial
gold-standard scoring under two semantics, deterministic sampling for
manual precision estimation, and a machine-readable report bundle.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .agreement import DegenerateAgreementError, RatingsMatrix, fleiss_kappa, interpretation_band
from .alignment import Alignment, Correspondence, parse_alignment, write_alignment
from .evaluation import (
    ArityClass,
    ConfusionCounts,
    EvaluationResult,
    Metrics,
    Outcome,
    TaskEval,
    aggregate_tasks,
    classify_arity,
    evaluate_partial_1to1,
    evaluate_with_negatives,
    metrics_from_counts,
)
from .gold import (
    CrowdTask,
    GoldStandard,
    InterwikiLink,
    WikiPage,
    aggregate_crowd,
    close_triangles,
    enforce_functional_injective,
    extract_link_candidates,
    load_gold,
    resolve_redirects,
    save_gold,
)
from .graph import EntityKind, ExtractionConfig, KnowledgeGraph, build_graph, load_graph
from .matching import (
    BASELINE_ALT_LABEL,
    BASELINE_LABEL,
    gold_statistics,
    is_trivial,
    match_by_label,
    normalize_label,
)
from .rdf import Literal, NTriplesError, ParseIssue, Triple, parse_ntriples, write_ntriples
from .report import (
    EvaluatedCell,
    build_aggregates,
    cells_for_run,
    emit_dashboard,
    read_cells,
    verify_bundle,
)
from .sampling import (
    Judgment,
    PrecisionEstimate,
    SampleItem,
    estimate_precision,
    max_error,
    sample,
    wilson_interval,
)

__all__ = [
    "__version__",
    "Alignment",
    "ArityClass",
    "BASELINE_ALT_LABEL",
    "BASELINE_LABEL",
    "ConfusionCounts",
    "Correspondence",
    "CrowdTask",
    "DegenerateAgreementError",
    "EntityKind",
    "EvaluatedCell",
    "EvaluationResult",
    "ExtractionConfig",
    "GoldStandard",
    "InterwikiLink",
    "Judgment",
    "KnowledgeGraph",
    "Literal",
    "Metrics",
    "NTriplesError",
    "Outcome",
    "ParseIssue",
    "PrecisionEstimate",
    "RatingsMatrix",
    "SampleItem",
    "TaskEval",
    "Triple",
    "WikiPage",
    "aggregate_crowd",
    "aggregate_tasks",
    "build_aggregates",
    "build_graph",
    "cells_for_run",
    "classify_arity",
    "close_triangles",
    "emit_dashboard",
    "enforce_functional_injective",
    "estimate_precision",
    "evaluate_partial_1to1",
    "evaluate_with_negatives",
    "extract_link_candidates",
    "fleiss_kappa",
    "gold_statistics",
    "interpretation_band",
    "is_trivial",
    "load_gold",
    "load_graph",
    "match_by_label",
    "max_error",
    "metrics_from_counts",
    "normalize_label",
    "parse_alignment",
    "parse_ntriples",
    "read_cells",
    "resolve_redirects",
    "sample",
    "save_gold",
    "verify_bundle",
    "wilson_interval",
    "write_alignment",
    "write_ntriples",
]
