"""Scoring alignments against partial gold standards.

Two semantics are implemented: explicit-negative scoring (the 2018-style
gold standard) and the 1:1-assumption scoring (2019-style), where a cell
pairing a gold entity with the wrong partner counts as a false positive and
anything outside the gold is ignored.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from statistics import fmean
from typing import Sequence

from .alignment import Alignment, Correspondence
from .gold import GoldStandard
from .graph import KnowledgeGraph

KIND_SECTIONS = ("class", "property", "instance")
MIXED = "mixed"


class Outcome(str, Enum):
    TP = "TP"
    FP = "FP"
    FN = "FN"
    IGNORED = "IGNORED"

    def __str__(self) -> str:
        return self.value


class ArityClass(str, Enum):
    ONE_ONE = "1:1"
    ONE_N = "1:n"
    N_ONE = "n:1"
    N_M = "n:m"

    def __str__(self) -> str:
        return self.value


@dataclass
class KindCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    ignored: int = 0


@dataclass
class ConfusionCounts:
    """TP/FP/FN/ignored per kind section; overall pools across all sections.

    Cells whose endpoints have different kinds (or kinds unresolvable from
    the graphs) land in the "mixed" section and therefore count in the
    overall figures only.
    """

    per_kind: dict[str, KindCounts] = field(
        default_factory=lambda: {k: KindCounts() for k in (*KIND_SECTIONS, MIXED)}
    )

    def section(self, kind: str) -> KindCounts:
        return self.per_kind[kind]

    @property
    def tp(self) -> int:
        return sum(c.tp for c in self.per_kind.values())

    @property
    def fp(self) -> int:
        return sum(c.fp for c in self.per_kind.values())

    @property
    def fn(self) -> int:
        return sum(c.fn for c in self.per_kind.values())

    @property
    def ignored(self) -> int:
        return sum(c.ignored for c in self.per_kind.values())


@dataclass
class Metrics:
    precision: float
    recall: float
    f_measure: float
    size: float = 0.0
    tasks_completed: int = 0


@dataclass
class ScoredCell:
    correspondence: Correspondence
    outcome: Outcome
    kind: str  # class / property / instance / mixed


@dataclass
class EvaluationResult:
    """Confusion counts plus the per-cell detail the report needs.

    Exposes the ConfusionCounts surface directly, so it drops into
    metrics_from_counts like a plain counts object.
    """

    counts: ConfusionCounts
    cells: list[ScoredCell]                         # one per produced cell
    missed: list[tuple[Correspondence, str]]        # gold entries never produced (FN)

    @property
    def per_kind(self) -> dict[str, KindCounts]:
        return self.counts.per_kind

    def section(self, kind: str) -> KindCounts:
        return self.counts.section(kind)

    @property
    def tp(self) -> int:
        return self.counts.tp

    @property
    def fp(self) -> int:
        return self.counts.fp

    @property
    def fn(self) -> int:
        return self.counts.fn

    @property
    def ignored(self) -> int:
        return self.counts.ignored


def _kind_label(
    pair: tuple[str, str],
    source_graph: KnowledgeGraph | None,
    target_graph: KnowledgeGraph | None,
) -> str:
    if source_graph is None or target_graph is None:
        return MIXED
    s_kind = source_graph.entities.get(pair[0])
    t_kind = target_graph.entities.get(pair[1])
    if s_kind is not None and s_kind is t_kind:
        return s_kind.value
    return MIXED


def _score(
    alignment: Alignment,
    gold: GoldStandard,
    fp_test,
    source_graph: KnowledgeGraph | None,
    target_graph: KnowledgeGraph | None,
) -> EvaluationResult:
    gold_pairs = gold.pairs()
    counts = ConfusionCounts()
    cells: list[ScoredCell] = []
    produced: set[tuple[str, str]] = set()
    for c in alignment:
        produced.add(c.pair)
        kind = _kind_label(c.pair, source_graph, target_graph)
        section = counts.section(kind)
        if c.pair in gold_pairs:
            outcome = Outcome.TP
            section.tp += 1
        elif fp_test(c):
            outcome = Outcome.FP
            section.fp += 1
        else:
            outcome = Outcome.IGNORED
            section.ignored += 1
        cells.append(ScoredCell(c, outcome, kind))

    missed: list[tuple[Correspondence, str]] = []
    for g in sorted(gold.positives, key=lambda c: c.pair):
        if g.pair not in produced:
            kind = _kind_label(g.pair, source_graph, target_graph)
            counts.section(kind).fn += 1
            missed.append((g, kind))
    return EvaluationResult(counts, cells, missed)


def evaluate_partial_1to1(
    alignment: Alignment,
    gold: GoldStandard,
    source_graph: KnowledgeGraph | None = None,
    target_graph: KnowledgeGraph | None = None,
    fp_side: str = "both",
) -> EvaluationResult:
    """Score under the 1:1 assumption: wrong partners are false positives.

    A produced cell is a TP when it is in the gold, an FP when its source
    (or, with ``fp_side="both"``, its target) occurs in the gold paired with
    a different partner, and ignored otherwise. Missed gold entries are FNs.
    ``fp_side="source"`` restores the literal source-side-only rule.
    """
    if not gold.one_to_one:
        raise ValueError("1:1 semantics requires a one_to_one gold standard")
    if gold.negatives:
        raise ValueError("1:1 semantics does not use explicit negatives")
    if fp_side not in ("both", "source"):
        raise ValueError(f"fp_side must be 'both' or 'source', got {fp_side!r}")
    gold.check_one_to_one()

    gold_sources = {c.source for c in gold.positives}
    gold_targets = {c.target for c in gold.positives}

    if fp_side == "both":
        def fp_test(c: Correspondence) -> bool:
            return c.source in gold_sources or c.target in gold_targets
    else:
        def fp_test(c: Correspondence) -> bool:
            return c.source in gold_sources

    return _score(alignment, gold, fp_test, source_graph, target_graph)


def evaluate_with_negatives(
    alignment: Alignment,
    gold: GoldStandard,
    source_graph: KnowledgeGraph | None = None,
    target_graph: KnowledgeGraph | None = None,
) -> EvaluationResult:
    """Score against a gold standard carrying explicit no-match entries.

    A produced cell is an FP when its source is declared matchless in the
    target graph or occurs in a positive with a different target; cells
    outside the gold are ignored.
    """
    target_id = alignment.target_id or (target_graph.id if target_graph else None)
    source_id = alignment.source_id or (source_graph.id if source_graph else None)

    def applicable(counterpart: str | None) -> set[str]:
        return {
            entity
            for entity, graph in gold.negatives
            if counterpart is None or graph == counterpart
        }

    negative_sources = applicable(target_id)
    negative_targets = applicable(source_id)
    for c in gold.positives:
        if c.source in negative_sources or c.target in negative_targets:
            raise ValueError(
                f"gold inconsistency: {c.source} <-> {c.target} is both positive and negative"
            )

    gold_sources = {c.source for c in gold.positives}

    def fp_test(c: Correspondence) -> bool:
        return c.source in negative_sources or c.source in gold_sources

    return _score(alignment, gold, fp_test, source_graph, target_graph)


def metrics_from_counts(counts) -> Metrics:
    """Precision, recall, harmonic F from anything exposing tp/fp/fn.

    Zero denominators yield 0, so an empty alignment scores all zeros.
    """
    tp, fp, fn = counts.tp, counts.fp, counts.fn
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    return Metrics(precision, recall, _f_measure(precision, recall))


def _f_measure(precision: float, recall: float) -> float:
    return 2 * precision * recall / (precision + recall) if precision + recall else 0.0


@dataclass(frozen=True)
class TaskEval:
    """Per-task ingredients for cross-task aggregation of one kind section."""

    task: str
    produced_total: int  # produced cell count; 0 marks the task as empty
    produced: int        # cells entering the mean size
    precision: float
    recall: float


def aggregate_tasks(results: Sequence[TaskEval], include_empty: bool) -> Metrics:
    """Macro-average precision and recall across tasks.

    ``include_empty=True`` averages over all tasks with empty alignments
    contributing zeros (the headline figures); ``False`` averages over
    completed tasks only (the parenthesized figures). Mean size is always
    taken over non-empty tasks. F is the harmonic mean of the macro averages.
    """
    if not results:
        raise ValueError("aggregate_tasks needs at least one task")
    non_empty = [r for r in results if r.produced_total > 0]
    pool = results if include_empty else non_empty
    if pool:
        precision = fmean(r.precision if r.produced_total else 0.0 for r in pool)
        recall = fmean(r.recall if r.produced_total else 0.0 for r in pool)
    else:
        precision = recall = 0.0
    size = fmean(r.produced for r in non_empty) if non_empty else 0.0
    return Metrics(
        precision,
        recall,
        _f_measure(precision, recall),
        size=size,
        tasks_completed=len(non_empty),
    )


@dataclass
class ArityResult:
    classes: dict[tuple[str, str], ArityClass]
    counts: dict[ArityClass, int]


def classify_arity(alignment: Alignment) -> ArityResult:
    """Classify each cell by the out-degree of its source and in-degree of its target.

    Both degrees 1 is 1:1; a shared target makes n:1, a fanned-out source
    1:n, and both together n:m. Counts over the classes partition the
    alignment.
    """
    out_degree: dict[str, int] = defaultdict(int)
    in_degree: dict[str, int] = defaultdict(int)
    for c in alignment:
        out_degree[c.source] += 1
        in_degree[c.target] += 1

    classes: dict[tuple[str, str], ArityClass] = {}
    counts = {a: 0 for a in ArityClass}
    for c in alignment:
        fan_out = out_degree[c.source] > 1
        fan_in = in_degree[c.target] > 1
        if fan_out and fan_in:
            arity = ArityClass.N_M
        elif fan_out:
            arity = ArityClass.ONE_N
        elif fan_in:
            arity = ArityClass.N_ONE
        else:
            arity = ArityClass.ONE_ONE
        classes[c.pair] = arity
        counts[arity] += 1
    return ArityResult(classes, counts)
