"""Dashboard bundle: per-cell outcomes plus recomputable aggregates.

The bundle is three files under a run directory. cells.csv lists every
scored cell including the missed gold entries (FN rows), so every aggregate
can be rebuilt from it alone. aggregates.json holds per-task figures, arity
counts, and the cross-task averages in both variants (all tasks vs non-empty
tasks only). manifest.json carries the timestamp, config, and content
digests; it is the only file allowed to differ between reruns.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

from . import __version__
from .alignment import Alignment
from .evaluation import (
    KIND_SECTIONS,
    MIXED,
    ArityClass,
    ConfusionCounts,
    EvaluationResult,
    KindCounts,
    Outcome,
    TaskEval,
    aggregate_tasks,
    classify_arity,
    metrics_from_counts,
)
from .graph import KnowledgeGraph

CELL_FIELDS = (
    "matcher",
    "task",
    "source",
    "target",
    "kind",
    "outcome",
    "trivial",
    "arity",
    "confidence",
)
OVERALL = "overall"
SECTIONS = (*KIND_SECTIONS, MIXED, OVERALL)

# Column names follow the result-table headers so the bundle can be read
# side by side with the published figures.
PREC, FM, REC, SIZE, TASKS = "Prec.", "F-m.", "Rec.", "Size", "# tasks"


@dataclass(frozen=True)
class EvaluatedCell:
    matcher: str
    task: str
    source: str
    target: str
    kind: str          # class / property / instance / mixed
    outcome: str       # TP / FP / FN / IGNORED
    trivial: bool
    arity: str         # 1:1 / 1:n / n:1 / n:m, empty for FN rows
    confidence: float | None  # None for FN rows

    def row(self) -> tuple[str, ...]:
        return (
            self.matcher,
            self.task,
            self.source,
            self.target,
            self.kind,
            self.outcome,
            "true" if self.trivial else "false",
            self.arity,
            "" if self.confidence is None else repr(round(self.confidence, 12)),
        )


def _raw_labels_shared(
    source: str,
    target: str,
    source_graph: KnowledgeGraph | None,
    target_graph: KnowledgeGraph | None,
) -> bool:
    if source_graph is None or target_graph is None:
        return False
    if source not in source_graph.entities or target not in target_graph.entities:
        return False
    return not source_graph.labels_of(source).isdisjoint(target_graph.labels_of(target))


def cells_for_run(
    matcher: str,
    task: str,
    alignment: Alignment,
    result: EvaluationResult,
    source_graph: KnowledgeGraph | None = None,
    target_graph: KnowledgeGraph | None = None,
) -> list[EvaluatedCell]:
    """Flatten one matcher x task evaluation into dashboard cells.

    Missed gold entries become FN rows without arity or confidence; they
    never were part of the produced alignment, but the aggregates need them.
    """
    arities = classify_arity(alignment).classes
    cells = []
    for scored in result.cells:
        c = scored.correspondence
        cells.append(
            EvaluatedCell(
                matcher,
                task,
                c.source,
                c.target,
                scored.kind,
                str(scored.outcome),
                _raw_labels_shared(c.source, c.target, source_graph, target_graph),
                str(arities[c.pair]),
                c.confidence,
            )
        )
    for g, kind in result.missed:
        cells.append(
            EvaluatedCell(
                matcher,
                task,
                g.source,
                g.target,
                kind,
                str(Outcome.FN),
                _raw_labels_shared(g.source, g.target, source_graph, target_graph),
                "",
                None,
            )
        )
    return cells


def _counts_by_task(
    cells: Sequence[EvaluatedCell],
) -> dict[tuple[str, str], tuple[ConfusionCounts, dict[str, int]]]:
    by_task: dict[tuple[str, str], tuple[ConfusionCounts, dict[str, int]]] = {}
    for cell in cells:
        counts, arity = by_task.setdefault(
            (cell.matcher, cell.task),
            (ConfusionCounts(), {str(a): 0 for a in ArityClass}),
        )
        section = counts.section(cell.kind)
        if cell.outcome == "TP":
            section.tp += 1
        elif cell.outcome == "FP":
            section.fp += 1
        elif cell.outcome == "FN":
            section.fn += 1
        elif cell.outcome == "IGNORED":
            section.ignored += 1
        else:
            raise ValueError(f"unknown outcome {cell.outcome!r} in cell table")
        if cell.outcome != "FN":
            if cell.arity not in arity:
                raise ValueError(f"unknown arity {cell.arity!r} in cell table")
            arity[cell.arity] += 1
    return by_task


def _section_counts(counts: ConfusionCounts, section: str) -> KindCounts:
    if section == OVERALL:
        return KindCounts(counts.tp, counts.fp, counts.fn, counts.ignored)
    return counts.section(section)


def _produced(counts: KindCounts) -> int:
    return counts.tp + counts.fp + counts.ignored


def build_aggregates(cells: Sequence[EvaluatedCell]) -> dict:
    """Aggregate tree for the bundle, derived purely from the cell table.

    Overall sections pool counts across kinds including mixed-kind cells.
    Cross-task averages come in two variants: all tasks (empty alignments
    scoring zero) and non-empty tasks only, the parenthesized figures.
    """
    by_task = _counts_by_task(cells)
    matchers: dict[str, dict] = {}
    for (matcher, task), (counts, arity) in sorted(by_task.items()):
        entry = matchers.setdefault(matcher, {"tasks": {}, "aggregate": {}})
        sections = {}
        for section in SECTIONS:
            sc = _section_counts(counts, section)
            m = metrics_from_counts(sc)
            sections[section] = {
                "counts": {"tp": sc.tp, "fp": sc.fp, "fn": sc.fn, "ignored": sc.ignored},
                PREC: m.precision,
                FM: m.f_measure,
                REC: m.recall,
            }
        entry["tasks"][task] = {
            "produced": _produced(_section_counts(counts, OVERALL)),
            "arity": arity,
            "sections": sections,
        }

    for entry in matchers.values():
        for section in SECTIONS:
            if section == MIXED:
                continue
            evals = []
            for task, task_entry in sorted(entry["tasks"].items()):
                block = task_entry["sections"][section]
                evals.append(
                    TaskEval(
                        task,
                        task_entry["produced"],
                        block["counts"]["tp"] + block["counts"]["fp"] + block["counts"]["ignored"],
                        block[PREC],
                        block[REC],
                    )
                )
            entry["aggregate"][section] = {
                "all_tasks": _macro_block(aggregate_tasks(evals, include_empty=True)),
                "non_empty_tasks": _macro_block(aggregate_tasks(evals, include_empty=False)),
            }
    return {"matchers": matchers}


def _macro_block(m) -> dict:
    return {TASKS: m.tasks_completed, SIZE: m.size, PREC: m.precision, FM: m.f_measure, REC: m.recall}


def _render_csv(cells: Sequence[EvaluatedCell]) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CELL_FIELDS)
    writer.writerows(cell.row() for cell in sorted(cells, key=lambda c: c.row()))
    return buf.getvalue().encode("utf-8")


def _render_json(payload: dict) -> bytes:
    return (json.dumps(payload, indent=2, sort_keys=True) + "\n").encode("utf-8")


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def emit_dashboard(
    cells: Sequence[EvaluatedCell],
    aggregates: dict,
    out_dir: str | Path,
    config: dict | None = None,
) -> dict[str, Path]:
    """Write the bundle into out_dir, creating it if needed.

    cells.csv and aggregates.json are byte-identical across reruns on the
    same input; only manifest.json carries the creation timestamp. The
    given config (flags, seeds, input digests) is recorded in the manifest.
    """
    if not cells:
        raise ValueError("emit_dashboard needs at least one evaluated cell")
    known = set(aggregates.get("matchers", {}))
    for cell in cells:
        if cell.matcher not in known:
            raise ValueError(f"no aggregate for matcher {cell.matcher!r}: inconsistent bundle")

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cells_bytes = _render_csv(cells)
    aggregates_bytes = _render_json(aggregates)

    manifest = {
        "created_at": datetime.now(timezone.utc).isoformat(),
        "generator": f"kgbench {__version__}",
        "config": config or {},
        "cells": len(cells),
        "matchers": sorted({c.matcher for c in cells}),
        "tasks": sorted({c.task for c in cells}),
        "files": {
            "cells.csv": {"sha256": _sha256(cells_bytes), "bytes": len(cells_bytes)},
            "aggregates.json": {
                "sha256": _sha256(aggregates_bytes),
                "bytes": len(aggregates_bytes),
            },
        },
    }

    paths = {
        "cells.csv": out / "cells.csv",
        "aggregates.json": out / "aggregates.json",
        "manifest.json": out / "manifest.json",
    }
    paths["cells.csv"].write_bytes(cells_bytes)
    paths["aggregates.json"].write_bytes(aggregates_bytes)
    paths["manifest.json"].write_bytes(_render_json(manifest))
    return paths


def read_cells(path: str | Path) -> list[EvaluatedCell]:
    """Parse a cells.csv back into EvaluatedCell records."""
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if tuple(header or ()) != CELL_FIELDS:
            raise ValueError(f"unexpected cells.csv header: {header!r}")
        cells = []
        for row in reader:
            matcher, task, source, target, kind, outcome, trivial, arity, confidence = row
            cells.append(
                EvaluatedCell(
                    matcher,
                    task,
                    source,
                    target,
                    kind,
                    outcome,
                    trivial == "true",
                    arity,
                    float(confidence) if confidence else None,
                )
            )
    return cells


def verify_bundle(out_dir: str | Path) -> list[str]:
    """Check a bundle for internal consistency; returns discrepancies.

    Digests in the manifest must match the file bytes, and the aggregates
    must equal what the cell table implies. An empty list means the bundle
    is sound.
    """
    out = Path(out_dir)
    problems: list[str] = []
    try:
        manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
    except FileNotFoundError:
        return ["manifest.json is missing"]

    for name, expected in manifest.get("files", {}).items():
        path = out / name
        if not path.exists():
            problems.append(f"{name} is missing")
        elif _sha256(path.read_bytes()) != expected.get("sha256"):
            problems.append(f"{name} does not match its manifest digest")
    if problems:
        return problems

    try:
        cells = read_cells(out / "cells.csv")
        recomputed = _render_json(build_aggregates(cells))
    except (ValueError, FileNotFoundError) as exc:
        return [str(exc)]
    if recomputed != (out / "aggregates.json").read_bytes():
        problems.append("aggregates.json does not match the cell table")
    return problems
