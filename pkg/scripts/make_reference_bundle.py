#!/usr/bin/env python3
"""Independent scorer for the mini corpus reference bundle.

Deliberately shares no code with the kgbench package: a second, throwaway
implementation of ingest, 1:1 scoring, arity, and aggregation used to
generate (and later re-check) the frozen reference bundle in
tests/data/mini/reference. If this script and the package ever disagree,
one of them has a bug; the frozen bytes are the tie-breaker history.

Usage: make_reference_bundle.py <mini-dir> <out-dir>
"""

from __future__ import annotations

import csv
import io
import json
import re
import sys
from pathlib import Path

RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
RDFS_LABEL = "http://www.w3.org/2000/01/rdf-schema#label"
SKOS_ALT = "http://www.w3.org/2004/02/skos/core#altLabel"
PROPERTY_MARKERS = {
    "http://www.w3.org/1999/02/22-rdf-syntax-ns#Property",
    "http://www.w3.org/2002/07/owl#ObjectProperty",
    "http://www.w3.org/2002/07/owl#DatatypeProperty",
    "http://www.w3.org/2002/07/owl#AnnotationProperty",
}
CLASS_MARKERS = {
    "http://www.w3.org/2002/07/owl#Class",
    "http://www.w3.org/2000/01/rdf-schema#Class",
}

LINE_RE = re.compile(
    r'^<([^>]*)>\s+<([^>]*)>\s+(?:<([^>]*)>|"((?:[^"\\]|\\.)*)"(?:@[A-Za-z0-9-]+|\^\^<[^>]*>)?)\s*\.\s*$'
)


def load_graph(path: Path) -> dict:
    subjects, typed_prop, typed_class, type_objects = set(), set(), set(), set()
    labels: dict[str, set[str]] = {}
    for raw in path.read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = LINE_RE.match(line)
        if not m:
            raise SystemExit(f"unparseable line in {path}: {line}")
        s, p, o_iri, o_lit = m.groups()
        subjects.add(s)
        if p == RDF_TYPE and o_iri is not None:
            if o_iri in PROPERTY_MARKERS:
                typed_prop.add(s)
            elif o_iri in CLASS_MARKERS:
                typed_class.add(s)
            # every typing object is itself an entity of kind class
            type_objects.add(o_iri)
        elif p == RDFS_LABEL and o_lit is not None:
            labels.setdefault(s, set()).add(o_lit)

    entities = subjects | type_objects
    kinds = {}
    for e in entities:
        if e in typed_prop:
            kinds[e] = "property"
        elif e in typed_class or e in type_objects:
            kinds[e] = "class"
        else:
            kinds[e] = "instance"
    for e in entities:
        if e not in labels:
            tail = re.split(r"[/#]", e)[-1]
            labels[e] = {tail.replace("_", " ")}
    return {"kinds": kinds, "labels": labels}


def load_tsv(path: Path) -> list[tuple[str, str, float]]:
    rows = []
    for raw in path.read_text(encoding="utf-8").splitlines():
        if not raw.strip():
            continue
        parts = raw.split("\t")
        rows.append((parts[0], parts[1], float(parts[3]) if len(parts) > 3 else 1.0))
    return rows


def arity_of(cells: list[tuple[str, str, float]]) -> dict[tuple[str, str], str]:
    from collections import Counter

    d_out = Counter(s for s, _, _ in cells)
    d_in = Counter(t for _, t, _ in cells)
    out = {}
    for s, t, _ in cells:
        fan_out, fan_in = d_out[s] > 1, d_in[t] > 1
        out[(s, t)] = {
            (False, False): "1:1",
            (True, False): "1:n",
            (False, True): "n:1",
            (True, True): "n:m",
        }[(fan_out, fan_in)]
    return out


def score(matcher: str, task: str, cells, gold_pairs, src, tgt) -> list[list]:
    gold_sources = {a for a, _ in gold_pairs}
    gold_targets = {b for _, b in gold_pairs}
    arity = arity_of(cells)
    rows = []

    def kind_of(a: str, b: str) -> str:
        ka, kb = src["kinds"].get(a), tgt["kinds"].get(b)
        return ka if ka is not None and ka == kb else "mixed"

    def trivial(a: str, b: str) -> str:
        shared = src["labels"].get(a, set()) & tgt["labels"].get(b, set())
        ok = a in src["kinds"] and b in tgt["kinds"] and shared
        return "true" if ok else "false"

    produced = set()
    for a, b, conf in cells:
        produced.add((a, b))
        if (a, b) in gold_pairs:
            outcome = "TP"
        elif a in gold_sources or b in gold_targets:
            outcome = "FP"
        else:
            outcome = "IGNORED"
        rows.append(
            [matcher, task, a, b, kind_of(a, b), outcome, trivial(a, b),
             arity[(a, b)], repr(round(conf, 12))]
        )
    for a, b in sorted(gold_pairs - produced):
        rows.append([matcher, task, a, b, kind_of(a, b), "FN", trivial(a, b), "", ""])
    return rows


def aggregate(rows: list[list]) -> dict:
    sections = ("class", "property", "instance", "mixed", "overall")
    per: dict = {}
    for matcher, task, _a, _b, kind, outcome, _tr, ar, _c in rows:
        entry = per.setdefault(matcher, {}).setdefault(
            task,
            {
                "arity": {"1:1": 0, "1:n": 0, "n:1": 0, "n:m": 0},
                "counts": {s: {"tp": 0, "fp": 0, "fn": 0, "ignored": 0} for s in sections},
            },
        )
        for section in (kind, "overall"):
            entry["counts"][section][outcome.lower() if outcome != "IGNORED" else "ignored"] += 1
        if outcome != "FN":
            entry["arity"][ar] += 1

    def metrics(c: dict) -> tuple[float, float, float]:
        p = c["tp"] / (c["tp"] + c["fp"]) if c["tp"] + c["fp"] else 0.0
        r = c["tp"] / (c["tp"] + c["fn"]) if c["tp"] + c["fn"] else 0.0
        f = 2 * p * r / (p + r) if p + r else 0.0
        return p, r, f

    matchers: dict = {}
    for matcher in sorted(per):
        tasks_block = {}
        for task in sorted(per[matcher]):
            entry = per[matcher][task]
            sec_block = {}
            for section in sections:
                c = entry["counts"][section]
                p, r, f = metrics(c)
                sec_block[section] = {"counts": dict(c), "Prec.": p, "F-m.": f, "Rec.": r}
            overall = entry["counts"]["overall"]
            tasks_block[task] = {
                "produced": overall["tp"] + overall["fp"] + overall["ignored"],
                "arity": entry["arity"],
                "sections": sec_block,
            }

        agg_block = {}
        for section in sections:
            if section == "mixed":
                continue
            variants = {}
            for include_empty in (True, False):
                chosen = []
                for task, tb in sorted(tasks_block.items()):
                    if not include_empty and tb["produced"] == 0:
                        continue
                    c = tb["sections"][section]["counts"]
                    p, r, _ = metrics(c)
                    if tb["produced"] == 0:
                        p = r = 0.0
                    chosen.append((tb["produced"], c["tp"] + c["fp"] + c["ignored"], p, r))
                non_empty = [x for x in chosen if x[0] > 0]
                if chosen:
                    mp = sum(x[2] for x in chosen) / len(chosen)
                    mr = sum(x[3] for x in chosen) / len(chosen)
                else:
                    mp = mr = 0.0
                mf = 2 * mp * mr / (mp + mr) if mp + mr else 0.0
                size = sum(x[1] for x in non_empty) / len(non_empty) if non_empty else 0.0
                variants["all_tasks" if include_empty else "non_empty_tasks"] = {
                    "# tasks": len(non_empty),
                    "Size": size,
                    "Prec.": mp,
                    "F-m.": mf,
                    "Rec.": mr,
                }
            agg_block[section] = variants
        matchers[matcher] = {"tasks": tasks_block, "aggregate": agg_block}
    return {"matchers": matchers}


def main() -> None:
    mini = Path(sys.argv[1])
    out = Path(sys.argv[2])
    out.mkdir(parents=True, exist_ok=True)

    src = load_graph(mini / "alpha.nt")
    tgt = load_graph(mini / "beta.nt")
    gold_pairs = {(a, b) for a, b, _ in load_tsv(mini / "gold.tsv")}

    rows: list[list] = []
    for path in sorted(mini.glob("align_*.tsv")):
        matcher = path.stem.replace("align_", "")
        rows.extend(score(matcher, "alpha-beta", load_tsv(path), gold_pairs, src, tgt))
    rows.sort()

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["matcher", "task", "source", "target", "kind", "outcome", "trivial", "arity", "confidence"]
    )
    writer.writerows(rows)
    (out / "cells.csv").write_text(buf.getvalue(), encoding="utf-8")
    (out / "aggregates.json").write_text(
        json.dumps(aggregate(rows), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(f"wrote {len(rows)} cell rows to {out}")


if __name__ == "__main__":
    main()
