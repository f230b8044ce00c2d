"""HTTP service for manual judgment sessions.

A session lives in its own directory: session.json holds the sampled items
and entity cards, judgments.log is an append-only JSONL file. All state is
a fold over that log, so a restart loses nothing and a revised judgment
simply appends a newer line that wins over the older one.
"""

from __future__ import annotations

import json
import os
import re
import threading
import time
from dataclasses import asdict
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Sequence

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from .agreement import DegenerateAgreementError, RatingsMatrix, fleiss_kappa
from .graph import KnowledgeGraph, local_name
from .rdf import Literal, Triple
from .report import read_cells, verify_bundle
from .sampling import (
    VERDICTS,
    Judgment,
    SampleItem,
    estimate_precision,
    max_error,
    resolve,
)

_SESSION_ID = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]*$")
MAX_CARD_PROPERTIES = 25


def _render_value(value: str | Literal) -> str:
    if isinstance(value, Literal):
        return value.lexical
    return local_name(value)


def collect_cards(
    triples: Iterable[Triple],
    graph: KnowledgeGraph,
    iris: set[str],
    max_properties: int = MAX_CARD_PROPERTIES,
) -> dict[str, dict]:
    """Build entity cards for the given IRIs from a stream of triples.

    A card shows what an annotator needs to decide a match: label, kind,
    alternative labels, and up to max_properties property-value pairs.
    Only triples about the requested IRIs are kept, so the stream can be
    arbitrarily large.
    """
    properties: dict[str, set[tuple[str, str]]] = {iri: set() for iri in iris}
    for s, p, o in triples:
        if s in properties:
            properties[s].add((local_name(p), _render_value(o)))

    cards = {}
    for iri in sorted(iris):
        labels = sorted(graph.labels_of(iri))
        kind = graph.entities.get(iri)
        cards[iri] = {
            "iri": iri,
            "label": labels[0] if labels else local_name(iri),
            "kind": kind.value if kind else None,
            "alt_labels": sorted(graph.alt_labels_of(iri)),
            "properties": [list(pair) for pair in sorted(properties[iri])[:max_properties]],
        }
    return cards


def init_session(
    sessions_dir: str | Path,
    session_id: str,
    items: Sequence[SampleItem],
    cards: dict[str, dict],
    confidence: float = 0.95,
    meta: dict | None = None,
) -> Path:
    """Create a session directory with its item list and an empty log."""
    if not _SESSION_ID.match(session_id):
        raise ValueError(f"invalid session id {session_id!r}")
    directory = Path(sessions_dir) / session_id
    directory.mkdir(parents=True, exist_ok=False)
    payload = {
        "id": session_id,
        "created_at": datetime.now(timezone.utc).isoformat(),
        "confidence": confidence,
        "meta": meta or {},
        "items": [asdict(item) for item in items],
        "cards": cards,
    }
    (directory / "session.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    (directory / "judgments.log").touch()
    return directory


def _session_dir(root: Path, session_id: str) -> Path:
    if not _SESSION_ID.match(session_id):
        raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
    directory = root / session_id
    if not (directory / "session.json").exists():
        raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
    return directory


def _load_session(directory: Path) -> dict:
    return json.loads((directory / "session.json").read_text(encoding="utf-8"))


def _read_log(directory: Path) -> list[Judgment]:
    log = directory / "judgments.log"
    if not log.exists():
        return []
    judgments = []
    with log.open(encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                entry = json.loads(line)
                judgments.append(
                    Judgment(
                        entry["item_id"], entry["verdict"], entry["annotator"], entry["timestamp"]
                    )
                )
    return judgments


def _append_log(directory: Path, judgment: Judgment) -> None:
    with (directory / "judgments.log").open("a", encoding="utf-8") as handle:
        handle.write(json.dumps(asdict(judgment), sort_keys=True) + "\n")
        handle.flush()
        os.fsync(handle.fileno())


def _latest(judgments: Sequence[Judgment]) -> dict[tuple[str, str], Judgment]:
    latest: dict[tuple[str, str], Judgment] = {}
    for j in judgments:
        key = (j.item_id, j.annotator)
        if key not in latest or j.timestamp >= latest[key].timestamp:
            latest[key] = j
    return latest


def _tallies(session: dict, resolved: dict[str, str]) -> dict[str, int]:
    tallies = {v: 0 for v in VERDICTS}
    for verdict in resolved.values():
        tallies[verdict] += 1
    tallies["pending"] = len(session["items"]) - len(resolved)
    return tallies


def _estimate(resolved: dict[str, str], confidence: float) -> dict:
    decided = [v for v in resolved.values() if v != "unsure"]
    if not decided:
        return {"empty": True, "reason": "no decisive judgments"}
    e = estimate_precision(resolved.values(), confidence)
    return {
        "empty": False,
        "point": e.point,
        "interval": list(e.interval),
        "n_judged": e.n_judged,
        "n_unsure": e.n_unsure,
        "confidence": e.confidence,
        "max_error": max_error(e.n_judged, e.confidence),
    }


def _summary(session: dict, judgments: Sequence[Judgment]) -> dict:
    latest = _latest(judgments)
    annotators: dict[str, dict[str, int]] = {}
    for j in latest.values():
        stats = annotators.setdefault(j.annotator, {"judged": 0, **{v: 0 for v in VERDICTS}})
        stats["judged"] += 1
        stats[j.verdict] += 1

    resolved = resolve(list(judgments))
    by_item: dict[str, dict[str, str]] = {}
    for (item_id, annotator), j in latest.items():
        by_item.setdefault(item_id, {})[annotator] = j.verdict

    items = []
    for item in session["items"]:
        c = item["correspondence"]
        items.append(
            {
                "id": item["id"],
                "source": c["source"],
                "target": c["target"],
                "resolved": resolved.get(item["id"]),
                "judgments": by_item.get(item["id"], {}),
            }
        )

    return {
        "session": session["id"],
        "total": len(session["items"]),
        "annotators": {name: annotators[name] for name in sorted(annotators)},
        "tallies": _tallies(session, resolved),
        "estimate": _estimate(resolved, session.get("confidence", 0.95)),
        "items": items,
    }


def _agreement(session: dict, judgments: Sequence[Judgment]) -> dict:
    latest = _latest(judgments)
    annotators = sorted({annotator for _, annotator in latest})
    if len(annotators) < 2:
        return {"kappa": None, "reason": "needs at least two annotators"}

    rows = []
    for item in session["items"]:
        verdicts = [
            latest[(item["id"], a)].verdict for a in annotators if (item["id"], a) in latest
        ]
        if len(verdicts) == len(annotators):
            rows.append([verdicts.count(v) for v in VERDICTS])
    if not rows:
        return {"kappa": None, "reason": "no items judged by every annotator"}

    try:
        kappa, band = fleiss_kappa(RatingsMatrix(rows))
    except DegenerateAgreementError as exc:
        return {"kappa": None, "reason": str(exc)}
    return {"kappa": kappa, "band": band, "n_items": len(rows), "n_raters": len(annotators)}


class JudgmentIn(BaseModel):
    item_id: str
    annotator: str
    verdict: str


def create_app(sessions_dir: str | Path, bundle_dir: str | Path | None = None) -> FastAPI:
    """Application over a sessions directory and an optional report bundle.

    The bundle directory, when given, is what the dashboard endpoint serves
    to the frontend alongside the session state.
    """
    root = Path(sessions_dir)
    bundle = Path(bundle_dir) if bundle_dir is not None else None
    app = FastAPI(title="kgbench annotation service")
    write_lock = threading.Lock()

    @app.get("/sessions/{session_id}/next")
    def next_item(session_id: str, annotator: str) -> dict:
        if not annotator:
            raise HTTPException(status_code=400, detail="annotator must not be empty")
        directory = _session_dir(root, session_id)
        session = _load_session(directory)
        latest = _latest(_read_log(directory))
        judged = {item_id for item_id, who in latest if who == annotator}

        items = session["items"]
        pending = [item for item in items if item["id"] not in judged]
        if not pending:
            return {"done": True, "total": len(items), "judged": len(judged)}
        item = pending[0]
        c = item["correspondence"]
        return {
            "done": False,
            "item": item,
            "source_card": session["cards"].get(c["source"]),
            "target_card": session["cards"].get(c["target"]),
            "judged": len(judged),
            "remaining": len(pending),
            "total": len(items),
        }

    @app.post("/sessions/{session_id}/judgments")
    def post_judgment(session_id: str, body: JudgmentIn) -> dict:
        if body.verdict not in VERDICTS:
            raise HTTPException(status_code=400, detail=f"verdict must be one of {list(VERDICTS)}")
        if not body.annotator:
            raise HTTPException(status_code=400, detail="annotator must not be empty")
        directory = _session_dir(root, session_id)
        session = _load_session(directory)
        known = {item["id"] for item in session["items"]}
        if body.item_id not in known:
            raise HTTPException(
                status_code=404, detail=f"item {body.item_id!r} does not belong to this session"
            )

        with write_lock:
            judgments = _read_log(directory)
            revised = (body.item_id, body.annotator) in _latest(judgments)
            judgment = Judgment(body.item_id, body.verdict, body.annotator, time.time())
            _append_log(directory, judgment)
            judgments.append(judgment)

        resolved = resolve(judgments)
        return {
            "ok": True,
            "revised": revised,
            "tallies": _tallies(session, resolved),
            "estimate": _estimate(resolved, session.get("confidence", 0.95)),
        }

    @app.get("/sessions/{session_id}/summary")
    def summary(session_id: str) -> dict:
        directory = _session_dir(root, session_id)
        return _summary(_load_session(directory), _read_log(directory))

    @app.get("/sessions/{session_id}/dashboard")
    def dashboard(session_id: str) -> dict:
        directory = _session_dir(root, session_id)
        session = _load_session(directory)
        judgments = _read_log(directory)

        payload = {
            "session": session["id"],
            "meta": session.get("meta", {}),
            "summary": _summary(session, judgments),
            "agreement": _agreement(session, judgments),
            "bundle": None,
        }
        if bundle is not None:
            problems = verify_bundle(bundle)
            if problems:
                raise HTTPException(status_code=500, detail="; ".join(problems))
            payload["bundle"] = {
                "cells": [asdict(c) for c in read_cells(bundle / "cells.csv")],
                "aggregates": json.loads((bundle / "aggregates.json").read_text("utf-8")),
                "manifest": json.loads((bundle / "manifest.json").read_text("utf-8")),
            }
        return payload

    return app
