"""Command line entry point wiring the pipeline stages together.

Each stage of the workflow is a subcommand: ingest, match, extract-gold,
evaluate, arity, sample, kappa, report, serve. Artifacts land on disk so
stages can be run and cached independently. Verbosity is controlled by the
KGBENCH_LOG environment variable (debug, info, warning, error).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict
from pathlib import Path

from .agreement import RatingsMatrix, fleiss_kappa
from .alignment import Alignment, parse_alignment, write_alignment
from .evaluation import evaluate_partial_1to1, evaluate_with_negatives
from .gold import (
    FileRedirectResolver,
    enforce_functional_injective,
    extract_link_candidates,
    group_links,
    read_page_dump,
    resolve_redirects,
)
from .graph import ExtractionConfig, KnowledgeGraph, load_graph
from .matching import match_by_label
from .rdf import NTriplesError, ParseIssue, parse_ntriples
from .report import build_aggregates, cells_for_run, emit_dashboard, verify_bundle
from .sampling import sample

log = logging.getLogger(__name__)


class CliUsageError(Exception):
    """Bad invocation (unknown input file and the like): exit status 2."""


def _setup_logging() -> None:
    level = os.environ.get("KGBENCH_LOG", "warning").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
    )


def _require_files(*paths: str | None) -> None:
    for path in paths:
        if path is not None and not Path(path).is_file():
            raise CliUsageError(f"no such file: {path}")


def _sha256_file(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _extraction_config(path: str | None) -> ExtractionConfig:
    return ExtractionConfig.from_file(path) if path else ExtractionConfig()


def _write_json(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_ingest(args: argparse.Namespace) -> int:
    _require_files(args.graph, args.config)
    issues: list[ParseIssue] = []
    graph = load_graph(
        args.graph,
        graph_id=args.graph_id,
        config=_extraction_config(args.config),
        strict=not args.lenient,
        issues=issues,
    )
    stats = {
        "id": graph.id,
        "triples": graph.triple_count,
        "entities": graph.kind_counts(),
        "labeled": sum(1 for iri in graph.entities if graph.labels_of(iri)),
        "alt_labeled": len(graph.alt_labels),
        "kind_conflicts": len(graph.conflicts),
        "parse_issues": len(issues),
    }
    _write_json(stats, args.out)
    return 0


def cmd_match(args: argparse.Namespace) -> int:
    _require_files(args.source, args.target, args.config)
    config = _extraction_config(args.config)
    strict = not args.lenient
    source = load_graph(args.source, graph_id=args.source_id, config=config, strict=strict)
    target = load_graph(args.target, graph_id=args.target_id, config=config, strict=strict)
    alignment = match_by_label(
        source,
        target,
        use_alt_labels=args.alt_labels,
        unique_only=args.unique_only,
        workers=args.jobs,
    )
    write_alignment(alignment, args.out)
    log.info("wrote %d correspondences to %s", len(alignment), args.out)
    return 0


def cmd_extract_gold(args: argparse.Namespace) -> int:
    _require_files(args.pages)
    pages = list(read_page_dump(args.pages))
    extraction = extract_link_candidates(pages, set(args.targets))
    resolution = resolve_redirects(
        extraction.links, FileRedirectResolver.from_pages(pages), max_depth=args.max_depth
    )

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    meta: dict = {
        "unparseable": {f"{wiki}:{title}": n for (wiki, title), n in extraction.unparseable.items()},
        "dropped_redirects": [
            {"source": list(link.source), "target": list(link.target), "reason": reason}
            for link, reason in resolution.dropped
        ],
        "pairs": {},
    }
    for (src, tgt), links in sorted(group_links(resolution.links).items()):
        gold = enforce_functional_injective(links, args.iri_template)
        name = f"gold_{src}_{tgt}.tsv"
        path = out_dir / name
        from .gold import save_gold

        save_gold(gold, path)
        meta["pairs"][f"{src}-{tgt}"] = {
            "candidate_links": len(links),
            "gold_pairs": len(gold.positives),
            "file": name,
        }
    _write_json(meta, str(out_dir / "gold_meta.json"))
    return 0


def _load_graph_cached(
    cache: dict[str, KnowledgeGraph], path: str, config_path: str | None
) -> KnowledgeGraph:
    if path not in cache:
        cache[path] = load_graph(path, config=_extraction_config(config_path))
    return cache[path]


def _evaluate_entry(entry: dict) -> list:
    """One matcher x task evaluation; returns the dashboard cells."""
    from .gold import load_gold

    cache: dict[str, KnowledgeGraph] = entry.pop("_cache", {})
    source_graph = _load_graph_cached(cache, entry["source_graph"], entry.get("graph_config"))
    target_graph = _load_graph_cached(cache, entry["target_graph"], entry.get("graph_config"))
    alignment = parse_alignment(
        entry["alignment"], source_id=source_graph.id, target_id=target_graph.id
    )
    semantics = str(entry.get("semantics", "2019"))
    gold = load_gold(entry["gold"], entry.get("negatives"), one_to_one=semantics == "2019")
    if semantics == "2019":
        result = evaluate_partial_1to1(
            alignment, gold, source_graph, target_graph, fp_side=entry.get("fp_side", "both")
        )
    elif semantics == "2018":
        result = evaluate_with_negatives(alignment, gold, source_graph, target_graph)
    else:
        raise ValueError(f"semantics must be 2018 or 2019, got {semantics!r}")
    return cells_for_run(
        entry["matcher"], entry["task"], alignment, result, source_graph, target_graph
    )


def _entry_files(entry: dict) -> list[str]:
    files = [entry["alignment"], entry["gold"], entry["source_graph"], entry["target_graph"]]
    if entry.get("negatives"):
        files.append(entry["negatives"])
    return files


def cmd_evaluate(args: argparse.Namespace) -> int:
    if args.tasks:
        _require_files(args.tasks)
        entries = json.loads(Path(args.tasks).read_text(encoding="utf-8"))
        if not isinstance(entries, list) or not entries:
            raise CliUsageError(f"{args.tasks} must contain a non-empty task list")
    else:
        if not (args.alignment and args.gold and args.graphs):
            raise CliUsageError("evaluate needs --alignment, --gold and --graphs (or --tasks)")
        entries = [
            {
                "matcher": args.matcher,
                "task": args.task or Path(args.alignment).stem,
                "alignment": args.alignment,
                "gold": args.gold,
                "negatives": args.negatives,
                "semantics": args.semantics,
                "fp_side": args.fp_side,
                "source_graph": args.graphs[0],
                "target_graph": args.graphs[1],
                "graph_config": args.config,
            }
        ]
    for entry in entries:
        _require_files(*_entry_files(entry))

    if args.jobs > 1 and len(entries) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            per_entry = list(pool.map(_evaluate_entry, entries))
    else:
        cache: dict[str, KnowledgeGraph] = {}
        per_entry = [_evaluate_entry({**entry, "_cache": cache}) for entry in entries]

    cells = [cell for chunk in per_entry for cell in chunk]
    config = {
        "semantics": sorted({str(e.get("semantics", "2019")) for e in entries}),
        "jobs": args.jobs,
        "inputs": {f: _sha256_file(f) for e in entries for f in _entry_files(e)},
    }
    emit_dashboard(cells, build_aggregates(cells), args.out, config=config)
    log.info("wrote report bundle to %s", args.out)
    return 0


def cmd_arity(args: argparse.Namespace) -> int:
    from .evaluation import classify_arity

    _require_files(args.alignment)
    alignment = parse_alignment(args.alignment)
    result = classify_arity(alignment)
    payload = {
        "total": len(alignment),
        "counts": {str(a): n for a, n in result.counts.items()},
    }
    _write_json(payload, args.out)
    return 0


def cmd_sample(args: argparse.Namespace) -> int:
    _require_files(args.alignment)
    alignment = parse_alignment(args.alignment)
    items = sample(alignment, args.n, args.seed, matcher=args.matcher, task=args.task)
    with open(args.out, "w", encoding="utf-8") as handle:
        for item in items:
            handle.write(json.dumps(asdict(item), sort_keys=True) + "\n")
    log.info("sampled %d of %d cells", len(items), len(alignment))

    if args.session_id:
        if not (args.sessions_dir and args.graphs):
            raise CliUsageError("--session-id needs --sessions-dir and --graphs")
        _require_files(*args.graphs)
        from .service import collect_cards, init_session

        config = _extraction_config(args.config)
        source = load_graph(args.graphs[0], config=config)
        target = load_graph(args.graphs[1], config=config)
        iris = {i.correspondence.source for i in items}
        cards = collect_cards(parse_ntriples(args.graphs[0]), source, iris)
        tgt_iris = {i.correspondence.target for i in items}
        cards.update(collect_cards(parse_ntriples(args.graphs[1]), target, tgt_iris))
        init_session(
            args.sessions_dir,
            args.session_id,
            items,
            cards,
            confidence=args.confidence,
            meta={"matcher": args.matcher, "task": args.task, "seed": args.seed, "n": args.n},
        )
        log.info("created session %s under %s", args.session_id, args.sessions_dir)
    return 0


def cmd_kappa(args: argparse.Namespace) -> int:
    _require_files(args.ratings)
    kappa, band = fleiss_kappa(RatingsMatrix.from_tsv(args.ratings))
    sys.stdout.write(f"{kappa:.6f}\t{band}\n")
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    if args.verify:
        problems = verify_bundle(args.verify)
        if problems:
            for problem in problems:
                sys.stderr.write(f"kgbench: {problem}\n")
            return 1
        sys.stdout.write("bundle ok\n")
        return 0
    if not args.cells or not args.out:
        raise CliUsageError("report needs --cells and --out (or --verify)")
    _require_files(*args.cells)
    from .report import read_cells

    cells = [cell for path in args.cells for cell in read_cells(path)]
    config = {"inputs": {path: _sha256_file(path) for path in args.cells}}
    emit_dashboard(cells, build_aggregates(cells), args.out, config=config)
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(args.sessions, bundle_dir=args.bundle)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kgbench", description="Knowledge-graph matching benchmark harness."
    )
    parser.add_argument(
        "--jobs",
        type=int,
        default=os.cpu_count() or 1,
        help="parallel workers for matching and task evaluation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse an N-Triples file and report graph statistics")
    p.add_argument("--graph", required=True)
    p.add_argument("--graph-id")
    p.add_argument("--config", help="extraction config (key = value lines)")
    p.add_argument("--lenient", action="store_true", help="skip malformed lines instead of failing")
    p.add_argument("--out", help="stats file (default: stdout)")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("match", help="run a baseline matcher over two graphs")
    p.add_argument("--source", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--source-id")
    p.add_argument("--target-id")
    p.add_argument("--alt-labels", action="store_true")
    p.add_argument("--unique-only", action="store_true")
    p.add_argument("--config")
    p.add_argument("--lenient", action="store_true")
    p.add_argument("--out", required=True, help="alignment file (.xml/.rdf for XML, else TSV)")
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("extract-gold", help="build 1:1 gold standards from a wiki page dump")
    p.add_argument("--pages", required=True, help="page dump (one JSON record per line)")
    p.add_argument("--targets", required=True, nargs="+", help="wikis whose links count")
    p.add_argument("--iri-template", default="http://kg.example.org/{wiki}/resource/{title}")
    p.add_argument("--max-depth", type=int, default=10)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_extract_gold)

    p = sub.add_parser("evaluate", help="score alignments and emit the report bundle")
    p.add_argument("--alignment")
    p.add_argument("--gold")
    p.add_argument("--negatives")
    p.add_argument("--semantics", choices=("2018", "2019"), default="2019")
    p.add_argument("--fp-side", choices=("both", "source"), default="both")
    p.add_argument("--graphs", nargs=2, metavar=("SRC", "TGT"))
    p.add_argument("--matcher", default="matcher")
    p.add_argument("--task")
    p.add_argument("--config")
    p.add_argument("--tasks", help="JSON file with a list of matcher x task entries")
    p.add_argument("--out", required=True, help="report bundle directory")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("arity", help="classify alignment arity")
    p.add_argument("--alignment", required=True)
    p.add_argument("--out", help="JSON file (default: stdout)")
    p.set_defaults(func=cmd_arity)

    p = sub.add_parser("sample", help="draw a judgment sample from an alignment")
    p.add_argument("--alignment", required=True)
    p.add_argument("-n", type=int, default=50)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--matcher", default="")
    p.add_argument("--task", default="")
    p.add_argument("--out", required=True, help="sample items file (one JSON record per line)")
    p.add_argument("--sessions-dir", help="also create an annotation session here")
    p.add_argument("--session-id")
    p.add_argument("--graphs", nargs=2, metavar=("SRC", "TGT"), help="graphs for entity cards")
    p.add_argument("--config")
    p.add_argument("--confidence", type=float, default=0.95)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("kappa", help="Fleiss' kappa over a ratings matrix")
    p.add_argument("--ratings", required=True, help="TSV: one subject per row, counts per category")
    p.set_defaults(func=cmd_kappa)

    p = sub.add_parser("report", help="assemble or verify a report bundle")
    p.add_argument("--cells", nargs="+", help="cell tables to merge")
    p.add_argument("--out", help="bundle directory")
    p.add_argument("--verify", help="check an existing bundle instead")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("serve", help="run the annotation service")
    p.add_argument("--sessions", required=True, help="sessions directory")
    p.add_argument("--bundle", help="report bundle served on the dashboard endpoint")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliUsageError as exc:
        sys.stderr.write(f"kgbench: error: {exc}\n")
        return 2
    except (NTriplesError, ValueError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"kgbench: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
