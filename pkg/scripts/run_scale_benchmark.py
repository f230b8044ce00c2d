#!/usr/bin/env python3
"""Time and memory benchmark for the large synthetic graph pair.

Generates the big source/target pair (1M vs 100k entities by default),
then measures ingest plus alt-label matching against the 120 s / 8 GiB
budget. Generation time is reported separately and does not count.
"""

from __future__ import annotations

import argparse
import resource
import sys
import tempfile
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from kgbench.graph import load_graph
from kgbench.matching import match_by_label
from kgbench.synth import write_scale_pair


def peak_gib() -> float:
    return resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / (1024**2)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, help="where to write the .nt files (default: temp dir)")
    parser.add_argument("--source-size", type=int, default=1_000_000)
    parser.add_argument("--target-size", type=int, default=100_000)
    parser.add_argument("--time-budget", type=float, default=120.0, help="seconds")
    parser.add_argument("--memory-budget", type=float, default=8.0, help="GiB peak RSS")
    args = parser.parse_args(argv)

    out = args.out or Path(tempfile.mkdtemp(prefix="kgbench-scale-"))
    print(f"writing pair to {out} ...")
    t0 = time.perf_counter()
    pair = write_scale_pair(out, n_source=args.source_size, n_target=args.target_size)
    gen_s = time.perf_counter() - t0
    print(f"generated in {gen_s:.1f}s ({args.source_size:,} vs {args.target_size:,} entities)")

    t0 = time.perf_counter()
    source = load_graph(pair.source_path)
    ingest_source_s = time.perf_counter() - t0
    t0 = time.perf_counter()
    target = load_graph(pair.target_path)
    ingest_target_s = time.perf_counter() - t0
    t0 = time.perf_counter()
    alignment = match_by_label(source, target, use_alt_labels=True)
    match_s = time.perf_counter() - t0

    measured = ingest_source_s + ingest_target_s + match_s
    missed = len(pair.truth - alignment.pairs())
    print(f"ingest source   {ingest_source_s:7.1f}s  ({len(source):,} entities)")
    print(f"ingest target   {ingest_target_s:7.1f}s  ({len(target):,} entities)")
    print(f"match alt-label {match_s:7.1f}s  ({len(alignment):,} cells)")
    print(f"true pairs found: {len(pair.truth) - missed:,} / {len(pair.truth):,}")
    print(f"total measured  {measured:7.1f}s   (budget {args.time_budget:.0f}s)")
    print(f"peak RSS        {peak_gib():7.2f} GiB (budget {args.memory_budget:.1f} GiB)")

    ok = measured < args.time_budget and peak_gib() < args.memory_budget and missed == 0
    print("within budget" if ok else "OVER BUDGET")
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
