"""Synthetic graph pairs for benchmarking and bias demonstrations.

Two generators live here. The scale pair is a million-instance source
against a hundred-thousand-instance target with Zipf-distributed label
collisions, sized to stress ingest and matching the way the large wiki
pairs do. The hammer pair is a small two-scenario fixture: an open pair
with tiny true overlap but many shared surface strings, and a closed pair
where shared strings almost always mean the same thing. Generation is
fully deterministic so downstream runs are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from .graph import RDFS_LABEL, SKOS_ALT_LABEL

SCENARIOS = ("open", "closed")


@dataclass(frozen=True)
class SynthPair:
    source_path: Path
    target_path: Path
    truth: frozenset[tuple[str, str]]


def _iri(wiki: str, index: int) -> str:
    return f"http://kg.example.org/{wiki}/resource/E{index}"


def _label_line(iri: str, predicate: str, text: str) -> str:
    # Generated labels stay within [a-z0-9 ], so no escaping is needed.
    return f'<{iri}> <{predicate}> "{text}" .\n'


def _write_nt(path: Path, lines: Iterable[str]) -> None:
    with path.open("w", encoding="utf-8") as handle:
        handle.writelines(lines)


def _zipf_counts(n_labels: int, cap: int, scale: int) -> list[int]:
    """Bearer count per label rank, proportional to 1/rank up to a cap."""
    return [min(cap, scale // rank) for rank in range(1, n_labels + 1)]


def _scale_lines(
    wiki: str,
    n_entities: int,
    n_shared: int,
    homonym_counts: list[int],
    alt_step: int,
    alt_pool: int,
) -> Iterator[str]:
    index = 0
    for shared in range(n_shared):
        yield _label_line(_iri(wiki, index), RDFS_LABEL, f"shared concept {shared}")
        index += 1
    for rank, count in enumerate(homonym_counts, start=1):
        for _ in range(count):
            yield _label_line(_iri(wiki, index), RDFS_LABEL, f"homonym {rank}")
            index += 1
    while index < n_entities:
        yield _label_line(_iri(wiki, index), RDFS_LABEL, f"{wiki} only {index}")
        index += 1
    for i in range(0, n_entities, alt_step):
        yield _label_line(_iri(wiki, i), SKOS_ALT_LABEL, f"alt name {i % alt_pool}")


def write_scale_pair(
    out_dir: str | Path,
    n_source: int = 1_000_000,
    n_target: int = 100_000,
    n_shared: int = 50_000,
    n_homonyms: int = 20_000,
) -> SynthPair:
    """Write the big source/target pair and return it with its true pairs.

    The first n_shared entities on each side carry identical unique labels
    (the true matches); a Zipf-shaped block shares ambiguous homonym labels
    across the pair; the rest are unique filler. Sparse alternative labels
    from a small pool add extra collisions for the alt-label matcher.
    """
    src_homonyms = _zipf_counts(n_homonyms, cap=64, scale=n_homonyms)
    tgt_homonyms = _zipf_counts(n_homonyms, cap=16, scale=max(1, n_homonyms // 10))
    if n_shared + sum(src_homonyms) > n_source:
        raise ValueError("source graph too small for the shared and homonym blocks")
    if n_shared + sum(tgt_homonyms) > n_target:
        raise ValueError("target graph too small for the shared and homonym blocks")

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    source_path = out / "scale_source.nt"
    target_path = out / "scale_target.nt"
    _write_nt(
        source_path,
        _scale_lines("srcwiki", n_source, n_shared, src_homonyms, alt_step=50, alt_pool=40_000),
    )
    _write_nt(
        target_path,
        _scale_lines("tgtwiki", n_target, n_shared, tgt_homonyms, alt_step=50, alt_pool=40_000),
    )
    truth = frozenset(
        (_iri("srcwiki", i), _iri("tgtwiki", i)) for i in range(n_shared)
    )
    return SynthPair(source_path, target_path, truth)


def _hammer_lines(
    wiki: str,
    other_offset: int,
    n_entities: int,
    n_true: int,
    n_homonyms: int,
    alias_start: int,
    alias_bearers: int,
    alias_pool: int,
) -> Iterator[str]:
    for i in range(n_entities):
        if i < n_true:
            text = f"landmark {i}"
        elif i < n_true + n_homonyms:
            # The two sides rotate bearers differently, so a shared homonym
            # label never lands on the aligned index pair.
            k = (i - n_true + other_offset) % n_homonyms
            text = f"common word {k}"
        else:
            text = f"{wiki} thing {i}"
        yield _label_line(_iri(wiki, i), RDFS_LABEL, text)
    for i in range(alias_start, alias_start + alias_bearers):
        yield _label_line(_iri(wiki, i), SKOS_ALT_LABEL, f"alias {(i - alias_start) % alias_pool}")


def write_hammer_pair(
    out_dir: str | Path, scenario: str, n_entities: int = 2_000
) -> SynthPair:
    """Write an open or closed scenario pair plus its ground truth.

    Open: 2% true overlap drowned in homonym and alias collisions, so
    label-equality matches are mostly wrong. Closed: half the entities
    truly overlap and collisions are rare, so the same matcher looks
    excellent. The truth set drives the scripted oracle annotator.
    """
    if scenario not in SCENARIOS:
        raise ValueError(f"scenario must be one of {SCENARIOS}, got {scenario!r}")
    if scenario == "open":
        n_true = max(1, n_entities * 2 // 100)
        n_homonyms = min(600, (n_entities - n_true) // 2)
        alias_pool, alias_bearers = 150, 300
    else:
        n_true = n_entities // 2
        n_homonyms = 20
        alias_pool, alias_bearers = 10, 10
    alias_start = n_true + n_homonyms
    if alias_start + alias_bearers > n_entities:
        raise ValueError("hammer fixture needs more entities than its blocks")

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    source_path = out / f"{scenario}_alpha.nt"
    target_path = out / f"{scenario}_beta.nt"
    _write_nt(
        source_path,
        _hammer_lines("alphawiki", 0, n_entities, n_true, n_homonyms,
                      alias_start, alias_bearers, alias_pool),
    )
    _write_nt(
        target_path,
        _hammer_lines("betawiki", 13, n_entities, n_true, n_homonyms,
                      alias_start, alias_bearers, alias_pool),
    )
    truth = frozenset(
        (_iri("alphawiki", i), _iri("betawiki", i)) for i in range(n_true)
    )
    return SynthPair(source_path, target_path, truth)
