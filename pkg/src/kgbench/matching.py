"""String-equivalence baseline matchers over an inverted label index.

Blocking: entities are bucketed by normalized label, so candidate pairs are
generated per bucket instead of over the full cross product. That is what
keeps million-instance graph pairs tractable.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .alignment import Alignment, Correspondence
from .gold import GoldStandard
from .graph import EntityKind, KnowledgeGraph

BASELINE_LABEL = "baselineLabel"
BASELINE_ALT_LABEL = "baselineAltLabel"


def normalize_label(raw: str) -> str:
    """Lowercase, underscores to spaces, whitespace runs collapsed, trimmed.

    Total and idempotent; all label comparison in the matchers goes through
    this (language tags are ignored entirely).
    """
    return " ".join(raw.lower().replace("_", " ").split())


@dataclass
class LabelIndex:
    """Inverted index: normalized label -> set of (iri, kind) sharing it."""

    buckets: dict[str, set[tuple[str, EntityKind]]] = field(default_factory=dict)

    @classmethod
    def build(cls, graph: KnowledgeGraph, use_alt_labels: bool = False) -> "LabelIndex":
        buckets: dict[str, set[tuple[str, EntityKind]]] = {}
        empty: set[str] = set()
        for iri, kind in graph.entities.items():
            entry = (iri, kind)
            names = graph.labels.get(iri, empty)
            if use_alt_labels:
                alt = graph.alt_labels.get(iri)
                if alt:
                    names = names | alt
            for name in names:
                key = normalize_label(name)
                if key:
                    buckets.setdefault(key, set()).add(entry)
        return cls(buckets)

    def __len__(self) -> int:
        return len(self.buckets)


def _match_buckets(
    keys,
    source_buckets,
    target_buckets,
    unique_only: bool,
) -> set[tuple[str, str]]:
    pairs: set[tuple[str, str]] = set()
    for key in keys:
        sources = source_buckets[key]
        targets = target_buckets.get(key)
        if not targets:
            continue
        if unique_only and (len(sources) != 1 or len(targets) != 1):
            continue
        for s_iri, s_kind in sources:
            for t_iri, t_kind in targets:
                if s_kind is t_kind:
                    pairs.add((s_iri, t_iri))
    return pairs


def match_by_label(
    source: KnowledgeGraph,
    target: KnowledgeGraph,
    use_alt_labels: bool = False,
    unique_only: bool = False,
    workers: int = 1,
) -> Alignment:
    """Match entities of equal kind whose normalized label sets intersect.

    ``use_alt_labels`` adds redirect-derived alternative labels to the index
    on both sides. ``unique_only`` lets a label bucket contribute only when it
    holds exactly one source and one target entity, suppressing ambiguous
    labels. Output is sorted by (source, target) IRI, so results do not depend
    on input ordering or worker count. Every cell carries confidence 1.0.
    """
    source_index = LabelIndex.build(source, use_alt_labels)
    target_index = LabelIndex.build(target, use_alt_labels)
    keys = [k for k in source_index.buckets if k in target_index.buckets]

    if workers > 1 and len(keys) > 1:
        chunk = (len(keys) + workers - 1) // workers
        parts = [keys[i : i + chunk] for i in range(0, len(keys), chunk)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = pool.map(
                lambda part: _match_buckets(
                    part, source_index.buckets, target_index.buckets, unique_only
                ),
                parts,
            )
        pairs: set[tuple[str, str]] = set()
        for result in results:
            pairs |= result
    else:
        pairs = _match_buckets(keys, source_index.buckets, target_index.buckets, unique_only)

    cells = [Correspondence(s, t) for s, t in sorted(pairs)]
    return Alignment(cells, source.id, target.id)


def is_trivial(
    c: Correspondence, source: KnowledgeGraph, target: KnowledgeGraph
) -> bool:
    """True iff the endpoints share a raw primary label, compared exactly.

    Case-sensitive, no normalization, alt-labels never considered.
    """
    if c.source not in source.entities:
        raise ValueError(f"entity {c.source} not in graph {source.id}")
    if c.target not in target.entities:
        raise ValueError(f"entity {c.target} not in graph {target.id}")
    source_labels = source.labels.get(c.source, set())
    target_labels = target.labels.get(c.target, set())
    return not source_labels.isdisjoint(target_labels)


@dataclass
class KindGoldStats:
    total: int = 0
    non_trivial: int = 0


@dataclass
class GoldStatistics:
    per_kind: dict[EntityKind, KindGoldStats]
    unresolvable: int = 0

    def totals(self) -> KindGoldStats:
        agg = KindGoldStats()
        for stats in self.per_kind.values():
            agg.total += stats.total
            agg.non_trivial += stats.non_trivial
        return agg


def gold_statistics(
    gold: GoldStandard, source: KnowledgeGraph, target: KnowledgeGraph
) -> GoldStatistics:
    """Total and non-trivial gold pair counts per entity kind.

    Pairs whose endpoints cannot be resolved in the graphs are tallied as
    unresolvable rather than silently dropped. A pair is bucketed under the
    kind of its source endpoint.
    """
    per_kind = {kind: KindGoldStats() for kind in EntityKind}
    unresolvable = 0
    for c in gold.positives:
        if c.source not in source.entities or c.target not in target.entities:
            unresolvable += 1
            continue
        stats = per_kind[source.entities[c.source]]
        stats.total += 1
        if not is_trivial(c, source, target):
            stats.non_trivial += 1
    return GoldStatistics(per_kind, unresolvable)
