"""Gold-standard construction from wiki page dumps and crowd verdicts.

Two strategies are implemented: interwiki-link extraction with redirect
resolution and functional/injective filtering (yielding a strict 1:1 partial
gold standard), and five-rater majority aggregation with explicit no-match
negatives and triangle closure across target wikis.
"""

from __future__ import annotations

import json
import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Protocol

from .alignment import Alignment, Correspondence, parse_alignment, write_alignment

DEFAULT_IRI_TEMPLATE = "http://kg.example.org/{wiki}/resource/{title}"

_HEADING_RE = re.compile(r"^(={2,6})\s*(.*?)\s*\1\s*$")

NO_MATCH = None  # crowd verdict sentinel


def canonical_title(title: str) -> str:
    """Spaces and underscores are interchangeable in wiki titles."""
    return " ".join(title.replace("_", " ").split())


def iri_for_page(wiki: str, title: str, template: str = DEFAULT_IRI_TEMPLATE) -> str:
    return template.format(wiki=wiki, title=canonical_title(title).replace(" ", "_"))


@dataclass
class WikiPage:
    wiki: str
    title: str
    redirect_to: str | None = None
    sections: list[tuple[str, str]] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.title = canonical_title(self.title)
        if self.redirect_to is not None:
            self.redirect_to = canonical_title(self.redirect_to)
            if self.sections:
                raise ValueError(f"redirect page {self.wiki}:{self.title} carries sections")


@dataclass(frozen=True)
class InterwikiLink:
    source: tuple[str, str]  # (wiki, title)
    target: tuple[str, str]
    section_header: str


def split_sections(wikitext: str) -> list[tuple[str, str]]:
    """Split raw wikitext into (header, body) on ``== Header ==`` lines.

    Text before the first heading lands in a section with an empty header.
    """
    sections: list[tuple[str, str]] = []
    header = ""
    body: list[str] = []
    for line in wikitext.splitlines():
        m = _HEADING_RE.match(line.strip())
        if m:
            if header or any(s.strip() for s in body):
                sections.append((header, "\n".join(body)))
            header = m.group(2)
            body = []
        else:
            body.append(line)
    if header or any(s.strip() for s in body):
        sections.append((header, "\n".join(body)))
    return sections


def read_page_dump(path) -> Iterator[WikiPage]:
    """Page-dump records: one JSON object per line.

    Each record carries ``wiki`` and ``title``, plus either ``redirect_to``,
    a ``sections`` list of {header, body} objects, or raw ``text`` to be
    section-split here.
    """
    with open(path, "rt", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{line_no}: bad page record: {exc}") from None
            if "sections" in record:
                sections = [(s["header"], s["body"]) for s in record["sections"]]
            elif "text" in record:
                sections = split_sections(record["text"])
            else:
                sections = []
            yield WikiPage(
                wiki=record["wiki"],
                title=record["title"],
                redirect_to=record.get("redirect_to"),
                sections=sections,
            )


def write_page_dump(pages: Iterable[WikiPage], path) -> None:
    with open(path, "wt", encoding="utf-8") as fh:
        for page in pages:
            record: dict = {"wiki": page.wiki, "title": page.title}
            if page.redirect_to is not None:
                record["redirect_to"] = page.redirect_to
            else:
                record["sections"] = [{"header": h, "body": b} for h, b in page.sections]
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


@dataclass
class LinkExtraction:
    links: list[InterwikiLink]
    unparseable: dict[tuple[str, str], int] = field(default_factory=dict)


def _scan_link_tokens(body: str) -> tuple[list[str], int]:
    """All ``[[...]]`` targets in ``body`` plus a count of unclosed tokens."""
    targets: list[str] = []
    bad = 0
    pos = 0
    while True:
        start = body.find("[[", pos)
        if start < 0:
            break
        end = body.find("]]", start + 2)
        if end < 0:
            bad += 1
            break
        inner = body[start + 2 : end]
        targets.append(inner.split("|", 1)[0].strip())
        pos = end + 2
    return targets, bad


def extract_link_candidates(
    pages: Iterable[WikiPage], link_target_wikis: set[str]
) -> LinkExtraction:
    """Interwiki links found in sections whose header contains "link".

    The header test is a case-insensitive substring match ("External links",
    "Weblinks", ...); links anywhere else are discarded. A link token
    ``[[wiki:Title]]`` addresses another wiki when its prefix names one of
    ``link_target_wikis``.
    """
    links: list[InterwikiLink] = []
    unparseable: dict[tuple[str, str], int] = {}
    for page in pages:
        if page.redirect_to is not None:
            continue
        for header, body in page.sections:
            if "link" not in header.lower():
                continue
            targets, bad = _scan_link_tokens(body)
            if bad:
                key = (page.wiki, page.title)
                unparseable[key] = unparseable.get(key, 0) + bad
            for token in targets:
                if ":" not in token:
                    continue
                prefix, _, title = token.partition(":")
                prefix = prefix.strip()
                title = canonical_title(title)
                if prefix not in link_target_wikis or not title:
                    continue
                if prefix == page.wiki:
                    continue
                links.append(
                    InterwikiLink((page.wiki, page.title), (prefix, title), header)
                )
    return LinkExtraction(links, unparseable)


class RedirectResolver(Protocol):
    def resolve(self, wiki: str, title: str) -> str | None:
        """Immediate redirect target of (wiki, title), or None."""


class FileRedirectResolver:
    """Redirect maps loaded from two-column TSV files, one per wiki."""

    def __init__(self, maps: dict[str, dict[str, str]] | None = None):
        self.maps = maps or {}

    @classmethod
    def from_tsv(cls, wiki_to_path: dict[str, object]) -> "FileRedirectResolver":
        maps: dict[str, dict[str, str]] = {}
        for wiki, path in wiki_to_path.items():
            table: dict[str, str] = {}
            for line_no, raw in enumerate(
                Path(path).read_text(encoding="utf-8").splitlines(), start=1
            ):
                if not raw.strip() or raw.startswith("#"):
                    continue
                parts = raw.split("\t")
                if len(parts) != 2:
                    raise ValueError(f"{path}:{line_no}: expected title<TAB>target")
                table[canonical_title(parts[0])] = canonical_title(parts[1])
            maps[wiki] = table
        return cls(maps)

    @classmethod
    def from_pages(cls, pages: Iterable[WikiPage]) -> "FileRedirectResolver":
        maps: dict[str, dict[str, str]] = {}
        for page in pages:
            if page.redirect_to is not None:
                maps.setdefault(page.wiki, {})[page.title] = page.redirect_to
        return cls(maps)

    def resolve(self, wiki: str, title: str) -> str | None:
        return self.maps.get(wiki, {}).get(title)


@dataclass
class RedirectResolution:
    links: list[InterwikiLink]
    dropped: list[tuple[InterwikiLink, str]] = field(default_factory=list)


def resolve_redirects(
    links: Iterable[InterwikiLink],
    resolver: RedirectResolver,
    max_depth: int = 10,
) -> RedirectResolution:
    """Replace each link target by the end of its redirect chain.

    Links whose chain cycles or exceeds ``max_depth`` are dropped and
    reported, not silently kept.
    """
    kept: list[InterwikiLink] = []
    dropped: list[tuple[InterwikiLink, str]] = []
    for link in links:
        wiki, title = link.target
        seen = {title}
        ok = True
        for _ in range(max_depth):
            nxt = resolver.resolve(wiki, title)
            if nxt is None:
                break
            if nxt in seen:
                dropped.append((link, f"redirect cycle at {wiki}:{nxt}"))
                ok = False
                break
            seen.add(nxt)
            title = nxt
        else:
            if resolver.resolve(wiki, title) is not None:
                dropped.append((link, f"redirect depth > {max_depth} at {wiki}:{title}"))
                ok = False
        if ok:
            if title == link.target[1]:
                kept.append(link)
            else:
                kept.append(InterwikiLink(link.source, (wiki, title), link.section_header))
    return RedirectResolution(kept, dropped)


@dataclass
class GoldStandard:
    """A partial reference alignment, optionally with explicit negatives.

    ``negatives`` entries (entity, counterpart graph id) assert that the
    entity has no match in that graph. ``one_to_one`` selects the evaluation
    semantics that scores wrong-partner cells as false positives.
    """

    positives: set[Correspondence] = field(default_factory=set)
    negatives: set[tuple[str, str]] = field(default_factory=set)
    one_to_one: bool = False

    def check_one_to_one(self) -> None:
        sources = Counter(c.source for c in self.positives)
        targets = Counter(c.target for c in self.positives)
        bad = [e for e, n in sources.items() if n > 1] + [
            e for e, n in targets.items() if n > 1
        ]
        if bad:
            raise ValueError(f"gold standard is not 1:1, repeated entities: {sorted(bad)[:5]}")

    def pairs(self) -> set[tuple[str, str]]:
        return {c.pair for c in self.positives}


def group_links(
    links: Iterable[InterwikiLink],
) -> dict[tuple[str, str], list[InterwikiLink]]:
    groups: dict[tuple[str, str], list[InterwikiLink]] = defaultdict(list)
    for link in links:
        groups[(link.source[0], link.target[0])].append(link)
    return dict(groups)


def enforce_functional_injective(
    links: Iterable[InterwikiLink],
    iri_template: str = DEFAULT_IRI_TEMPLATE,
) -> GoldStandard:
    """Filter links down to a strict 1:1 gold standard.

    Step 1 removes all links whose source page links to more than one
    distinct target page; step 2 then removes all links whose target is
    pointed to by more than one remaining source. Removal is total: no
    survivor is picked among conflicting links. All links must belong to one
    (source wiki, target wiki) pair.
    """
    links = list(links)
    wiki_pairs = {(l.source[0], l.target[0]) for l in links}
    if len(wiki_pairs) > 1:
        raise ValueError(f"links span several wiki pairs: {sorted(wiki_pairs)}")

    pairs = {(l.source[1], l.target[1]) for l in links}
    targets_per_source: dict[str, set[str]] = defaultdict(set)
    for s, t in pairs:
        targets_per_source[s].add(t)
    functional = {(s, t) for s, t in pairs if len(targets_per_source[s]) == 1}

    sources_per_target: dict[str, set[str]] = defaultdict(set)
    for s, t in functional:
        sources_per_target[t].add(s)
    surviving = {(s, t) for s, t in functional if len(sources_per_target[t]) == 1}

    if not surviving:
        return GoldStandard(one_to_one=True)
    (source_wiki, target_wiki), = wiki_pairs
    positives = {
        Correspondence(
            iri_for_page(source_wiki, s, iri_template),
            iri_for_page(target_wiki, t, iri_template),
        )
        for s, t in surviving
    }
    gold = GoldStandard(positives=positives, one_to_one=True)
    gold.check_one_to_one()
    return gold


@dataclass
class CrowdTask:
    """One source entity judged against one target wiki by five raters.

    A response is either the IRI of the matched entity or ``None`` for
    "no matching page found".
    """

    source: str
    target_wiki: str
    responses: list[str | None]

    @property
    def task_id(self) -> str:
        return f"{self.source} -> {self.target_wiki}"


_NO_VERDICT = object()


def _majority(task: CrowdTask) -> str | None | object:
    """The response given by >= 3 of the 5 raters, or _NO_VERDICT."""
    if len(task.responses) != 5:
        raise ValueError(
            f"crowd task {task.task_id}: expected exactly 5 responses, got {len(task.responses)}"
        )
    counts = Counter(task.responses)
    verdict, n = counts.most_common(1)[0]
    return verdict if n >= 3 else _NO_VERDICT


def crowd_matches(tasks: Iterable[CrowdTask]) -> list[tuple[str, str, str]]:
    """Majority-accepted matches as (source, target wiki, target) records."""
    matches = []
    for task in tasks:
        verdict = _majority(task)
        if verdict is not _NO_VERDICT and verdict is not NO_MATCH:
            matches.append((task.source, task.target_wiki, verdict))
    return matches


def aggregate_crowd(tasks: Iterable[CrowdTask]) -> GoldStandard:
    """Majority vote over five raters per task.

    >= 3 naming the same entity yields a positive, >= 3 no-match verdicts an
    explicit negative, anything else nothing. Conflicting verdicts for the
    same (source, target wiki) across tasks are an input error.
    """
    positive_keys: dict[tuple[str, str], str] = {}
    negatives: set[tuple[str, str]] = set()
    positives: set[Correspondence] = set()
    for task in tasks:
        verdict = _majority(task)
        key = (task.source, task.target_wiki)
        if verdict is _NO_VERDICT:
            continue
        if verdict is NO_MATCH:
            if key in positive_keys:
                raise ValueError(f"conflicting crowd verdicts for {task.task_id}")
            negatives.add(key)
        else:
            if key in negatives or positive_keys.get(key, verdict) != verdict:
                raise ValueError(f"conflicting crowd verdicts for {task.task_id}")
            positive_keys[key] = verdict
            positives.add(Correspondence(task.source, verdict))
    return GoldStandard(positives=positives, negatives=negatives, one_to_one=False)


def close_triangles(
    matches: Iterable[tuple[str, str, str]],
) -> dict[tuple[str, str], set[Correspondence]]:
    """Derive target-to-target pairs from a source matched into two wikis.

    Given accepted matches (source, wiki, entity), every source matched into
    two distinct target wikis contributes the pair of its two targets to the
    gold of that wiki pair. Wiki pairs are keyed in lexicographic order; the
    source wiki itself is never touched.
    """
    by_source: dict[str, list[tuple[str, str]]] = defaultdict(list)
    for source, wiki, entity in matches:
        by_source[source].append((wiki, entity))
    derived: dict[tuple[str, str], set[Correspondence]] = defaultdict(set)
    for targets in by_source.values():
        for i in range(len(targets)):
            for j in range(i + 1, len(targets)):
                (w1, e1), (w2, e2) = targets[i], targets[j]
                if w1 == w2:
                    continue
                if w2 < w1:
                    (w1, e1), (w2, e2) = (w2, e2), (w1, e1)
                derived[(w1, w2)].add(Correspondence(e1, e2))
    return dict(derived)


def save_gold(gold: GoldStandard, positives_path, negatives_path=None) -> None:
    """Positives as an alignment file; negatives as a sidecar TSV."""
    cells = sorted(gold.positives, key=lambda c: c.pair)
    write_alignment(Alignment(cells), positives_path)
    if negatives_path is not None:
        with open(negatives_path, "wt", encoding="utf-8") as fh:
            for entity, graph in sorted(gold.negatives):
                fh.write(f"{entity}\t{graph}\tnegative\n")


def load_gold(positives_path, negatives_path=None, one_to_one: bool = False) -> GoldStandard:
    alignment = parse_alignment(positives_path)
    negatives: set[tuple[str, str]] = set()
    if negatives_path is not None:
        for line_no, raw in enumerate(
            Path(negatives_path).read_text(encoding="utf-8").splitlines(), start=1
        ):
            if not raw.strip() or raw.startswith("#"):
                continue
            parts = raw.split("\t")
            if len(parts) < 2:
                raise ValueError(
                    f"{negatives_path}:{line_no}: expected entity<TAB>counterpart-graph"
                )
            negatives.add((parts[0].strip(), parts[1].strip()))
    return GoldStandard(
        positives=set(alignment.cells), negatives=negatives, one_to_one=one_to_one
    )
