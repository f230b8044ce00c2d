"""Correspondences, alignments, and their file formats.

Two interchangeable serializations are supported: the XML alignment format
(``Cell`` elements with entity1/entity2/relation/measure) and a plain
``source<TAB>target<TAB>relation<TAB>confidence`` TSV.
"""

from __future__ import annotations

import logging
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import escape, quoteattr

logger = logging.getLogger(__name__)

ALIGNMENT_NS = "http://knowledgeweb.semanticweb.org/heterogeneity/alignment"
RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"

EQUIVALENCE = "="
_RELATION_ALIASES = {"=": "=", "equivalence": "=", "eq": "="}


def canonical_relation(raw: str) -> str:
    rel = _RELATION_ALIASES.get(raw.strip().lower())
    if rel is None:
        raise ValueError(f"unknown relation {raw!r}")
    return rel


@dataclass(frozen=True, slots=True)
class Correspondence:
    """An asserted equivalence between one entity in each of two graphs."""

    source: str
    target: str
    relation: str = EQUIVALENCE
    confidence: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "relation", canonical_relation(self.relation))
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence {self.confidence} outside [0, 1]")

    @property
    def pair(self) -> tuple[str, str]:
        return (self.source, self.target)


@dataclass
class Alignment:
    """The correspondences one matcher produced for one graph pair."""

    cells: list[Correspondence] = field(default_factory=list)
    source_id: str | None = None
    target_id: str | None = None
    duplicates: int = 0  # cells dropped by dedup at parse/build time

    def __post_init__(self) -> None:
        if len({c.pair for c in self.cells}) != len(self.cells):
            raise ValueError("alignment holds duplicate (source, target) pairs")

    @classmethod
    def from_cells(cls, cells, source_id=None, target_id=None) -> "Alignment":
        seen: set[tuple[str, str]] = set()
        kept: list[Correspondence] = []
        duplicates = 0
        for cell in cells:
            if cell.pair in seen:
                duplicates += 1
                continue
            seen.add(cell.pair)
            kept.append(cell)
        if duplicates:
            logger.warning("alignment: dropped %d duplicate cells", duplicates)
        return cls(kept, source_id, target_id, duplicates)

    @property
    def task(self) -> tuple[str | None, str | None]:
        return (self.source_id, self.target_id)

    def pairs(self) -> set[tuple[str, str]]:
        return {c.pair for c in self.cells}

    def __len__(self) -> int:
        return len(self.cells)

    def __iter__(self):
        return iter(self.cells)


def _parse_alignment_xml(path: Path) -> Alignment:
    cells: list[Correspondence] = []
    onto1 = onto2 = None
    resource = f"{{{RDF_NS}}}resource"

    def strip_ns(tag: str) -> str:
        return tag.rsplit("}", 1)[-1]

    entity1 = entity2 = relation = measure = None
    for event, elem in ET.iterparse(path, events=("end",)):
        tag = strip_ns(elem.tag)
        if tag == "entity1":
            entity1 = elem.get(resource) or (elem.text or "").strip()
        elif tag == "entity2":
            entity2 = elem.get(resource) or (elem.text or "").strip()
        elif tag == "relation":
            relation = (elem.text or "=").strip()
        elif tag == "measure":
            measure = (elem.text or "").strip()
        elif tag == "Cell":
            if not entity1 or not entity2:
                raise ValueError("Cell missing entity1/entity2")
            cells.append(
                Correspondence(
                    entity1,
                    entity2,
                    canonical_relation(relation or "="),
                    float(measure) if measure else 1.0,
                )
            )
            entity1 = entity2 = relation = measure = None
            elem.clear()
        elif tag == "onto1":
            onto1 = "".join(elem.itertext()).strip() or onto1
        elif tag == "onto2":
            onto2 = "".join(elem.itertext()).strip() or onto2
    return Alignment.from_cells(cells, onto1, onto2)


def _parse_alignment_tsv(path: Path) -> Alignment:
    cells: list[Correspondence] = []
    with open(path, "rt", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) < 2:
                raise ValueError(f"{path}:{line_no}: expected at least source<TAB>target")
            source, target = parts[0].strip(), parts[1].strip()
            relation = canonical_relation(parts[2]) if len(parts) > 2 and parts[2].strip() else EQUIVALENCE
            confidence = float(parts[3]) if len(parts) > 3 and parts[3].strip() else 1.0
            cells.append(Correspondence(source, target, relation, confidence))
    return Alignment.from_cells(cells)


def parse_alignment(path, source_id: str | None = None, target_id: str | None = None) -> Alignment:
    """Read an alignment file; XML vs TSV is sniffed from the content."""
    path = Path(path)
    with open(path, "rb") as fh:
        head = fh.read(256).lstrip()
    if head.startswith(b"<"):
        alignment = _parse_alignment_xml(path)
    else:
        alignment = _parse_alignment_tsv(path)
    if source_id is not None:
        alignment.source_id = source_id
    if target_id is not None:
        alignment.target_id = target_id
    return alignment


def _format_confidence(value: float) -> str:
    return repr(round(value, 12))


def write_alignment_tsv(alignment: Alignment, path) -> None:
    with open(path, "wt", encoding="utf-8") as fh:
        for c in alignment.cells:
            fh.write(f"{c.source}\t{c.target}\t{c.relation}\t{_format_confidence(c.confidence)}\n")


def write_alignment_xml(alignment: Alignment, path) -> None:
    lines = [
        "<?xml version='1.0' encoding='utf-8'?>",
        f"<rdf:RDF xmlns='{ALIGNMENT_NS}'",
        f"  xmlns:rdf='{RDF_NS}'>",
        "<Alignment>",
        "  <xml>yes</xml>",
        "  <level>0</level>",
        "  <type>??</type>",
    ]
    if alignment.source_id:
        lines.append(f"  <onto1>{escape(alignment.source_id)}</onto1>")
    if alignment.target_id:
        lines.append(f"  <onto2>{escape(alignment.target_id)}</onto2>")
    for c in alignment.cells:
        lines.extend(
            [
                "  <map><Cell>",
                f"    <entity1 rdf:resource={quoteattr(c.source)}/>",
                f"    <entity2 rdf:resource={quoteattr(c.target)}/>",
                f"    <relation>{escape(c.relation)}</relation>",
                f"    <measure>{_format_confidence(c.confidence)}</measure>",
                "  </Cell></map>",
            ]
        )
    lines.append("</Alignment>")
    lines.append("</rdf:RDF>")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_alignment(alignment: Alignment, path) -> None:
    """Emit XML for .xml/.rdf paths, TSV otherwise."""
    path = Path(path)
    if path.suffix.lower() in {".xml", ".rdf"}:
        write_alignment_xml(alignment, path)
    else:
        write_alignment_tsv(alignment, path)
