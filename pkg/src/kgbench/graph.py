"""Typed knowledge-graph model built from a stream of triples.

Entity kinds follow the shallow wiki-extraction schema: properties are
explicitly typed, typing objects are classes, and everything else that
occurs as a subject is an instance.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable

from .rdf import Literal, ParseIssue, Triple, parse_ntriples

logger = logging.getLogger(__name__)

RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
RDFS_LABEL = "http://www.w3.org/2000/01/rdf-schema#label"
SKOS_ALT_LABEL = "http://www.w3.org/2004/02/skos/core#altLabel"
RDF_PROPERTY = "http://www.w3.org/1999/02/22-rdf-syntax-ns#Property"
OWL_CLASS = "http://www.w3.org/2002/07/owl#Class"
RDFS_CLASS = "http://www.w3.org/2000/01/rdf-schema#Class"
OWL_OBJECT_PROPERTY = "http://www.w3.org/2002/07/owl#ObjectProperty"
OWL_DATATYPE_PROPERTY = "http://www.w3.org/2002/07/owl#DatatypeProperty"
OWL_ANNOTATION_PROPERTY = "http://www.w3.org/2002/07/owl#AnnotationProperty"


class EntityKind(str, Enum):
    CLASS = "class"
    PROPERTY = "property"
    INSTANCE = "instance"

    def __str__(self) -> str:  # plain value in CSV/JSON output
        return self.value


@dataclass(frozen=True)
class ExtractionConfig:
    """Predicates and marker IRIs steering kind assignment and label harvest."""

    type_predicate: str = RDF_TYPE
    label_predicate: str = RDFS_LABEL
    alt_label_predicate: str = SKOS_ALT_LABEL
    class_markers: frozenset[str] = frozenset({OWL_CLASS, RDFS_CLASS})
    property_markers: frozenset[str] = frozenset(
        {RDF_PROPERTY, OWL_OBJECT_PROPERTY, OWL_DATATYPE_PROPERTY, OWL_ANNOTATION_PROPERTY}
    )

    @classmethod
    def from_file(cls, path) -> "ExtractionConfig":
        """Read ``key = value`` lines; list values are comma-separated."""
        values: dict[str, str] = {}
        for raw in Path(path).read_text(encoding="utf-8").splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"bad config line (expected key = value): {raw!r}")
            key, _, value = line.partition("=")
            values[key.strip()] = value.strip()
        kwargs = {}
        for key in ("type_predicate", "label_predicate", "alt_label_predicate"):
            if key in values:
                kwargs[key] = values.pop(key)
        for key in ("class_markers", "property_markers"):
            if key in values:
                kwargs[key] = frozenset(
                    v.strip() for v in values.pop(key).split(",") if v.strip()
                )
        if values:
            raise ValueError(f"unknown config keys: {sorted(values)}")
        return cls(**kwargs)


@dataclass(frozen=True)
class KindConflict:
    iri: str
    resolved: EntityKind


@dataclass
class KnowledgeGraph:
    """Completed graphs are treated as immutable and shared freely."""

    id: str
    entities: dict[str, EntityKind]
    labels: dict[str, set[str]]
    alt_labels: dict[str, set[str]]
    triple_count: int
    conflicts: list[KindConflict] = field(default_factory=list)

    def kind_of(self, iri: str) -> EntityKind | None:
        return self.entities.get(iri)

    def labels_of(self, iri: str) -> set[str]:
        return self.labels.get(iri, set())

    def alt_labels_of(self, iri: str) -> set[str]:
        return self.alt_labels.get(iri, set())

    def kind_counts(self) -> dict[EntityKind, int]:
        counts = {kind: 0 for kind in EntityKind}
        for kind in self.entities.values():
            counts[kind] += 1
        return counts

    def __len__(self) -> int:
        return len(self.entities)


def local_name(iri: str) -> str:
    """Fragment after the last '/' or '#', with underscores as spaces."""
    cut = max(iri.rfind("/"), iri.rfind("#"))
    return iri[cut + 1 :].replace("_", " ")


def build_graph(
    triples: Iterable[Triple],
    graph_id: str,
    config: ExtractionConfig = ExtractionConfig(),
) -> KnowledgeGraph:
    """Single streaming pass over ``triples`` into a typed entity store.

    Kind assignment: explicitly typed properties win, then class evidence
    (explicit class marker or occurrence as a typing object), then instance.
    Entities carrying both property and class evidence are recorded as
    conflicts and resolved as properties. Entities without a label triple
    fall back to their IRI local name.
    """
    type_pred = config.type_predicate
    label_pred = config.label_predicate
    alt_pred = config.alt_label_predicate
    property_markers = config.property_markers
    class_markers = config.class_markers

    subjects: set[str] = set()
    typed_property: set[str] = set()
    typed_class: set[str] = set()   # explicit class markers
    typing_objects: set[str] = set()
    labels: dict[str, set[str]] = {}
    alt_labels: dict[str, set[str]] = {}
    count = 0

    for subject, predicate, obj in triples:
        count += 1
        subjects.add(subject)
        if predicate == type_pred:
            if isinstance(obj, Literal):
                continue  # typing with a literal carries no kind evidence
            if obj in property_markers:
                typed_property.add(subject)
            elif obj in class_markers:
                typed_class.add(subject)
            typing_objects.add(obj)
        elif predicate == label_pred:
            text = obj.lexical if isinstance(obj, Literal) else str(obj)
            labels.setdefault(subject, set()).add(text)
        elif predicate == alt_pred:
            text = obj.lexical if isinstance(obj, Literal) else str(obj)
            alt_labels.setdefault(subject, set()).add(text)

    entities: dict[str, EntityKind] = {}
    conflicts: list[KindConflict] = []
    for iri in subjects | typing_objects:
        if iri in typed_property:
            kind = EntityKind.PROPERTY
            if iri in typed_class or iri in typing_objects:
                # shallow schemas mark properties explicitly; that marker wins
                conflicts.append(KindConflict(iri, kind))
        elif iri in typed_class or iri in typing_objects:
            kind = EntityKind.CLASS
        else:
            kind = EntityKind.INSTANCE
        entities[iri] = kind

    for iri in entities:
        if iri not in labels:
            labels[iri] = {local_name(iri)}

    # label triples always make their subject an entity, so keys line up;
    # alt-labels may not, guard anyway
    stray = [iri for iri in alt_labels if iri not in entities]
    for iri in stray:
        del alt_labels[iri]
    if stray:
        logger.warning("%s: dropped alt-labels of %d non-entities", graph_id, len(stray))

    return KnowledgeGraph(
        id=graph_id,
        entities=entities,
        labels=labels,
        alt_labels=alt_labels,
        triple_count=count,
        conflicts=conflicts,
    )


def load_graph(
    path,
    graph_id: str | None = None,
    config: ExtractionConfig = ExtractionConfig(),
    *,
    strict: bool = True,
    issues: list[ParseIssue] | None = None,
) -> KnowledgeGraph:
    """Parse an N-Triples file (optionally gzipped) and build the graph."""
    path = Path(path)
    if graph_id is None:
        graph_id = path.name.split(".")[0]
    triples = parse_ntriples(path, strict=strict, issues=issues)
    return build_graph(triples, graph_id, config)
