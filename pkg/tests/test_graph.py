import pytest

from kgbench.graph import (
    OWL_CLASS,
    RDF_PROPERTY,
    EntityKind,
    ExtractionConfig,
    load_graph,
    local_name,
)

from conftest import graph_from_nt

NT = """
<http://x/p> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://www.w3.org/1999/02/22-rdf-syntax-ns#Property> .
<http://x/C> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://www.w3.org/2002/07/owl#Class> .
<http://x/a> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://x/C> .
<http://x/a> <http://www.w3.org/2000/01/rdf-schema#label> "Anna"@en .
<http://x/a> <http://www.w3.org/2004/02/skos/core#altLabel> "Annie" .
<http://x/b> <http://x/p> "just a value" .
"""


def test_kind_assignment():
    g = graph_from_nt(NT, "x")
    assert g.kind_of("http://x/p") is EntityKind.PROPERTY
    assert g.kind_of("http://x/C") is EntityKind.CLASS
    assert g.kind_of("http://x/a") is EntityKind.INSTANCE
    assert g.kind_of("http://x/b") is EntityKind.INSTANCE


def test_typing_objects_become_class_entities():
    # C never appears as a subject, only as typing object; it is still an
    # entity, and so are the marker IRIs themselves
    g = graph_from_nt("<http://x/a> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://x/C> .", "x")
    assert g.kind_of("http://x/C") is EntityKind.CLASS
    g2 = graph_from_nt(NT, "x")
    assert g2.kind_of(RDF_PROPERTY) is EntityKind.CLASS
    assert g2.kind_of(OWL_CLASS) is EntityKind.CLASS


def test_labels_and_alt_labels():
    g = graph_from_nt(NT, "x")
    assert g.labels_of("http://x/a") == {"Anna"}
    assert g.alt_labels_of("http://x/a") == {"Annie"}


def test_fallback_label_from_local_name():
    g = graph_from_nt(NT, "x")
    assert g.labels_of("http://x/b") == {"b"}
    assert local_name("http://x/Kathryn_Janeway") == "Kathryn Janeway"
    assert local_name("http://x/page#Some_Section") == "Some Section"
    g2 = graph_from_nt(
        "<http://x/Kathryn_Janeway> <http://x/p> <http://x/b> .", "x"
    )
    assert g2.labels_of("http://x/Kathryn_Janeway") == {"Kathryn Janeway"}


def test_kind_conflict_resolved_property_first():
    nt = """
    <http://x/q> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://www.w3.org/1999/02/22-rdf-syntax-ns#Property> .
    <http://x/q> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://www.w3.org/2002/07/owl#Class> .
    """
    g = graph_from_nt(nt, "x")
    assert g.kind_of("http://x/q") is EntityKind.PROPERTY
    assert any(c.iri == "http://x/q" for c in g.conflicts)


def test_kind_counts_sum_to_entities():
    g = graph_from_nt(NT, "x")
    assert sum(g.kind_counts().values()) == len(g)
    assert g.triple_count == 6


def test_custom_extraction_config():
    config = ExtractionConfig(
        type_predicate="http://x/isA",
        label_predicate="http://x/name",
        alt_label_predicate="http://x/aka",
        class_markers=frozenset({"http://x/Kind"}),
        property_markers=frozenset({"http://x/Rel"}),
    )
    nt = """
    <http://x/r> <http://x/isA> <http://x/Rel> .
    <http://x/k> <http://x/isA> <http://x/Kind> .
    <http://x/e> <http://x/name> "Thing" .
    <http://x/e> <http://x/aka> "That thing" .
    """
    g = graph_from_nt(nt, "x", config)
    assert g.kind_of("http://x/r") is EntityKind.PROPERTY
    assert g.kind_of("http://x/k") is EntityKind.CLASS
    assert g.labels_of("http://x/e") == {"Thing"}
    assert g.alt_labels_of("http://x/e") == {"That thing"}


def test_extraction_config_from_file(tmp_path):
    path = tmp_path / "extract.conf"
    path.write_text(
        "# comment\n"
        "type_predicate = http://x/isA\n"
        "class_markers = http://x/Kind, http://x/Sort\n",
        encoding="utf-8",
    )
    config = ExtractionConfig.from_file(path)
    assert config.type_predicate == "http://x/isA"
    assert config.class_markers == frozenset({"http://x/Kind", "http://x/Sort"})
    assert config.label_predicate == ExtractionConfig().label_predicate

    (tmp_path / "bad.conf").write_text("no_such_key = 1\n", encoding="utf-8")
    with pytest.raises(ValueError, match="no_such_key"):
        ExtractionConfig.from_file(tmp_path / "bad.conf")


def test_label_alt_label_keys_subset_of_entities():
    g = graph_from_nt(NT, "x")
    assert set(g.labels) <= set(g.entities)
    assert set(g.alt_labels) <= set(g.entities)


def test_load_graph_strict_and_lenient(tmp_path):
    path = tmp_path / "broken.nt"
    path.write_text(
        "<http://x/a> <http://x/p> <http://x/b> .\nbroken line\n", encoding="utf-8"
    )
    from kgbench.rdf import NTriplesError

    with pytest.raises(NTriplesError):
        load_graph(path, "x")
    issues = []
    g = load_graph(path, "x", strict=False, issues=issues)
    assert g.triple_count == 1
    assert len(issues) == 1


def test_load_graph_default_id_from_filename(mini_dir):
    g = load_graph(mini_dir / "alpha.nt")
    assert g.id == "alpha"


def test_mini_graphs(alpha, beta):
    assert alpha.kind_of("http://kg.example.org/alpha/resource/Person") is EntityKind.CLASS
    assert alpha.kind_of("http://kg.example.org/alpha/property/name") is EntityKind.PROPERTY
    assert alpha.kind_of("http://kg.example.org/alpha/resource/Kathryn_Janeway") is EntityKind.INSTANCE
    assert "Catarina" in alpha.alt_labels_of("http://kg.example.org/alpha/resource/Kathryn_Janeway")
    assert beta.labels_of("http://kg.example.org/beta/resource/Star_Trek_song") == {"Star Trek"}
