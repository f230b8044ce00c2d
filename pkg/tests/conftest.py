import io
from pathlib import Path

import pytest

from kgbench.graph import ExtractionConfig, KnowledgeGraph, build_graph
from kgbench.rdf import parse_ntriples

DATA = Path(__file__).parent / "data"


def graph_from_nt(text: str, graph_id: str, config: ExtractionConfig = ExtractionConfig()) -> KnowledgeGraph:
    """Build a graph from inline N-Triples, for small hand fixtures."""
    return build_graph(parse_ntriples(io.StringIO(text)), graph_id, config)


@pytest.fixture(scope="session")
def mini_dir() -> Path:
    return DATA / "mini"


@pytest.fixture(scope="session")
def alpha(mini_dir) -> KnowledgeGraph:
    from kgbench.graph import load_graph

    return load_graph(mini_dir / "alpha.nt", "alpha")


@pytest.fixture(scope="session")
def beta(mini_dir) -> KnowledgeGraph:
    from kgbench.graph import load_graph

    return load_graph(mini_dir / "beta.nt", "beta")
