import pytest

from config import TestingConfig
from gpk import create_app
from gpk.corpus import corpus, named_graph
from gpk.structures import MultiGraph, edges_first_order, reorder, to_incidence


@pytest.fixture
def workbench():
    return create_app(TestingConfig)


@pytest.fixture(scope="session")
def tiny_graphs():
    return corpus("tiny")


@pytest.fixture(scope="session")
def tiny_digraphs():
    return corpus("tiny", directed=True)


def _ordered(name, directed=False):
    graph = named_graph(name)
    if directed and not graph.directed:
        graph = MultiGraph(True, graph.vertices, graph.edges)
    structure = to_incidence(graph)
    return reorder(structure, edges_first_order(structure))


@pytest.fixture
def ordered():
    """Built-in graph by name as an incidence structure in edges-first order."""
    return _ordered
