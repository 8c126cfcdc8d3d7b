import pytest

from gpk.errors import CapacityError, DefinitionError, GpkError
from gpk.polyring import Polynomial
from gpk.recurrence import DeconstructionEvaluator, builtin_definition, evaluate_recursive, load_definition
from gpk.structures import to_incidence
from gpk.synthesis import (
    DELETED,
    ExpansionEvaluator,
    equivalence_check,
    simulate_coloring,
    synthesize,
    world_views,
)

UNDIRECTED = ["potts", "matching", "tutte", "xi"]


@pytest.fixture
def potts():
    return builtin_definition("potts")


def _as_set(colorings):
    return {(frozenset(coloring.items()), str(value)) for coloring, value in colorings}


def test_contraction_branch_of_k2(ordered, potts):
    structure = ordered("k2")
    coloring = {"e1": 2, "v1": DELETED, "v2": 1}
    assert simulate_coloring(potts, structure, None, coloring) == (True, Polynomial.parse("q*v"))
    coloring = {"e1": 3, "v1": 1, "v2": 1}
    assert simulate_coloring(potts, structure, None, coloring) == (True, Polynomial.parse("q^2"))


@pytest.mark.parametrize("coloring", [
    {"e1": 2, "v1": 1, "v2": 1},
    {"e1": 1, "v1": 1, "v2": 1},
    {"e1": 3, "v1": 1, "v2": DELETED},
    {"e1": 9, "v1": 1, "v2": 1},
    {"e1": DELETED, "v1": 1, "v2": 1},
    {"e1": 3, "v1": 1},
])
def test_invalid_colorings(ordered, potts, coloring):
    valid, _ = simulate_coloring(potts, ordered("k2"), None, coloring)
    assert not valid


def test_world_views_follow_the_marks(ordered, potts):
    views = world_views(potts, ordered("k2"), None, {"e1": 2, "v1": DELETED, "v2": 1})
    assert len(views) == 4
    assert views[0].universe == ("e1", "v1", "v2")
    assert views[1].universe == ("v2",)
    assert views[2].universe == ("v2",)
    assert len(views[-1]) == 0


@pytest.mark.parametrize("name", UNDIRECTED)
def test_expansion_matches_the_recursion_on_the_tiny_corpus(tiny_graphs, name):
    structures = [to_incidence(graph) for graph in tiny_graphs]
    report = equivalence_check(builtin_definition(name), structures, samples=2)
    assert report.checked >= len(structures)
    assert report.mismatches == []
    assert report.passed


def test_cover_expansion_matches_the_recursion(tiny_digraphs):
    structures = [to_incidence(graph) for graph in tiny_digraphs]
    report = equivalence_check(builtin_definition("cover"), structures, samples=2)
    assert report.passed
    assert report.to_dict()["checked"] == report.checked


@pytest.mark.slow
@pytest.mark.parametrize("name", UNDIRECTED)
def test_expansion_matches_the_recursion_in_translated_mode(tiny_graphs, name):
    structures = [to_incidence(graph) for graph in tiny_graphs]
    assert equivalence_check(builtin_definition(name), structures, guard_mode="translated").passed


@pytest.mark.parametrize("name, graph", [("potts", "k2"), ("potts", "loop1"), ("matching", "p3"), ("xi", "k2")])
def test_exhaustive_and_pruned_enumerations_agree(ordered, name, graph):
    definition = builtin_definition(name)
    structure = ordered(graph)
    pruned = ExpansionEvaluator(definition).colorings(structure)
    exhaustive = ExpansionEvaluator(definition, mode="exhaustive").colorings(structure)
    assert _as_set(pruned) == _as_set(exhaustive)
    assert len(pruned) == len(exhaustive)


@pytest.mark.parametrize("name, graph, directed", [
    ("potts", "c3", False),
    ("matching", "p4", False),
    ("tutte", "c3", False),
    ("xi", "par2", False),
    ("cover", "d2cycle", True),
])
def test_translated_guards_agree_with_world_view_guards(ordered, name, graph, directed):
    definition = builtin_definition(name)
    structure = ordered(graph, directed)
    direct = ExpansionEvaluator(definition).evaluate(structure)
    translated = ExpansionEvaluator(definition, guard_mode="translated").evaluate(structure)
    assert direct == translated == evaluate_recursive(definition, structure)


def test_valid_colorings_match_the_leaves(ordered):
    definition = builtin_definition("xi")
    structure = ordered("c3")
    assert synthesize(definition).count_valid(structure) == DeconstructionEvaluator(definition).leaf_count(structure)


def test_synthesis_without_surgeries(ordered, potts):
    structure = ordered("p3")
    assert synthesize(potts, use_surgeries=False).evaluate(structure) == synthesize(potts).evaluate(structure)


def test_dump_lists_every_coloring(ordered, potts):
    text = synthesize(potts).dump(ordered("k2"))
    assert text.startswith("potts on graph2 [e1 v1 v2]")
    assert "e1:U2(contract) v1:D v2:U1(vertex)  ->  q*v" in text
    assert "e1:U3(delete) v1:U1(vertex) v2:U1(vertex)  ->  q^2" in text
    assert "2 valid coloring(s), total q^2 + q*v" in text


def test_exhaustive_enumeration_is_capped(ordered, potts):
    with pytest.raises(CapacityError):
        ExpansionEvaluator(potts, mode="exhaustive", max_colorings=100).colorings(ordered("k2"))


def test_unknown_modes_are_rejected(potts):
    with pytest.raises(GpkError):
        ExpansionEvaluator(potts, mode="lazy")
    with pytest.raises(GpkError):
        ExpansionEvaluator(potts, guard_mode="oracle")


def test_wider_contexts_are_rejected():
    text = """
    (recursive-definition pairs
      (context-arity 2)
      (order true)
      (rule both
        (guard true)
        (scheme (params x1 x2) (domain y (and (!= y x1) (!= y x2))) (relation N (y z) (N y z)))
        (coeff 1)))
    """
    with pytest.raises(DefinitionError):
        synthesize(load_definition(text))
