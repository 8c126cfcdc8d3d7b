import itertools

import pytest

from gpk.catalog import (
    CATALOG,
    check_entry,
    entries,
    get_entry,
    renaming_invariance_test,
    xi_potts_specialization,
)
from gpk.catalog.expansions import expansion, indexed
from gpk.catalog.oracles import falling, oracle_tutte
from gpk.corpus import corpus, named_graph
from gpk.errors import DefinitionError, RenamingError, VocabularyMismatchError
from gpk.polyring import Polynomial, eval_expr, variable
from gpk.structures import to_incidence
from gpk.utils import Budget

UNDIRECTED = ["matching", "tutte", "potts", "xi", "noble-welsh"]

EXPECTED = [
    ("potts", "k2", "q^2 + q*v"),
    ("potts", "loop1", "q + q*v"),
    ("potts", "e1", "q"),
    ("matching", "k2", "X^2 + Y"),
    ("matching", "p3", "X^3 + 2*X*Y"),
    ("matching", "loop1", "X + Y"),
    ("tutte", "c3", "X^2 + X + Y"),
    ("tutte", "k2", "X"),
    ("tutte", "e1", "1"),
    ("xi", "k2", "X^2 + X*Y + Z"),
    ("xi", "p3", "X^3 + 2*X^2*Y + X*Y^2 + 2*X*Z + Y*Z"),
    ("cover", "d2cycle", "X^2 + X + Y"),
    ("cover", "dloop1", "X + Y"),
    ("noble-welsh", "k2", "X1^2 + X2"),
    ("potts", "empty", "1"),
    ("matching", "empty", "1"),
    ("tutte", "empty", "1"),
    ("xi", "empty", "1"),
    ("noble-welsh", "empty", "1"),
]


@pytest.mark.parametrize("name, graph, expected", EXPECTED)
def test_expected_values_on_every_engine(name, graph, expected):
    entry = get_entry(name)
    for engine in entry.engines:
        assert entry.evaluate(named_graph(graph), engine) == Polynomial.parse(expected), engine


@pytest.mark.parametrize("n", [
    0, 1, 2, 3,
    pytest.param(4, marks=pytest.mark.slow),
    pytest.param(5, marks=pytest.mark.slow),
])
def test_cover_of_an_edgeless_digraph(n):
    entry = get_entry("cover")
    expected = falling(variable("X"), n)
    for engine in entry.engines:
        assert entry.evaluate(named_graph(f"de{n}"), engine) == expected


@pytest.mark.parametrize("name", UNDIRECTED)
def test_engines_agree_on_the_tiny_corpus(tiny_graphs, name):
    report = check_entry(get_entry(name), tiny_graphs)
    assert report.checked == len(tiny_graphs)
    assert report.mismatches == []
    assert report.passed


def test_cover_engines_agree_on_the_tiny_corpus(tiny_digraphs):
    report = check_entry(get_entry("cover"), tiny_digraphs)
    assert report.passed
    assert report.to_dict()["engines"] == ["recursive", "expansion", "oracle"]


@pytest.mark.slow
@pytest.mark.parametrize("name", UNDIRECTED)
def test_engines_agree_on_the_small_corpus(name):
    assert check_entry(get_entry(name), corpus("small")).passed


@pytest.mark.slow
def test_cover_engines_agree_on_the_small_corpus():
    assert check_entry(get_entry("cover"), corpus("small", directed=True)).passed


def test_synthesized_engine_joins_the_check(tiny_graphs):
    report = check_entry(get_entry("matching"), tiny_graphs[:20], engines=("synthesized", "oracle"))
    assert report.engines == ("synthesized", "oracle")
    assert report.passed


def test_expired_budget_truncates_the_check(tiny_graphs):
    budget = Budget(1)
    budget.started -= 10
    report = check_entry(get_entry("potts"), tiny_graphs, budget=budget)
    assert report.truncated
    assert report.checked == 0
    assert not report.passed


def test_catalog_entries():
    assert [entry.name for entry in entries()] == list(CATALOG)
    assert get_entry("cover").directed
    assert get_entry("noble-welsh").engines == ("expansion", "oracle")
    with pytest.raises(DefinitionError):
        get_entry("chromatic")


def test_noble_welsh_has_no_recursion():
    entry = get_entry("noble-welsh")
    with pytest.raises(DefinitionError):
        entry.definition()
    with pytest.raises(DefinitionError):
        entry.evaluate(named_graph("k2"), "recursive")


def test_vocabulary_must_match_the_entry():
    with pytest.raises(VocabularyMismatchError):
        get_entry("cover").evaluate(named_graph("k2"))
    with pytest.raises(VocabularyMismatchError):
        get_entry("potts").evaluate(named_graph("d2cycle"), "expansion")


@pytest.mark.parametrize("name, permutation", [
    ("potts", {"q": "v", "v": "q"}),
    ("matching", {"X": "Y", "Y": "X"}),
    ("tutte", {"X": "Y", "Y": "X"}),
    ("xi", {"X": "Z", "Y": "X", "Z": "Y"}),
])
def test_syntactic_expansions_are_renaming_invariant(name, permutation):
    for graph in ("k2", "p3", "c3", "loop1"):
        assert renaming_invariance_test(get_entry(name), named_graph(graph), permutation)


def test_noble_welsh_is_not_renaming_invariant():
    entry = get_entry("noble-welsh")
    shift = {"X1": "X2", "X2": "X3", "X3": "X4"}
    assert not renaming_invariance_test(entry, named_graph("e3"), shift)
    structure = entry.structure(named_graph("e3"))
    assert eval_expr(entry.expansion(structure, shift), structure) == Polynomial.parse("1")
    assert eval_expr(entry.expansion(structure), structure).rename(shift) == Polynomial.parse("X2^3")


def test_renamings_must_be_injective():
    with pytest.raises(RenamingError):
        renaming_invariance_test(get_entry("potts"), named_graph("k2"), {"q": "v", "v": "v"})
    with pytest.raises(RenamingError):
        renaming_invariance_test(get_entry("noble-welsh"), named_graph("k2"), {"X1": "Q"})
    assert indexed("X12") == 12


@pytest.mark.parametrize("graph", ["k2", "p3", "c3", "loop1", "par2", "2k2"])
def test_xi_specializes_to_potts(graph):
    assert xi_potts_specialization(named_graph(graph))
    assert xi_potts_specialization(named_graph(graph), engine="recursive")


@pytest.mark.parametrize("name", ["potts", "matching"])
def test_logical_expansions_agree_with_the_native_ones(name):
    for graph in ("k2", "p3", "c3", "loop1", "par2"):
        structure = to_incidence(named_graph(graph))
        assert eval_expr(expansion(name, logical=True), structure) == eval_expr(expansion(name), structure)


def test_tutte_oracle_ignores_the_edge_order():
    graph = named_graph("k4")
    assert oracle_tutte(graph) == oracle_tutte(graph, ("e6", "e5", "e4", "e3", "e2", "e1"))
    assert oracle_tutte(graph).substitute({"X": 1, "Y": 1}) == 16


@pytest.mark.slow
def test_tutte_oracle_ignores_every_edge_order():
    for graph in corpus("small"):
        if len(graph.edges) > 4:
            continue
        baseline = oracle_tutte(graph)
        for order in itertools.permutations(graph.edge_ids):
            assert oracle_tutte(graph, order) == baseline, graph.edge_ids


# cover counts paths in the falling factorial basis, so its coefficients carry signs
@pytest.mark.parametrize("name", UNDIRECTED)
def test_expansion_coefficients_are_natural_numbers(tiny_graphs, name):
    entry = get_entry(name)
    for graph in tiny_graphs:
        assert entry.evaluate(graph, "expansion").is_nonnegative(), name


def test_expansions_sum_over_the_chosen_edges():
    k2 = named_graph("k2")
    assert get_entry("potts").evaluate(k2, "expansion") == Polynomial.parse("q^2 + q*v")
    assert get_entry("xi").evaluate(k2, "expansion") == Polynomial.parse("X^2 + X*Y + Z")


def test_noble_welsh_indeterminates_are_indexed():
    entry = get_entry("noble-welsh")
    assert entry.indexed_family == "X"
    assert entry.indeterminates_for(named_graph("e3")) == ("X1", "X2", "X3", "Y")
    assert entry.indeterminates_for(named_graph("empty")) == ("Y",)
    assert get_entry("potts").indeterminates_for(named_graph("e3")) == ("q", "v")
    value = entry.evaluate(named_graph("c3"), "oracle")
    assert set(value.variables()) <= set(entry.indeterminates_for(named_graph("c3")))
