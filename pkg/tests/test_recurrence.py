import pytest

from gpk.catalog import get_entry
from gpk.corpus import corpus, named_graph
from gpk.errors import CapacityError, DefinitionError, InfeasibleOrderError, ParseError
from gpk.polyring import Polynomial
from gpk.recurrence import (
    DeconstructionEvaluator,
    all_valid_orders,
    block_order_count,
    builtin_definition,
    check_order_invariance,
    check_order_valid,
    enabled_set,
    evaluate_recursive,
    load_definition,
    orders_for_invariance,
    sample_valid_orders,
)
from gpk.structures import to_incidence

EXPECTED = [
    ("potts", "k2", False, "q^2 + q*v"),
    ("potts", "loop1", False, "q + q*v"),
    ("matching", "k2", False, "X^2 + Y"),
    ("matching", "p3", False, "X^3 + 2*X*Y"),
    ("tutte", "c3", False, "X^2 + X + Y"),
    ("tutte", "loop1", False, "Y"),
    ("xi", "k2", False, "X^2 + X*Y + Z"),
    ("xi", "loop1", False, "X + X*Y + Z"),
    ("xi", "p3", False, "X^3 + 2*X^2*Y + X*Y^2 + 2*X*Z + Y*Z"),
    ("cover", "d2cycle", True, "X^2 + X + Y"),
    ("cover", "dloop1", True, "X + Y"),
]

BROKEN = """
(recursive-definition broken
  (vocabulary graph2)
  (context-arity 1)
  (indeterminates X)
  (order EdgesFirst)
  (rule edge
    (guard (PE x))
    (scheme delete-edge)
    (coeff (+ (const X) (tv (exists y (and (PE y) (!= y x) (exists z (and (N z x) (N z y)))))))))
  (rule vertex
    (guard (PV x))
    (scheme delete-vertex)
    (coeff 1)))
"""

PAIRS = """
(recursive-definition pairs
  (context-arity 2)
  (indeterminates X)
  (order true)
  (rule both
    (guard true)
    (scheme (params x1 x2) (domain y (and (!= y x1) (!= y x2))) (relation N (y z) (N y z)))
    (coeff (const X))))
"""


def _definition_text(rule, order="(order EdgesFirst)"):
    return f"(recursive-definition custom {order} {rule})"


@pytest.mark.parametrize("name, graph, directed, expected", EXPECTED)
def test_builtin_values(ordered, name, graph, directed, expected):
    value = evaluate_recursive(builtin_definition(name), ordered(graph, directed))
    assert value == Polynomial.parse(expected)
    assert str(value) == str(Polynomial.parse(expected))


@pytest.mark.parametrize("n, expected", [
    (0, "1"),
    (1, "X"),
    (2, "X^2 - X"),
    (3, "X^3 - 3*X^2 + 2*X"),
])
def test_cover_of_an_edgeless_digraph_is_a_falling_factorial(ordered, n, expected):
    assert evaluate_recursive(builtin_definition("cover"), ordered(f"e{n}", True)) == Polynomial.parse(expected)


def test_builtin_definitions_declare_their_indeterminates():
    assert builtin_definition("potts").indeterminates == ("q", "v")
    assert builtin_definition("xi").indeterminates == ("X", "Y", "Z")
    assert builtin_definition("cover").vocabulary.name == "directed2"
    assert [rule.name for rule in builtin_definition("tutte").rules] == [
        "bridge", "loop", "ordinary-contract", "ordinary-delete", "vertex",
    ]


def test_enabled_set(ordered):
    potts = builtin_definition("potts")
    assert enabled_set(potts, ordered("k2")) == {2, 3}
    assert enabled_set(potts, ordered("e1")) == {1}
    assert enabled_set(potts, ordered("loop1")) == {3, 4}
    assert enabled_set(potts, ordered("e0")) == set()
    matching = builtin_definition("matching")
    assert enabled_set(matching, ordered("p3"), ("v1", "v2", "v3", "e1", "e2")) == set()


def test_order_validity(ordered):
    potts = builtin_definition("potts")
    declared = to_incidence(named_graph("k2"))
    assert not check_order_valid(potts, declared)
    assert check_order_valid(potts, declared, ("e1", "v2", "v1"))
    assert check_order_valid(potts, ordered("k2"))


def test_valid_block_orders():
    potts = builtin_definition("potts")
    structure = to_incidence(named_graph("p3"))
    assert block_order_count(structure) == 12
    orders = all_valid_orders(potts, structure)
    assert len(orders) == 12
    assert all(set(order[:2]) == {"e1", "e2"} for order in orders)
    assert all_valid_orders(potts, structure, limit=11) is None


def test_sampled_orders_are_valid():
    potts = builtin_definition("potts")
    structure = to_incidence(named_graph("c4"))
    sampled = sample_valid_orders(potts, structure, count=5, seed=1)
    assert len(sampled) == 5
    assert all(check_order_valid(potts, structure, order) for order in sampled)
    assert sample_valid_orders(potts, structure, count=5, seed=1) == sampled


@pytest.mark.parametrize("name, graph, directed", [
    ("potts", "c3", False),
    ("potts", "par2", False),
    ("matching", "p4", False),
    ("tutte", "c3", False),
    ("tutte", "k4", False),
    ("xi", "c4", False),
    ("cover", "d2cycle", True),
    ("cover", "dp3", True),
])
def test_builtins_are_order_invariant(ordered, name, graph, directed):
    definition = builtin_definition(name)
    structure = ordered(graph, directed)
    orders = orders_for_invariance(definition, structure, limit=200, samples=10)
    report = check_order_invariance(definition, structure, orders)
    assert report.orders_checked == len(orders) > 0
    assert report.errors == []
    assert report.invariant


@pytest.mark.parametrize("corpus_name, limit, samples", [
    ("tiny", 24, 4),
    pytest.param("small", 120, 10, marks=pytest.mark.slow),
])
@pytest.mark.parametrize("name", ["matching", "tutte", "potts", "xi", "cover"])
def test_builtins_are_order_invariant_on_the_corpus(name, corpus_name, limit, samples):
    entry = get_entry(name)
    definition = builtin_definition(name)
    for graph in corpus(corpus_name, directed=entry.directed):
        structure = entry.structure(graph)
        report = check_order_invariance(definition, structure,
                                        orders_for_invariance(definition, structure, limit, samples))
        assert report.errors == [], structure.summary()
        assert report.invariant, structure.summary()


def test_order_dependent_definition_is_caught():
    definition = load_definition(BROKEN)
    structure = to_incidence(named_graph("p4"))
    report = check_order_invariance(definition, structure, orders_for_invariance(definition, structure))
    assert report.distinct > 1
    assert not report.invariant
    assert report.to_dict()["invariant"] is False


def test_invariance_report_records_invalid_orders():
    potts = builtin_definition("potts")
    structure = to_incidence(named_graph("k2"))
    report = check_order_invariance(potts, structure, [("v1", "v2", "e1"), ("e1", "v1", "v2")])
    assert report.orders_checked == 2
    assert len(report.errors) == 1
    assert report.values == ["q^2 + q*v"]


@pytest.mark.parametrize("name, graph, directed", [
    ("potts", "c4", False),
    ("tutte", "k4", False),
    ("cover", "dp3", True),
])
def test_memoization_does_not_change_values(ordered, name, graph, directed):
    definition = builtin_definition(name)
    structure = ordered(graph, directed)
    cached = DeconstructionEvaluator(definition)
    plain = DeconstructionEvaluator(definition, memoize=False)
    assert cached.evaluate(structure) == plain.evaluate(structure)
    assert plain.memo_hits == 0
    assert cached.nodes <= plain.nodes
    hits = cached.memo_hits
    cached.evaluate(structure)
    assert cached.memo_hits == hits + 1


@pytest.mark.parametrize("name", ["potts", "matching", "tutte", "xi"])
def test_schemes_and_surgeries_give_the_same_values(ordered, name):
    definition = builtin_definition(name)
    for graph in ("p3", "c3", "par2", "loop1"):
        structure = ordered(graph)
        assert evaluate_recursive(definition, structure, use_surgeries=False) == \
            evaluate_recursive(definition, structure, use_surgeries=True)


def test_cover_schemes_and_surgeries_give_the_same_values(ordered):
    definition = builtin_definition("cover")
    for graph in ("d2cycle", "dloop1", "dp3"):
        structure = ordered(graph, True)
        assert evaluate_recursive(definition, structure, use_surgeries=False) == \
            evaluate_recursive(definition, structure)


@pytest.mark.parametrize("name, graph", [("potts", "c3"), ("matching", "p4"), ("tutte", "k4"), ("xi", "p3")])
def test_leaf_count_matches_the_value_at_one(ordered, name, graph):
    definition = builtin_definition(name)
    structure = ordered(graph)
    value = evaluate_recursive(definition, structure)
    ones = {symbol: 1 for symbol in definition.indeterminates}
    assert DeconstructionEvaluator(definition).leaf_count(structure) == value.substitute(ones)


def test_no_enabled_rule_is_infeasible():
    matching = builtin_definition("matching")
    structure = to_incidence(named_graph("p3"))
    with pytest.raises(InfeasibleOrderError):
        evaluate_recursive(matching, structure)


def test_universe_cap(ordered):
    with pytest.raises(CapacityError):
        DeconstructionEvaluator(builtin_definition("potts"), max_universe=3).evaluate(ordered("p3"))


def test_vocabulary_must_match(ordered):
    with pytest.raises(DefinitionError):
        evaluate_recursive(builtin_definition("potts"), ordered("d2cycle", True))


def test_wider_contexts():
    definition = load_definition(PAIRS)
    assert definition.context == ("x1", "x2")
    assert evaluate_recursive(definition, to_incidence(named_graph("2k2"))) == Polynomial.parse("X^3")
    with pytest.raises(InfeasibleOrderError):
        evaluate_recursive(definition, to_incidence(named_graph("k2")))


def test_rules_must_delete_their_context(ordered):
    rule = "(rule keep (guard true) (scheme identity) (coeff 1))"
    definition = load_definition(_definition_text(rule))
    with pytest.raises(DefinitionError):
        evaluate_recursive(definition, ordered("k2"))


@pytest.mark.parametrize("text, error", [
    ("(recursive-definition broken (order EdgesFirst)", ParseError),
    ("(rule r (guard true) (scheme identity) (coeff 1))", ParseError),
    (_definition_text("(rule r (guard (PE x)) (scheme nowhere) (coeff 1))"), DefinitionError),
    (_definition_text("(rule r (guard (PE x)) (scheme delete-edge))"), DefinitionError),
    (_definition_text("(rule r (guard (PE x)) (scheme delete-edge) (surgery melt) (coeff 1))"), DefinitionError),
    (_definition_text("(rule r (guard (PE x)) (scheme delete-edge) (coeff (sum-rel ((A 1)) true 1)))"),
     DefinitionError),
    (_definition_text("(rule r (guard (PE x)) (scheme delete-edge) (coeff 1))", order=""), DefinitionError),
    ("(recursive-definition empty (order EdgesFirst))", DefinitionError),
    ("(recursive-definition zero (context-arity 0) (order true) (rule r (guard true) (scheme identity) (coeff 1)))",
     DefinitionError),
])
def test_loader_errors(text, error):
    with pytest.raises(error):
        load_definition(text)


def test_loader_reads_local_macros():
    text = """
    (def Lonely (v) (and (PV v) (not (exists e (N v e)))))
    (recursive-definition lonely
      (order EdgesFirst)
      (rule edge (guard (PE x)) (scheme delete-edge) (coeff 1))
      (rule vertex (guard (Lonely x)) (scheme delete-vertex) (coeff (const X))))
    """
    definition = load_definition(text)
    structure = to_incidence(named_graph("p3"))
    assert evaluate_recursive(definition, structure, ("e1", "e2", "v1", "v2", "v3")) == Polynomial.parse("X^3")
