import pytest

from gpk.corpus import named_graph
from gpk.errors import (
    ParseError,
    TranslationError,
    UnassignedVariableError,
    VocabularyMismatchError,
)
from gpk.logic import Assignment, evaluate, helper_macros, parse
from gpk.logic.reader import read_sexprs
from gpk.structures import SURGERIES, edges_first_order, reorder, to_incidence
from gpk.translation import (
    builtin_schemes,
    compose,
    identity_scheme,
    quantifier_rank,
    rename_parameters,
    rank_bound,
    read_scheme,
    transduce,
    translate,
)

SCHEMES = builtin_schemes()

# scheme -> (surgery, which elements it applies to)
SURGERY_SCHEMES = [
    ("delete-edge", "delete-edge", "edges"),
    ("delete-vertex", "delete-vertex", "vertices"),
    ("contract-edge", "contract-edge", "non-loop edges"),
    ("extract-edge", "extract-edge", "edges"),
]


def _elements(structure, which):
    inc = structure.incidence
    if which == "vertices":
        return sorted(inc.vertices)
    if which == "non-loop edges":
        return sorted(e for e in inc.edges if len(inc.ends[e]) == 2)
    return sorted(inc.edges)


def _edges_first(graph):
    structure = to_incidence(graph)
    return reorder(structure, edges_first_order(structure))


@pytest.mark.parametrize("scheme_name, surgery, which", SURGERY_SCHEMES)
def test_surgery_schemes_match_the_surgeries(tiny_graphs, scheme_name, surgery, which):
    scheme = SCHEMES[scheme_name]
    for graph in tiny_graphs:
        structure = _edges_first(graph)
        for element in _elements(structure, which):
            assert transduce(scheme, structure, {"x": element}) == SURGERIES[surgery](structure, element)


def test_directed_schemes_match_the_surgeries(tiny_digraphs):
    contract = SCHEMES["contract-directed-edge"]
    delete = SCHEMES["delete-directed"]
    for graph in tiny_digraphs:
        structure = _edges_first(graph)
        for edge in sorted(structure.incidence.edges):
            context = {"x": edge}
            assert transduce(contract, structure, context) == SURGERIES["contract-directed-edge"](structure, edge)
            assert transduce(delete, structure, context) == SURGERIES["delete-edge"](structure, edge)
        for vertex in sorted(structure.incidence.vertices):
            assert transduce(delete, structure, {"x": vertex}) == SURGERIES["delete-vertex"](structure, vertex)


def test_transduction_keeps_the_inherited_order():
    structure = reorder(to_incidence(named_graph("p3")), ("v3", "e2", "v1", "e1", "v2"))
    child = transduce(SCHEMES["delete-vertex"], structure, {"x": "v1"})
    assert child.universe == ("v3", "e2", "e1", "v2")


def test_transduce_checks_vocabulary_and_context():
    with pytest.raises(VocabularyMismatchError):
        transduce(SCHEMES["delete-edge"], to_incidence(named_graph("d2cycle")), {"x": "e1"})
    with pytest.raises(UnassignedVariableError):
        transduce(SCHEMES["delete-edge"], to_incidence(named_graph("k2")))


def test_identity_scheme():
    structure = to_incidence(named_graph("c3"))
    assert transduce(identity_scheme(), structure) == structure
    sentence = parse("(forall x (implies (PE x) (exists y (N y x))))")
    assert translate(identity_scheme(), sentence) != sentence


def test_translation_agrees_with_transduction():
    sentence = parse("(exists x (Loop x))", macros=helper_macros())
    scheme = SCHEMES["contract-edge"]
    structure = reorder(to_incidence(named_graph("par2")), ("e1", "e2", "v1", "v2"))
    # contracting one parallel edge turns the other into a loop
    assert evaluate(structure, Assignment({"x": "e1"}), translate(scheme, sentence))
    assert evaluate(transduce(scheme, structure, {"x": "e1"}), Assignment(), sentence)


def test_second_order_quantifiers_are_confined_to_the_domain():
    sentence = parse("(existsR A 1 (forall v (implies (PV v) (A v))))")
    scheme = SCHEMES["drop-isolated"]
    structure = to_incidence(named_graph("2k2"))
    translated = translate(scheme, sentence)
    assert evaluate(structure, Assignment(), translated) == evaluate(transduce(scheme, structure), Assignment(), sentence)


def test_native_atoms_do_not_translate():
    sentence = parse("(exists x (native bridge x))")
    with pytest.raises(TranslationError):
        translate(SCHEMES["delete-edge"], sentence)


def test_rank_bound_covers_the_translation():
    sentence = parse("(existsR A 1 (forall v (exists e (and (A e) (N v e)))))")
    for scheme in SCHEMES.values():
        if scheme.source.name != "graph2":
            continue
        assert quantifier_rank(translate(scheme, sentence)) <= rank_bound(scheme, sentence)


def test_compose_renames_clashing_parameters():
    composed = compose(SCHEMES["delete-edge"], SCHEMES["delete-vertex"])
    assert composed.parameters == ("x", "x~1")
    structure = to_incidence(named_graph("p3"))
    together = transduce(composed, structure, {"x": "e1", "x~1": "v1"})
    middle = transduce(SCHEMES["delete-edge"], structure, {"x": "e1"})
    assert together == transduce(SCHEMES["delete-vertex"], middle, {"x": "v1"})


def test_compose_with_contraction():
    first, second = SCHEMES["contract-edge"], SCHEMES["extract-edge"]
    structure = reorder(to_incidence(named_graph("p4")), ("e1", "e2", "e3", "v1", "v2", "v3", "v4"))
    middle = transduce(first, structure, {"x": "e1"})
    sequential = transduce(second, middle, {"x": "e3"})
    together = transduce(compose(first, second), structure, {"x": "e1", "x~1": "e3"})
    assert together == sequential


def test_compose_checks_vocabularies():
    with pytest.raises(VocabularyMismatchError):
        compose(SCHEMES["delete-edge"], SCHEMES["delete-directed"])


def test_read_scheme_errors():
    macros = helper_macros()
    with pytest.raises(TranslationError):
        read_scheme(read_sexprs("(scheme broken (domain y true))")[0], macros)
    with pytest.raises(TranslationError):
        read_scheme(read_sexprs("(scheme broken (domain y (N y x)) (relation N (y z) (N y z)))")[0], macros)
    with pytest.raises(ParseError):
        read_scheme(read_sexprs("(scheme broken (relation N (y z) (N y z)))")[0], macros)
    with pytest.raises(ParseError):
        read_scheme(read_sexprs("(domain y true)")[0], macros)


def test_inline_scheme_with_parameters():
    item = read_sexprs("(scheme (params x) (domain y (!= y x)) (relation N (y z) (N y z)))")[0]
    scheme = read_scheme(item, helper_macros(), name="inline")
    assert scheme.name == "inline"
    assert transduce(scheme, to_incidence(named_graph("k2")), {"x": "v1"}).universe == ("v2", "e1")


def test_rename_parameters():
    renamed = rename_parameters(SCHEMES["delete-edge"], {"x": "e"})
    assert renamed.parameters == ("e",)
    structure = to_incidence(named_graph("p3"))
    assert transduce(renamed, structure, {"e": "e2"}) == transduce(SCHEMES["delete-edge"], structure, {"x": "e2"})
