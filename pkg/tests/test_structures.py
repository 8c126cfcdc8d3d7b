import pytest

from gpk.corpus import canonical_form, corpus, named_graph
from gpk.errors import (
    ElementKindError,
    GraphFormatError,
    LoopContractionError,
    VocabularyMismatchError,
)
from gpk.structures import (
    OrderedContextStructure,
    contract_directed_edge,
    contract_edge,
    delete_edge,
    delete_vertex,
    dump_graph,
    edges_first_order,
    extract_edge,
    from_incidence,
    load_graph,
    read_graph_file,
    reorder,
    to_incidence,
    write_graph_file,
)


def test_loop_is_a_single_incidence_pair():
    structure = to_incidence(named_graph("loop1"))
    assert structure.relations["N"] == frozenset({("v1", "e1")})
    assert structure.incidence.ends["e1"] == ("v1",)
    assert structure.incidence.edges == frozenset({"e1"})


def test_directed_incidence_splits_tail_and_head():
    structure = to_incidence(named_graph("d2cycle"))
    assert structure.vocabulary.name == "directed2"
    assert structure.relations["NO"] == frozenset({("v1", "e1"), ("v2", "e2")})
    assert structure.relations["NI"] == frozenset({("e1", "v2"), ("e2", "v1")})


def test_vocabulary_must_match_the_graph():
    with pytest.raises(VocabularyMismatchError):
        to_incidence(named_graph("d2cycle"), "graph2")
    with pytest.raises(VocabularyMismatchError):
        to_incidence(named_graph("k2"), "directed2")
    with pytest.raises(VocabularyMismatchError):
        to_incidence(named_graph("par2"), "graph1")


def test_graph1_keeps_adjacency_symmetric():
    structure = to_incidence(named_graph("p3"), "graph1")
    assert structure.relations["E"] == frozenset({("v1", "v2"), ("v2", "v1"), ("v2", "v3"), ("v3", "v2")})


def test_edges_first_order_is_stable():
    structure = to_incidence(named_graph("p3"))
    assert structure.universe == ("v1", "v2", "v3", "e1", "e2")
    assert edges_first_order(structure) == ("e1", "e2", "v1", "v2", "v3")


def test_reorder_needs_a_permutation():
    structure = to_incidence(named_graph("k2"))
    with pytest.raises(ValueError):
        reorder(structure, ("e1", "v1"))
    assert reorder(structure, None) is structure


def test_structure_equality_includes_the_order():
    structure = to_incidence(named_graph("k2"))
    flipped = reorder(structure, ("e1", "v2", "v1"))
    assert flipped != structure
    assert reorder(flipped, structure.universe) == structure


def test_contract_edge_drops_the_smaller_endpoint():
    structure = reorder(to_incidence(named_graph("k2")), ("e1", "v1", "v2"))
    assert contract_edge(structure, "e1").universe == ("v2",)


def test_contract_edge_moves_incidences_to_the_larger_endpoint():
    structure = reorder(to_incidence(named_graph("p3")), ("e2", "e1", "v2", "v1", "v3"))
    child = contract_edge(structure, "e1")
    assert child.universe == ("e2", "v1", "v3")
    assert child.relations["N"] == frozenset({("v1", "e2"), ("v3", "e2")})


def test_loops_cannot_be_contracted():
    with pytest.raises(LoopContractionError):
        contract_edge(to_incidence(named_graph("loop1")), "e1")


def test_extract_edge_removes_the_closed_neighbourhood():
    structure = to_incidence(named_graph("p3"))
    assert extract_edge(structure, "e1").universe == ("v3",)


def test_surgeries_check_element_kinds():
    structure = to_incidence(named_graph("k2"))
    with pytest.raises(ElementKindError):
        delete_edge(structure, "v1")
    with pytest.raises(ElementKindError):
        delete_vertex(structure, "e1")
    with pytest.raises(ElementKindError):
        delete_vertex(structure, "nope")


def test_delete_edge_keeps_its_endpoints():
    child = delete_edge(to_incidence(named_graph("k2")), "e1")
    assert child.universe == ("v1", "v2")
    assert child.relations["N"] == frozenset()


def test_contract_directed_edge_rewires_incoming_edges():
    structure = to_incidence(named_graph("d2cycle"))
    child = contract_directed_edge(structure, "e1")
    assert set(child.universe) == {"v2", "e2"}
    assert child.relations["NO"] == frozenset({("v2", "e2")})
    assert child.relations["NI"] == frozenset({("e2", "v2")})


def test_contract_directed_loop_removes_its_vertex():
    child = contract_directed_edge(to_incidence(named_graph("dloop1")), "e1")
    assert child.universe == ()


def test_context_is_the_least_tuple():
    structure = reorder(to_incidence(named_graph("p3")), ("e1", "e2", "v1", "v2", "v3"))
    assert OrderedContextStructure(structure).context == ("e1",)
    assert OrderedContextStructure(structure, 2).context == ("e1", "e2")
    assert OrderedContextStructure(to_incidence(named_graph("e1")), 2).context is None
    with pytest.raises(ValueError):
        OrderedContextStructure(structure, 0)


def test_from_incidence_inverts_to_incidence():
    for name in ("k3", "loop1", "par2", "d2cycle", "dloop1"):
        graph = named_graph(name)
        assert from_incidence(to_incidence(graph)) == graph


def test_graph_text_format(tmp_path):
    graph = named_graph("c3")
    text = dump_graph(graph)
    assert text.splitlines()[0] == "directed: false"
    assert load_graph(text) == graph
    path = tmp_path / "c3.graph"
    write_graph_file(graph, str(path))
    assert read_graph_file(str(path)) == graph


def test_graph_text_errors_name_the_line():
    with pytest.raises(GraphFormatError, match="line 1"):
        load_graph("vertex v1\n")
    with pytest.raises(GraphFormatError, match="line 3"):
        load_graph("directed: false\nvertex v1\nedge e1 v1\n")
    with pytest.raises(GraphFormatError):
        load_graph("directed: false\nedge e1 v1 v2\n")
    with pytest.raises(GraphFormatError):
        load_graph("# only a comment\n")


def test_named_graphs():
    assert len(named_graph("k4").edges) == 6
    assert named_graph("c1").edges == (("e1", "v1", "v1"),)
    assert named_graph("star3").vertices == ("c", "l1", "l2", "l3")
    assert named_graph("dc2").directed
    with pytest.raises(ValueError):
        named_graph("petersen")


def test_corpus_has_no_duplicate_labelings(tiny_graphs):
    forms = [canonical_form(g) for g in tiny_graphs]
    assert len(forms) == len(set(forms))
    assert any(g.edges and g.is_loop(g.edges[0][0]) for g in tiny_graphs)
    assert all(len(g.vertices) <= 3 and len(g.edges) <= 3 for g in tiny_graphs)


def test_directed_corpus(tiny_digraphs):
    assert all(g.directed for g in tiny_digraphs)
    with pytest.raises(ValueError):
        corpus("huge")


def test_contexts_run_in_lexicographic_order():
    structure = to_incidence(named_graph("k2"))
    ordered = OrderedContextStructure.of(structure, ("e1", "v1", "v2"), 2)
    assert list(ordered.contexts())[:3] == [("e1", "v1"), ("e1", "v2"), ("v1", "e1")]
    assert ordered.advance(delete_edge(ordered.structure, "e1")).context == ("v1", "v2")
    assert OrderedContextStructure(structure, 4).context is None
