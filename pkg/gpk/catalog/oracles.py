"""Brute-force combinatorial definitions, written against the graph itself.

None of these touch the logic layer, so they serve as an independent check
of both the recursion and the subset expansions.
"""
import itertools
from typing import Iterator, List, Optional, Sequence, Tuple

import networkx as nx

from gpk.polyring import ONE, ZERO, Polynomial

Edge = Tuple[str, str, str]


def _x(name: str) -> Polynomial:
    return Polynomial.variable(name)


def falling(indeterminate: Polynomial, n: int) -> Polynomial:
    """X(X-1)...(X-n+1); 1 for n = 0."""
    result = ONE
    for k in range(n):
        result = result * (indeterminate - k)
    return result


def _subsets(edges: Sequence[Edge]) -> Iterator[Tuple[Edge, ...]]:
    for size in range(len(edges) + 1):
        yield from itertools.combinations(edges, size)


def spanning_subgraph(graph, edges: Sequence[Edge]) -> nx.MultiGraph:
    """(V, A) as a networkx multigraph keyed by edge id."""
    spanning = nx.MultiGraph()
    spanning.add_nodes_from(graph.vertices)
    spanning.add_edges_from((tail, head, edge_id) for edge_id, tail, head in edges)
    return spanning


def _covered(edges: Sequence[Edge]) -> set:
    covered = set()
    for _, tail, head in edges:
        covered.update((tail, head))
    return covered


def _is_matching(edges: Sequence[Edge]) -> bool:
    seen = set()
    for _, tail, head in edges:
        ends = {tail, head}
        if ends & seen:
            return False
        seen |= ends
    return True


def oracle_matching(graph) -> Polynomial:
    """Σ over matchings F of X^{#uncovered vertices} Y^{|F|}; a loop covers its one vertex."""
    X, Y = _x("X"), _x("Y")
    total = ZERO
    for chosen in _subsets(graph.edges):
        if _is_matching(chosen):
            total = total + X ** (len(graph.vertices) - len(_covered(chosen))) * Y ** len(chosen)
    return total


def oracle_potts(graph) -> Polynomial:
    q, v = _x("q"), _x("v")
    total = ZERO
    for chosen in _subsets(graph.edges):
        components = nx.number_connected_components(spanning_subgraph(graph, chosen))
        total = total + q ** components * v ** len(chosen)
    return total


def _is_forest(graph, chosen: Sequence[Edge]) -> bool:
    if any(tail == head for _, tail, head in chosen):
        return False
    if not graph.vertices:
        return True
    return nx.is_forest(spanning_subgraph(graph, chosen))


def spanning_forests(graph) -> List[Tuple[Edge, ...]]:
    everything = nx.number_connected_components(spanning_subgraph(graph, graph.edges))
    forests = []
    for chosen in _subsets(graph.edges):
        if _is_forest(graph, chosen) and \
                nx.number_connected_components(spanning_subgraph(graph, chosen)) == everything:
            forests.append(chosen)
    return forests


def _activities(graph, forest: Tuple[Edge, ...], rank) -> Tuple[int, int]:
    internal = external = 0
    inside = {edge_id for edge_id, _, _ in forest}
    tree = spanning_subgraph(graph, forest)
    for edge in forest:
        edge_id, tail, head = edge
        cut_graph = spanning_subgraph(graph, [e for e in forest if e[0] != edge_id])
        side = nx.node_connected_component(cut_graph, tail)
        cut = [e for e in graph.edges
               if (e[1] in side) != (e[2] in side)]
        if min(cut, key=lambda e: rank[e[0]])[0] == edge_id:
            internal += 1
    for edge in graph.edges:
        edge_id, tail, head = edge
        if edge_id in inside:
            continue
        if tail == head:
            external += 1
            continue
        path = nx.shortest_path(tree, tail, head)
        cycle = [edge_id]
        for a, b in zip(path, path[1:]):
            cycle.extend(key for key in tree.get_edge_data(a, b))
        if min(cycle, key=rank.__getitem__) == edge_id:
            external += 1
    return internal, external


def oracle_tutte(graph, order: Optional[Sequence[str]] = None) -> Polynomial:
    """Σ over spanning forests F of X^{internal activity} Y^{external activity}."""
    ids = list(order) if order is not None else list(graph.edge_ids)
    rank = {edge_id: position for position, edge_id in enumerate(e for e in ids if e in set(graph.edge_ids))}
    X, Y = _x("X"), _x("Y")
    total = ZERO
    for forest in spanning_forests(graph):
        internal, external = _activities(graph, forest, rank)
        total = total + X ** internal * Y ** external
    return total


def oracle_xi(graph) -> Polynomial:
    """Σ over vertex-disjoint (A, B) of X^{k(A⊔B)-k_cov(B)} Y^{|A|+|B|-k_cov(B)} Z^{k_cov(B)}."""
    X, Y, Z = _x("X"), _x("Y"), _x("Z")
    total = ZERO
    for B in _subsets(graph.edges):
        touched = _covered(B)
        if B:
            covered_components = nx.number_connected_components(
                spanning_subgraph(graph, B).subgraph(touched))
        else:
            covered_components = 0
        free = [e for e in graph.edges if e not in B and not ({e[1], e[2]} & touched)]
        for A in _subsets(free):
            components = nx.number_connected_components(spanning_subgraph(graph, A + B))
            total = total + (X ** (components - covered_components)
                             * Y ** (len(A) + len(B) - covered_components)
                             * Z ** covered_components)
    return total


def _cover_census(graph, chosen: Sequence[Edge]) -> Optional[Tuple[int, int]]:
    """(paths, cycles) when `chosen` covers the vertices with disjoint paths and cycles."""
    tails = [tail for _, tail, _ in chosen]
    heads = [head for _, _, head in chosen]
    if len(set(tails)) != len(tails) or len(set(heads)) != len(heads):
        return None
    digraph = nx.MultiDiGraph()
    digraph.add_nodes_from(graph.vertices)
    digraph.add_edges_from((tail, head, edge_id) for edge_id, tail, head in chosen)
    paths = cycles = 0
    for component in nx.weakly_connected_components(digraph):
        if digraph.subgraph(component).number_of_edges() == len(component):
            cycles += 1
        else:
            paths += 1
    return paths, cycles


def oracle_cover(graph) -> Polynomial:
    """Σ_{i,j} c(i,j) X^(i falling) Y^j over covers by i directed paths and j directed cycles."""
    X, Y = _x("X"), _x("Y")
    total = ZERO
    for chosen in _subsets(graph.edges):
        census = _cover_census(graph, chosen)
        if census is not None:
            paths, cycles = census
            total = total + falling(X, paths) * Y ** cycles
    return total


def size_census(graph, chosen: Sequence[Edge]) -> dict:
    """s(i, A): component size -> number of components of (V, A) with that many vertices."""
    census: dict = {}
    for component in nx.connected_components(spanning_subgraph(graph, chosen)):
        census[len(component)] = census.get(len(component), 0) + 1
    return census


def oracle_noble_welsh(graph) -> Polynomial:
    """U(G; X1..Xn, Y) = Σ_A Y^{|A| - r(A)} ∏_i X_i^{s(i, A)}."""
    Y = _x("Y")
    total = ZERO
    for chosen in _subsets(graph.edges):
        spanning = spanning_subgraph(graph, chosen)
        rank = len(graph.vertices) - nx.number_connected_components(spanning)
        term = Y ** (len(chosen) - rank)
        for size, count in size_census(graph, chosen).items():
            term = term * _x(f"X{size}") ** count
        total = total + term
    return total
