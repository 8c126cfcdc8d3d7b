import itertools
import re
from typing import Dict, Iterator, List, Tuple

from gpk.structures import MultiGraph

# (max vertices, max edges) for the undirected and directed halves
CORPORA: Dict[str, Dict[str, Tuple[int, int]]] = {
    "tiny": {"undirected": (3, 3), "directed": (2, 3)},
    "small": {"undirected": (4, 5), "directed": (3, 4)},
}


def _vertices(count: int) -> Tuple[str, ...]:
    return tuple(f"v{i}" for i in range(1, count + 1))


def _numbered(pairs) -> Tuple[Tuple[str, str, str], ...]:
    return tuple((f"e{i}", tail, head) for i, (tail, head) in enumerate(pairs, start=1))


def canonical_form(graph: MultiGraph) -> tuple:
    """Labeled canonical form: vertex list plus the sorted endpoint multiset."""
    if graph.directed:
        ends = sorted((tail, head) for _, tail, head in graph.edges)
    else:
        ends = sorted(tuple(sorted((tail, head))) for _, tail, head in graph.edges)
    return graph.directed, graph.vertices, tuple(ends)


def undirected_corpus(max_vertices: int, max_edges: int) -> Iterator[MultiGraph]:
    """All labeled undirected multigraphs (loops and parallels included)."""
    seen = set()
    for n in range(max_vertices + 1):
        vertices = _vertices(n)
        slots = list(itertools.combinations_with_replacement(vertices, 2))
        for m in range(max_edges + 1):
            if m and not slots:
                break
            for chosen in itertools.combinations_with_replacement(slots, m):
                graph = MultiGraph(False, vertices, _numbered(chosen))
                form = canonical_form(graph)
                if form in seen:
                    continue
                seen.add(form)
                yield graph


def directed_corpus(max_vertices: int, max_edges: int) -> Iterator[MultiGraph]:
    seen = set()
    for n in range(max_vertices + 1):
        vertices = _vertices(n)
        slots = list(itertools.product(vertices, repeat=2))
        for m in range(max_edges + 1):
            if m and not slots:
                break
            for chosen in itertools.combinations_with_replacement(slots, m):
                graph = MultiGraph(True, vertices, _numbered(chosen))
                form = canonical_form(graph)
                if form in seen:
                    continue
                seen.add(form)
                yield graph


def corpus(name: str, directed: bool = False) -> List[MultiGraph]:
    try:
        limits = CORPORA[name]
    except KeyError:
        raise ValueError(f"unknown corpus {name!r}; pick one of {sorted(CORPORA)}") from None
    if directed:
        return list(directed_corpus(*limits["directed"]))
    return list(undirected_corpus(*limits["undirected"]))


def _path_pairs(vertices):
    return list(zip(vertices, vertices[1:]))


def named_graph(name: str) -> MultiGraph:
    """Small built-in graphs addressable from the CLI (k2, p3, c3, loop1, ...)."""
    fixed = {
        "empty": MultiGraph(),
        "loop1": MultiGraph(False, ("v1",), (("e1", "v1", "v1"),)),
        "2k2": MultiGraph(False, _vertices(4), _numbered([("v1", "v2"), ("v3", "v4")])),
        "dloop1": MultiGraph(True, ("v1",), (("e1", "v1", "v1"),)),
        "d2cycle": MultiGraph(True, ("v1", "v2"), _numbered([("v1", "v2"), ("v2", "v1")])),
    }
    if name in fixed:
        return fixed[name]
    match = re.fullmatch(r"(e|k|p|c|star|par|de|dp|dc)(\d+)", name)
    if not match:
        raise ValueError(f"unknown graph name {name!r}")
    family, size = match.group(1), int(match.group(2))
    if family in ("e", "de"):
        return MultiGraph(family == "de", _vertices(size), ())
    if family == "k":
        vertices = _vertices(size)
        return MultiGraph(False, vertices, _numbered(itertools.combinations(vertices, 2)))
    if family in ("p", "dp"):
        vertices = _vertices(size)
        return MultiGraph(family == "dp", vertices, _numbered(_path_pairs(vertices)))
    if family in ("c", "dc"):
        vertices = _vertices(size)
        pairs = _path_pairs(vertices) + ([(vertices[-1], vertices[0])] if size else [])
        return MultiGraph(family == "dc", vertices, _numbered(pairs))
    if family == "star":
        leaves = tuple(f"l{i}" for i in range(1, size + 1))
        return MultiGraph(False, ("c",) + leaves, _numbered(("c", leaf) for leaf in leaves))
    # par<k>: two vertices joined by k parallel edges
    return MultiGraph(False, ("v1", "v2"), _numbered([("v1", "v2")] * size))
