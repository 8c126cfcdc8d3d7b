"""Native predicates: direct union-find/DFS versions of the helper SOL formulas.

Each atom here has a defining formula in `definitions/helpers.gpk`; the
tests model-check both on small structures and require the same truth value.
Relation arguments are plain sets: elements for unary relations, pairs for
the graph1 adjacency relation.
"""
import logging
from typing import Callable, Dict, FrozenSet, Iterable, List, Sequence, Set, Tuple

from networkx.utils import UnionFind

from gpk.errors import ElementKindError, VocabularyMismatchError
from gpk.structures import DIRECTED2, GRAPH1, GRAPH2, IncidenceStructure

logger = logging.getLogger(__name__)

# component lookups kept per structure; a LargeSum visits one key per summed subset
NATIVE_CACHE_SIZE = 512


def _key(elements) -> FrozenSet:
    return elements if isinstance(elements, frozenset) else frozenset(elements)


def _links(structure: IncidenceStructure, S) -> List[Tuple[str, str]]:
    if structure.vocabulary.name == GRAPH1.name:
        return [pair for pair in S if len(pair) == 2]
    return [(a, e) for (a, e) in structure.incidence.links if e in S]


def _finder(structure: IncidenceStructure, S, skip: Iterable[str] = ()):
    """Component root lookup for the graph linking elements along S."""
    S = _key(S)
    skip = frozenset(skip)
    cache_key = ("roots", S, skip)
    cache = structure.native_cache
    if cache_key in cache:
        cache.move_to_end(cache_key)
        return cache[cache_key]
    forest = UnionFind(structure.universe)
    for a, b in _links(structure, S):
        if b in skip:
            continue
        forest.union(a, b)
    while len(cache) >= NATIVE_CACHE_SIZE:
        cache.popitem(last=False)
    cache[cache_key] = roots = {a: forest[a] for a in structure.universe}
    return roots


def _ends(structure: IncidenceStructure, edge: str) -> Tuple[str, ...]:
    return structure.incidence.ends.get(edge, ())


def connected_via(structure: IncidenceStructure, S, s: str, t: str) -> bool:
    if s == t:
        return True
    roots = _finder(structure, S)
    if s not in roots or t not in roots:
        return False
    return roots[s] == roots[t]


def component_count(structure: IncidenceStructure, S) -> int:
    """k(S): connected components of the spanning subgraph (V, S)."""
    roots = _finder(structure, S)
    return len({roots[v] for v in structure.incidence.vertices})


def covered_component_count(structure: IncidenceStructure, S) -> int:
    """k_cov(S): components of (V(S), S), i.e. those holding an S-edge."""
    roots = _finder(structure, S)
    edges = structure.incidence.edges
    return len({roots[e] for e in S if e in edges})


def component_size_census(structure: IncidenceStructure, size: int, S) -> int:
    """s(i, S): number of components of (V, S) with exactly `size` vertices."""
    roots = _finder(structure, S)
    counts: Dict[str, int] = {}
    for v in structure.incidence.vertices:
        counts[roots[v]] = counts.get(roots[v], 0) + 1
    return sum(1 for count in counts.values() if count == size)


def rank(structure: IncidenceStructure, S) -> int:
    """r(S) = |V| - k(S)."""
    return len(structure.incidence.vertices) - component_count(structure, S)


def touching(structure: IncidenceStructure, D, S) -> FrozenSet[str]:
    """Members of D incident with an S-edge or sharing a vertex with one."""
    if structure.vocabulary.name == GRAPH1.name:
        touched = {a for (a, _) in S}
        return frozenset(x for x in D if x in touched)
    links = structure.incidence.links
    incident_to: Dict[str, Set[str]] = {}
    for a, e in links:
        incident_to.setdefault(e, set()).add(a)
    touched = set()
    for e in S:
        touched |= incident_to.get(e, set())
    near = set(touched)
    for a, e in links:
        if a in touched:
            near.add(e)
    return frozenset(x for x in D if x in near)


def last_in_comp(structure: IncidenceStructure, D, S) -> FrozenSet[str]:
    """Members of D that come last (in the structure's order) among D inside their S-component."""
    roots = _finder(structure, S)
    positions = structure.positions
    last: Dict[str, str] = {}
    for x in D:
        if x not in roots:
            continue
        current = last.get(roots[x])
        if current is None or positions[x] > positions[current]:
            last[roots[x]] = x
    return frozenset(last.values())


def cycle(structure: IncidenceStructure, S) -> bool:
    """S is one cycle: it has an edge, touched vertices have degree 2 (loops count twice), all joined."""
    if structure.vocabulary.name != GRAPH2.name:
        raise VocabularyMismatchError("cycle is defined over graph2")
    inc = structure.incidence
    members = [e for e in S if e in inc.edges]
    if not members:
        return False
    degree: Dict[str, List[str]] = {}
    for a, e in inc.links:
        if e in S and a in inc.vertices:
            degree.setdefault(a, []).append(e)
    for vertex, incident in degree.items():
        loops = [e for e in incident if len(_ends(structure, e)) == 1]
        if loops:
            if len(incident) != 1:
                return False
        elif len(incident) != 2:
            return False
    touched = list(degree)
    roots = _finder(structure, S)
    return len({roots[v] for v in touched}) <= 1


def on_cycle(structure: IncidenceStructure, vertex: str, B) -> bool:
    """The B-component of `vertex` contains a cycle (at least as many edges as vertices)."""
    roots = _finder(structure, B)
    if vertex not in roots:
        return False
    root = roots[vertex]
    inc = structure.incidence
    vertices = sum(1 for v in inc.vertices if roots[v] == root)
    edges = sum(1 for e in B if e in inc.edges and roots[e] == root)
    return edges > 0 and edges >= vertices


def bridge(structure: IncidenceStructure, edge: str) -> bool:
    """A non-loop edge whose endpoints fall apart once it is removed."""
    ends = _ends(structure, edge)
    if len(ends) < 2:
        return False
    roots = _finder(structure, structure.incidence.edges, skip=[edge])
    return len({roots[v] for v in ends}) > 1


def _is_forest(structure: IncidenceStructure, F) -> bool:
    forest = UnionFind()
    for e in F:
        ends = _ends(structure, e)
        if len(ends) != 2:
            return False
        a, b = ends
        if forest[a] == forest[b]:
            return False
        forest.union(a, b)
    return True


def spanning_forest(structure: IncidenceStructure, F) -> bool:
    edges = structure.incidence.edges
    if any(e not in edges for e in F):
        return False
    if not _is_forest(structure, F):
        return False
    return component_count(structure, F) == component_count(structure, edges)


def internally_active(structure: IncidenceStructure, edge: str, F) -> bool:
    """edge ∈ F is internally active when it is the first edge of its fundamental cut."""
    F = _key(F)
    if edge not in F or not spanning_forest(structure, F):
        return False
    roots = _finder(structure, F - {edge})
    a, b = _ends(structure, edge)
    sides = {roots[a], roots[b]}
    positions = structure.positions
    for other in structure.incidence.edges:
        ends = _ends(structure, other)
        if other == edge or other in F or len(ends) != 2:
            continue
        if {roots[ends[0]], roots[ends[1]]} == sides and positions[other] < positions[edge]:
            return False
    return True


def _forest_path(structure: IncidenceStructure, F, start: str, goal: str):
    """Edges on the unique F-path from start to goal, or None."""
    adjacency: Dict[str, List[Tuple[str, str]]] = {}
    for e in F:
        a, b = _ends(structure, e)
        adjacency.setdefault(a, []).append((e, b))
        adjacency.setdefault(b, []).append((e, a))
    parents = {start: None}
    stack = [start]
    while stack:
        node = stack.pop()
        for e, other in adjacency.get(node, ()):
            if other not in parents:
                parents[other] = (e, node)
                stack.append(other)
    if goal not in parents:
        return None
    path = []
    node = goal
    while parents[node] is not None:
        e, node = parents[node]
        path.append(e)
    return path


def externally_active(structure: IncidenceStructure, edge: str, F) -> bool:
    """edge ∉ F is externally active when it is the first edge of the cycle it closes in F."""
    F = _key(F)
    if edge in F or edge not in structure.incidence.edges or not spanning_forest(structure, F):
        return False
    ends = _ends(structure, edge)
    if len(ends) == 1:
        return True
    path = _forest_path(structure, F, ends[0], ends[1])
    if path is None:
        return False
    positions = structure.positions
    return all(positions[edge] < positions[e] for e in path)


def closes_cycle(structure: IncidenceStructure, edge: str, S) -> bool:
    """edge ∈ S whose endpoints are already joined by S-edges that precede it."""
    if edge not in S or edge not in structure.incidence.edges:
        return False
    ends = _ends(structure, edge)
    if len(ends) == 1:
        return True
    positions = structure.positions
    earlier = frozenset(e for e in S if positions.get(e, -1) < positions[edge])
    return connected_via(structure, earlier, ends[0], ends[1])


def component_size(structure: IncidenceStructure, vertex: str, S, size: int) -> bool:
    if vertex not in structure.incidence.vertices:
        return False
    roots = _finder(structure, S)
    root = roots[vertex]
    return sum(1 for v in structure.incidence.vertices if roots[v] == root) == size


def _covered(structure: IncidenceStructure, S) -> Set[str]:
    covered = set()
    for e in S:
        covered.update(_ends(structure, e))
    return covered


def vertex_disjoint(structure: IncidenceStructure, A, B) -> bool:
    return not (_covered(structure, A) & _covered(structure, B))


def cycle_path_cover(structure: IncidenceStructure, B) -> bool:
    """Every vertex has at most one outgoing and one incoming B-edge."""
    if structure.vocabulary.name != DIRECTED2.name:
        raise VocabularyMismatchError("cycle_path_cover is defined over directed2")
    inc = structure.incidence
    out_degree: Dict[str, int] = {}
    in_degree: Dict[str, int] = {}
    for v, e in structure.relations["NO"]:
        if e in B and v in inc.vertices:
            out_degree[v] = out_degree.get(v, 0) + 1
    for e, v in structure.relations["NI"]:
        if e in B and v in inc.vertices:
            in_degree[v] = in_degree.get(v, 0) + 1
    return all(count <= 1 for count in out_degree.values()) and all(count <= 1 for count in in_degree.values())


# name -> (argument kinds, function); "elem" element, "rel" relation, "int" literal
_ATOMS: Dict[str, Tuple[Tuple[str, ...], Callable]] = {
    "connected": (("rel", "elem", "elem"), connected_via),
    "cycle": (("rel",), cycle),
    "touching": (("elem", "rel", "rel"), lambda s, x, D, S: x in touching(s, D, S)),
    "last-in-comp": (("elem", "rel", "rel"), lambda s, x, D, S: x in last_in_comp(s, D, S)),
    "on-cycle": (("elem", "rel"), on_cycle),
    "bridge": (("elem",), bridge),
    "spanning-forest": (("rel",), spanning_forest),
    "cycle-path-cover": (("rel",), cycle_path_cover),
    "internally-active": (("elem", "rel"), internally_active),
    "externally-active": (("elem", "rel"), externally_active),
    "closes-cycle": (("elem", "rel"), closes_cycle),
    "component-size": (("elem", "rel", "int"), component_size),
    "vertex-disjoint": (("rel", "rel"), vertex_disjoint),
}

FUNCTIONS: Dict[str, Callable] = {
    "connected_via": connected_via,
    "cycle": cycle,
    "touching": touching,
    "last_in_comp": last_in_comp,
    "on_cycle": on_cycle,
    "bridge": bridge,
    "spanning_forest": spanning_forest,
    "cycle_path_cover": cycle_path_cover,
    "component_count": component_count,
    "covered_component_count": covered_component_count,
    "component_size_census": component_size_census,
    "rank": rank,
    "internally_active": internally_active,
    "externally_active": externally_active,
    "closes_cycle": closes_cycle,
    "vertex_disjoint": vertex_disjoint,
}


def signature(name: str) -> Tuple[str, ...]:
    return _ATOMS[name][0]


def atom_names() -> Sequence[str]:
    return sorted(_ATOMS)


def check_atom(name: str, structure: IncidenceStructure, args: Sequence) -> bool:
    kinds, function = _ATOMS[name]
    if len(args) != len(kinds):
        raise ElementKindError(f"native {name} takes {len(kinds)} argument(s)")
    return bool(function(structure, *args))


def native_predicate(name: str, structure: IncidenceStructure, arguments: Sequence):
    """Call a native by its function name; returns a boolean, element set or count."""
    try:
        function = FUNCTIONS[name]
    except KeyError:
        raise ElementKindError(f"unknown native predicate {name!r}") from None
    return function(structure, *arguments)
