"""Multigraphs, incidence structures and the graph surgeries the recursions use.

An `IncidenceStructure` keeps its universe as an ordered tuple; that order is
the structure's order O. Surgeries and transductions only ever drop elements,
so the order of whatever survives is the restriction of the input order.
"""
import itertools
import logging
from collections import OrderedDict
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Dict, FrozenSet, Iterable, Mapping, Optional, Sequence, Tuple

from gpk.errors import (
    ElementKindError,
    GraphFormatError,
    LoopContractionError,
    VocabularyMismatchError,
)

logger = logging.getLogger(__name__)

VERTEX = "vertex"
EDGE = "edge"
ORDER_SYMBOL = "O"

Relation = FrozenSet[Tuple[str, ...]]


@dataclass(frozen=True)
class Vocabulary:
    name: str
    relations: Tuple[Tuple[str, int], ...]
    constants: Tuple[str, ...] = ()

    def __post_init__(self):
        names = [symbol for symbol, _ in self.relations] + list(self.constants)
        if len(set(names)) != len(names):
            raise VocabularyMismatchError(f"duplicate symbol in vocabulary {self.name}")
        if ORDER_SYMBOL in names:
            raise VocabularyMismatchError(f"{ORDER_SYMBOL} is reserved for the order relation")
        for symbol, arity in self.relations:
            if arity < 1:
                raise VocabularyMismatchError(f"relation {symbol} needs arity >= 1")

    def arity(self, symbol: str) -> Optional[int]:
        """Arity of a relation symbol, counting the built-in order; None when unknown."""
        if symbol == ORDER_SYMBOL:
            return 2
        return dict(self.relations).get(symbol)

    @property
    def symbols(self) -> Tuple[str, ...]:
        return tuple(symbol for symbol, _ in self.relations)

    def with_constants(self, names: Iterable[str]) -> "Vocabulary":
        extra = tuple(name for name in names if name not in self.constants)
        return Vocabulary(self.name, self.relations, self.constants + extra)


GRAPH1 = Vocabulary("graph1", (("E", 2),))
GRAPH2 = Vocabulary("graph2", (("N", 2),))
DIRECTED2 = Vocabulary("directed2", (("NO", 2), ("NI", 2)))

VOCABULARIES = {vocab.name: vocab for vocab in (GRAPH1, GRAPH2, DIRECTED2)}


def vocabulary_for(tag) -> Vocabulary:
    if isinstance(tag, Vocabulary):
        return tag
    try:
        return VOCABULARIES[tag]
    except KeyError:
        raise VocabularyMismatchError(f"unknown vocabulary tag {tag!r}") from None


def _valid_id(name) -> bool:
    return isinstance(name, str) and bool(name) and not any(ch.isspace() or ch == "#" for ch in name)


@dataclass(frozen=True)
class MultiGraph:
    directed: bool = False
    vertices: Tuple[str, ...] = ()
    edges: Tuple[Tuple[str, str, str], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(tuple(edge) for edge in self.edges))
        seen = set()
        for vertex in self.vertices:
            if not _valid_id(vertex):
                raise GraphFormatError(f"bad vertex id {vertex!r}")
            if vertex in seen:
                raise GraphFormatError(f"duplicate id {vertex!r}")
            seen.add(vertex)
        vertex_set = set(self.vertices)
        for edge in self.edges:
            if len(edge) != 3:
                raise GraphFormatError(f"edge needs (id, tail, head), got {edge!r}")
            edge_id, tail, head = edge
            if not _valid_id(edge_id):
                raise GraphFormatError(f"bad edge id {edge_id!r}")
            if edge_id in seen:
                raise GraphFormatError(f"duplicate id {edge_id!r}")
            seen.add(edge_id)
            for end in (tail, head):
                if end not in vertex_set:
                    raise GraphFormatError(f"edge {edge_id} uses undeclared vertex {end!r}")

    @property
    def edge_ids(self) -> Tuple[str, ...]:
        return tuple(edge_id for edge_id, _, _ in self.edges)

    def endpoints(self, edge_id: str) -> Tuple[str, str]:
        for candidate, tail, head in self.edges:
            if candidate == edge_id:
                return tail, head
        raise ElementKindError(f"{edge_id!r} is not an edge of this graph")

    def is_loop(self, edge_id: str) -> bool:
        tail, head = self.endpoints(edge_id)
        return tail == head

    def is_simple(self) -> bool:
        pairs = set()
        for _, tail, head in self.edges:
            if tail == head:
                return False
            pair = (tail, head) if self.directed else frozenset((tail, head))
            if pair in pairs:
                return False
            pairs.add(pair)
        return True

    def summary(self) -> str:
        kind = "digraph" if self.directed else "graph"
        return f"{kind} |V|={len(self.vertices)} |E|={len(self.edges)}"


@dataclass(frozen=True)
class Incidence:
    """Vertex/edge split and endpoints as the relations define them (P_E, P_V)."""

    vertices: FrozenSet[str]
    edges: FrozenSet[str]
    # undirected: incident vertices in universe order; directed: tails then heads
    ends: Mapping[str, Tuple[str, ...]]
    # (element, edge) pairs that make `element` adjacent to `edge`
    links: Tuple[Tuple[str, str], ...]
    directed: bool = False


@dataclass(frozen=True, eq=False)
class IncidenceStructure:
    vocabulary: Vocabulary
    universe: Tuple[str, ...]
    element_kind: Mapping[str, str]
    relations: Mapping[str, Relation]

    def __post_init__(self):
        object.__setattr__(self, "universe", tuple(self.universe))
        if len(set(self.universe)) != len(self.universe):
            raise GraphFormatError("universe lists an element twice")
        members = set(self.universe)
        normalized = {}
        for symbol, arity in self.vocabulary.relations:
            tuples = frozenset(tuple(item) for item in self.relations.get(symbol, ()))
            for item in tuples:
                if len(item) != arity:
                    raise VocabularyMismatchError(f"{symbol} tuple {item!r} has wrong arity")
                if not members.issuperset(item):
                    raise VocabularyMismatchError(f"{symbol} tuple {item!r} leaves the universe")
            normalized[symbol] = tuples
        unknown = set(self.relations) - set(normalized)
        if unknown:
            raise VocabularyMismatchError(
                f"relations {sorted(unknown)} are not in vocabulary {self.vocabulary.name}"
            )
        object.__setattr__(self, "relations", normalized)
        object.__setattr__(self, "element_kind", {a: self.element_kind.get(a, VERTEX) for a in self.universe})

    def __len__(self) -> int:
        return len(self.universe)

    def __eq__(self, other) -> bool:
        if not isinstance(other, IncidenceStructure):
            return NotImplemented
        return self.key() == other.key() and self.element_kind == other.element_kind

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"IncidenceStructure({self.summary()})"

    def key(self) -> tuple:
        """Canonical memo key: universe in O-order plus sorted relation tuples."""
        return self._key

    @cached_property
    def _key(self) -> tuple:
        rels = tuple((symbol, tuple(sorted(self.relations[symbol]))) for symbol in self.vocabulary.symbols)
        return (self.vocabulary.name, self.universe, rels)

    @cached_property
    def positions(self) -> Dict[str, int]:
        return {element: index for index, element in enumerate(self.universe)}

    @cached_property
    def native_cache(self) -> OrderedDict:
        # least recently used first; natives.py bounds its size
        return OrderedDict()

    def precedes(self, left: str, right: str) -> bool:
        positions = self.positions
        return positions[left] < positions[right]

    def relation(self, symbol: str) -> Relation:
        if symbol == ORDER_SYMBOL:
            return frozenset(itertools.combinations(self.universe, 2))
        return self.relations[symbol]

    def kind(self, element: str) -> str:
        try:
            return self.element_kind[element]
        except KeyError:
            raise ElementKindError(f"{element!r} is not in the universe") from None

    @cached_property
    def incidence(self) -> Incidence:
        name = self.vocabulary.name
        if name == DIRECTED2.name:
            outgoing = self.relations["NO"]
            incoming = self.relations["NI"]
            tails: Dict[str, list] = {}
            heads: Dict[str, list] = {}
            for vertex, edge in outgoing:
                tails.setdefault(edge, []).append(vertex)
            for edge, vertex in incoming:
                heads.setdefault(edge, []).append(vertex)
            edges = frozenset(tails) & frozenset(heads)
            ends = {
                edge: tuple(sorted(tails[edge], key=self.positions.get))
                + tuple(sorted(heads[edge], key=self.positions.get))
                for edge in edges
            }
            links = tuple(sorted(set(outgoing) | {(v, e) for e, v in incoming}))
            return Incidence(frozenset(self.universe) - edges, edges, ends, links, directed=True)
        if name == GRAPH1.name:
            links = tuple(sorted(self.relations["E"]))
            return Incidence(frozenset(self.universe), frozenset(), {}, links)
        pairs = self.relations.get("N", frozenset())
        found: Dict[str, list] = {}
        for vertex, edge in pairs:
            found.setdefault(edge, []).append(vertex)
        ends = {edge: tuple(sorted(vs, key=self.positions.get)) for edge, vs in found.items()}
        edges = frozenset(found)
        return Incidence(frozenset(self.universe) - edges, edges, ends, tuple(sorted(pairs)))

    def restrict(self, keep: Iterable[str], relations: Optional[Mapping[str, Iterable[tuple]]] = None
                 ) -> "IncidenceStructure":
        """Sub-structure on `keep` in the inherited order; tuples leaving it are dropped."""
        keep = set(keep)
        universe = tuple(a for a in self.universe if a in keep)
        source = self.relations if relations is None else relations
        rels = {
            symbol: frozenset(t for t in source.get(symbol, ()) if keep.issuperset(t))
            for symbol in self.vocabulary.symbols
        }
        kinds = {a: self.element_kind[a] for a in universe}
        return IncidenceStructure(self.vocabulary, universe, kinds, rels)

    def without(self, removed: Iterable[str]) -> "IncidenceStructure":
        removed = set(removed)
        return self.restrict(a for a in self.universe if a not in removed)

    def summary(self) -> str:
        rels = ", ".join(f"{symbol}={sorted(self.relations[symbol])}" for symbol in self.vocabulary.symbols)
        return f"{self.vocabulary.name} [{' '.join(self.universe)}] {rels}"


def empty_structure(vocabulary=GRAPH2) -> IncidenceStructure:
    return IncidenceStructure(vocabulary_for(vocabulary), (), {}, {})


def default_vocabulary(graph: MultiGraph) -> Vocabulary:
    return DIRECTED2 if graph.directed else GRAPH2


def to_incidence(graph: MultiGraph, vocabulary=None) -> IncidenceStructure:
    vocab = default_vocabulary(graph) if vocabulary is None else vocabulary_for(vocabulary)
    if vocab is GRAPH1 or vocab.name == GRAPH1.name:
        if graph.directed or not graph.is_simple():
            raise VocabularyMismatchError("graph1 needs a simple undirected graph")
        adjacency = set()
        for _, tail, head in graph.edges:
            adjacency.add((tail, head))
            adjacency.add((head, tail))
        kinds = {v: VERTEX for v in graph.vertices}
        return IncidenceStructure(GRAPH1, graph.vertices, kinds, {"E": adjacency})
    if vocab.name == DIRECTED2.name and not graph.directed:
        raise VocabularyMismatchError("directed2 needs a directed graph")
    if vocab.name == GRAPH2.name and graph.directed:
        raise VocabularyMismatchError("graph2 needs an undirected graph")
    universe = graph.vertices + graph.edge_ids
    kinds = {v: VERTEX for v in graph.vertices}
    kinds.update({e: EDGE for e in graph.edge_ids})
    if graph.directed:
        outgoing = {(tail, edge_id) for edge_id, tail, _ in graph.edges}
        incoming = {(edge_id, head) for edge_id, _, head in graph.edges}
        return IncidenceStructure(DIRECTED2, universe, kinds, {"NO": outgoing, "NI": incoming})
    # a loop contributes a single pair since tail == head
    pairs = set()
    for edge_id, tail, head in graph.edges:
        pairs.add((tail, edge_id))
        pairs.add((head, edge_id))
    return IncidenceStructure(GRAPH2, universe, kinds, {"N": pairs})


def from_incidence(structure: IncidenceStructure) -> MultiGraph:
    """Inverse of to_incidence for graph2/directed2 structures."""
    inc = structure.incidence
    vertices = tuple(a for a in structure.universe if structure.element_kind[a] == VERTEX)
    edges = []
    for a in structure.universe:
        if structure.element_kind[a] != EDGE:
            continue
        ends = inc.ends.get(a, ())
        if len(ends) == 1:
            ends = (ends[0], ends[0])
        if len(ends) != 2:
            raise ElementKindError(f"edge {a!r} has {len(ends)} endpoints")
        edges.append((a, ends[0], ends[1]))
    return MultiGraph(inc.directed, vertices, tuple(edges))


def reorder(structure: IncidenceStructure, order: Optional[Sequence[str]]) -> IncidenceStructure:
    if order is None:
        return structure
    order = tuple(order)
    if sorted(order) != sorted(structure.universe):
        raise ValueError("order must be a permutation of the universe")
    if order == structure.universe:
        return structure
    return IncidenceStructure(structure.vocabulary, order, structure.element_kind, structure.relations)


def edges_first_order(structure: IncidenceStructure) -> Tuple[str, ...]:
    """Stable partition of the universe: edges (in current order) then the rest."""
    edges = structure.incidence.edges
    return tuple(a for a in structure.universe if a in edges) + tuple(
        a for a in structure.universe if a not in edges
    )


@dataclass(frozen=True)
class OrderedContextStructure:
    structure: IncidenceStructure
    context_arity: int = 1

    def __post_init__(self):
        if self.context_arity < 1:
            raise ValueError("context arity must be at least 1")

    @classmethod
    def of(cls, structure: IncidenceStructure, order: Optional[Sequence[str]] = None,
           context_arity: int = 1) -> "OrderedContextStructure":
        return cls(reorder(structure, order), context_arity)

    @property
    def order(self) -> Tuple[str, ...]:
        return self.structure.universe

    @property
    def context(self) -> Optional[Tuple[str, ...]]:
        """The O-least tuple of pairwise distinct elements; None when too few remain."""
        if len(self.structure.universe) < self.context_arity:
            return None
        return tuple(self.structure.universe[: self.context_arity])

    def contexts(self):
        # permutations() yields tuples lexicographically w.r.t. the input order
        return itertools.permutations(self.structure.universe, self.context_arity)

    def advance(self, structure: IncidenceStructure) -> "OrderedContextStructure":
        return OrderedContextStructure(structure, self.context_arity)


def _require_edge(structure: IncidenceStructure, element: str) -> None:
    if structure.kind(element) != EDGE:
        raise ElementKindError(f"{element!r} is not an edge")


def _require_vocabulary(structure: IncidenceStructure, vocab: Vocabulary) -> None:
    if structure.vocabulary.name != vocab.name:
        raise VocabularyMismatchError(
            f"operation needs {vocab.name}, structure is {structure.vocabulary.name}"
        )


def delete_edge(structure: IncidenceStructure, edge: str) -> IncidenceStructure:
    _require_edge(structure, edge)
    return structure.without([edge])


def delete_vertex(structure: IncidenceStructure, vertex: str) -> IncidenceStructure:
    if structure.kind(vertex) != VERTEX:
        raise ElementKindError(f"{vertex!r} is not a vertex")
    return structure.without([vertex])


def contract_edge(structure: IncidenceStructure, edge: str,
                  order: Optional[Sequence[str]] = None) -> IncidenceStructure:
    """G/e: drop e and its O-smaller endpoint u; the other endpoint v takes over u's edges."""
    _require_vocabulary(structure, GRAPH2)
    _require_edge(structure, edge)
    ends = structure.incidence.ends.get(edge, ())
    if len(ends) == 1:
        raise LoopContractionError(f"cannot contract loop {edge!r}")
    if len(ends) != 2:
        raise ElementKindError(f"edge {edge!r} has {len(ends)} endpoints")
    if order is not None:
        rank = {a: i for i, a in enumerate(order)}
        smaller, larger = sorted(ends, key=rank.__getitem__)
    else:
        smaller, larger = ends
    keep = [a for a in structure.universe if a not in (edge, smaller)]
    pairs = set(structure.relations["N"])
    pairs |= {(larger, z) for (y, z) in structure.relations["N"] if y == smaller}
    return structure.restrict(keep, {"N": pairs})


def extract_edge(structure: IncidenceStructure, edge: str) -> IncidenceStructure:
    """G†e: drop e, its endpoints and every edge sharing an endpoint with e."""
    _require_vocabulary(structure, GRAPH2)
    _require_edge(structure, edge)
    ends = set(structure.incidence.ends.get(edge, ()))
    removed = {edge} | ends
    removed |= {z for (y, z) in structure.relations["N"] if y in ends}
    return structure.without(removed)


def contract_directed_edge(structure: IncidenceStructure, edge: str) -> IncidenceStructure:
    _require_vocabulary(structure, DIRECTED2)
    _require_edge(structure, edge)
    outgoing = structure.relations["NO"]
    incoming = structure.relations["NI"]
    tails = [y for (y, z) in outgoing if z == edge]
    heads = [z for (y, z) in incoming if y == edge]
    if len(tails) != 1 or len(heads) != 1:
        raise ElementKindError(f"directed edge {edge!r} needs one tail and one head")
    tail, head = tails[0], heads[0]
    if tail == head:
        # the loop, its vertex, and every edge into or out of that vertex
        removed = {tail} | {y for (y, z) in incoming if z == tail} | {z for (y, z) in outgoing if y == tail}
        return structure.without(removed)
    removed = {tail} | {z for (y, z) in outgoing if y == tail} | {y for (y, z) in incoming if z == head}
    keep = [a for a in structure.universe if a not in removed]
    rewired = set(incoming) | {(y, head) for (y, z) in incoming if z == tail}
    return structure.restrict(keep, {"NO": outgoing, "NI": rewired})


SURGERIES: Dict[str, Callable[[IncidenceStructure, str], IncidenceStructure]] = {
    "delete-edge": delete_edge,
    "delete-vertex": delete_vertex,
    "contract-edge": contract_edge,
    "extract-edge": extract_edge,
    "contract-directed-edge": contract_directed_edge,
}


def load_graph(text: str) -> MultiGraph:
    directed = None
    vertices = []
    edges = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if directed is None:
            key, _, value = line.partition(":")
            if key.strip() != "directed" or value.strip() not in ("true", "false"):
                raise GraphFormatError("expected header 'directed: true|false'", number)
            directed = value.strip() == "true"
            continue
        parts = line.split()
        if parts[0] == "vertex" and len(parts) == 2:
            vertices.append(parts[1])
        elif parts[0] == "edge" and len(parts) == 4:
            edges.append(tuple(parts[1:]))
        else:
            raise GraphFormatError(f"cannot read {line!r}", number)
    if directed is None:
        raise GraphFormatError("missing 'directed:' header")
    return MultiGraph(directed, tuple(vertices), tuple(edges))


def dump_graph(graph: MultiGraph) -> str:
    lines = [f"directed: {'true' if graph.directed else 'false'}"]
    lines.extend(f"vertex {vertex}" for vertex in graph.vertices)
    lines.extend(f"edge {edge_id} {tail} {head}" for edge_id, tail, head in graph.edges)
    return "\n".join(lines) + "\n"


def read_graph_file(path: str) -> MultiGraph:
    with open(path, encoding="utf-8") as handle:
        return load_graph(handle.read())


def write_graph_file(graph: MultiGraph, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(dump_graph(graph))
