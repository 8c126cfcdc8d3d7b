"""The shipped polynomials, each as recursion table, subset expansion and brute-force oracle."""
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from gpk.catalog import oracles
from gpk.catalog.expansions import expansion as _expansion
from gpk.catalog.expansions import noble_welsh_expansion
from gpk.errors import DefinitionError, RenamingError, VocabularyMismatchError
from gpk.polyring import Polynomial, PolyExpr, eval_expr
from gpk.structures import MultiGraph, edges_first_order, reorder, to_incidence
from gpk.utils import Budget

logger = logging.getLogger(__name__)

ENGINES = ("recursive", "expansion", "oracle", "synthesized")


@dataclass(frozen=True)
class PolynomialEntry:
    name: str
    vocabulary: str
    indeterminates: Tuple[str, ...]
    oracle: Callable[[MultiGraph], Polynomial]
    recursive: Optional[str] = None
    notes: str = ""
    # prefix of an open-ended family P1, P2, ... indexed up to the vertex count
    indexed_family: Optional[str] = None

    @property
    def directed(self) -> bool:
        return self.vocabulary == "directed2"

    def indeterminates_for(self, graph: MultiGraph) -> Tuple[str, ...]:
        if self.indexed_family is None:
            return self.indeterminates
        family = tuple(f"{self.indexed_family}{i}" for i in range(1, len(graph.vertices) + 1))
        return family + self.indeterminates

    @property
    def engines(self) -> Tuple[str, ...]:
        if self.recursive is None:
            return ("expansion", "oracle")
        return ENGINES

    def definition(self, directory: Optional[str] = None):
        if self.recursive is None:
            raise DefinitionError(f"{self.name} has no recursive definition")
        from gpk.recurrence import builtin_definition

        return builtin_definition(self.recursive, directory)

    def expansion(self, structure, renaming: Optional[Mapping[str, str]] = None) -> PolyExpr:
        if self.name == "noble-welsh":
            return noble_welsh_expansion(structure, renaming)
        return _expansion(self.name, renaming)

    def structure(self, graph: MultiGraph, order: Optional[Sequence[str]] = None):
        if graph.directed != self.directed:
            kind = "directed" if self.directed else "undirected"
            raise VocabularyMismatchError(f"{self.name} is defined on {kind} graphs")
        structure = to_incidence(graph, self.vocabulary)
        return reorder(structure, edges_first_order(structure) if order is None else order)

    def evaluate(self, graph: MultiGraph, engine: str = "recursive", order: Optional[Sequence[str]] = None,
                 memoize: bool = True, use_surgeries: bool = True, arity_cap: int = 2,
                 max_universe: Optional[int] = None, max_colorings: int = 2_000_000,
                 budget: Optional[Budget] = None, directory: Optional[str] = None) -> Polynomial:
        if engine not in self.engines:
            raise DefinitionError(f"engine {engine!r} is not available for {self.name}")
        if engine == "oracle":
            return self.oracle(graph)
        structure = self.structure(graph, order)
        if engine == "expansion":
            return eval_expr(self.expansion(structure), structure, arity_cap=arity_cap, budget=budget)
        if engine == "recursive":
            from gpk.recurrence import DeconstructionEvaluator

            evaluator = DeconstructionEvaluator(self.definition(directory), memoize=memoize,
                                                use_surgeries=use_surgeries, arity_cap=arity_cap,
                                                budget=budget, max_universe=max_universe)
            return evaluator.evaluate(structure)
        from gpk.synthesis import synthesize

        return synthesize(self.definition(directory), use_surgeries=use_surgeries, arity_cap=arity_cap,
                          max_colorings=max_colorings, budget=budget).evaluate(structure)


CATALOG: Dict[str, PolynomialEntry] = {
    entry.name: entry
    for entry in (
        PolynomialEntry("matching", "graph2", ("X", "Y"), oracles.oracle_matching, "matching",
                        "X per uncovered vertex, Y per matching edge; M(E1) = X"),
        PolynomialEntry("tutte", "graph2", ("X", "Y"), oracles.oracle_tutte, "tutte",
                        "spanning forests with internal/external activity; T(E1) = 1"),
        PolynomialEntry("potts", "graph2", ("q", "v"), oracles.oracle_potts, "potts",
                        "Z = sum over A of q^k(A) v^|A|; Z(E1) = q"),
        PolynomialEntry("xi", "graph2", ("X", "Y", "Z"), oracles.oracle_xi, "xi",
                        "edge elimination polynomial; dropping Z gives Potts with q=X, v=Y"),
        PolynomialEntry("cover", "directed2", ("X", "Y"), oracles.oracle_cover, "cover",
                        "covers by disjoint directed paths and cycles; C(single loop) = X + Y"),
        PolynomialEntry("noble-welsh", "graph2", ("Y",), oracles.oracle_noble_welsh, None,
                        "X1..Xn indexed by component size; not invariant under renaming, so no recursion",
                        indexed_family="X"),
    )
}


def get_entry(name: str) -> PolynomialEntry:
    try:
        return CATALOG[name]
    except KeyError:
        raise DefinitionError(f"unknown polynomial {name!r}; pick one of {', '.join(CATALOG)}") from None


def entries() -> List[PolynomialEntry]:
    return list(CATALOG.values())


@dataclass
class AgreementReport:
    entry: str
    engines: Tuple[str, ...]
    checked: int = 0
    mismatches: List[dict] = field(default_factory=list)
    truncated: bool = False

    @property
    def passed(self) -> bool:
        return not self.mismatches and not self.truncated

    def to_dict(self) -> dict:
        return {
            "entry": self.entry,
            "engines": list(self.engines),
            "checked": self.checked,
            "mismatches": self.mismatches,
            "truncated": self.truncated,
            "passed": self.passed,
        }


def check_entry(entry: PolynomialEntry, graphs: Sequence[MultiGraph],
                engines: Optional[Sequence[str]] = None, budget: Optional[Budget] = None,
                **options) -> AgreementReport:
    """Evaluate every graph with each engine and record any disagreement."""
    engines = tuple(engines or [e for e in ("recursive", "expansion", "oracle") if e in entry.engines])
    report = AgreementReport(entry.name, engines)
    for index, graph in enumerate(graphs):
        if budget is not None and budget.expired:
            report.truncated = True
            logger.warning("check of %s stopped after %d graphs", entry.name, report.checked)
            break
        values = {engine: entry.evaluate(graph, engine, budget=budget, **options) for engine in engines}
        report.checked += 1
        if len(set(values.values())) > 1:
            report.mismatches.append({
                "graph": index,
                "summary": to_incidence(graph, entry.vocabulary).summary(),
                "values": {engine: str(value) for engine, value in values.items()},
            })
    logger.info("%s: %d graphs, %d mismatches", entry.name, report.checked, len(report.mismatches))
    return report


def renaming_invariance_test(entry: PolynomialEntry, graph: MultiGraph, permutation: Mapping[str, str]) -> bool:
    """Computing with renamed indeterminates against renaming the computed polynomial."""
    targets = list(permutation.values())
    if len(set(targets)) != len(targets):
        raise RenamingError("renaming must be injective")
    structure = entry.structure(graph)
    renamed = eval_expr(entry.expansion(structure, permutation), structure)
    original = eval_expr(entry.expansion(structure), structure).rename(permutation)
    if renamed != original:
        logger.info("%s is not renaming invariant on %s: %s vs %s",
                    entry.name, structure.summary(), renamed, original)
    return renamed == original


def xi_potts_specialization(graph: MultiGraph, engine: str = "expansion") -> bool:
    """The Z-free part of ξ (its B = ∅ summands) equals Potts with q -> X and v -> Y."""
    xi = get_entry("xi").evaluate(graph, engine)
    potts = get_entry("potts").evaluate(graph, engine)
    return xi.partial_substitute({"Z": 0}) == potts.rename({"q": "X", "v": "Y"})
