"""Checks that translation and transduction agree: M ⊨ Φ♯(θ) iff Φ*(M) ⊨ θ.

Holds a fixed suite of schemes and sentences, an exhaustive sweep over small
incidence structures, seeded random triples, and composition coherence.
"""
import itertools
import logging
import random
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Mapping, Optional, Sequence

from gpk.corpus import undirected_corpus
from gpk.logic import helper_macros, parse
from gpk.logic.evaluator import Assignment, evaluate
from gpk.logic.syntax import (
    FALSE,
    TRUE,
    And,
    Equal,
    ExistsFO,
    ExistsSO,
    ForallFO,
    ForallSO,
    Formula,
    Implies,
    Not,
    Or,
    RelAtom,
    RelVarAtom,
    Var,
)
from gpk.structures import GRAPH2, ORDER_SYMBOL, IncidenceStructure, reorder, to_incidence
from gpk.translation import TranslationScheme, builtin_schemes, compose, transduce, translate
from gpk.utils import Budget

logger = logging.getLogger(__name__)

SUITE_SCHEMES = (
    "identity",
    "delete-edge",
    "delete-vertex",
    "contract-edge",
    "extract-edge",
    "drop-loops",
    "drop-isolated",
    "neighbourhood",
    "suffix",
    "forward-incidence",
)

SUITE_FORMULAS = {
    "has-edge": "(exists x (PE x))",
    "loopless": "(forall x (implies (PE x) (exists-exactly 2 y (N y x))))",
    "two-vertices": "(exists (x y) (and (!= x y) (PV x) (PV y)))",
    "no-isolated": "(forall v (implies (PV v) (exists e (N v e))))",
    "perfect-matching": "(existsR A 1 (and (Matching A) (forall v (implies (PV v) (exists e (and (A e) (N v e)))))))",
    "connected": "(existsR S 1 (and (forall e (iff (S e) (PE e))) "
                 "(forall (s t) (implies (and (PV s) (PV t)) (Connected S s t)))))",
    "has-loop": "(exists x (Loop x))",
    "edges-first": "EdgesFirst",
    "parallel-pair": "(exists (e f) (and (!= e f) (PE e) (PE f) (forall v (iff (N v e) (N v f)))))",
    "has-cycle": "(existsR C 1 (Cycle C))",
}


def suite_schemes() -> List[TranslationScheme]:
    schemes = builtin_schemes()
    return [schemes[name] for name in SUITE_SCHEMES]


def suite_formulas() -> Dict[str, Formula]:
    macros = helper_macros()
    return {name: parse(text, GRAPH2, macros=macros) for name, text in SUITE_FORMULAS.items()}


def small_structures(max_elements: int = 4) -> List[IncidenceStructure]:
    """graph2 structures with at most `max_elements` elements, in declaration and reversed order."""
    found = []
    for graph in undirected_corpus(max_elements, max_elements):
        if len(graph.vertices) + len(graph.edges) > max_elements:
            continue
        structure = to_incidence(graph)
        found.append(structure)
        flipped = reorder(structure, tuple(reversed(structure.universe)))
        if flipped.universe != structure.universe:
            found.append(flipped)
    return found


def contexts(scheme: TranslationScheme, structure: IncidenceStructure) -> Iterator[Dict[str, str]]:
    if not scheme.parameters:
        yield {}
        return
    for values in itertools.product(structure.universe, repeat=len(scheme.parameters)):
        yield dict(zip(scheme.parameters, values))


def agrees(scheme: TranslationScheme, sentence: Formula, structure: IncidenceStructure,
           context: Mapping[str, str]) -> bool:
    translated = evaluate(structure, Assignment(dict(context)), translate(scheme, sentence))
    transduced = evaluate(transduce(scheme, structure, context), Assignment(), sentence)
    return translated == transduced


@dataclass
class FundamentalReport:
    checked: int = 0
    disagreements: List[dict] = field(default_factory=list)
    truncated: bool = False

    @property
    def passed(self) -> bool:
        return not self.disagreements and not self.truncated

    def to_dict(self) -> dict:
        return {
            "checked": self.checked,
            "agreed": self.checked - len(self.disagreements),
            "disagreements": self.disagreements,
            "truncated": self.truncated,
            "passed": self.passed,
        }


def _record(report: FundamentalReport, ok: bool, **detail) -> None:
    report.checked += 1
    if not ok:
        logger.warning("fundamental property fails: %s", detail)
        report.disagreements.append({k: str(v) for k, v in detail.items()})


def exhaustive_suite(max_elements: int = 4, schemes: Optional[Sequence[TranslationScheme]] = None,
                     formulas: Optional[Mapping[str, Formula]] = None,
                     budget: Optional[Budget] = None) -> FundamentalReport:
    schemes = suite_schemes() if schemes is None else schemes
    formulas = suite_formulas() if formulas is None else formulas
    report = FundamentalReport()
    for structure in small_structures(max_elements):
        for scheme in schemes:
            for context in contexts(scheme, structure):
                for name, sentence in formulas.items():
                    if budget is not None and budget.expired:
                        report.truncated = True
                        return report
                    _record(report, agrees(scheme, sentence, structure, context),
                            scheme=scheme.name, formula=name, structure=structure.summary(), context=context)
    logger.info("exhaustive fundamental suite: %d checks", report.checked)
    return report


def random_formula(rng: random.Random, depth: int = 3, bound: Sequence[str] = (),
                   relation_vars: Sequence[str] = (), allow_so: bool = True) -> Formula:
    """A random graph2 formula whose free variables are among `bound`."""
    if depth <= 0 or (bound and rng.random() < 0.2):
        if not bound:
            return rng.choice((TRUE, FALSE))
        kinds = ["eq", "N", "O"] + (["rvar"] if relation_vars else [])
        kind = rng.choice(kinds)
        a, b = rng.choice(bound), rng.choice(bound)
        if kind == "eq":
            return Equal(Var(a), Var(b))
        if kind == "rvar":
            return RelVarAtom(rng.choice(relation_vars), (Var(a),))
        return RelAtom("N" if kind == "N" else ORDER_SYMBOL, (Var(a), Var(b)))
    choices = ["not", "and", "or", "implies", "exists", "forall"]
    if allow_so:
        choices += ["existsR", "forallR"]
    if not bound:
        choices = [c for c in choices if c in ("exists", "forall", "existsR", "forallR")]
    kind = rng.choice(choices)
    if kind == "not":
        return Not(random_formula(rng, depth - 1, bound, relation_vars, allow_so))
    if kind in ("and", "or", "implies"):
        node = {"and": And, "or": Or, "implies": Implies}[kind]
        return node(random_formula(rng, depth - 1, bound, relation_vars, allow_so),
                    random_formula(rng, depth - 1, bound, relation_vars, allow_so))
    if kind in ("exists", "forall"):
        var = f"x{len(bound) + 1}"
        body = random_formula(rng, depth - 1, tuple(bound) + (var,), relation_vars, allow_so)
        return (ExistsFO if kind == "exists" else ForallFO)(var, body)
    var = f"U{len(relation_vars) + 1}"
    # at most one relation quantifier per formula keeps evaluation cheap
    body = random_formula(rng, depth - 1, bound, tuple(relation_vars) + (var,), False)
    return (ExistsSO if kind == "existsR" else ForallSO)(var, 1, body)


def random_suite(trials: int = 200, max_elements: int = 4, seed: int = 7,
                 budget: Optional[Budget] = None) -> FundamentalReport:
    rng = random.Random(seed)
    schemes = suite_schemes()
    structures = small_structures(max_elements)
    report = FundamentalReport()
    for trial in range(trials):
        if budget is not None and budget.expired:
            report.truncated = True
            break
        scheme = rng.choice(schemes)
        structure = rng.choice(structures)
        sentence = random_formula(rng, depth=rng.randint(1, 4))
        options = list(contexts(scheme, structure))
        if not options:
            # a parameterised scheme on the empty structure has no context
            structure = rng.choice([s for s in structures if len(s)])
            options = list(contexts(scheme, structure))
        context = rng.choice(options)
        _record(report, agrees(scheme, sentence, structure, context),
                trial=trial, scheme=scheme.name, formula=sentence, structure=structure.summary(), context=context)
    logger.info("random fundamental suite: %d/%d agree", report.checked - len(report.disagreements), report.checked)
    return report


def composition_suite(trials: int = 100, max_elements: int = 4, seed: int = 7,
                      budget: Optional[Budget] = None) -> FundamentalReport:
    """transduce(compose(Φ1, Φ2)) against transducing with Φ1 and then Φ2."""
    rng = random.Random(seed)
    schemes = suite_schemes()
    structures = [s for s in small_structures(max_elements) if len(s)]
    report = FundamentalReport()
    for trial in range(trials):
        if budget is not None and budget.expired:
            report.truncated = True
            break
        first, second = rng.choice(schemes), rng.choice(schemes)
        structure = rng.choice(structures)
        first_context = {p: rng.choice(structure.universe) for p in first.parameters}
        middle = transduce(first, structure, first_context)
        pool = middle.universe or structure.universe
        second_values = [rng.choice(pool) for _ in second.parameters]
        sequential = transduce(second, middle, dict(zip(second.parameters, second_values)))
        composed = compose(first, second)
        values = [first_context[p] for p in first.parameters] + second_values
        together = transduce(composed, structure, dict(zip(composed.parameters, values)))
        _record(report, together == sequential,
                trial=trial, first=first.name, second=second.name, structure=structure.summary())
    return report
