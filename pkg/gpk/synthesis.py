"""Subset-expansion form of a recursive definition: a sum over marker colorings.

Every context is marked with the rule applied at it (1..ℓ) or with D when an
earlier step already deleted it. A coloring is valid when walking the contexts
in order, each marked rule's guard holds in the world view current at that
turn, every D-marked context is already gone, and the final view is empty.
Its contribution is the product of the coefficients met along the way.
"""
import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from gpk.errors import CapacityError, DefinitionError, GpkError, TranslationError
from gpk.logic.evaluator import Assignment, as_relation, evaluate
from gpk.logic.syntax import Formula, RelVarAtom, Var
from gpk.polyring import ONE, ZERO, Polynomial, eval_expr
from gpk.recurrence import (
    DeconstructionEvaluator,
    GuardedDeconstruction,
    RecursiveDefinition,
    sample_valid_orders,
)
from gpk.structures import SURGERIES, IncidenceStructure, Vocabulary, edges_first_order, reorder
from gpk.translation import TranslationScheme, transduce, translate
from gpk.utils import Budget, render_report

logger = logging.getLogger(__name__)

DELETED = "D"
Mark = Union[int, str]
MarkerColoring = Mapping[str, Mark]
GUARD_MODES = ("world-view", "translated")
MODES = ("pruned", "exhaustive")

_DUMP_TEMPLATE = """\
{{ name }} on {{ summary }}
{% for row in rows %}
{{ row.marks }}  ->  {{ row.value }}
{% endfor %}
{{ rows|length }} valid coloring(s), total {{ total }}
"""


def _view_name(symbol: str) -> str:
    return f"Q_{symbol}"


def world_view_scheme(vocabulary: Vocabulary) -> TranslationScheme:
    """Φ_{B,Q}: universe B, each relation R read from the relation variable Q_R."""
    relations = []
    for symbol, arity in vocabulary.relations:
        variables = tuple(f"z{i}" for i in range(1, arity + 1))
        relations.append((symbol, variables, RelVarAtom(_view_name(symbol), tuple(Var(v) for v in variables))))
    return TranslationScheme("world-view", vocabulary, vocabulary, "y",
                             RelVarAtom("B", (Var("y"),)), tuple(relations))


def world_view_assignment(view: IncidenceStructure, context: Mapping[str, str]) -> Assignment:
    so = {"B": as_relation(view.universe)}
    so.update({_view_name(symbol): view.relations[symbol] for symbol, _ in view.vocabulary.relations})
    return Assignment(dict(context), so)


class _Guards:
    """Guard checks in one of the two modes; translated guards are built once per rule."""

    def __init__(self, definition: RecursiveDefinition, mode: str):
        if mode not in GUARD_MODES:
            raise GpkError(f"unknown guard mode {mode!r}")
        self.definition = definition
        self.mode = mode
        self._translated: Dict[str, Optional[Formula]] = {}
        if mode == "translated":
            scheme = world_view_scheme(definition.vocabulary)
            for rule in definition.rules:
                try:
                    self._translated[rule.name] = translate(scheme, rule.guard)
                except TranslationError:
                    logger.debug("guard of %s has native atoms; checked in the world view", rule.name)
                    self._translated[rule.name] = None

    def holds(self, rule: GuardedDeconstruction, original: IncidenceStructure,
              view: IncidenceStructure, context: Mapping[str, str]) -> bool:
        translated = self._translated.get(rule.name)
        if translated is None:
            return evaluate(view, Assignment(dict(context)), rule.guard)
        return evaluate(original, world_view_assignment(view, context), translated)


class ExpansionEvaluator:
    """S = Σ over valid colorings of ∏ σ_i(x) for the contexts x marked U_i."""

    def __init__(self, definition: RecursiveDefinition, mode: str = "pruned", guard_mode: str = "world-view",
                 use_surgeries: bool = True, max_colorings: int = 2_000_000, arity_cap: int = 2,
                 budget: Optional[Budget] = None):
        if definition.context_arity != 1:
            raise DefinitionError(f"{definition.name}: synthesis supports context arity 1 only")
        if mode not in MODES:
            raise GpkError(f"unknown expansion mode {mode!r}")
        self.definition = definition
        self.mode = mode
        self.guards = _Guards(definition, guard_mode)
        self.use_surgeries = use_surgeries
        self.max_colorings = max_colorings
        self.arity_cap = arity_cap
        self.budget = budget

    @property
    def context_name(self) -> str:
        return self.definition.context[0]

    # -- single steps --------------------------------------------------------------------

    def step(self, rule: GuardedDeconstruction, view: IncidenceStructure, element: str) -> IncidenceStructure:
        if self.use_surgeries and rule.surgery is not None:
            return SURGERIES[rule.surgery](view, element)
        return transduce(rule.scheme, view, {self.context_name: element})

    def coefficient(self, rule: GuardedDeconstruction, view: IncidenceStructure, element: str) -> Polynomial:
        return eval_expr(rule.coefficient, view, Assignment({self.context_name: element}),
                         arity_cap=self.arity_cap)

    def enabled(self, original: IncidenceStructure, view: IncidenceStructure, element: str) -> List[int]:
        context = {self.context_name: element}
        return [i for i, rule in enumerate(self.definition.rules, start=1)
                if self.guards.holds(rule, original, view, context)]

    # -- coloring walks --------------------------------------------------------------------

    def simulate(self, structure: IncidenceStructure, coloring: MarkerColoring
                 ) -> Tuple[bool, Polynomial, List[IncidenceStructure]]:
        """(valid, contribution, world views met) for one coloring of an already ordered structure."""
        view = structure
        views = []
        contribution = ONE
        for element in structure.universe:
            views.append(view)
            mark = coloring.get(element)
            if element not in view.positions:
                if mark != DELETED:
                    return False, ONE, views
                continue
            if mark == DELETED or not isinstance(mark, int) or not 1 <= mark <= len(self.definition.rules):
                return False, ONE, views
            rule = self.definition.rules[mark - 1]
            if not self.guards.holds(rule, structure, view, {self.context_name: element}):
                return False, ONE, views
            contribution = contribution * self.coefficient(rule, view, element)
            view = self.step(rule, view, element)
        views.append(view)
        if len(view):
            return False, ONE, views
        return True, contribution, views

    def colorings(self, structure: IncidenceStructure, order: Optional[Sequence[str]] = None
                  ) -> List[Tuple[Dict[str, Mark], Polynomial]]:
        """Every valid coloring with its contribution, in enumeration order."""
        structure = reorder(structure, order)
        found: List[Tuple[Dict[str, Mark], Polynomial]] = []
        if self.mode == "exhaustive":
            self._exhaustive(structure, found)
        else:
            self._walk(structure, structure, 0, {}, ONE, found)
        return found

    def _walk(self, original: IncidenceStructure, view: IncidenceStructure, index: int,
              marks: Dict[str, Mark], value: Polynomial, found: list) -> None:
        if self.budget is not None:
            self.budget.check(f"coloring walk of {self.definition.name}")
        if index == len(original.universe):
            if not len(view):
                found.append((dict(marks), value))
            return
        element = original.universe[index]
        if element not in view.positions:
            marks[element] = DELETED
            self._walk(original, view, index + 1, marks, value, found)
            del marks[element]
            return
        for mark in self.enabled(original, view, element):
            rule = self.definition.rules[mark - 1]
            sigma = self.coefficient(rule, view, element)
            marks[element] = mark
            logger.debug("%s: %s marked %d", self.definition.name, element, mark)
            self._walk(original, self.step(rule, view, element), index + 1, marks, value * sigma, found)
            del marks[element]

    def _exhaustive(self, structure: IncidenceStructure, found: list) -> None:
        labels: List[Mark] = list(range(1, len(self.definition.rules) + 1)) + [DELETED]
        total = len(labels) ** len(structure)
        if total > self.max_colorings:
            raise CapacityError(f"{total} colorings exceed the cap {self.max_colorings}")
        for choice in itertools.product(labels, repeat=len(structure)):
            if self.budget is not None:
                self.budget.check(f"coloring enumeration of {self.definition.name}")
            coloring = dict(zip(structure.universe, choice))
            valid, contribution, _ = self.simulate(structure, coloring)
            if valid:
                found.append((coloring, contribution))

    def evaluate(self, structure: IncidenceStructure, order: Optional[Sequence[str]] = None) -> Polynomial:
        total = ZERO
        for _, contribution in self.colorings(structure, order):
            total = total + contribution
        return total

    def count_valid(self, structure: IncidenceStructure, order: Optional[Sequence[str]] = None) -> int:
        return len(self.colorings(structure, order))

    def dump(self, structure: IncidenceStructure, order: Optional[Sequence[str]] = None) -> str:
        structure = reorder(structure, order)
        rows = []
        total = ZERO
        for coloring, contribution in self.colorings(structure):
            marks = " ".join(f"{element}:{_mark_label(self.definition, coloring[element])}"
                             for element in structure.universe)
            rows.append({"marks": marks, "value": str(contribution)})
            total = total + contribution
        return render_report(_DUMP_TEMPLATE, {
            "name": self.definition.name, "summary": structure.summary(), "rows": rows, "total": str(total),
        })


def _mark_label(definition: RecursiveDefinition, mark: Mark) -> str:
    if mark == DELETED:
        return DELETED
    return f"U{mark}({definition.rules[mark - 1].name})"


def synthesize(definition: RecursiveDefinition, **options) -> ExpansionEvaluator:
    return ExpansionEvaluator(definition, **options)


def simulate_coloring(definition: RecursiveDefinition, structure: IncidenceStructure,
                      order: Optional[Sequence[str]], coloring: MarkerColoring,
                      **options) -> Tuple[bool, Polynomial]:
    valid, contribution, _ = ExpansionEvaluator(definition, **options).simulate(reorder(structure, order), coloring)
    return valid, contribution


def world_views(definition: RecursiveDefinition, structure: IncidenceStructure,
                order: Optional[Sequence[str]], coloring: MarkerColoring, **options) -> List[IncidenceStructure]:
    """The world view current at each context's turn, followed by the final one."""
    _, _, views = ExpansionEvaluator(definition, **options).simulate(reorder(structure, order), coloring)
    return views


@dataclass
class EquivalenceReport:
    definition: str
    checked: int = 0
    mismatches: List[dict] = field(default_factory=list)
    truncated: bool = False

    @property
    def passed(self) -> bool:
        return not self.mismatches and not self.truncated

    def to_dict(self) -> dict:
        return {
            "definition": self.definition,
            "checked": self.checked,
            "mismatches": self.mismatches,
            "truncated": self.truncated,
            "passed": self.passed,
        }


def equivalence_check(definition: RecursiveDefinition, structures: Sequence[IncidenceStructure],
                      samples: int = 0, seed: int = 7, budget: Optional[Budget] = None,
                      **options) -> EquivalenceReport:
    """Synthesized sum against the recursion, and valid colorings against tree leaves."""
    evaluator = ExpansionEvaluator(definition, budget=budget, **options)
    recursion = DeconstructionEvaluator(definition, memoize=True,
                                        use_surgeries=evaluator.use_surgeries, arity_cap=evaluator.arity_cap)
    report = EquivalenceReport(definition.name)
    for structure in structures:
        orders = [edges_first_order(structure)]
        if samples:
            orders += [o for o in sample_valid_orders(definition, structure, samples, seed) if o not in orders]
        for order in orders:
            if budget is not None and budget.expired:
                report.truncated = True
                logger.warning("equivalence check of %s stopped after %d instances", definition.name, report.checked)
                return report
            report.checked += 1
            found = evaluator.colorings(structure, order)
            synthesized = sum((value for _, value in found), ZERO)
            recursive = recursion.evaluate(structure, order)
            leaves = recursion.leaf_count(structure, order)
            if synthesized != recursive or len(found) != leaves:
                report.mismatches.append({
                    "structure": structure.summary(),
                    "order": " ".join(order),
                    "synthesized": str(synthesized),
                    "recursive": str(recursive),
                    "colorings": len(found),
                    "leaves": leaves,
                })
    logger.info("equivalence check of %s: %d instances, %d mismatches",
                definition.name, report.checked, len(report.mismatches))
    return report
