"""Guarded deconstructions, order validation, and evaluation of the linear recurrence.

A `RecursiveDefinition` walks a structure along its order: at each node the
context is the O-least element (or m-tuple), every rule whose guard holds is
applied, and the node's value is the sum of σ_i times the value of the child.
The empty structure is a leaf with value 1.
"""
import itertools
import logging
import math
import os
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Mapping, Optional, Sequence, Set, Tuple

from gpk.errors import CapacityError, DefinitionError, InfeasibleOrderError, ParseError
from gpk.logic import helper_macros
from gpk.logic.evaluator import Assignment, evaluate
from gpk.logic.reader import FormulaReader, SList, Symbol, location, read_sexprs
from gpk.logic.syntax import Formula, disj
from gpk.polyring import ONE, ZERO, ExpressionReader, PolyExpr, Polynomial, eval_expr, is_short
from gpk.structures import (
    SURGERIES,
    IncidenceStructure,
    OrderedContextStructure,
    Vocabulary,
    reorder,
    vocabulary_for,
)
from gpk.translation import TranslationScheme, builtin_schemes, read_scheme, transduce
from gpk.utils import Budget

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GuardedDeconstruction:
    name: str
    scheme: TranslationScheme
    guard: Formula
    coefficient: PolyExpr
    surgery: Optional[str] = None

    def __post_init__(self):
        if not is_short(self.coefficient):
            raise DefinitionError(f"rule {self.name}: the coefficient may not contain a large sum")
        if self.surgery is not None and self.surgery not in SURGERIES:
            raise DefinitionError(f"rule {self.name}: unknown surgery {self.surgery!r}")


@dataclass(frozen=True)
class RecursiveDefinition:
    name: str
    vocabulary: Vocabulary
    context: Tuple[str, ...]
    order: Formula
    rules: Tuple[GuardedDeconstruction, ...]
    indeterminates: Tuple[str, ...] = ()

    def __post_init__(self):
        if not self.rules:
            raise DefinitionError(f"{self.name}: a recursive definition needs at least one rule")
        if not self.context:
            raise DefinitionError(f"{self.name}: context arity must be at least 1")
        for rule in self.rules:
            if rule.scheme.source.name != self.vocabulary.name:
                raise DefinitionError(f"{self.name}.{rule.name}: scheme reads {rule.scheme.source.name}")
            stray = set(rule.scheme.parameters) - set(self.context)
            if stray:
                raise DefinitionError(f"{self.name}.{rule.name}: scheme parameters {sorted(stray)} are not context")

    @property
    def context_arity(self) -> int:
        return len(self.context)

    @property
    def enabled(self) -> Formula:
        """enabled(x̄) = φ_1 ∨ ... ∨ φ_ℓ."""
        return disj(rule.guard for rule in self.rules)

    def context_assignment(self, structure: IncidenceStructure) -> Optional[Assignment]:
        context = OrderedContextStructure(structure, self.context_arity).context
        if context is None:
            return None
        return Assignment(dict(zip(self.context, context)))


def check_order_valid(definition: RecursiveDefinition, structure: IncidenceStructure,
                      order: Optional[Sequence[str]] = None) -> bool:
    return evaluate(reorder(structure, order), Assignment(), definition.order)


def _guard_holds(rule: GuardedDeconstruction, structure: IncidenceStructure, assignment: Assignment) -> bool:
    return evaluate(structure, assignment, rule.guard)


def enabled_set(definition: RecursiveDefinition, structure: IncidenceStructure,
                order: Optional[Sequence[str]] = None) -> Set[int]:
    """1-based indices of the rules enabled at the current context."""
    structure = reorder(structure, order)
    assignment = definition.context_assignment(structure)
    if assignment is None:
        return set()
    return {i for i, rule in enumerate(definition.rules, start=1) if _guard_holds(rule, structure, assignment)}


class DeconstructionEvaluator:
    """Memoized depth-first walk of the deconstruction tree."""

    def __init__(self, definition: RecursiveDefinition, memoize: bool = True, use_surgeries: bool = True,
                 arity_cap: int = 2, budget: Optional[Budget] = None, max_universe: Optional[int] = None):
        self.definition = definition
        self.memoize = memoize
        self.use_surgeries = use_surgeries
        self.arity_cap = arity_cap
        self.budget = budget
        self.max_universe = max_universe
        self.nodes = 0
        self.memo_hits = 0
        self._values: Dict[tuple, Polynomial] = {}
        self._leaves: Dict[tuple, int] = {}
        self._children: Dict[tuple, list] = {}

    def _prepare(self, structure: IncidenceStructure, order) -> IncidenceStructure:
        structure = reorder(structure, order)
        if structure.vocabulary.name != self.definition.vocabulary.name:
            raise DefinitionError(
                f"{self.definition.name} is defined over {self.definition.vocabulary.name}, "
                f"got {structure.vocabulary.name}"
            )
        if self.max_universe and len(structure) > self.max_universe:
            raise CapacityError(f"universe of {len(structure)} elements exceeds the cap {self.max_universe}")
        return structure

    def evaluate(self, structure: IncidenceStructure, order: Optional[Sequence[str]] = None) -> Polynomial:
        return self._value(self._prepare(structure, order))

    def leaf_count(self, structure: IncidenceStructure, order: Optional[Sequence[str]] = None) -> int:
        """Number of root-to-leaf branches of the deconstruction tree."""
        return self._leaf_count(self._prepare(structure, order))

    def _apply(self, rule: GuardedDeconstruction, structure: IncidenceStructure,
               assignment: Assignment) -> IncidenceStructure:
        if self.use_surgeries and rule.surgery is not None and self.definition.context_arity == 1:
            child = SURGERIES[rule.surgery](structure, assignment.fo[self.definition.context[0]])
        else:
            child = transduce(rule.scheme, structure, assignment)
        context = [assignment.fo[name] for name in self.definition.context]
        if len(child) >= len(structure) or all(a in child.positions for a in context):
            raise DefinitionError(
                f"{self.definition.name}.{rule.name} did not delete its context {tuple(context)}"
            )
        return child

    def _expand(self, structure: IncidenceStructure) -> list:
        """(rule, assignment, child) for every enabled rule at the current context."""
        key = structure.key()
        if self.memoize and key in self._children:
            return self._children[key]
        if self.budget is not None:
            self.budget.check(f"recursive evaluation of {self.definition.name}")
        assignment = self.definition.context_assignment(structure)
        if assignment is None:
            raise InfeasibleOrderError(structure.universe, structure.summary())
        expanded = []
        for rule in self.definition.rules:
            if _guard_holds(rule, structure, assignment):
                expanded.append((rule, assignment, self._apply(rule, structure, assignment)))
        if not expanded:
            context = tuple(assignment.fo[name] for name in self.definition.context)
            raise InfeasibleOrderError(context if len(context) > 1 else context[0], structure.summary())
        if self.memoize:
            self._children[key] = expanded
        return expanded

    def _value(self, structure: IncidenceStructure) -> Polynomial:
        if not structure.universe:
            return ONE
        key = structure.key()
        if self.memoize and key in self._values:
            self.memo_hits += 1
            return self._values[key]
        self.nodes += 1
        total = ZERO
        for rule, assignment, child in self._expand(structure):
            sigma = eval_expr(rule.coefficient, structure, assignment, arity_cap=self.arity_cap)
            logger.debug("%s: %s at %s, sigma=%s", self.definition.name, rule.name, dict(assignment.fo), sigma)
            total = total + sigma * self._value(child)
        if self.memoize:
            self._values[key] = total
        return total

    def _leaf_count(self, structure: IncidenceStructure) -> int:
        if not structure.universe:
            return 1
        key = structure.key()
        if self.memoize and key in self._leaves:
            return self._leaves[key]
        count = sum(self._leaf_count(child) for _, _, child in self._expand(structure))
        if self.memoize:
            self._leaves[key] = count
        return count


def evaluate_recursive(definition: RecursiveDefinition, structure: IncidenceStructure,
                       order: Optional[Sequence[str]] = None, **options) -> Polynomial:
    return DeconstructionEvaluator(definition, **options).evaluate(structure, order)


# -- orders -------------------------------------------------------------------------------


def _blocks(structure: IncidenceStructure) -> Tuple[List[str], List[str]]:
    edges = [a for a in structure.universe if a in structure.incidence.edges]
    rest = [a for a in structure.universe if a not in structure.incidence.edges]
    return edges, rest


def block_order_count(structure: IncidenceStructure) -> int:
    edges, rest = _blocks(structure)
    return math.factorial(len(edges)) * math.factorial(len(rest))


def all_valid_orders(definition: RecursiveDefinition, structure: IncidenceStructure,
                     limit: int = 720) -> Optional[List[Tuple[str, ...]]]:
    """Every valid block order (edges in any order, then the rest in any order); None past `limit`."""
    if block_order_count(structure) > limit:
        return None
    edges, rest = _blocks(structure)
    found = []
    for first in itertools.permutations(edges):
        for second in itertools.permutations(rest):
            order = first + second
            if check_order_valid(definition, structure, order):
                found.append(order)
    return found


def sample_valid_orders(definition: RecursiveDefinition, structure: IncidenceStructure,
                        count: int = 20, seed: int = 7) -> List[Tuple[str, ...]]:
    rng = random.Random(seed)
    edges, rest = _blocks(structure)
    found = []
    for _ in range(count * 10):
        if len(found) >= count:
            break
        rng.shuffle(edges)
        rng.shuffle(rest)
        order = tuple(edges + rest)
        if check_order_valid(definition, structure, order):
            found.append(order)
    return found


def orders_for_invariance(definition: RecursiveDefinition, structure: IncidenceStructure,
                          limit: int = 720, samples: int = 20, seed: int = 7) -> List[Tuple[str, ...]]:
    orders = all_valid_orders(definition, structure, limit)
    if orders is None:
        orders = sample_valid_orders(definition, structure, samples, seed)
    return orders


@dataclass
class InvarianceReport:
    definition: str
    structure: str
    orders_checked: int = 0
    values: List[str] = field(default_factory=list)
    errors: List[dict] = field(default_factory=list)

    @property
    def distinct(self) -> int:
        return len(self.values)

    @property
    def invariant(self) -> bool:
        return self.distinct == 1

    def to_dict(self) -> dict:
        return {
            "definition": self.definition,
            "structure": self.structure,
            "orders_checked": self.orders_checked,
            "distinct": self.distinct,
            "values": self.values,
            "errors": self.errors,
            "invariant": self.invariant,
        }


def check_order_invariance(definition: RecursiveDefinition, structure: IncidenceStructure,
                           orders: Sequence[Sequence[str]], **options) -> InvarianceReport:
    report = InvarianceReport(definition.name, structure.summary())
    for order in orders:
        report.orders_checked += 1
        if not check_order_valid(definition, structure, order):
            report.errors.append({"order": " ".join(order), "error": "order violates the order formula"})
            continue
        try:
            value = str(evaluate_recursive(definition, structure, order, **options))
        except InfeasibleOrderError as err:
            report.errors.append({"order": " ".join(order), "error": str(err)})
            continue
        if value not in report.values:
            report.values.append(value)
    if report.distinct > 1:
        logger.warning("%s is not order invariant on %s: %s", definition.name, structure.summary(), report.values)
    return report


# -- definition files -----------------------------------------------------------------------


def _read_rule(item, definition_name: str, vocabulary: Vocabulary, context: Tuple[str, ...],
               reader: FormulaReader, schemes: Mapping[str, TranslationScheme]) -> GuardedDeconstruction:
    if len(item) < 2 or not isinstance(item[1], Symbol):
        raise ParseError("(rule NAME ...) needs a name", item.loc)
    name = str(item[1])
    guard = scheme = coefficient = surgery = None
    for part in item.items[2:]:
        head = part.head if isinstance(part, SList) else None
        if head == "guard" and len(part) == 2:
            guard = reader.formula(part[1], reader.scope())
        elif head == "scheme":
            if len(part) == 2 and isinstance(part[1], Symbol):
                try:
                    scheme = schemes[str(part[1])]
                except KeyError:
                    raise DefinitionError(f"rule {name}: unknown scheme {part[1]!r}") from None
            else:
                scheme = read_scheme(part, reader.macros, vocabulary, name=f"{definition_name}.{name}")
        elif head == "coeff" and len(part) == 2:
            coefficient = ExpressionReader(reader).read(part[1])
        elif head == "surgery" and len(part) == 2:
            surgery = str(part[1])
        else:
            raise ParseError(f"rule {name}: cannot read {part!r}", location(part) or item.loc)
    if guard is None or scheme is None or coefficient is None:
        raise DefinitionError(f"rule {name} needs (guard ..), (scheme ..) and (coeff ..)")
    return GuardedDeconstruction(name, scheme, guard, coefficient, surgery)


def load_definition(text: str, schemes: Optional[Mapping[str, TranslationScheme]] = None,
                    macros=None) -> RecursiveDefinition:
    """Read `(recursive-definition NAME (vocabulary ..) (context-arity m) (order f) (rule ..) ...)`."""
    schemes = builtin_schemes() if schemes is None else schemes
    local_macros = dict(helper_macros() if macros is None else macros)
    definition = None
    pending = []
    for item in read_sexprs(text):
        if isinstance(item, SList) and item.head == "def":
            pending.append(item)
        elif isinstance(item, SList) and item.head == "recursive-definition":
            if definition is not None:
                raise ParseError("one recursive-definition per file", item.loc)
            definition = item
        else:
            raise ParseError(f"unexpected top-level form {item!r}", location(item))
    if definition is None or len(definition) < 2 or not isinstance(definition[1], Symbol):
        raise ParseError("missing (recursive-definition NAME ...)")
    name = str(definition[1])
    vocabulary = vocabulary_for("graph2")
    arity = 1
    indeterminates: Tuple[str, ...] = ()
    order_item = None
    rule_items = []
    for part in definition.items[2:]:
        head = part.head if isinstance(part, SList) else None
        if head == "vocabulary" and len(part) == 2:
            vocabulary = vocabulary_for(str(part[1]))
        elif head == "context-arity" and len(part) == 2 and isinstance(part[1], int):
            arity = part[1]
        elif head == "indeterminates":
            indeterminates = tuple(str(s) for s in part.items[1:])
        elif head == "order" and len(part) == 2:
            order_item = part[1]
        elif head == "rule":
            rule_items.append(part)
        else:
            raise ParseError(f"{name}: cannot read {part!r}", location(part) or definition.loc)
    if arity < 1:
        raise DefinitionError(f"{name}: context arity must be at least 1")
    context = ("x",) if arity == 1 else tuple(f"x{i}" for i in range(1, arity + 1))
    reader = FormulaReader(vocabulary, context, local_macros)
    for item in pending:
        reader.define(item)
    if order_item is None:
        raise DefinitionError(f"{name} needs an (order formula)")
    order = FormulaReader(vocabulary, (), reader.macros).formula(order_item, reader.scope())
    rules = tuple(_read_rule(item, name, vocabulary, context, reader, schemes) for item in rule_items)
    return RecursiveDefinition(name, vocabulary, context, order, rules, indeterminates)


def load_definition_file(path: str, **kwargs) -> RecursiveDefinition:
    with open(path, encoding="utf-8") as handle:
        return load_definition(handle.read(), **kwargs)


@lru_cache(maxsize=None)
def _builtin_definition(directory: str, name: str) -> RecursiveDefinition:
    return load_definition_file(os.path.join(directory, f"{name}.gpk"),
                                schemes=builtin_schemes(directory), macros=helper_macros(directory))


def builtin_definition(name: str, directory: Optional[str] = None) -> RecursiveDefinition:
    from gpk.logic import DEFINITIONS_DIR

    return _builtin_definition(directory or DEFINITIONS_DIR, name)
