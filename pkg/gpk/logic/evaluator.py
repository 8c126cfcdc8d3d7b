"""Tarskian model checking of formulas on finite incidence structures.

Formulas are compiled once into nested closures (cached per formula) and then
run against a `_Model` wrapper and a mutable environment dict.
"""
import itertools
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, FrozenSet, Iterator, Mapping, Sequence, Tuple

from gpk.errors import ArityMismatchError, UnassignedVariableError
from gpk.logic import natives
from gpk.logic.syntax import (
    And,
    Constant,
    Equal,
    ExistsFO,
    ExistsSO,
    ForallFO,
    ForallSO,
    Formula,
    Implies,
    Native,
    Not,
    Or,
    RelArg,
    RelAtom,
    RelVarAtom,
    SortArg,
    Truth,
    Var,
    children,
    constants,
    free_relation_variables,
    free_variables,
)
from gpk.structures import ORDER_SYMBOL, IncidenceStructure

logger = logging.getLogger(__name__)

_MISSING = object()
CONSTANT_PREFIX = "$"


@dataclass(frozen=True)
class Assignment:
    fo: Mapping[str, str] = field(default_factory=dict)
    so: Mapping[str, FrozenSet[tuple]] = field(default_factory=dict)

    def extend(self, fo: Mapping[str, str] = None, so: Mapping[str, FrozenSet[tuple]] = None) -> "Assignment":
        merged_fo = dict(self.fo)
        merged_fo.update(fo or {})
        merged_so = dict(self.so)
        merged_so.update({k: frozenset(tuple(t) for t in v) for k, v in (so or {}).items()})
        return Assignment(merged_fo, merged_so)

    def check(self, structure: IncidenceStructure) -> None:
        """Raise unless every assigned element and tuple lies in the universe."""
        members = set(structure.universe)
        for name, value in self.fo.items():
            if value not in members:
                raise UnassignedVariableError(f"{name} := {value!r} is outside the universe")
        for name, relation in self.so.items():
            arities = {len(t) for t in relation}
            if len(arities) > 1:
                raise ArityMismatchError(f"relation variable {name} mixes arities {sorted(arities)}")
            for t in relation:
                if not members.issuperset(t):
                    raise UnassignedVariableError(f"{name} holds {t!r}, outside the universe")

    def env(self) -> Dict[str, object]:
        env: Dict[str, object] = dict(self.fo)
        # constants live in their own namespace so binders never shadow them
        env.update((CONSTANT_PREFIX + name, value) for name, value in self.fo.items())
        env.update(self.so)
        return env


def as_relation(elements) -> FrozenSet[tuple]:
    """Unary relation value from a collection of elements."""
    return frozenset((a,) for a in elements)


class _Model:
    __slots__ = ("structure", "universe", "relations", "positions", "_spaces")

    def __init__(self, structure: IncidenceStructure):
        self.structure = structure
        self.universe = structure.universe
        self.relations = structure.relations
        self.positions = structure.positions
        self._spaces: Dict[int, list] = {}

    def before(self, left, right) -> bool:
        lp = self.positions.get(left)
        rp = self.positions.get(right)
        return lp is not None and rp is not None and lp < rp

    def relation_space(self, arity: int) -> Iterator[FrozenSet[tuple]]:
        """All relations of the given arity, binary-counter order over sorted tuples."""
        tuples = self._spaces.get(arity)
        if tuples is None:
            tuples = list(itertools.product(self.universe, repeat=arity))
            self._spaces[arity] = tuples
        for mask in range(1 << len(tuples)):
            yield frozenset(t for i, t in enumerate(tuples) if mask >> i & 1)


def _getter(term) -> Callable[[dict], object]:
    name = term.name
    key = CONSTANT_PREFIX + name if isinstance(term, Constant) else name

    def get(env):
        try:
            return env[key]
        except KeyError:
            raise UnassignedVariableError(f"{name} is not assigned") from None

    return get


def _unary_view(relation):
    if all(len(t) == 1 for t in relation):
        return frozenset(t[0] for t in relation)
    return relation


def _native_resolver(arg) -> Callable:
    if isinstance(arg, (Var, Constant)):
        get = _getter(arg)
        return lambda m, env: get(env)
    if isinstance(arg, RelArg):
        names = arg.names

        def union(m, env):
            value = frozenset()
            for name in names:
                try:
                    value = value | env[name]
                except KeyError:
                    raise UnassignedVariableError(f"{name} is not assigned") from None
            return _unary_view(value)

        return union
    if isinstance(arg, SortArg):
        sort = arg.sort
        if sort == "V":
            return lambda m, env: m.structure.incidence.vertices
        if sort == "E":
            return lambda m, env: m.structure.incidence.edges
        return lambda m, env: frozenset(m.universe)
    return lambda m, env: arg


def _fo_binder(var: str, body: Callable, want: bool) -> Callable:
    # want=True is ∃ (stop at the first witness), want=False is ∀
    def run(m, env):
        saved = env.get(var, _MISSING)
        try:
            for a in m.universe:
                env[var] = a
                if bool(body(m, env)) is want:
                    return want
            return not want
        finally:
            if saved is _MISSING:
                env.pop(var, None)
            else:
                env[var] = saved

    return run


def _so_binder(var: str, arity: int, body: Callable, want: bool) -> Callable:
    def run(m, env):
        saved = env.get(var, _MISSING)
        try:
            for relation in m.relation_space(arity):
                env[var] = relation
                if bool(body(m, env)) is want:
                    return want
            return not want
        finally:
            if saved is _MISSING:
                env.pop(var, None)
            else:
                env[var] = saved

    return run


@lru_cache(maxsize=4096)
def compile_formula(formula: Formula) -> Callable:
    if isinstance(formula, Truth):
        value = formula.value
        return lambda m, env: value
    if isinstance(formula, Equal):
        left, right = _getter(formula.left), _getter(formula.right)
        return lambda m, env: left(env) == right(env)
    if isinstance(formula, RelAtom):
        getters = [_getter(t) for t in formula.terms]
        symbol = formula.symbol
        if symbol == ORDER_SYMBOL:
            first, second = getters
            return lambda m, env: m.before(first(env), second(env))
        if len(getters) == 2:
            first, second = getters
            return lambda m, env: (first(env), second(env)) in m.relations[symbol]
        return lambda m, env: tuple(g(env) for g in getters) in m.relations[symbol]
    if isinstance(formula, RelVarAtom):
        getters = [_getter(t) for t in formula.terms]
        var = formula.var

        def member(m, env):
            try:
                relation = env[var]
            except KeyError:
                raise UnassignedVariableError(f"{var} is not assigned") from None
            return tuple(g(env) for g in getters) in relation

        return member
    if isinstance(formula, Native):
        resolvers = [_native_resolver(arg) for arg in formula.args]
        name = formula.name
        return lambda m, env: natives.check_atom(name, m.structure, [r(m, env) for r in resolvers])
    if isinstance(formula, Not):
        body = compile_formula(formula.body)
        return lambda m, env: not body(m, env)
    if isinstance(formula, And):
        left, right = compile_formula(formula.left), compile_formula(formula.right)
        return lambda m, env: left(m, env) and right(m, env)
    if isinstance(formula, Or):
        left, right = compile_formula(formula.left), compile_formula(formula.right)
        return lambda m, env: left(m, env) or right(m, env)
    if isinstance(formula, Implies):
        left, right = compile_formula(formula.left), compile_formula(formula.right)
        return lambda m, env: (not left(m, env)) or right(m, env)
    if isinstance(formula, (ExistsFO, ForallFO)):
        return _fo_binder(formula.var, compile_formula(formula.body), isinstance(formula, ExistsFO))
    if isinstance(formula, (ExistsSO, ForallSO)):
        return _so_binder(formula.var, formula.arity, compile_formula(formula.body),
                          isinstance(formula, ExistsSO))
    raise TypeError(f"not a formula: {formula!r}")


def relation_arities(formula: Formula) -> Dict[str, int]:
    """Arity at which each free relation variable is used."""
    found: Dict[str, int] = {}

    def visit(node, bound):
        if isinstance(node, RelVarAtom) and node.var not in bound:
            previous = found.setdefault(node.var, len(node.terms))
            if previous != len(node.terms):
                raise ArityMismatchError(f"{node.var} used with arities {previous} and {len(node.terms)}")
        if isinstance(node, (ExistsSO, ForallSO)):
            bound = bound | {node.var}
        for child in children(node):
            visit(child, bound)

    visit(formula, frozenset())
    return found


def check_assigned(formula: Formula, assignment: Assignment) -> None:
    missing = sorted((free_variables(formula) | constants(formula)) - set(assignment.fo))
    if missing:
        raise UnassignedVariableError(f"unassigned: {', '.join(missing)}")
    missing = sorted(free_relation_variables(formula) - set(assignment.so))
    if missing:
        raise UnassignedVariableError(f"unassigned relation variables: {', '.join(missing)}")
    for name, arity in relation_arities(formula).items():
        if any(len(t) != arity for t in assignment.so[name]):
            raise ArityMismatchError(f"{name} is used with arity {arity} but assigned other tuples")


def evaluate(structure: IncidenceStructure, assignment: Assignment, formula: Formula) -> bool:
    check_assigned(formula, assignment)
    return bool(compile_formula(formula)(_Model(structure), assignment.env()))


class Checker:
    """A formula bound to one structure, for repeated queries under changing assignments."""

    def __init__(self, structure: IncidenceStructure, formula: Formula):
        self.structure = structure
        self.formula = formula
        self._model = _Model(structure)
        self._run = compile_formula(formula)

    def __call__(self, env: Mapping[str, object]) -> bool:
        return bool(self._run(self._model, dict(env)))

    def witnesses(self, variables: Sequence[str], env: Mapping[str, object],
                  candidates: Sequence[str] = None) -> Iterator[Tuple[str, ...]]:
        """Tuples over the universe (or `candidates`) that satisfy the formula."""
        scratch = dict(env)
        pool = self.structure.universe if candidates is None else candidates
        for values in itertools.product(pool, repeat=len(variables)):
            scratch.update(zip(variables, values))
            if self._run(self._model, scratch):
                yield values
