"""Polynomial expressions over structures: guarded products, small sums and large sums."""
import itertools
import logging
import random
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from gpk.errors import CapacityError, DefinitionError, ParseError, UnassignedVariableError
from gpk.logic.evaluator import Assignment, Checker
from gpk.logic.reader import FormulaReader, Scope, SList, Symbol, location
from gpk.logic.syntax import (
    And,
    Equal,
    ExistsFO,
    ForallFO,
    Formula,
    Implies,
    RelAtom,
    RelVarAtom,
    Var,
    all_names,
    conj,
    constants,
    disj,
    fresh_name,
    free_relation_variables,
    free_variables,
    substitute,
)
from gpk.polyring.polynomial import ONE, ZERO, Polynomial
from gpk.structures import ORDER_SYMBOL, IncidenceStructure
from gpk.utils import Budget

logger = logging.getLogger(__name__)


class PolyExpr:
    pass


@dataclass(frozen=True)
class Const(PolyExpr):
    value: Polynomial


@dataclass(frozen=True)
class TruthValue(PolyExpr):
    formula: Formula


@dataclass(frozen=True)
class FiniteProduct(PolyExpr):
    factors: Tuple[PolyExpr, ...]


@dataclass(frozen=True)
class FiniteSum(PolyExpr):
    terms: Tuple[PolyExpr, ...]


@dataclass(frozen=True)
class GuardedProduct(PolyExpr):
    """∏ over the tuples of `variables` satisfying `guard`."""

    variables: Tuple[str, ...]
    guard: Formula
    body: PolyExpr


@dataclass(frozen=True)
class SmallSum(PolyExpr):
    variables: Tuple[str, ...]
    guard: Formula
    body: PolyExpr


@dataclass(frozen=True)
class RelationBinder:
    """A summed relation variable; `within` (over `params`) limits the tuples it may hold."""

    name: str
    arity: int
    within: Optional[Formula] = None
    params: Tuple[str, ...] = ()


@dataclass(frozen=True)
class LargeSum(PolyExpr):
    binders: Tuple[RelationBinder, ...]
    guard: Formula
    body: PolyExpr


def const(value) -> Const:
    if isinstance(value, str):
        return Const(Polynomial.variable(value))
    if isinstance(value, int):
        return Const(Polynomial.constant(value))
    return Const(value)


# -- structure of expressions ---------------------------------------------------------


def children(expr: PolyExpr) -> Tuple[PolyExpr, ...]:
    if isinstance(expr, FiniteProduct):
        return expr.factors
    if isinstance(expr, FiniteSum):
        return expr.terms
    if isinstance(expr, (GuardedProduct, SmallSum, LargeSum)):
        return (expr.body,)
    return ()


def is_short(expr: PolyExpr) -> bool:
    """No large sums anywhere in the expression."""
    if isinstance(expr, LargeSum):
        return False
    return all(is_short(child) for child in children(expr))


def free_fo(expr: PolyExpr) -> FrozenSet[str]:
    if isinstance(expr, Const):
        return frozenset()
    if isinstance(expr, TruthValue):
        return free_variables(expr.formula) | constants(expr.formula)
    if isinstance(expr, (FiniteProduct, FiniteSum)):
        return frozenset().union(*(free_fo(c) for c in children(expr)))
    if isinstance(expr, (GuardedProduct, SmallSum)):
        inner = free_variables(expr.guard) | constants(expr.guard) | free_fo(expr.body)
        return inner - set(expr.variables)
    if isinstance(expr, LargeSum):
        found = set(free_variables(expr.guard) | constants(expr.guard) | free_fo(expr.body))
        for binder in expr.binders:
            if binder.within is not None:
                found |= (free_variables(binder.within) | constants(binder.within)) - set(binder.params)
        return frozenset(found)
    raise TypeError(f"not an expression: {expr!r}")


def free_so(expr: PolyExpr) -> FrozenSet[str]:
    if isinstance(expr, Const):
        return frozenset()
    if isinstance(expr, TruthValue):
        return free_relation_variables(expr.formula)
    if isinstance(expr, (FiniteProduct, FiniteSum)):
        return frozenset().union(*(free_so(c) for c in children(expr)))
    if isinstance(expr, (GuardedProduct, SmallSum)):
        return free_relation_variables(expr.guard) | free_so(expr.body)
    if isinstance(expr, LargeSum):
        found = set(free_relation_variables(expr.guard) | free_so(expr.body))
        for binder in expr.binders:
            if binder.within is not None:
                found |= free_relation_variables(binder.within)
        return frozenset(found) - {b.name for b in expr.binders}
    raise TypeError(f"not an expression: {expr!r}")


# -- evaluation -------------------------------------------------------------------------


class _Context:
    def __init__(self, structure: IncidenceStructure, arity_cap: int, rng: Optional[random.Random],
                 budget: Optional[Budget]):
        self.structure = structure
        self.arity_cap = arity_cap
        self.rng = rng
        self.budget = budget
        self._checkers: Dict[Formula, Checker] = {}

    def checker(self, formula: Formula) -> Checker:
        found = self._checkers.get(formula)
        if found is None:
            found = self._checkers[formula] = Checker(self.structure, formula)
        return found

    def witnesses(self, variables, guard, env) -> List[tuple]:
        found = list(self.checker(guard).witnesses(variables, env))
        if self.rng is not None:
            self.rng.shuffle(found)
        return found


def _bind(env: dict, names: Sequence[str], values: Sequence) -> dict:
    scoped = dict(env)
    scoped.update(zip(names, values))
    return scoped


def _subsets(candidates: Sequence[tuple]) -> Iterable[FrozenSet[tuple]]:
    for size in range(len(candidates) + 1):
        for chosen in itertools.combinations(candidates, size):
            yield frozenset(chosen)


def _eval(expr: PolyExpr, ctx: _Context, env: dict) -> Polynomial:
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, TruthValue):
        return ONE if ctx.checker(expr.formula)(env) else ZERO
    if isinstance(expr, FiniteProduct):
        result = ONE
        for factor in expr.factors:
            result = result * _eval(factor, ctx, env)
            if result.is_zero():
                break
        return result
    if isinstance(expr, FiniteSum):
        result = ZERO
        for term in expr.terms:
            result = result + _eval(term, ctx, env)
        return result
    if isinstance(expr, GuardedProduct):
        result = ONE
        for values in ctx.witnesses(expr.variables, expr.guard, env):
            result = result * _eval(expr.body, ctx, _bind(env, expr.variables, values))
            if result.is_zero():
                break
        return result
    if isinstance(expr, SmallSum):
        result = ZERO
        for values in ctx.witnesses(expr.variables, expr.guard, env):
            result = result + _eval(expr.body, ctx, _bind(env, expr.variables, values))
        return result
    if isinstance(expr, LargeSum):
        return _eval_large_sum(expr, ctx, env)
    raise TypeError(f"not an expression: {expr!r}")


def _eval_large_sum(expr: LargeSum, ctx: _Context, env: dict) -> Polynomial:
    spaces = []
    for binder in expr.binders:
        if binder.arity > ctx.arity_cap:
            raise CapacityError(
                f"large sum over {binder.name} of arity {binder.arity} exceeds the cap {ctx.arity_cap}"
            )
        tuples = itertools.product(ctx.structure.universe, repeat=binder.arity)
        if binder.within is None:
            candidates = list(tuples)
        else:
            check = ctx.checker(binder.within)
            candidates = [t for t in tuples if check(_bind(env, binder.params, t))]
        if ctx.rng is not None:
            ctx.rng.shuffle(candidates)
        spaces.append(candidates)
    names = [binder.name for binder in expr.binders]
    guard = ctx.checker(expr.guard)
    result = ZERO
    for relations in itertools.product(*(_subsets(c) for c in spaces)):
        if ctx.budget is not None:
            ctx.budget.check("large sum")
        scoped = _bind(env, names, relations)
        if guard(scoped):
            result = result + _eval(expr.body, ctx, scoped)
    return result


def eval_expr(expr: PolyExpr, structure: IncidenceStructure, assignment: Optional[Assignment] = None,
              arity_cap: int = 2, rng: Optional[random.Random] = None,
              budget: Optional[Budget] = None) -> Polynomial:
    """e(S, M, z); `rng` shuffles witness enumeration (the value must not change)."""
    assignment = assignment or Assignment()
    missing = sorted(free_fo(expr) - set(assignment.fo))
    missing += sorted(free_so(expr) - set(assignment.so))
    if missing:
        raise UnassignedVariableError(f"unassigned in expression: {', '.join(missing)}")
    return _eval(expr, _Context(structure, arity_cap, rng, budget), assignment.env())


# -- combinatorial builders --------------------------------------------------------------


def cardinality_power(indeterminate: str, variables: Sequence[str], guard: Formula) -> PolyExpr:
    """X^{#{ā : φ(ā)}} as ∏_{ā:φ} X."""
    return GuardedProduct(tuple(variables), guard, const(indeterminate))


def _fresh_copies(variables: Sequence[str], formula: Formula, suffix: str = "b") -> Tuple[str, ...]:
    taken = set(all_names(formula)) | set(variables)
    copies = []
    for _ in variables:
        copies.append(fresh_name(suffix, taken))
        taken.add(copies[-1])
    return tuple(copies)


def lex_before(left: Sequence[str], right: Sequence[str]) -> Formula:
    """left <_lex right under the structure's order."""
    options = []
    for k in range(len(left)):
        prefix = [Equal(Var(left[i]), Var(right[i])) for i in range(k)]
        options.append(conj(prefix + [RelAtom(ORDER_SYMBOL, (Var(left[k]), Var(right[k])))]))
    return disj(options)


def factorial_of_card(variables: Sequence[str], guard: Formula, name: str = "F") -> PolyExpr:
    """(#φ)! as the number of one-to-one maps of the φ-set onto itself."""
    if len(variables) != 1:
        raise DefinitionError("factorial_of_card needs a guard with one variable")
    (var,) = variables
    a, b, c = _fresh_copies(("a", "b", "c"), guard, "f")
    phi_a = substitute(guard, {var: Var(a)})
    phi_b = substitute(guard, {var: Var(b)})
    total = ForallFO(a, Implies(phi_a, ExistsFO(b, And(
        RelVarAtom(name, (Var(a), Var(b))),
        ForallFO(c, Implies(RelVarAtom(name, (Var(a), Var(c))), Equal(Var(c), Var(b))))))))
    injective = ForallFO(a, ForallFO(b, ForallFO(c, Implies(
        And(RelVarAtom(name, (Var(a), Var(c))), RelVarAtom(name, (Var(b), Var(c)))),
        Equal(Var(a), Var(b))))))
    binder = RelationBinder(name, 2, And(phi_a, phi_b), (a, b))
    return LargeSum((binder,), And(total, injective), const(1))


def falling_factorial(indeterminate: str, variables: Sequence[str], guard: Formula) -> PolyExpr:
    """X(X-1)...(X-#φ+1) as ∏_{ā:φ} (X - #{b̄ : φ(b̄), b̄ <lex ā})."""
    variables = tuple(variables)
    earlier = _fresh_copies(variables, guard)
    moved = substitute(guard, {v: Var(e) for v, e in zip(variables, earlier)})
    before = SmallSum(earlier, And(moved, lex_before(earlier, variables)), const(1))
    body = FiniteSum((const(indeterminate), FiniteProduct((const(-1), before))))
    return GuardedProduct(variables, guard, body)


# -- DSL ---------------------------------------------------------------------------------


class ExpressionReader:
    """Reads `(const X)`, `(tv f)`, `(+ ..)`, `(* ..)`, `(prod-over (x) f e)`, `(sum-rel ...)` and builders."""

    def __init__(self, formulas: FormulaReader):
        self.formulas = formulas

    def read(self, item, scope: Optional[Scope] = None) -> PolyExpr:
        scope = scope or self.formulas.scope()
        if isinstance(item, int):
            return const(item)
        if not isinstance(item, SList) or item.head is None:
            raise ParseError(f"expected a polynomial expression, got {item!r}", location(item))
        head, args = item.head, item.items[1:]
        if head == "const":
            return self._const(args, item.loc)
        if head == "tv":
            self._need(args, 1, head, item.loc)
            return TruthValue(self.formulas.formula(args[0], scope))
        if head == "+":
            return FiniteSum(tuple(self.read(a, scope) for a in args))
        if head == "*":
            return FiniteProduct(tuple(self.read(a, scope) for a in args))
        if head == "-":
            if len(args) == 1:
                return FiniteProduct((const(-1), self.read(args[0], scope)))
            self._need(args, 2, head, item.loc)
            return FiniteSum((self.read(args[0], scope),
                              FiniteProduct((const(-1), self.read(args[1], scope)))))
        if head in ("prod-over", "sum-over"):
            self._need(args, 3, head, item.loc)
            variables = self._names(args[0], item.loc)
            inner = scope.bind_fo(*variables)
            guard = self.formulas.formula(args[1], inner)
            body = self.read(args[2], inner)
            node = GuardedProduct if head == "prod-over" else SmallSum
            return node(variables, guard, body)
        if head == "sum-rel":
            return self._sum_rel(args, scope, item.loc)
        if head in ("card-power", "falling"):
            self._need(args, 3, head, item.loc)
            variables = self._names(args[1], item.loc)
            guard = self.formulas.formula(args[2], scope.bind_fo(*variables))
            build = cardinality_power if head == "card-power" else falling_factorial
            return build(str(args[0]), variables, guard)
        if head == "factorial":
            self._need(args, 2, head, item.loc)
            variables = self._names(args[0], item.loc)
            return factorial_of_card(variables, self.formulas.formula(args[1], scope.bind_fo(*variables)))
        raise ParseError(f"unknown expression form {head!r}", item.loc)

    def _need(self, args, count, head, loc):
        if len(args) != count:
            raise ParseError(f"({head} ...) takes {count} operand(s), got {len(args)}", loc)

    def _names(self, item, loc) -> Tuple[str, ...]:
        names = list(item) if isinstance(item, SList) else [item]
        if not names or not all(isinstance(n, Symbol) for n in names):
            raise ParseError("expected a variable list", loc)
        return tuple(str(n) for n in names)

    def _const(self, args, loc) -> Const:
        self._need(args, 1, "const", loc)
        value = args[0]
        if isinstance(value, int):
            return const(value)
        if isinstance(value, Symbol):
            return const(str(value))
        raise ParseError(f"bad constant {value!r}", loc)

    def _sum_rel(self, args, scope: Scope, loc) -> LargeSum:
        self._need(args, 3, "sum-rel", loc)
        if not isinstance(args[0], SList):
            raise ParseError("(sum-rel ((NAME ARITY) ...) guard body) needs a binder list", loc)
        binders = []
        inner = scope
        for entry in args[0]:
            if not isinstance(entry, SList) or len(entry) not in (2, 4) or not isinstance(entry[1], int):
                raise ParseError("relation binder is (NAME ARITY) or (NAME ARITY (PARAMS) WITHIN)", location(entry))
            name, arity = str(entry[0]), entry[1]
            within, params = None, ()
            if len(entry) == 4:
                params = self._names(entry[2], loc)
                if len(params) != arity:
                    raise ParseError(f"binder {name} needs {arity} parameter(s)", location(entry))
                within = self.formulas.formula(entry[3], inner.bind_fo(*params))
            binders.append(RelationBinder(name, arity, within, params))
            inner = inner.bind_so(name, arity)
        guard = self.formulas.formula(args[1], inner)
        return LargeSum(tuple(binders), guard, self.read(args[2], inner))


def parse_expr(text: str, formulas: Optional[FormulaReader] = None) -> PolyExpr:
    from gpk.logic import helper_macros
    from gpk.logic.reader import read_sexprs

    formulas = formulas or FormulaReader(macros=helper_macros())
    items = read_sexprs(text)
    if len(items) != 1:
        raise ParseError(f"expected one expression, found {len(items)}")
    return ExpressionReader(formulas).read(items[0])
