"""Abstract syntax for second-order formulas over incidence vocabularies."""
from dataclasses import dataclass
from typing import FrozenSet, Iterable, Mapping, Tuple, Union


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Constant:
    name: str

    def __str__(self) -> str:
        return self.name


Term = Union[Var, Constant]


@dataclass(frozen=True)
class RelArg:
    """Union of relation variables handed to a native predicate."""

    names: Tuple[str, ...]

    def __str__(self) -> str:
        if len(self.names) == 1:
            return self.names[0]
        return "(union " + " ".join(self.names) + ")"


@dataclass(frozen=True)
class SortArg:
    sort: str  # "V", "E" or "A"

    def __str__(self) -> str:
        return self.sort


class Formula:
    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, repr=False)
class Truth(Formula):
    value: bool


@dataclass(frozen=True, repr=False)
class Equal(Formula):
    left: Term
    right: Term


@dataclass(frozen=True, repr=False)
class RelAtom(Formula):
    symbol: str
    terms: Tuple[Term, ...]


@dataclass(frozen=True, repr=False)
class RelVarAtom(Formula):
    var: str
    terms: Tuple[Term, ...]


@dataclass(frozen=True, repr=False)
class Not(Formula):
    body: Formula


@dataclass(frozen=True, repr=False)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, repr=False)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, repr=False)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, repr=False)
class ExistsFO(Formula):
    var: str
    body: Formula


@dataclass(frozen=True, repr=False)
class ForallFO(Formula):
    var: str
    body: Formula


@dataclass(frozen=True, repr=False)
class ExistsSO(Formula):
    var: str
    arity: int
    body: Formula


@dataclass(frozen=True, repr=False)
class ForallSO(Formula):
    var: str
    arity: int
    body: Formula


@dataclass(frozen=True, repr=False)
class Native(Formula):
    name: str
    args: Tuple[Union[Var, Constant, RelArg, SortArg, int], ...]


for _node in (Truth, Equal, RelAtom, RelVarAtom, Not, And, Or, Implies,
              ExistsFO, ForallFO, ExistsSO, ForallSO, Native):
    _node.__repr__ = lambda self: f"<{type(self).__name__} {to_text(self)}>"

TRUE = Truth(True)
FALSE = Truth(False)

FO_BINDERS = (ExistsFO, ForallFO)
SO_BINDERS = (ExistsSO, ForallSO)
BINARY = (And, Or, Implies)


def conj(parts: Iterable[Formula]) -> Formula:
    """Right-folded conjunction; the empty conjunction is `true`."""
    parts = list(parts)
    if not parts:
        return TRUE
    result = parts[-1]
    for part in reversed(parts[:-1]):
        result = And(part, result)
    return result


def disj(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    if not parts:
        return FALSE
    result = parts[-1]
    for part in reversed(parts[:-1]):
        result = Or(part, result)
    return result


def neq(left: Term, right: Term) -> Formula:
    return Not(Equal(left, right))


def iff(left: Formula, right: Formula) -> Formula:
    return And(Implies(left, right), Implies(right, left))


def _term_vars(terms) -> FrozenSet[str]:
    return frozenset(t.name for t in terms if isinstance(t, Var))


def free_variables(formula: Formula) -> FrozenSet[str]:
    """Free individual variables (constants are not variables)."""
    if isinstance(formula, Truth):
        return frozenset()
    if isinstance(formula, Equal):
        return _term_vars((formula.left, formula.right))
    if isinstance(formula, (RelAtom, RelVarAtom)):
        return _term_vars(formula.terms)
    if isinstance(formula, Native):
        return _term_vars(formula.args)
    if isinstance(formula, Not):
        return free_variables(formula.body)
    if isinstance(formula, BINARY):
        return free_variables(formula.left) | free_variables(formula.right)
    if isinstance(formula, FO_BINDERS):
        return free_variables(formula.body) - {formula.var}
    if isinstance(formula, SO_BINDERS):
        return free_variables(formula.body)
    raise TypeError(f"not a formula: {formula!r}")


def free_relation_variables(formula: Formula) -> FrozenSet[str]:
    if isinstance(formula, (Truth, Equal, RelAtom)):
        return frozenset()
    if isinstance(formula, RelVarAtom):
        return frozenset((formula.var,))
    if isinstance(formula, Native):
        names = set()
        for arg in formula.args:
            if isinstance(arg, RelArg):
                names.update(arg.names)
        return frozenset(names)
    if isinstance(formula, Not):
        return free_relation_variables(formula.body)
    if isinstance(formula, BINARY):
        return free_relation_variables(formula.left) | free_relation_variables(formula.right)
    if isinstance(formula, FO_BINDERS):
        return free_relation_variables(formula.body)
    if isinstance(formula, SO_BINDERS):
        return free_relation_variables(formula.body) - {formula.var}
    raise TypeError(f"not a formula: {formula!r}")


def constants(formula: Formula) -> FrozenSet[str]:
    found = set()

    def visit(node):
        if isinstance(node, Equal):
            terms = (node.left, node.right)
        elif isinstance(node, (RelAtom, RelVarAtom)):
            terms = node.terms
        elif isinstance(node, Native):
            terms = node.args
        else:
            for child in children(node):
                visit(child)
            return
        found.update(t.name for t in terms if isinstance(t, Constant))

    visit(formula)
    return frozenset(found)


def children(formula: Formula) -> Tuple[Formula, ...]:
    if isinstance(formula, Not):
        return (formula.body,)
    if isinstance(formula, BINARY):
        return (formula.left, formula.right)
    if isinstance(formula, FO_BINDERS + SO_BINDERS):
        return (formula.body,)
    return ()


def all_names(formula: Formula) -> FrozenSet[str]:
    """Every variable, relation variable and constant name occurring anywhere."""
    names = set()

    def visit(node):
        if isinstance(node, Equal):
            names.update(t.name for t in (node.left, node.right))
        elif isinstance(node, (RelAtom, RelVarAtom)):
            names.update(t.name for t in node.terms)
            if isinstance(node, RelVarAtom):
                names.add(node.var)
        elif isinstance(node, Native):
            for arg in node.args:
                if isinstance(arg, (Var, Constant)):
                    names.add(arg.name)
                elif isinstance(arg, RelArg):
                    names.update(arg.names)
        elif isinstance(node, FO_BINDERS + SO_BINDERS):
            names.add(node.var)
        for child in children(node):
            visit(child)

    visit(formula)
    return frozenset(names)


def fresh_name(base: str, taken) -> str:
    base = base.split("~", 1)[0]
    index = 1
    while f"{base}~{index}" in taken:
        index += 1
    return f"{base}~{index}"


def _swap_term(term, var_map, const_map):
    if isinstance(term, Var) and term.name in var_map:
        return var_map[term.name]
    if isinstance(term, Constant) and term.name in const_map:
        return const_map[term.name]
    return term


def _term_names(terms) -> FrozenSet[str]:
    return frozenset(t.name for t in terms if isinstance(t, Var))


def substitute(formula: Formula, var_map: Mapping[str, Term] = None,
               const_map: Mapping[str, Term] = None, rel_map: Mapping[str, str] = None) -> Formula:
    """Capture-avoiding replacement of free variables, constants and relation variables."""
    var_map = dict(var_map or {})
    const_map = dict(const_map or {})
    rel_map = dict(rel_map or {})
    if not (var_map or const_map or rel_map):
        return formula
    return _substitute(formula, var_map, const_map, rel_map)


def _substitute(formula, var_map, const_map, rel_map):
    if isinstance(formula, Truth):
        return formula
    if isinstance(formula, Equal):
        return Equal(_swap_term(formula.left, var_map, const_map), _swap_term(formula.right, var_map, const_map))
    if isinstance(formula, RelAtom):
        return RelAtom(formula.symbol, tuple(_swap_term(t, var_map, const_map) for t in formula.terms))
    if isinstance(formula, RelVarAtom):
        return RelVarAtom(rel_map.get(formula.var, formula.var),
                          tuple(_swap_term(t, var_map, const_map) for t in formula.terms))
    if isinstance(formula, Native):
        args = []
        for arg in formula.args:
            if isinstance(arg, RelArg):
                arg = RelArg(tuple(rel_map.get(name, name) for name in arg.names))
            elif isinstance(arg, (Var, Constant)):
                arg = _swap_term(arg, var_map, const_map)
            args.append(arg)
        return Native(formula.name, tuple(args))
    if isinstance(formula, Not):
        return Not(_substitute(formula.body, var_map, const_map, rel_map))
    if isinstance(formula, BINARY):
        return type(formula)(_substitute(formula.left, var_map, const_map, rel_map),
                             _substitute(formula.right, var_map, const_map, rel_map))
    if isinstance(formula, FO_BINDERS):
        inner = {k: t for k, t in var_map.items() if k != formula.var}
        var, body = formula.var, formula.body
        incoming = _term_names(list(inner.values()) + list(const_map.values()))
        if var in incoming:
            renamed = fresh_name(var, all_names(body) | incoming | set(inner))
            body = _substitute(body, {var: Var(renamed)}, {}, {})
            var = renamed
        if not (inner or const_map or rel_map):
            return type(formula)(var, body)
        return type(formula)(var, _substitute(body, inner, const_map, rel_map))
    if isinstance(formula, SO_BINDERS):
        inner_rel = {k: v for k, v in rel_map.items() if k != formula.var}
        var, body = formula.var, formula.body
        if var in inner_rel.values():
            renamed = fresh_name(var, all_names(body) | set(inner_rel.values()) | set(inner_rel))
            body = _substitute(body, {}, {}, {var: renamed})
            var = renamed
        return type(formula)(var, formula.arity, _substitute(body, var_map, const_map, inner_rel))
    raise TypeError(f"not a formula: {formula!r}")


def exists_exactly(count: int, var: str, body: Formula) -> Formula:
    """∃^k var body: k distinct witnesses and nothing else satisfies body."""
    if count < 0:
        raise ValueError("exists-exactly needs a non-negative count")
    taken = set(all_names(body)) | {var}
    if count == 0:
        return ForallFO(var, Not(body))
    witnesses = []
    for _ in range(count):
        name = fresh_name(var, taken)
        taken.add(name)
        witnesses.append(name)
    other = fresh_name(var, taken)
    distinct = [neq(Var(a), Var(b)) for i, a in enumerate(witnesses) for b in witnesses[i + 1:]]
    holds = [substitute(body, {var: Var(w)}) for w in witnesses]
    rest = ForallFO(other, Implies(conj(neq(Var(other), Var(w)) for w in witnesses),
                                   Not(substitute(body, {var: Var(other)}))))
    result = conj(distinct + holds + [rest])
    for name in reversed(witnesses):
        result = ExistsFO(name, result)
    return result


def _terms_text(terms) -> str:
    return " ".join(str(t) for t in terms)


def to_text(formula: Formula) -> str:
    """Render back into the prefix DSL (macros stay expanded)."""
    if isinstance(formula, Truth):
        return "true" if formula.value else "false"
    if isinstance(formula, Equal):
        return f"(= {formula.left} {formula.right})"
    if isinstance(formula, RelAtom):
        return f"(rel {formula.symbol} {_terms_text(formula.terms)})"
    if isinstance(formula, RelVarAtom):
        return f"(rvar {formula.var} {_terms_text(formula.terms)})"
    if isinstance(formula, Native):
        return f"(native {formula.name} {_terms_text(formula.args)})".replace(" )", ")")
    if isinstance(formula, Not):
        return f"(not {to_text(formula.body)})"
    if isinstance(formula, BINARY):
        word = {And: "and", Or: "or", Implies: "implies"}[type(formula)]
        return f"({word} {to_text(formula.left)} {to_text(formula.right)})"
    if isinstance(formula, FO_BINDERS):
        word = "exists" if isinstance(formula, ExistsFO) else "forall"
        return f"({word} {formula.var} {to_text(formula.body)})"
    if isinstance(formula, SO_BINDERS):
        word = "existsR" if isinstance(formula, ExistsSO) else "forallR"
        return f"({word} {formula.var} {formula.arity} {to_text(formula.body)})"
    raise TypeError(f"not a formula: {formula!r}")
