"""Reader for the parenthesized prefix DSL shared by formulas, schemes and definitions."""
import itertools
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import pyparsing as pp

from gpk.errors import ArityMismatchError, ParseError, UnknownSymbolError
from gpk.logic import natives as native_registry
from gpk.logic.syntax import (
    FALSE,
    TRUE,
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
    RelArg,
    RelAtom,
    RelVarAtom,
    SortArg,
    Var,
    conj,
    disj,
    exists_exactly,
    fresh_name,
    iff,
)
from gpk.structures import DIRECTED2, GRAPH1, GRAPH2, Vocabulary, vocabulary_for


class Symbol(str):
    loc: Optional[int] = None


class SList:
    """A parenthesized list together with its source offset."""

    __slots__ = ("items", "loc")

    def __init__(self, items: Sequence, loc: Optional[int] = None):
        self.items = list(items)
        self.loc = loc

    def __len__(self) -> int:
        return len(self.items)

    def __getitem__(self, index):
        return self.items[index]

    def __iter__(self):
        return iter(self.items)

    def __repr__(self) -> str:
        return "(" + " ".join(repr(item) if isinstance(item, SList) else str(item) for item in self.items) + ")"

    @property
    def head(self) -> Optional[str]:
        if self.items and isinstance(self.items[0], Symbol):
            return str(self.items[0])
        return None


def _symbol(s, loc, toks):
    sym = Symbol(toks[0])
    sym.loc = loc
    return sym


def _build_grammar() -> pp.ParserElement:
    integer = pp.Regex(r"-?\d+(?![^\s()\";])")
    integer.set_parse_action(lambda s, loc, toks: int(toks[0]))
    word = pp.Regex(r"[^\s()\";]+")
    word.set_parse_action(_symbol)
    expr = pp.Forward()
    group = pp.Suppress("(") + pp.ZeroOrMore(expr) + pp.Suppress(")")
    group.set_parse_action(lambda s, loc, toks: SList(list(toks), loc))
    expr <<= integer | word | group
    program = pp.ZeroOrMore(expr)
    comment = ";" + pp.rest_of_line
    for element in (expr, group, program):
        element.ignore(comment)
    return program


_GRAMMAR = _build_grammar()


def read_sexprs(text: str) -> List:
    try:
        return list(_GRAMMAR.parse_string(text, parse_all=True))
    except pp.ParseException as err:
        raise ParseError(f"syntax error: {err.msg}", err.loc) from None


def location(item) -> Optional[int]:
    return getattr(item, "loc", None)


@dataclass(frozen=True)
class Macro:
    name: str
    params: Tuple[str, ...]
    body: object


@dataclass(frozen=True)
class Scope:
    fo: FrozenSet[str] = frozenset()
    so: Mapping[str, int] = field(default_factory=dict)

    def bind_fo(self, *names: str) -> "Scope":
        return Scope(self.fo | set(names), self.so)

    def bind_so(self, name: str, arity: int) -> "Scope":
        so = dict(self.so)
        so[name] = arity
        return Scope(self.fo, so)


BINDER_FORMS = {
    # head -> index of the bound name(s), index of the scoped body
    "exists": (1, 2),
    "forall": (1, 2),
    "existsR": (1, 3),
    "forallR": (1, 3),
    "exists-exactly": (2, 3),
    "prod-over": (1, (2, 3)),
    "sum-over": (1, (2, 3)),
}
SORTS = ("V", "E", "A")


class FormulaReader:
    """Turns s-expressions into formulas for one vocabulary and set of context constants."""

    def __init__(self, vocabulary=GRAPH2, constants: Iterable[str] = (),
                 macros: Optional[Mapping[str, Macro]] = None):
        self.vocabulary: Vocabulary = vocabulary_for(vocabulary)
        self.constants = frozenset(constants)
        self.macros: Dict[str, Macro] = dict(macros or {})
        self._counter = itertools.count(1)

    def scope(self, free_relations: Optional[Mapping[str, int]] = None,
              free_variables: Iterable[str] = ()) -> Scope:
        return Scope(frozenset(free_variables), dict(free_relations or {}))

    # -- macros -----------------------------------------------------------

    def define(self, item) -> Macro:
        """Register `(def NAME form)` or `(def NAME (PARAMS) form)`."""
        if not isinstance(item, SList) or item.head != "def" or len(item) not in (3, 4):
            raise ParseError("expected (def NAME form) or (def NAME (PARAMS) form)", location(item))
        name = item[1]
        if not isinstance(name, Symbol):
            raise ParseError("definition name must be a symbol", location(item))
        params: Tuple[str, ...] = ()
        if len(item) == 4:
            if not isinstance(item[2], SList) or not all(isinstance(p, Symbol) for p in item[2]):
                raise ParseError(f"parameters of {name} must be a list of symbols", location(item))
            params = tuple(str(p) for p in item[2])
        macro = Macro(str(name), params, item[-1])
        self.macros[macro.name] = macro
        return macro

    def _fresh(self, name: str) -> str:
        return f"{name}%{next(self._counter)}"

    def _rewrite(self, item, renames: Mapping[str, object]):
        """Replace free symbols per `renames`, giving every binder a fresh name."""
        if isinstance(item, Symbol):
            if item in renames:
                return renames[item]
            return item
        if not isinstance(item, SList):
            return item
        binder = BINDER_FORMS.get(item.head) if len(item) > 1 else None
        if binder is None:
            return SList([self._rewrite(x, renames) for x in item], item.loc)
        name_index, body_index = binder
        bound = item[name_index] if name_index < len(item) else None
        names = list(bound) if isinstance(bound, SList) else [bound]
        inner = dict(renames)
        new_names = []
        for name in names:
            if isinstance(name, Symbol):
                fresh = Symbol(self._fresh(name))
                fresh.loc = name.loc
                inner[str(name)] = fresh
                new_names.append(fresh)
            else:
                new_names.append(name)
        scoped = body_index if isinstance(body_index, tuple) else (body_index,)
        rebuilt = []
        for index, part in enumerate(item):
            if index == name_index:
                rebuilt.append(SList(new_names, bound.loc) if isinstance(bound, SList) else new_names[0])
            elif index in scoped:
                rebuilt.append(self._rewrite(part, inner))
            elif index == 0:
                rebuilt.append(part)
            else:
                rebuilt.append(self._rewrite(part, renames))
        return SList(rebuilt, item.loc)

    def expand(self, macro: Macro, args: Sequence, loc: Optional[int]):
        if len(args) != len(macro.params):
            raise ArityMismatchError(
                f"{macro.name} takes {len(macro.params)} argument(s), got {len(args)}", loc
            )
        return self._rewrite(macro.body, dict(zip(macro.params, args)))

    # -- terms ------------------------------------------------------------

    def term(self, item, scope: Scope):
        if isinstance(item, Symbol):
            if item in scope.fo:
                return Var(str(item))
            if item in self.constants:
                return Constant(str(item))
            if item in scope.so:
                raise ParseError(f"relation variable {item} used as a term", item.loc)
            return Var(str(item))
        raise ParseError(f"expected a term, got {item!r}", location(item))

    def terms(self, items, scope: Scope):
        return tuple(self.term(item, scope) for item in items)

    # -- formulas ---------------------------------------------------------

    def formula(self, item, scope: Scope) -> Formula:
        if isinstance(item, Symbol):
            if item == "true":
                return TRUE
            if item == "false":
                return FALSE
            macro = self.macros.get(item)
            if macro is not None and not macro.params:
                return self.formula(self.expand(macro, (), item.loc), scope)
            raise UnknownSymbolError(f"unknown formula {item!r}", item.loc)
        if not isinstance(item, SList) or not item.items:
            raise ParseError(f"expected a formula, got {item!r}", location(item))
        head = item.head
        if head is None:
            raise ParseError("formula must start with a symbol", item.loc)
        args = item.items[1:]
        handler = getattr(self, "_form_" + head.replace("-", "_").replace("!=", "neq").replace("=", "eq"), None)
        if head in ("=", "!=", "rel", "rvar", "not", "and", "or", "implies", "iff", "exists", "forall",
                    "existsR", "forallR", "exists-exactly", "subset", "PE", "PV", "native"):
            return handler(args, scope, item.loc)
        if head in scope.so:
            return self._relation_atom(RelVarAtom, head, scope.so[head], args, scope, item.loc)
        if head in self.macros:
            return self.formula(self.expand(self.macros[head], args, item.loc), scope)
        if self.vocabulary.arity(head) is not None:
            return self._relation_atom(RelAtom, head, self.vocabulary.arity(head), args, scope, item.loc)
        raise UnknownSymbolError(f"unknown symbol {head!r}", item.loc)

    def _need(self, args, count: int, what: str, loc) -> None:
        if len(args) != count:
            raise ParseError(f"({what} ...) takes {count} operand(s), got {len(args)}", loc)

    def _relation_atom(self, node, symbol, arity, terms, scope, loc):
        if len(terms) != arity:
            raise ArityMismatchError(f"{symbol} has arity {arity}, got {len(terms)} term(s)", loc)
        return node(symbol, self.terms(terms, scope))

    def _form_eq(self, args, scope, loc):
        self._need(args, 2, "=", loc)
        return Equal(*self.terms(args, scope))

    def _form_neq(self, args, scope, loc):
        self._need(args, 2, "!=", loc)
        return Not(Equal(*self.terms(args, scope)))

    def _form_rel(self, args, scope, loc):
        if not args or not isinstance(args[0], Symbol):
            raise ParseError("(rel SYM t...) needs a relation symbol", loc)
        arity = self.vocabulary.arity(args[0])
        if arity is None:
            raise UnknownSymbolError(f"relation {args[0]!r} is not in {self.vocabulary.name}", args[0].loc)
        return self._relation_atom(RelAtom, str(args[0]), arity, args[1:], scope, loc)

    def _form_rvar(self, args, scope, loc):
        if not args or not isinstance(args[0], Symbol):
            raise ParseError("(rvar VAR t...) needs a relation variable", loc)
        if args[0] not in scope.so:
            raise UnknownSymbolError(f"unbound relation variable {args[0]!r}", args[0].loc)
        return self._relation_atom(RelVarAtom, str(args[0]), scope.so[args[0]], args[1:], scope, loc)

    def _form_not(self, args, scope, loc):
        self._need(args, 1, "not", loc)
        return Not(self.formula(args[0], scope))

    def _nary(self, args, scope, loc, word, fold):
        if len(args) < 2:
            raise ParseError(f"({word} ...) needs at least two operands", loc)
        return fold([self.formula(arg, scope) for arg in args])

    def _form_and(self, args, scope, loc):
        return self._nary(args, scope, loc, "and", conj)

    def _form_or(self, args, scope, loc):
        return self._nary(args, scope, loc, "or", disj)

    def _form_implies(self, args, scope, loc):
        self._need(args, 2, "implies", loc)
        return Implies(self.formula(args[0], scope), self.formula(args[1], scope))

    def _form_iff(self, args, scope, loc):
        self._need(args, 2, "iff", loc)
        return iff(self.formula(args[0], scope), self.formula(args[1], scope))

    def _bound_names(self, item, loc) -> List[str]:
        names = list(item) if isinstance(item, SList) else [item]
        if not names or not all(isinstance(n, Symbol) for n in names):
            raise ParseError("binder needs a variable name or a list of names", loc)
        return [str(n) for n in names]

    def _fo_binder(self, node, args, scope, loc, word):
        self._need(args, 2, word, loc)
        names = self._bound_names(args[0], loc)
        body = self.formula(args[1], scope.bind_fo(*names))
        for name in reversed(names):
            body = node(name, body)
        return body

    def _form_exists(self, args, scope, loc):
        return self._fo_binder(ExistsFO, args, scope, loc, "exists")

    def _form_forall(self, args, scope, loc):
        return self._fo_binder(ForallFO, args, scope, loc, "forall")

    def _so_binder(self, node, args, scope, loc, word):
        self._need(args, 3, word, loc)
        name, arity = args[0], args[1]
        if not isinstance(name, Symbol) or not isinstance(arity, int) or arity < 1:
            raise ParseError(f"({word} VAR ARITY form) needs a name and a positive arity", loc)
        return node(str(name), arity, self.formula(args[2], scope.bind_so(str(name), arity)))

    def _form_existsR(self, args, scope, loc):
        return self._so_binder(ExistsSO, args, scope, loc, "existsR")

    def _form_forallR(self, args, scope, loc):
        return self._so_binder(ForallSO, args, scope, loc, "forallR")

    def _form_exists_exactly(self, args, scope, loc):
        self._need(args, 3, "exists-exactly", loc)
        count, name = args[0], args[1]
        if not isinstance(count, int) or count < 0 or not isinstance(name, Symbol):
            raise ParseError("(exists-exactly K VAR form) needs a count and a variable", loc)
        body = self.formula(args[2], scope.bind_fo(str(name)))
        return exists_exactly(count, str(name), body)

    def _form_subset(self, args, scope, loc):
        self._need(args, 2, "subset", loc)
        inner, outer = args
        if not isinstance(inner, Symbol) or inner not in scope.so:
            raise UnknownSymbolError(f"(subset U W) needs a relation variable, got {inner!r}", loc)
        arity = scope.so[inner]
        names = []
        taken = set(scope.fo) | set(scope.so) | self.constants
        for _ in range(arity):
            names.append(fresh_name("s", taken))
            taken.add(names[-1])
        variables = tuple(Var(n) for n in names)
        if outer in ("PE", "PV"):
            if arity != 1:
                raise ArityMismatchError("subset of a sort needs a unary relation", loc)
            target = self.sort_formula(str(outer), variables[0])
        elif isinstance(outer, Symbol) and outer in scope.so:
            if scope.so[outer] != arity:
                raise ArityMismatchError(f"{inner} and {outer} differ in arity", loc)
            target = RelVarAtom(str(outer), variables)
        elif isinstance(outer, Symbol) and self.vocabulary.arity(outer) == arity:
            target = RelAtom(str(outer), variables)
        else:
            raise UnknownSymbolError(f"cannot take subset of {outer!r}", loc)
        body = Implies(RelVarAtom(str(inner), variables), target)
        for name in reversed(names):
            body = ForallFO(name, body)
        return body

    def sort_formula(self, sort: str, term) -> Formula:
        """P_E / P_V for the active vocabulary."""
        taken = {term.name}
        y = fresh_name("y", taken)
        name = self.vocabulary.name
        if name == GRAPH2.name:
            edge = ExistsFO(y, RelAtom("N", (Var(y), term)))
        elif name == DIRECTED2.name:
            z = fresh_name("z", taken | {y})
            edge = ExistsFO(y, ExistsFO(z, And(RelAtom("NO", (Var(y), term)), RelAtom("NI", (term, Var(z))))))
        elif name == GRAPH1.name:
            edge = FALSE
        else:
            raise UnknownSymbolError(f"no sorts for vocabulary {name}")
        return edge if sort == "PE" else Not(edge)

    def _form_PE(self, args, scope, loc):
        self._need(args, 1, "PE", loc)
        return self.sort_formula("PE", self.term(args[0], scope))

    def _form_PV(self, args, scope, loc):
        self._need(args, 1, "PV", loc)
        return self.sort_formula("PV", self.term(args[0], scope))

    def _relation_arg(self, item, scope, loc):
        if isinstance(item, Symbol) and item in scope.so:
            return RelArg((str(item),))
        if isinstance(item, Symbol) and item in SORTS:
            return SortArg(str(item))
        if isinstance(item, SList) and item.head == "union" and len(item) >= 2:
            names = []
            for part in item.items[1:]:
                if not isinstance(part, Symbol) or part not in scope.so:
                    raise UnknownSymbolError(f"unbound relation variable {part!r} in union", location(part))
                names.append(str(part))
            return RelArg(tuple(names))
        raise UnknownSymbolError(f"expected a relation variable or sort, got {item!r}", location(item) or loc)

    def _form_native(self, args, scope, loc):
        if not args or not isinstance(args[0], Symbol):
            raise ParseError("(native NAME arg...) needs a name", loc)
        name = str(args[0])
        try:
            signature = native_registry.signature(name)
        except KeyError:
            raise UnknownSymbolError(f"unknown native predicate {name!r}", args[0].loc) from None
        given = args[1:]
        if len(given) != len(signature):
            raise ArityMismatchError(f"native {name} takes {len(signature)} argument(s)", loc)
        parsed = []
        for kind, arg in zip(signature, given):
            if kind == "elem":
                parsed.append(self.term(arg, scope))
            elif kind == "rel":
                parsed.append(self._relation_arg(arg, scope, loc))
            elif isinstance(arg, int):
                parsed.append(arg)
            else:
                raise ParseError(f"native {name} expects an integer, got {arg!r}", location(arg) or loc)
        return Native(name, tuple(parsed))


def parse(text: str, vocabulary=GRAPH2, constants: Iterable[str] = (),
          free_relations: Optional[Mapping[str, int]] = None,
          macros: Optional[Mapping[str, Macro]] = None) -> Formula:
    """Parse a single formula; `(def ...)` forms before it become macros."""
    items = read_sexprs(text)
    reader = FormulaReader(vocabulary, constants, macros)
    formulas = []
    for item in items:
        if isinstance(item, SList) and item.head == "def":
            reader.define(item)
        else:
            formulas.append(item)
    if len(formulas) != 1:
        raise ParseError(f"expected exactly one formula, found {len(formulas)}")
    return reader.formula(formulas[0], reader.scope(free_relations))


def parse_macros(text: str) -> Dict[str, Macro]:
    """Collect every `(def ...)` entry of a definitions file."""
    reader = FormulaReader()
    for item in read_sexprs(text):
        if not (isinstance(item, SList) and item.head == "def"):
            raise ParseError("definitions file may only contain (def ...) entries", location(item))
        reader.define(item)
    return reader.macros
