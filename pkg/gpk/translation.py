"""Translation schemes: transduction on structures, translation on formulas, composition."""
import logging
import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Mapping, Optional, Tuple, Union

from gpk.errors import (
    ParseError,
    TranslationError,
    UnassignedVariableError,
    VocabularyMismatchError,
)
from gpk.logic.evaluator import Assignment, Checker
from gpk.logic.reader import FormulaReader, Macro, SList, Symbol, location, read_sexprs
from gpk.logic.syntax import (
    BINARY,
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
    RelAtom,
    RelVarAtom,
    Truth,
    Var,
    all_names,
    conj,
    constants,
    fresh_name,
    free_variables,
    substitute,
)
from gpk.structures import GRAPH2, ORDER_SYMBOL, IncidenceStructure, Vocabulary, vocabulary_for

logger = logging.getLogger(__name__)

RelationFormula = Tuple[str, Tuple[str, ...], Formula]


@dataclass(frozen=True)
class TranslationScheme:
    """⟨φ, ψ_1..ψ_k⟩ from `source` to `target`; `parameters` are context constants."""

    name: str
    source: Vocabulary
    target: Vocabulary
    domain_var: str
    domain: Formula
    relations: Tuple[RelationFormula, ...]
    parameters: Tuple[str, ...] = ()

    def __post_init__(self):
        if not free_variables(self.domain) <= {self.domain_var}:
            raise TranslationError(f"scheme {self.name}: domain formula needs exactly one free variable")
        seen = set()
        for symbol, variables, formula in self.relations:
            arity = self.target.arity(symbol)
            if arity is None or symbol == ORDER_SYMBOL:
                raise TranslationError(f"scheme {self.name}: {symbol} is not a relation of {self.target.name}")
            if len(variables) != arity or len(set(variables)) != arity:
                raise TranslationError(f"scheme {self.name}: {symbol} needs {arity} distinct variables")
            if not free_variables(formula) <= set(variables):
                raise TranslationError(f"scheme {self.name}: {symbol} formula has stray free variables")
            seen.add(symbol)
        missing = set(self.target.symbols) - seen
        if missing:
            raise TranslationError(f"scheme {self.name}: no formula for {sorted(missing)}")
        stray = set().union(*(constants(f) for f in self.formulas())) - set(self.parameters)
        if stray:
            raise TranslationError(f"scheme {self.name}: undeclared parameters {sorted(stray)}")

    def formulas(self) -> Tuple[Formula, ...]:
        return (self.domain,) + tuple(formula for _, _, formula in self.relations)

    def relation(self, symbol: str) -> Tuple[Tuple[str, ...], Formula]:
        for candidate, variables, formula in self.relations:
            if candidate == symbol:
                return variables, formula
        raise TranslationError(f"scheme {self.name} has no formula for {symbol}")

    def domain_at(self, term) -> Formula:
        """φ(term)."""
        return substitute(self.domain, {self.domain_var: term})


def identity_scheme(vocabulary=GRAPH2) -> TranslationScheme:
    vocab = vocabulary_for(vocabulary)
    relations = []
    for symbol, arity in vocab.relations:
        variables = tuple(f"z{i}" for i in range(1, arity + 1))
        relations.append((symbol, variables, RelAtom(symbol, tuple(Var(v) for v in variables))))
    return TranslationScheme("identity", vocab, vocab, "y", Truth(True), tuple(relations))


def _assignment(scheme: TranslationScheme, context) -> Assignment:
    if context is None:
        assignment = Assignment()
    elif isinstance(context, Assignment):
        assignment = context
    else:
        assignment = Assignment(dict(context))
    missing = [p for p in scheme.parameters if p not in assignment.fo]
    if missing:
        raise UnassignedVariableError(f"scheme {scheme.name}: context constant(s) {missing} not assigned")
    return assignment


def transduce(scheme: TranslationScheme, structure: IncidenceStructure,
              context: Union[None, Mapping[str, str], Assignment] = None) -> IncidenceStructure:
    """Φ*(M): universe {a : M ⊨ φ(a)}, relations {ā : M ⊨ ψ(ā)}, order restricted."""
    if structure.vocabulary.name != scheme.source.name:
        raise VocabularyMismatchError(
            f"scheme {scheme.name} reads {scheme.source.name}, got {structure.vocabulary.name}"
        )
    env = _assignment(scheme, context).env()
    domain = Checker(structure, scheme.domain)
    keep = tuple(values[0] for values in domain.witnesses((scheme.domain_var,), env))
    relations = {}
    for symbol, variables, formula in scheme.relations:
        relations[symbol] = frozenset(Checker(structure, formula).witnesses(variables, env, candidates=keep))
    kinds = {a: structure.element_kind[a] for a in keep}
    return IncidenceStructure(scheme.target, keep, kinds, relations)


def translate(scheme: TranslationScheme, formula: Formula) -> Formula:
    """Φ♯(θ): rewrite a target-vocabulary formula into one over the source vocabulary."""
    if isinstance(formula, Truth):
        return formula
    if isinstance(formula, Equal):
        return conj([formula, scheme.domain_at(formula.left), scheme.domain_at(formula.right)])
    if isinstance(formula, RelAtom):
        guards = [scheme.domain_at(t) for t in formula.terms]
        if formula.symbol == ORDER_SYMBOL:
            return conj([formula] + guards)
        if scheme.target.arity(formula.symbol) is None:
            raise TranslationError(f"{formula.symbol} is not a relation of {scheme.target.name}")
        variables, body = scheme.relation(formula.symbol)
        return conj([substitute(body, dict(zip(variables, formula.terms)))] + guards)
    if isinstance(formula, RelVarAtom):
        return formula
    if isinstance(formula, Native):
        raise TranslationError(f"native atom {formula.name} has no syntactic translation")
    if isinstance(formula, Not):
        return Not(translate(scheme, formula.body))
    if isinstance(formula, BINARY):
        return type(formula)(translate(scheme, formula.left), translate(scheme, formula.right))
    if isinstance(formula, ExistsFO):
        return ExistsFO(formula.var, And(scheme.domain_at(Var(formula.var)), translate(scheme, formula.body)))
    if isinstance(formula, ForallFO):
        return ForallFO(formula.var, Implies(scheme.domain_at(Var(formula.var)), translate(scheme, formula.body)))
    if isinstance(formula, (ExistsSO, ForallSO)):
        body = translate(scheme, formula.body)
        taken = set(all_names(body)) | {formula.var}
        names = []
        for _ in range(formula.arity):
            names.append(fresh_name("w", taken))
            taken.add(names[-1])
        inside = RelVarAtom(formula.var, tuple(Var(n) for n in names))
        confined = Implies(inside, conj(scheme.domain_at(Var(n)) for n in names))
        for name in reversed(names):
            confined = ForallFO(name, confined)
        if isinstance(formula, ExistsSO):
            return ExistsSO(formula.var, formula.arity, And(confined, body))
        return ForallSO(formula.var, formula.arity, Implies(confined, body))
    raise TypeError(f"not a formula: {formula!r}")


def rename_parameters(scheme: TranslationScheme, mapping: Mapping[str, str]) -> TranslationScheme:
    const_map = {old: Constant(new) for old, new in mapping.items()}
    return TranslationScheme(
        scheme.name,
        scheme.source,
        scheme.target,
        scheme.domain_var,
        substitute(scheme.domain, const_map=const_map),
        tuple((s, v, substitute(f, const_map=const_map)) for s, v, f in scheme.relations),
        tuple(mapping.get(p, p) for p in scheme.parameters),
    )


def compose(first: TranslationScheme, second: TranslationScheme) -> TranslationScheme:
    """One scheme doing `first` then `second`; clashing parameters of `second` are renamed.

    The result's parameters are first's followed by second's, in that order.
    """
    if first.target.name != second.source.name:
        raise VocabularyMismatchError(
            f"cannot compose {first.name} ({first.target.name}) with {second.name} ({second.source.name})"
        )
    taken = set(first.parameters)
    mapping = {}
    for name in second.parameters:
        if name in taken:
            mapping[name] = fresh_name(name, taken | set(second.parameters))
            taken.add(mapping[name])
    if mapping:
        second = rename_parameters(second, mapping)
    var = second.domain_var
    domain = And(first.domain_at(Var(var)), translate(first, second.domain))
    relations = tuple((s, v, translate(first, f)) for s, v, f in second.relations)
    return TranslationScheme(
        f"{first.name}+{second.name}",
        first.source,
        second.target,
        var,
        domain,
        relations,
        first.parameters + second.parameters,
    )


def quantifier_rank(formula: Formula) -> int:
    if isinstance(formula, Not):
        return quantifier_rank(formula.body)
    if isinstance(formula, BINARY):
        return max(quantifier_rank(formula.left), quantifier_rank(formula.right))
    if isinstance(formula, (ExistsFO, ForallFO, ExistsSO, ForallSO)):
        return 1 + quantifier_rank(formula.body)
    return 0


def _max_so_arity(formula: Formula) -> int:
    if isinstance(formula, (ExistsSO, ForallSO)):
        return max(formula.arity, _max_so_arity(formula.body))
    if isinstance(formula, Not):
        return _max_so_arity(formula.body)
    if isinstance(formula, BINARY):
        return max(_max_so_arity(formula.left), _max_so_arity(formula.right))
    if isinstance(formula, (ExistsFO, ForallFO)):
        return _max_so_arity(formula.body)
    return 0


def rank_bound(scheme: TranslationScheme, formula: Formula) -> int:
    """Upper bound on quantifier_rank(translate(scheme, formula))."""
    scheme_rank = max(quantifier_rank(f) for f in scheme.formulas())
    return quantifier_rank(formula) + scheme_rank + _max_so_arity(formula)


# -- scheme files -----------------------------------------------------------------


def _symbols(item, what: str):
    if not isinstance(item, SList) or not all(isinstance(s, Symbol) for s in item):
        raise ParseError(f"{what} must be a list of names", location(item))
    return tuple(str(s) for s in item)


def read_scheme(item, macros: Optional[Mapping[str, Macro]] = None,
                vocabulary=GRAPH2, name: Optional[str] = None) -> TranslationScheme:
    """Build a scheme from `(scheme NAME (params ..) (domain y f) (relation SYM (vars) f) ...)`.

    The NAME slot is optional when `name` is given (inline schemes inside rules).
    """
    if not isinstance(item, SList) or item.head != "scheme":
        raise ParseError("expected (scheme ...)", location(item))
    parts = item.items[1:]
    if parts and isinstance(parts[0], Symbol):
        name, parts = str(parts[0]), parts[1:]
    if name is None:
        raise ParseError("scheme needs a name", item.loc)
    source = target = vocabulary_for(vocabulary)
    target_given = False
    params: Tuple[str, ...] = ()
    domain = None
    relation_items = []
    for part in parts:
        head = part.head if isinstance(part, SList) else None
        if head == "source" and len(part) == 2:
            source = vocabulary_for(str(part[1]))
        elif head == "target" and len(part) == 2:
            target, target_given = vocabulary_for(str(part[1])), True
        elif head == "params":
            params = tuple(str(p) for p in part.items[1:])
        elif head == "domain" and len(part) == 3 and isinstance(part[1], Symbol):
            domain = part
        elif head == "relation" and len(part) == 4:
            relation_items.append(part)
        else:
            raise ParseError(f"scheme {name}: cannot read {part!r}", location(part) or item.loc)
    if not target_given:
        target = source
    if domain is None:
        raise ParseError(f"scheme {name} has no (domain VAR form)", item.loc)
    reader = FormulaReader(source, params, macros)
    domain_var = str(domain[1])
    domain_formula = reader.formula(domain[2], reader.scope(free_variables=[domain_var]))
    relations = []
    for part in relation_items:
        variables = _symbols(part[2], f"variables of {part[1]}")
        formula = reader.formula(part[3], reader.scope(free_variables=variables))
        relations.append((str(part[1]), variables, formula))
    return TranslationScheme(name, source, target, domain_var, domain_formula, tuple(relations), params)


def load_schemes(text: str, macros: Optional[Mapping[str, Macro]] = None) -> Dict[str, TranslationScheme]:
    macros = dict(macros or {})
    reader = FormulaReader(macros=macros)
    schemes = {}
    for item in read_sexprs(text):
        if isinstance(item, SList) and item.head == "def":
            reader.define(item)
            continue
        scheme = read_scheme(item, reader.macros)
        schemes[scheme.name] = scheme
    return schemes


@lru_cache(maxsize=None)
def _builtin(directory: str) -> Dict[str, TranslationScheme]:
    from gpk.logic import helper_macros

    with open(os.path.join(directory, "schemes.gpk"), encoding="utf-8") as handle:
        return load_schemes(handle.read(), helper_macros(directory))


def builtin_schemes(directory: Optional[str] = None) -> Dict[str, TranslationScheme]:
    """Schemes shipped in definitions/schemes.gpk, including one per surgery."""
    from gpk.logic import DEFINITIONS_DIR

    return dict(_builtin(directory or DEFINITIONS_DIR))
