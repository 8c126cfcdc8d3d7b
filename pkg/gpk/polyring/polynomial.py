"""Sparse multivariate polynomials with integer coefficients."""
from typing import Dict, Iterable, List, Mapping, Tuple, Union

import pyparsing as pp

from gpk.errors import MissingIndeterminateError, ParseError

# ((name, exponent), ...) sorted by name, exponents > 0
Monomial = Tuple[Tuple[str, int], ...]
Scalar = int


def _monomial(powers: Union[Mapping[str, int], Iterable[Tuple[str, int]]]) -> Monomial:
    items = powers.items() if isinstance(powers, Mapping) else powers
    merged: Dict[str, int] = {}
    for name, exponent in items:
        if exponent < 0:
            raise ValueError(f"negative exponent for {name}")
        merged[name] = merged.get(name, 0) + exponent
    return tuple(sorted((name, e) for name, e in merged.items() if e))


def _mono_mul(left: Monomial, right: Monomial) -> Monomial:
    if not left:
        return right
    if not right:
        return left
    return _monomial(left + right)


class Polynomial:
    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Union[None, Mapping] = None):
        cleaned: Dict[Monomial, int] = {}
        for monomial, coefficient in (terms or {}).items():
            key = _monomial(monomial)
            cleaned[key] = cleaned.get(key, 0) + int(coefficient)
        self._terms = {m: c for m, c in cleaned.items() if c}
        self._hash = None

    # -- construction -------------------------------------------------------

    @classmethod
    def constant(cls, value: int) -> "Polynomial":
        return cls({(): value})

    @classmethod
    def variable(cls, name: str) -> "Polynomial":
        return cls({((name, 1),): 1})

    @classmethod
    def _raw(cls, terms: Dict[Monomial, int]) -> "Polynomial":
        poly = cls.__new__(cls)
        poly._terms = {m: c for m, c in terms.items() if c}
        poly._hash = None
        return poly

    @staticmethod
    def _coerce(other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, int):
            return Polynomial.constant(other)
        return NotImplemented

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self._terms)
        for monomial, coefficient in other._terms.items():
            terms[monomial] = terms.get(monomial, 0) + coefficient
        return Polynomial._raw(terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms: Dict[Monomial, int] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                key = _mono_mul(m1, m2)
                terms[key] = terms.get(key, 0) + c1 * c2
        return Polynomial._raw(terms)

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("polynomial powers need a non-negative integer exponent")
        result = Polynomial.constant(1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self._terms)

    # -- inspection ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not m for m in self._terms)

    def variables(self) -> Tuple[str, ...]:
        return tuple(sorted({name for m in self._terms for name, _ in m}))

    def degree(self, name: str = None) -> int:
        """Total degree, or the degree in `name`; the zero polynomial has degree -1."""
        if not self._terms:
            return -1
        if name is None:
            return max(sum(e for _, e in m) for m in self._terms)
        return max(dict(m).get(name, 0) for m in self._terms)

    def coefficient(self, powers: Union[Mapping[str, int], None] = None) -> int:
        return self._terms.get(_monomial(powers or {}), 0)

    def is_nonnegative(self) -> bool:
        return all(c > 0 for c in self._terms.values())

    def terms(self) -> List[Tuple[int, Dict[str, int]]]:
        """(coefficient, powers) pairs in canonical order."""
        names = self.variables()

        def key(monomial):
            powers = dict(monomial)
            return tuple(powers.get(name, 0) for name in names)

        ordered = sorted(self._terms, key=key, reverse=True)
        return [(self._terms[m], dict(m)) for m in ordered]

    # -- evaluation ---------------------------------------------------------

    def substitute(self, values: Mapping[str, int]) -> int:
        missing = [name for name in self.variables() if name not in values]
        if missing:
            raise MissingIndeterminateError(f"no value for {', '.join(missing)}")
        total = 0
        for monomial, coefficient in self._terms.items():
            term = coefficient
            for name, exponent in monomial:
                term *= values[name] ** exponent
            total += term
        return total

    def partial_substitute(self, values: Mapping[str, Union[int, "Polynomial"]]) -> "Polynomial":
        result = Polynomial()
        for monomial, coefficient in self._terms.items():
            term = Polynomial.constant(coefficient)
            for name, exponent in monomial:
                base = values.get(name)
                if base is None:
                    term = term * Polynomial._raw({((name, exponent),): 1})
                else:
                    term = term * (self._coerce(base) ** exponent)
            result = result + term
        return result

    def rename(self, mapping: Mapping[str, str]) -> "Polynomial":
        terms: Dict[Monomial, int] = {}
        for monomial, coefficient in self._terms.items():
            key = _monomial([(mapping.get(name, name), e) for name, e in monomial])
            terms[key] = terms.get(key, 0) + coefficient
        return Polynomial._raw(terms)

    # -- serialization ------------------------------------------------------

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        pieces = []
        for coefficient, powers in self.terms():
            factors = [name if e == 1 else f"{name}^{e}" for name, e in sorted(powers.items())]
            magnitude = abs(coefficient)
            if not factors:
                body = str(magnitude)
            elif magnitude == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(magnitude)] + factors)
            sign = "-" if coefficient < 0 else "+"
            pieces.append((sign, body))
        first_sign, first_body = pieces[0]
        text = ("-" if first_sign == "-" else "") + first_body
        for sign, body in pieces[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self) -> str:
        return f"Polynomial({str(self)!r})"

    def to_machine(self) -> List[list]:
        return [[coefficient, powers] for coefficient, powers in self.terms()]

    @classmethod
    def from_machine(cls, data) -> "Polynomial":
        return cls({tuple(powers.items()): coefficient for coefficient, powers in data})

    @classmethod
    def parse(cls, text: str) -> "Polynomial":
        """Read the canonical text form back (`3*X^2*Y - q + 1`)."""
        try:
            parsed = _POLY_GRAMMAR.parse_string(text, parse_all=True)
        except pp.ParseException as err:
            raise ParseError(f"bad polynomial: {err.msg}", err.loc) from None
        return parsed[0]


def _build_poly_grammar() -> pp.ParserElement:
    integer = pp.Word(pp.nums).set_parse_action(lambda toks: int(toks[0]))
    name = pp.Regex(r"[A-Za-z][A-Za-z0-9_]*")
    power = (name + pp.Optional(pp.Suppress("^") + integer, default=1)).set_parse_action(
        lambda toks: Polynomial({((toks[0], toks[1]),): 1})
    )
    factor = power | integer.copy().set_parse_action(lambda toks: Polynomial.constant(int(toks[0])))
    term = pp.DelimitedList(factor, delim="*").set_parse_action(
        lambda toks: _product(toks)
    )
    sign = pp.one_of("+ -")
    expression = (pp.Optional(sign, default="+") + term + pp.ZeroOrMore(sign + term)).set_parse_action(_signed_sum)
    return expression


def _product(factors) -> Polynomial:
    result = Polynomial.constant(1)
    for factor in factors:
        result = result * factor
    return result


def _signed_sum(toks) -> Polynomial:
    result = Polynomial()
    items = list(toks)
    for sign, term in zip(items[0::2], items[1::2]):
        result = result + term if sign == "+" else result - term
    return result


_POLY_GRAMMAR = _build_poly_grammar()

ZERO = Polynomial()
ONE = Polynomial.constant(1)


def poly_add(left: Polynomial, right: Polynomial) -> Polynomial:
    return left + right


def poly_mul(left: Polynomial, right: Polynomial) -> Polynomial:
    return left * right


def poly_eq(left: Polynomial, right: Polynomial) -> bool:
    return left == right
