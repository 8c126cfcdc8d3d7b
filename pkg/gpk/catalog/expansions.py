"""Subset expansions of the catalog polynomials as polynomial expressions."""
from dataclasses import replace
from functools import lru_cache
from typing import Mapping, Optional

from gpk.errors import RenamingError
from gpk.logic import helper_macros
from gpk.logic.reader import FormulaReader, read_sexprs
from gpk.logic.syntax import TRUE, And, Native, RelArg, SortArg, Var
from gpk.polyring import (
    Const,
    FiniteProduct,
    FiniteSum,
    GuardedProduct,
    LargeSum,
    PolyExpr,
    RelationBinder,
    SmallSum,
    TruthValue,
    cardinality_power,
    parse_expr,
)
from gpk.structures import GRAPH2, IncidenceStructure, vocabulary_for

EXPANSIONS = {
    "matching": ("graph2", """
        (sum-rel ((A 1 (e) (PE e)))
          (Matching A)
          (* (card-power X (u) (and (PV u) (not (exists e (and (A e) (N u e))))))
             (card-power Y (e) (A e))))
    """),
    "tutte": ("graph2", """
        (sum-rel ((F 1 (e) (PE e)))
          (native spanning-forest F)
          (* (card-power X (e) (native internally-active e F))
             (card-power Y (e) (native externally-active e F))))
    """),
    "potts": ("graph2", """
        (sum-rel ((A 1 (e) (PE e)))
          true
          (* (card-power q (u) (and (PV u) (native last-in-comp u V A)))
             (card-power v (e) (A e))))
    """),
    "xi": ("graph2", """
        (sum-rel ((A 1 (e) (PE e)) (B 1 (e) (PE e)))
          (native vertex-disjoint A B)
          (* (card-power X (u) (and (PV u)
                                    (native last-in-comp u V (union A B))
                                    (not (native touching u V B))))
             (card-power Y (e) (and (or (A e) (B e)) (not (native last-in-comp e B B))))
             (card-power Z (e) (native last-in-comp e B B))))
    """),
    "cover": ("directed2", """
        (sum-rel ((B 1 (e) (PE e)))
          (native cycle-path-cover B)
          (* (falling X (u) (and (PV u) (native last-in-comp u V B) (not (native on-cycle u B))))
             (card-power Y (u) (and (PV u) (native last-in-comp u V B) (native on-cycle u B)))))
    """),
}

# natives replaced by their helper formulas; exponential, tiny graphs only
LOGICAL_EXPANSIONS = {
    "potts": ("graph2", """
        (sum-rel ((A 1 (e) (PE e)))
          true
          (* (card-power q (u) (LastInComp u Vertex A))
             (card-power v (e) (A e))))
    """),
    "matching": EXPANSIONS["matching"],
}

_LOCAL_DEFS = "(def Vertex (y) (PV y))"


@lru_cache(maxsize=None)
def _parsed(name: str, logical: bool = False) -> PolyExpr:
    vocabulary, text = (LOGICAL_EXPANSIONS if logical else EXPANSIONS)[name]
    reader = FormulaReader(vocabulary_for(vocabulary), macros=helper_macros())
    for item in read_sexprs(_LOCAL_DEFS):
        reader.define(item)
    return parse_expr(text, reader)


def rename_expr(expr: PolyExpr, mapping: Mapping[str, str]) -> PolyExpr:
    """Put the renamed indeterminates into the same slots; exponents stay with the slot."""
    if isinstance(expr, Const):
        return Const(expr.value.rename(mapping))
    if isinstance(expr, TruthValue):
        return expr
    if isinstance(expr, FiniteProduct):
        return FiniteProduct(tuple(rename_expr(f, mapping) for f in expr.factors))
    if isinstance(expr, FiniteSum):
        return FiniteSum(tuple(rename_expr(t, mapping) for t in expr.terms))
    if isinstance(expr, (GuardedProduct, SmallSum, LargeSum)):
        return replace(expr, body=rename_expr(expr.body, mapping))
    raise TypeError(f"not an expression: {expr!r}")


def expansion(name: str, renaming: Optional[Mapping[str, str]] = None, logical: bool = False) -> PolyExpr:
    expr = _parsed(name, logical)
    return rename_expr(expr, renaming) if renaming else expr


def indexed(name: str) -> int:
    """The index of an indexed indeterminate such as X3."""
    if len(name) < 2 or name[0] != "X" or not name[1:].isdigit() or int(name[1:]) < 1:
        raise RenamingError(f"{name!r} is not an indexed indeterminate X<i>")
    return int(name[1:])


def noble_welsh_expansion(structure: IncidenceStructure,
                          renaming: Optional[Mapping[str, str]] = None) -> PolyExpr:
    """Σ_A Y^{|A| - r(A)} ∏_i X_i^{s(i, A)} for the vertex count of `structure`.

    Slot i holds the variable renaming(X_i); its exponent counts the components
    whose size is that variable's own index.
    """
    renaming = renaming or {}
    A = RelArg(("A",))
    factors = []
    for i in range(1, len(structure.incidence.vertices) + 1):
        name = renaming.get(f"X{i}", f"X{i}")
        guard = And(
            Native("last-in-comp", (Var("u"), SortArg("V"), A)),
            Native("component-size", (Var("u"), A, indexed(name))),
        )
        factors.append(cardinality_power(name, ("u",), guard))
    # |A| - r(A) edges of A close a cycle with the A-edges before them
    factors.append(cardinality_power(renaming.get("Y", "Y"), ("e",), Native("closes-cycle", (Var("e"), A))))
    edges = FormulaReader(GRAPH2).sort_formula("PE", Var("e"))
    return LargeSum((RelationBinder("A", 1, edges, ("e",)),), TRUE, FiniteProduct(tuple(factors)))
