from gpk.polyring.polynomial import ONE, ZERO, Polynomial, poly_add, poly_eq, poly_mul
from gpk.polyring.expressions import (
    Const,
    ExpressionReader,
    FiniteProduct,
    FiniteSum,
    GuardedProduct,
    LargeSum,
    PolyExpr,
    RelationBinder,
    SmallSum,
    TruthValue,
    cardinality_power,
    const,
    eval_expr,
    factorial_of_card,
    falling_factorial,
    free_fo,
    free_so,
    is_short,
    parse_expr,
)


def variable(name: str) -> Polynomial:
    return Polynomial.variable(name)


def constant(value: int) -> Polynomial:
    return Polynomial.constant(value)
