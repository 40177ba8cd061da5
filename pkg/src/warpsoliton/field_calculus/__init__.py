"""Scalar fields as expression trees: parsing, exact derivatives, evaluation."""

from .domain import Domain
from .expr import (
    ONE,
    ZERO,
    Expr,
    as_expr,
    const,
    cosh,
    coth,
    differentiate,
    exp,
    gradient,
    log,
    power,
    sinh,
    sqrt,
    substitute,
    sum_exprs,
    tanh,
    var,
)
from .numeric import (
    DomainViolation,
    compile_exprs,
    evaluate,
    evaluate_many,
    finite_difference,
)
from .parser import ExprSyntaxError, parse_expr, to_text

__all__ = [
    "Domain", "DomainViolation", "Expr", "ExprSyntaxError", "ONE", "ZERO",
    "as_expr", "compile_exprs", "const", "cosh", "coth", "differentiate",
    "evaluate", "evaluate_many", "exp", "finite_difference", "gradient", "log",
    "parse_expr", "power", "sinh", "sqrt", "substitute", "sum_exprs", "tanh",
    "to_text", "var",
]
