"""Exact symbolic expressions over jet variables."""

from .calculus import (
    Evaluator,
    commutator_check,
    OrderCapError,
    derive,
    evaluate,
    formal_derivative,
    jet_order,
    plain_partial,
    substitute,
    total_derivative,
    truncated_total_derivative,
    weighted_partial,
)
from .chart import ChartSpec, X, a, adapted_dimension, param, x, xi, y
from .core import ONE, ZERO, Atom, Expr, apply_function, as_expr, atom
from .parser import ParseError, parse

__all__ = [
    "Atom", "ChartSpec", "Evaluator", "Expr", "ONE", "OrderCapError", "ParseError", "X", "ZERO",
    "a", "adapted_dimension", "apply_function", "as_expr", "atom", "commutator_check", "derive", "evaluate",
    "formal_derivative", "jet_order", "param", "parse", "plain_partial", "substitute",
    "total_derivative", "truncated_total_derivative", "weighted_partial", "x", "xi", "y",
]
