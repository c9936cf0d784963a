"""freeconv: exact free-probability calculus for commutators of free
random variables, built on non-crossing partition combinatorics, with a
floating-point Cauchy-transform layer for densities."""

from .freeops import (
    Distribution,
    free_add,
    free_commutator,
    free_mul,
    free_power,
    make_law,
    parse_expr,
    parse_law,
)

__all__ = [
    "Distribution",
    "free_add",
    "free_commutator",
    "free_mul",
    "free_power",
    "make_law",
    "parse_expr",
    "parse_law",
]

__version__ = "0.1.0"
