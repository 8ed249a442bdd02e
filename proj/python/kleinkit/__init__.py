"""Exact ladder-operator algebra with Klein-type dressings.

Operators are kept in normal order; arithmetic is exact over Gaussian
rationals with a formal unit-modulus parameter ``q``.
"""

from ._kleinkit import (
    Algebra,
    KleinkitError,
    Operator,
    Scalar,
    check_script,
    list_maps,
)

q = Scalar.q()

__all__ = [
    "Algebra",
    "KleinkitError",
    "Operator",
    "Scalar",
    "check_script",
    "list_maps",
    "q",
]
