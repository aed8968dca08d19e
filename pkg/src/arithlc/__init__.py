"""Exact arithmetic Levi-Civita connections on GL_n over truncated p-adic rings."""

from .errors import (ArithError, DomainError, ExactDivisionFailure, NotAUnit, PrecisionUnderflow,
                     UnsupportedIdeal)
from .padic import make_context
from .solver import MetricTuple, solve, solve_at_point, solve_for

__version__ = "0.1.0"

__all__ = [
    "ArithError",
    "DomainError",
    "ExactDivisionFailure",
    "MetricTuple",
    "NotAUnit",
    "PrecisionUnderflow",
    "UnsupportedIdeal",
    "make_context",
    "solve",
    "solve_at_point",
    "solve_for",
    "__version__",
]
