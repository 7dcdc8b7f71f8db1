"""Scalar arithmetic in two modes: exact rationals and complex floats.

Exact mode uses fractions.Fraction (ints accepted and kept as-is), which is
closed under field operations with no rounding.  Float mode uses the builtin
complex type and carries comparison tolerances.  Mixed expressions degrade to
float, so "is this data exact" is a property of the inputs, not a mode switch.
"""

from __future__ import annotations

from fractions import Fraction

# default tolerances; CLI/config may override the solver-facing ones
EPS_EQ = 1e-10        # rational-function equality sampling
NEWTON_TOL = 1e-12    # Newton convergence on cleared BAE residuals
DEDUP_TOL = 1e-6      # solution dedup distance after canonical sort
OFFDIAG_TOL = 1e-8    # off-diagonality threshold for Bethe roots
EIG_TOL = 1e-8        # eigenvector / fiber residual checks

# float-mode equality sampling starts here and walks odd integers
SAMPLE_BASE = 101
SAMPLE_STEP = 2

EXACT_TYPES = (int, Fraction)


def is_exact(x) -> bool:
    return isinstance(x, EXACT_TYPES)


def all_exact(xs) -> bool:
    return all(is_exact(x) for x in xs)


def to_exact(x) -> Fraction:
    """Coerce to Fraction; accepts int, Fraction, and 'p/q' strings."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str)):
        return Fraction(x)
    if isinstance(x, float) and x == int(x):
        return Fraction(int(x))
    raise TypeError(f"not exactly representable: {x!r}")


def to_float(x) -> complex:
    return complex(x)


def scalar_eq(a, b, tol: float = EPS_EQ) -> bool:
    if is_exact(a) and is_exact(b):
        return a == b
    a, b = complex(a), complex(b)
    return abs(a - b) <= tol * (1.0 + abs(a) + abs(b))


def scalar_to_json(x):
    """Exact scalars as 'p/q' strings, floats as [re, im] pairs."""
    if is_exact(x):
        return str(Fraction(x))
    x = complex(x)
    return [x.real, x.imag]


def scalar_from_json(obj):
    if isinstance(obj, str):
        return Fraction(obj)
    if isinstance(obj, int):
        return Fraction(obj)
    if isinstance(obj, list) and len(obj) == 2:
        return complex(obj[0], obj[1])
    if isinstance(obj, float):
        return complex(obj)
    raise ValueError(f"bad scalar payload: {obj!r}")


def sample_points(count: int, start: int = SAMPLE_BASE):
    """Deterministic real sample abscissas 101, 103, 105, ..."""
    return [start + SAMPLE_STEP * m for m in range(count)]
