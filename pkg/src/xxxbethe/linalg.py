"""Small dense linear algebra over exact rationals, plus float fallbacks.

Everything here works on plain lists of lists; sizes stay in the hundreds, so
clarity beats asymptotics.  Exact routines use Fraction arithmetic and report
consistency instead of rounding.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np


def mat_zeros(r, c):
    return [[0] * c for _ in range(r)]


def mat_add(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(a, c):
    return [[x * c for x in row] for row in a]


def mat_mul(a, b):
    rb = len(b)
    cb = len(b[0]) if rb else 0
    out = mat_zeros(len(a), cb)
    for i, row in enumerate(a):
        for k, x in enumerate(row):
            if x == 0:
                continue
            brow = b[k]
            orow = out[i]
            for j in range(cb):
                orow[j] += x * brow[j]
    return out


def mat_identity(n, one=1):
    out = mat_zeros(n, n)
    for i in range(n):
        out[i][i] = one
    return out


def mat_is_zero(a) -> bool:
    return all(x == 0 for row in a for x in row)


def mat_max_abs(a) -> float:
    return max((abs(complex(x)) for row in a for x in row), default=0.0)


def _rref(rows, ncols):
    """In-place reduced row echelon form over Fraction; returns pivot columns."""
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = None
        for i in range(r, len(rows)):
            if rows[i][c] != 0:
                pivot = i
                break
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = Fraction(1) / Fraction(rows[r][c])
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return pivots


def rank_exact(matrix) -> int:
    if not matrix:
        return 0
    rows = [[Fraction(x) for x in row] for row in matrix]
    return len(_rref(rows, len(matrix[0])))


def nullspace_exact(matrix, ncols=None):
    """Basis of the right null space; deterministic (one basis vector per free
    column, unit entry there, in increasing column order)."""
    if ncols is None:
        ncols = len(matrix[0]) if matrix else 0
    if not matrix:
        return [[Fraction(i == j) for i in range(ncols)] for j in range(ncols)]
    rows = [[Fraction(x) for x in row] for row in matrix]
    pivots = _rref(rows, ncols)
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -rows[r][fc]
        basis.append(v)
    return basis


def solve_exact(matrix, rhs):
    """Solve A x = b over Fraction.  Returns (solution, n_free, consistent);
    free variables are set to zero in the particular solution."""
    ncols = len(matrix[0]) if matrix else 0
    rows = [[Fraction(x) for x in row] + [Fraction(y)] for row, y in zip(matrix, rhs)]
    pivots = _rref(rows, ncols)
    for r in range(len(pivots), len(rows)):
        if rows[r][ncols] != 0:
            return None, ncols - len(pivots), False
    x = [Fraction(0)] * ncols
    for r, pc in enumerate(pivots):
        x[pc] = rows[r][ncols]
    return x, ncols - len(pivots), True


def express_in_basis_exact(basis_vectors, target, keys=None):
    """Write target (dict) as an exact combination of basis dicts.

    Returns (coeffs, True) or (best-effort None, False) when target leaves the
    span.  Keys default to the union of supports."""
    if keys is None:
        keys = sorted(set(target) | {k for v in basis_vectors for k in v})
    matrix = [[v.get(k, 0) for v in basis_vectors] for k in keys]
    rhs = [target.get(k, 0) for k in keys]
    sol, free, ok = solve_exact(matrix, rhs)
    if not ok:
        return None, False
    if free:
        raise ValueError("basis vectors are linearly dependent")
    return sol, True


def express_in_basis_float(basis_vectors, target, keys=None):
    """Least-squares coordinates and the leakage residual (infinity norm)."""
    if keys is None:
        keys = sorted(set(target) | {k for v in basis_vectors for k in v})
    a = np.array(
        [[complex(v.get(k, 0)) for v in basis_vectors] for k in keys], dtype=complex
    )
    rhs = np.array([complex(target.get(k, 0)) for k in keys], dtype=complex)
    coeffs, *_ = np.linalg.lstsq(a, rhs, rcond=None)
    resid = rhs - a @ coeffs
    return list(coeffs), float(np.max(np.abs(resid))) if len(resid) else 0.0
