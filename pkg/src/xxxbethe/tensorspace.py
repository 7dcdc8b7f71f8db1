"""Basis combinatorics of (C^N)^(x n), the gl_N action, weight subspaces,
singular vectors and slot permutations.

Basis elements are color tuples (i_1, ..., i_n), i_k in 1..N, ordered
lexicographically.  Vectors are dicts mapping color tuples to coefficients;
zero coefficients are dropped.  A tuple I = (I_1, ..., I_N) of slot sets and
its color sequence are two views of the same basis element.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

from .linalg import express_in_basis_exact, nullspace_exact


def full_basis(N: int, n: int):
    """All color tuples, lexicographic."""
    return list(itertools.product(range(1, N + 1), repeat=n))


def weight_of(colors, N: int):
    lam = [0] * N
    for c in colors:
        lam[c - 1] += 1
    return tuple(lam)


def weight_basis(N: int, lam):
    """Color tuples of weight lam, lexicographic."""
    n = sum(lam)
    multiset = []
    for c, m in enumerate(lam, start=1):
        multiset.extend([c] * m)
    return sorted(set(itertools.permutations(multiset))) if n else [()]


def weight_compositions(N: int, n: int):
    """All weights (compositions of n into N parts), lexicographic."""
    if N == 1:
        return [(n,)]
    out = []
    for first in range(n + 1):
        for rest in weight_compositions(N - 1, n - first):
            out.append((first,) + rest)
    return out


def dim_weight(N: int, lam) -> int:
    n = sum(lam)
    d = math.factorial(n)
    for m in lam:
        d //= math.factorial(m)
    return d


def index_decomposition(colors, N: int):
    """Slot sets I_c = {1-based positions with color c}."""
    out = [[] for _ in range(N)]
    for s, c in enumerate(colors, start=1):
        out[c - 1].append(s)
    return tuple(tuple(part) for part in out)


def colors_of_decomposition(decomp, n: int):
    colors = [0] * n
    for c, part in enumerate(decomp, start=1):
        for s in part:
            colors[s - 1] = c
    return tuple(colors)


# ---- vectors as dicts ----

def vec_add(a, b):
    out = dict(a)
    for k, v in b.items():
        w = out.get(k, 0) + v
        if w == 0:
            out.pop(k, None)
        else:
            out[k] = w
    return out


def vec_scale(a, c):
    if c == 0:
        return {}
    return {k: v * c for k, v in a.items()}


def vec_sub(a, b):
    return vec_add(a, vec_scale(b, -1))

def vec_is_zero(a) -> bool:
    return all(v == 0 for v in a.values())


def vec_max_abs(a) -> float:
    return max((abs(complex(v)) for v in a.values()), default=0.0)


def vec_to_coords(a, basis):
    return [a.get(k, 0) for k in basis]


def coords_to_vec(coords, basis):
    return {k: c for k, c in zip(basis, coords) if c != 0}


# ---- gl_N and S_n actions ----

def gl_action(i: int, j: int, vec):
    """Total action of e_{i,j}: sum over slots, e_{i,j} v_k = delta_{jk} v_i."""
    out = {}
    for colors, val in vec.items():
        for s, c in enumerate(colors):
            if c == j:
                key = colors[:s] + (i,) + colors[s + 1:]
                w = out.get(key, 0) + val
                if w == 0:
                    out.pop(key, None)
                else:
                    out[key] = w
    return out


def permutation_op(a: int, b: int, vec):
    """Swap tensor slots a and b (1-based)."""
    out = {}
    for colors, val in vec.items():
        cs = list(colors)
        cs[a - 1], cs[b - 1] = cs[b - 1], cs[a - 1]
        out[tuple(cs)] = out.get(tuple(cs), 0) + val
    return {k: v for k, v in out.items() if v != 0}


def gl_action_matrix(i: int, j: int, N: int, lam):
    """Matrix of e_{i,j} from V_lam to its image weight space (exact)."""
    src = weight_basis(N, lam)
    mu = list(lam)
    mu[i - 1] += 1
    mu[j - 1] -= 1
    dst = weight_basis(N, tuple(mu)) if min(mu) >= 0 else []
    dst_index = {k: r for r, k in enumerate(dst)}
    mat = [[Fraction(0)] * len(src) for _ in range(len(dst))]
    for c, colors in enumerate(src):
        for key, val in gl_action(i, j, {colors: Fraction(1)}).items():
            mat[dst_index[key]][c] += val
    return mat, src, dst


def singular_basis(N: int, lam):
    """Exact basis of the singular subspace of V_lam (killed by all raisings).

    Kernels of the simple raisings e_{i,i+1} suffice since they generate the
    others; the full set is re-checked in tests."""
    src = weight_basis(N, lam)
    stacked = []
    for i in range(1, N):
        mat, _, _ = gl_action_matrix(i, i + 1, N, lam)
        stacked.extend(mat)
    basis = nullspace_exact(stacked, ncols=len(src))
    return [coords_to_vec(v, src) for v in basis]


def dim_singular(N: int, lam) -> int:
    return len(singular_basis(N, lam))


def cyclic_vector(N: int, lam):
    """Sum of all weight-basis vectors of V_lam (all-ones coordinates)."""
    return {colors: Fraction(1) for colors in weight_basis(N, lam)}


def project_onto(vec, basis_vectors, mode: str):
    """Coordinates of vec in the span of basis_vectors plus leakage measure.

    Exact mode returns (coords, 0) or raises on leakage; float mode returns
    least-squares coords and the residual infinity norm."""
    from .linalg import express_in_basis_float

    if mode == "exact":
        coords, ok = express_in_basis_exact(basis_vectors, vec)
        if not ok:
            raise ArithmeticError("vector leaks outside the invariant subspace")
        return coords, 0.0
    coords, resid = express_in_basis_float(basis_vectors, vec)
    return coords, resid
