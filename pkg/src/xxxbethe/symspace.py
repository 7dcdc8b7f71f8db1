"""Symmetric-group action on V-valued polynomials, invariant subspaces,
graded characters, and evaluation at a point.

Elements of V (x) C[z_1, ..., z_n] are held truncated by total degree.  The
action of the elementary transposition s_i combines the slot permutation
with an exact divided difference, so everything here runs over rationals;
float data is rejected where it would make the cancellation structural
assumptions meaningless.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .scalars import all_exact
from .linalg import nullspace_exact
from .tensorspace import (
    dim_weight,
    gl_action,
    weight_basis,
)


# ---- truncated V-valued polynomials ----


@dataclass(frozen=True)
class TruncatedVPoly:
    """Sum of z^alpha (x) v_colors terms with |alpha| <= d.

    coeffs maps (alpha, colors) to a scalar; alpha and colors are length-n
    tuples (exponents and tensor-slot colors).
    """

    n: int
    d: int
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (alpha, colors), val in self.coeffs.items():
            if val == 0:
                continue
            if len(alpha) != self.n or len(colors) != self.n:
                raise ValueError("keys must carry n exponents and n colors")
            if sum(alpha) > self.d:
                raise ValueError("monomial degree exceeds the cutoff")
            clean[(tuple(alpha), tuple(colors))] = val
        object.__setattr__(self, "coeffs", clean)

    def __eq__(self, other):
        if not isinstance(other, TruncatedVPoly):
            return NotImplemented
        return self.n == other.n and self.coeffs == other.coeffs

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_exact(self) -> bool:
        return all_exact(self.coeffs.values())

    def degree(self) -> int:
        return max((sum(a) for a, _ in self.coeffs), default=0)

    def add(self, other: "TruncatedVPoly") -> "TruncatedVPoly":
        out = dict(self.coeffs)
        for key, val in other.coeffs.items():
            out[key] = out.get(key, 0) + val
        return TruncatedVPoly(self.n, max(self.d, other.d), out)

    def scale(self, c) -> "TruncatedVPoly":
        return TruncatedVPoly(self.n, self.d, {k: c * v for k, v in self.coeffs.items()})

    def sub(self, other: "TruncatedVPoly") -> "TruncatedVPoly":
        return self.add(other.scale(-1))


def constant_vpoly(vec, n: int, d: int = 0) -> TruncatedVPoly:
    """Embed a tensor vector as a z-constant element."""
    zero = (0,) * n
    return TruncatedVPoly(n, d, {(zero, colors): val for colors, val in vec.items()})


def mul_monomial(f: TruncatedVPoly, alpha, c=1) -> TruncatedVPoly:
    """Multiply by c z^alpha, raising the cutoff accordingly."""
    alpha = tuple(alpha)
    out = {}
    for (a, colors), val in f.coeffs.items():
        key = (tuple(x + y for x, y in zip(a, alpha)), colors)
        out[key] = out.get(key, 0) + c * val
    return TruncatedVPoly(f.n, f.d + sum(alpha), out)


def mul_symmetric(f: TruncatedVPoly, s: int) -> TruncatedVPoly:
    """Multiply by the elementary symmetric polynomial sigma_s(z)."""
    acc = TruncatedVPoly(f.n, f.d + s, {})
    for comb in itertools.combinations(range(f.n), s):
        alpha = tuple(1 if t in comb else 0 for t in range(f.n))
        acc = acc.add(mul_monomial(f, alpha))
    return acc


def gl_vpoly(i: int, j: int, f: TruncatedVPoly) -> TruncatedVPoly:
    """e_{i,j} acting on the tensor part, slot by slot."""
    out = {}
    for (alpha, colors), val in f.coeffs.items():
        for key, w in gl_action(i, j, {colors: val}).items():
            out[(alpha, key)] = out.get((alpha, key), 0) + w
    return TruncatedVPoly(f.n, f.d, out)


# ---- the S_n action ----


def _swap_pair(f: TruncatedVPoly, i: int, vars_too: bool, colors_too: bool):
    out = {}
    for (alpha, colors), val in f.coeffs.items():
        a, c = list(alpha), list(colors)
        if vars_too:
            a[i - 1], a[i] = a[i], a[i - 1]
        if colors_too:
            c[i - 1], c[i] = c[i], c[i - 1]
        key = (tuple(a), tuple(c))
        out[key] = out.get(key, 0) + val
    return TruncatedVPoly(f.n, f.d, out)


def _divide_linear(coeffs, i: int):
    """Exact quotient by (z_i - z_{i+1}) via Horner in z_i.

    c x^a = c x^{a-1} (x - z_j) + c z_j x^{a-1}; terms that reach exponent 0
    must cancel, anything left signals a bug in the caller."""
    levels = {}
    for key, val in coeffs.items():
        levels.setdefault(key[0][i - 1], {})[key] = val
    out = {}
    top = max(levels, default=0)
    for a in range(top, 0, -1):
        for (alpha, colors), val in levels.get(a, {}).items():
            if val == 0:
                continue
            qa = alpha[: i - 1] + (a - 1,) + alpha[i:]
            out[(qa, colors)] = out.get((qa, colors), 0) + val
            ra = qa[:i] + (qa[i] + 1,) + qa[i + 1 :]
            lower = levels.setdefault(a - 1, {})
            lower[(ra, colors)] = lower.get((ra, colors), 0) + val
    if any(v != 0 for v in levels.get(0, {}).values()):
        raise AssertionError("divided difference left a remainder")
    return out


def sn_act(i: int, f: TruncatedVPoly) -> TruncatedVPoly:
    """s_i f = P^(i,i+1) f^swap + (f - f^swap)/(z_i - z_{i+1}).

    f^swap exchanges the variables z_i, z_{i+1}; the divided difference is an
    exact polynomial division (the difference is antisymmetric in the pair).
    Constants reduce to the plain slot permutation.
    """
    if not 1 <= i <= f.n - 1:
        raise ValueError(f"transposition index out of range: {i}")
    sw = _swap_pair(f, i, vars_too=True, colors_too=False)
    psw = _swap_pair(sw, i, vars_too=False, colors_too=True)
    quot = _divide_linear(f.sub(sw).coeffs, i)
    return psw.add(TruncatedVPoly(f.n, f.d, quot))


# ---- invariants and their dimensions ----


def monomials_upto(n: int, d: int):
    """Exponent tuples with |alpha| <= d, ordered by (degree, tuple)."""
    out = [a for a in itertools.product(range(d + 1), repeat=n) if sum(a) <= d]
    out.sort(key=lambda a: (sum(a), a))
    return out


def invariant_basis(lam, d: int, mode: str = "weight"):
    """Basis of S_n-invariants of weight lam and degree <= d.

    mode "singular" additionally intersects with the kernel of the simple
    raising operators e_{a,a+1}.  Exact null space of the stacked operators.
    """
    lam = tuple(lam)
    N, n = len(lam), sum(lam)
    if mode not in ("weight", "singular"):
        raise ValueError(f"unknown mode: {mode!r}")
    colors = weight_basis(N, lam)
    monos = monomials_upto(n, d)
    keys = [(a, c) for a in monos for c in colors]
    index = {k: r for r, k in enumerate(keys)}
    ncols = len(keys)
    rows = [[Fraction(0)] * ncols for _ in range(max(n - 1, 0) * ncols)]
    for i in range(1, n):
        for col, key in enumerate(keys):
            unit = TruncatedVPoly(n, d, {key: Fraction(1)})
            image = sn_act(i, unit).sub(unit)
            for k2, val in image.coeffs.items():
                rows[(i - 1) * ncols + index[k2]][col] += val
    if mode == "singular":
        extra_index = {}
        extra_rows = []
        for a in range(1, N):
            for col, key in enumerate(keys):
                unit = TruncatedVPoly(n, d, {key: Fraction(1)})
                image = gl_vpoly(a, a + 1, unit)
                for k2, val in image.coeffs.items():
                    rkey = (a, k2)
                    if rkey not in extra_index:
                        extra_index[rkey] = len(extra_rows)
                        extra_rows.append([Fraction(0)] * ncols)
                    extra_rows[extra_index[rkey]][col] += val
        rows.extend(extra_rows)
    basis = nullspace_exact(rows, ncols=ncols)
    return [
        TruncatedVPoly(n, d, {keys[r]: v for r, v in enumerate(vec) if v != 0})
        for vec in basis
    ]


def singular_start_degree(lam) -> int:
    """Lowest filtration degree carrying a singular invariant: sum (i-1) lam_i."""
    return sum(i * x for i, x in enumerate(lam))


# ---- graded characters ----


@dataclass(frozen=True)
class GradedCharacter:
    """Series coefficients ch(t) = sum c_k t^k up to the cutoff."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))
        if any(c < 0 for c in self.coeffs):
            raise ValueError("character coefficients must be nonnegative")

    @property
    def cutoff(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, k: int) -> int:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0


def _mul_trunc(a, b, cutoff):
    out = [0] * (cutoff + 1)
    for i, x in enumerate(a):
        if x == 0 or i > cutoff:
            continue
        for j, y in enumerate(b):
            if i + j > cutoff:
                break
            out[i + j] += x * y
    return out


def _div_one_minus(a, j, cutoff):
    # divide by (1 - t^j): out[k] = a[k] + out[k-j]
    out = list(a) + [0] * (cutoff + 1 - len(a))
    for k in range(j, cutoff + 1):
        out[k] += out[k - j]
    return out


def graded_character(lam, mode: str, cutoff: int) -> GradedCharacter:
    """Closed-form graded character expanded to the cutoff.

    weight:   prod_i 1/(t)_{lam_i};
    singular: t^{sum (i-1) lam_i} prod_{i<j}(1 - t^{lam_i-lam_j+j-i})
              / prod_i (t)_{lam_i+N-i},    (t)_a = prod_{j<=a}(1 - t^j).
    """
    lam = tuple(lam)
    N = len(lam)
    if mode == "weight":
        ser = [1] + [0] * cutoff
        for li in lam:
            for j in range(1, li + 1):
                ser = _div_one_minus(ser, j, cutoff)
        return GradedCharacter(ser[: cutoff + 1])
    if mode != "singular":
        raise ValueError(f"unknown mode: {mode!r}")
    if any(lam[i] < lam[i + 1] for i in range(N - 1)):
        raise ValueError("singular mode needs a partition")
    shift = singular_start_degree(lam)
    num = [0] * (cutoff + 1)
    if shift <= cutoff:
        num[shift] = 1
    for i in range(N):
        for j in range(i + 1, N):
            e = lam[i] - lam[j] + j - i
            fac = [1] + [0] * cutoff
            if e <= cutoff:
                fac[e] = -1
            num = _mul_trunc(num, fac, cutoff)
    ser = num
    for i in range(N):
        for j in range(1, lam[i] + N - i - 1 + 1):
            ser = _div_one_minus(ser, j, cutoff)
    return GradedCharacter(ser[: cutoff + 1])


# ---- evaluation to the tensor product of evaluation modules ----


def evaluate_at_b(f: TruncatedVPoly, b):
    """Substitute z_s = b_s; returns a tensor vector {colors: value}."""
    if len(b) != f.n:
        raise ValueError("evaluation point must have one entry per variable")
    out = {}
    for (alpha, colors), val in f.coeffs.items():
        c = val
        for s, e in enumerate(alpha):
            if e:
                c = c * b[s] ** e
        out[colors] = out.get(colors, 0) + c
    return {k: v for k, v in out.items() if not (v == 0)}


def l_entry_action(i: int, j: int, u0, f: TruncatedVPoly) -> TruncatedVPoly:
    """Entry L_{i,j}(u0) of (u0-z_1+P^(0,1)) ... (u0-z_n+P^(0,n)) acting on f,
    the rightmost factor first; multiplication by z_a raises the degree, so
    the result lives at cutoff d + n.  Evaluating at z = b afterwards agrees
    with the evaluation-module action at b."""
    n = f.n
    cur = {}
    for (alpha, colors), val in f.coeffs.items():
        cur[(j, alpha, colors)] = val
    for a in range(n, 0, -1):
        nxt = {}

        def put(key, v):
            w = nxt.get(key, 0) + v
            if w == 0:
                nxt.pop(key, None)
            else:
                nxt[key] = w

        for (c0, alpha, colors), val in cur.items():
            put((c0, alpha, colors), val * u0)
            raised = alpha[: a - 1] + (alpha[a - 1] + 1,) + alpha[a:]
            put((c0, raised, colors), -val)
            ca = colors[a - 1]
            put((ca, alpha, colors[: a - 1] + (c0,) + colors[a:]), val)
        cur = nxt
    out = {}
    for (c0, alpha, colors), val in cur.items():
        if c0 == i:
            out[(alpha, colors)] = out.get((alpha, colors), 0) + val
    return TruncatedVPoly(n, f.d + n, out)
