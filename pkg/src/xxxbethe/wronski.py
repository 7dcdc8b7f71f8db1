"""Spaces of quasi-exponentials and of polynomials, their difference
operators, coefficient tables, and the discrete Wronski map.

A point of the quasi-exponential space is spanned by functions
q_i^u (u^{lam_i} + p_{i,1} u^{lam_i-1} + ... + p_{i,lam_i}) with distinct
nonzero twists q_i; the polynomial space (uniform twist 1) is spanned by
f_i = u^{d_i} + sum of f_{i,j} u^{d_i-j} over shifts j with d_i - j outside
the exponent set P = {d_1 > ... > d_N}, d_i = lam_i + N - i.  Both kinds of
point determine a difference operator with kernel exactly the span, whose
tau-coefficient series recover the coordinates, and a Wronskian whose monic
polynomial part carries the image under the Wronski map.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .scalars import EIG_TOL, EPS_EQ, all_exact, is_exact, scalar_eq, scalar_from_json, scalar_to_json
from .ratfun import (
    DiffOp,
    Poly,
    QuasiExp,
    RatFun,
    binom,
    discrete_wronskian,
    elementary_symmetric,
    poly_det,
    tau_transition,
    tau_transition_inverse,
)
from .linalg import solve_exact
from .bethe import BetheProblem, BetheRoots, _chi_ratfun, fundamental_operator, kernel_quasiexp


# ---- space points ----


@dataclass(frozen=True)
class QuasiExpSpacePoint:
    """Distinct-twist space: q, weight lam, coordinates p[i] = (p_{i,1}, ...)."""

    q: tuple
    lam: tuple
    p: tuple

    def __post_init__(self):
        object.__setattr__(self, "q", tuple(self.q))
        object.__setattr__(self, "lam", tuple(int(x) for x in self.lam))
        object.__setattr__(self, "p", tuple(tuple(row) for row in self.p))
        if len(self.q) != len(self.lam) or len(self.p) != len(self.lam):
            raise ValueError("q, lam, p must have a common length N")
        if any(x == 0 for x in self.q):
            raise ValueError("twists must be nonzero")
        if len(set(self.q)) != len(self.q):
            raise ValueError("twists must be distinct")
        if any(x < 0 for x in self.lam):
            raise ValueError("weight entries must be nonnegative")
        for li, row in zip(self.lam, self.p):
            if len(row) != li:
                raise ValueError("coordinate row length must equal the weight entry")

    @property
    def N(self) -> int:
        return len(self.lam)

    @property
    def n(self) -> int:
        return sum(self.lam)

    def is_exact(self) -> bool:
        return all_exact(self.q) and all(all_exact(row) for row in self.p)

    def functions(self):
        out = []
        for qi, li, row in zip(self.q, self.lam, self.p):
            coeffs = [0] * (li + 1)
            coeffs[li] = Fraction(1) if all_exact(row) and is_exact(qi) else 1.0
            for j, v in enumerate(row, start=1):
                coeffs[li - j] = v
            out.append(QuasiExp(qi, Poly(coeffs)))
        return out


def exponent_set(lam) -> set:
    """P = {d_1, ..., d_N} with d_i = lam_i + N - i (1-based i)."""
    N = len(lam)
    return {lam[i] + N - 1 - i for i in range(N)}


def allowed_shifts(lam, i: int):
    """Shifts j >= 1 with d_i - j >= 0 and d_i - j outside P; i is 1-based."""
    N = len(lam)
    d = lam[i - 1] + N - i
    P = exponent_set(lam)
    return [j for j in range(1, d + 1) if d - j not in P]


@dataclass(frozen=True)
class PolySpacePoint:
    """Uniform-twist space: partition lam, coordinates f[i] aligned with
    allowed_shifts(lam, i+1) in increasing shift order."""

    lam: tuple
    f: tuple

    def __post_init__(self):
        object.__setattr__(self, "lam", tuple(int(x) for x in self.lam))
        object.__setattr__(self, "f", tuple(tuple(row) for row in self.f))
        if any(self.lam[i] < self.lam[i + 1] for i in range(len(self.lam) - 1)):
            raise ValueError("lam must be a partition (nonincreasing)")
        if any(x < 0 for x in self.lam):
            raise ValueError("partition entries must be nonnegative")
        if len(self.f) != len(self.lam):
            raise ValueError("coordinate rows must match the partition length")
        for i, row in enumerate(self.f, start=1):
            if len(row) != len(allowed_shifts(self.lam, i)):
                raise ValueError(f"coordinate row {i} does not match the exponent set")

    @property
    def N(self) -> int:
        return len(self.lam)

    @property
    def n(self) -> int:
        return sum(self.lam)

    @property
    def degrees(self) -> tuple:
        N = len(self.lam)
        return tuple(self.lam[i] + N - 1 - i for i in range(N))

    def is_exact(self) -> bool:
        return all(all_exact(row) for row in self.f)

    def functions(self):
        out = []
        exact = self.is_exact()
        for i, row in enumerate(self.f, start=1):
            d = self.lam[i - 1] + self.N - i
            coeffs = [0] * (d + 1)
            coeffs[d] = Fraction(1) if exact else 1.0
            for j, v in zip(allowed_shifts(self.lam, i), row):
                coeffs[d - j] = v
            out.append(QuasiExp(Fraction(1) if exact else 1.0, Poly(coeffs)))
        return out


@dataclass(frozen=True)
class WronskiImage:
    """Coordinates (a_1, ..., a_n) of the monic polynomial part written as
    u^n + sum_s (-1)^s a_s u^{n-s}."""

    a: tuple

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(self.a))

    def to_json(self):
        return [scalar_to_json(x) for x in self.a]


# ---- Wronskian and the map ----


def wronskian_polypart(X) -> Poly:
    """Monic polynomial part of Wr(f_1(u-1), ..., f_N(u-1)); degree n."""
    _, _, w = discrete_wronskian(X.functions(), shift=-1)
    if not w.is_exact():
        w = w.trim(1e-9)
    if w.is_zero():
        raise ArithmeticError("degenerate point: Wronskian vanishes identically")
    if w.degree != X.n:
        raise ArithmeticError(
            f"Wronskian polynomial part has degree {w.degree}, expected {X.n}"
        )
    return w.monic()


def wronski_map(X) -> WronskiImage:
    """Image (a_1, ..., a_n) of a space point; the prefactor is stripped by
    dividing by the actual leading coefficient, so the comparison with the
    printed normalization is projective."""
    m = wronskian_polypart(X)
    n = X.n
    return WronskiImage(tuple((-1) ** s * m.coeff(n - s) for s in range(1, n + 1)))


# ---- the difference operator of a point ----


def _annihilation_residual(op: DiffOp, f: QuasiExp) -> float:
    """Worst relative residual of (base^{-u} D base^u p)(u) at abscissas
    beyond every coefficient pole, measured against the term scale.

    Float minors carry relative noise that the unreduced rational residual
    inflates arbitrarily; pointwise terms keep the honest scale."""
    cvals = {m: op.coeff(m) for m in op.powers() if not op.coeff(m).is_zero()}
    bound = 1.0
    for c in cvals.values():
        den = c.den
        if den.degree > 0:
            lead = abs(complex(den.lead()))
            if lead > 0:
                bound = max(
                    bound,
                    1.0 + max(abs(complex(x)) for x in den.coeffs[:-1]) / lead,
                )
    base = complex(f.base)
    worst = 0.0
    for u in (bound + 1.5, bound + 2.5, bound + 3.5):
        terms = [
            complex(c.num(u)) / complex(c.den(u)) * base ** (-m) * complex(f.poly(u - m))
            for m, c in cvals.items()
        ]
        scale = max(sum(abs(x) for x in terms), 1e-300)
        worst = max(worst, abs(sum(terms)) / scale)
    return worst


def space_diffop(X, tol: float = EIG_TOL) -> DiffOp:
    """Difference operator with tau^0 coefficient 1 annihilating the span.

    Built from the row determinant of the (N+1)-square array whose i-th row
    is f_i(u), f_i(u-1), ..., f_i(u-N) and whose last row is 1, tau, ...,
    tau^N, divided by Wr(f(u-1)).  The twists q_i^u are stripped row by row,
    so only polynomial minors are expanded; the raw tau^0 coefficient is
    (-1)^N and the whole operator is rescaled by that sign.
    """
    fs = X.functions()
    N = X.N
    Q = 1
    for f in fs:
        Q = Q * f.base
    _, _, w = discrete_wronskian(fs, shift=-1)
    if w.is_zero():
        raise ArithmeticError("degenerate point: Wronskian vanishes identically")
    grid = [
        [f.poly.compose_shift(-j) * (f.base ** (-j)) for j in range(N + 1)]
        for f in fs
    ]
    sign0 = (-1) ** N
    coeffs = {}
    for k in range(N + 1):
        cols = [j for j in range(N + 1) if j != k]
        minor = poly_det([[grid[i][j] for j in cols] for i in range(N)])
        if minor.is_zero():
            continue
        coeffs[k] = RatFun(minor * (sign0 * (-1) ** (N + k) * Q), w)
    op = DiffOp(coeffs)
    if not op.coeff(0).eq(RatFun.const(1)):
        raise ArithmeticError("operator normalization failed")
    for f in fs:
        if op.is_exact() and f.poly.is_exact() and is_exact(f.base):
            _, resid = op.apply_quasiexp(f)
            if not resid.eq(RatFun.const(0)):
                raise ArithmeticError("operator fails to annihilate a basis function")
        elif _annihilation_residual(op, f) > tol:
            raise ArithmeticError("operator fails to annihilate a basis function")
    return op


def _series_table(rats, smax):
    """table[k][s]: coefficient of u^{-s} in rats[k], s = 0..smax."""
    out = []
    for r in rats:
        ser = r.series_at_infinity(smax)
        out.append([ser.coeff(s) for s in range(smax + 1)])
    return out


def extract_coeffs(X, smax: int, tol: float = EIG_TOL):
    """Coefficient table table[k][s], k = 0..N, s = 0..smax.

    Distinct twists: F_k(u) = sigma_k(q) + sum_s F_{k,s} u^{-s} where the
    operator is 1 + sum_k (-1)^k F_k tau^k.  Uniform twist: the G_k(u) of
    the rebased expansion sum_k (-1)^k G_k (tau^{-1}-1)^{N-k} after
    multiplying by tau^{-N}; G_0 = 1 and G_{k,s} = 0 for s < k.
    """
    if smax < X.n + X.N:
        raise ValueError("series order must be at least n + N")
    op = space_diffop(X, tol)
    N = X.N
    fk = [RatFun.const(1)]
    for k in range(1, N + 1):
        fk.append(op.coeff(k) * ((-1) ** k))
    if isinstance(X, PolySpacePoint):
        trans = tau_transition(N)
        gk = []
        for m in range(N + 1):
            acc = RatFun.const(0)
            for k in range(N + 1):
                if trans[m][k]:
                    acc = acc + fk[k] * trans[m][k]
            gk.append(acc)
        return _series_table(gk, smax)
    return _series_table(fk, smax)


# ---- coordinate recovery from a coefficient table ----


def _response_rows(ak_rows, base_inv, e: int, smax: int):
    """Series of u^{-e} base^{-u} D(base^u u^e) from the tau-coefficient
    series ak_rows[k][s]; uses (u-k)^e u^{-e} = sum_r C(e,r)(-k)^r u^{-r}."""
    out = [0] * (smax + 1)
    for k, row in enumerate(ak_rows):
        bk = base_inv ** k
        for l, a in enumerate(row):
            if l > smax or a == 0:
                continue
            c = a * bk
            for r in range(0, min(e, smax - l) + 1):
                out[l + r] = out[l + r] + c * binom(e, r) * ((-k) ** r)
    return out


def _solve_rows(A, rhs, exact: bool, label: str):
    if exact:
        sol, nfree, consistent = solve_exact(
            [[Fraction(x) for x in row] for row in A], [Fraction(x) for x in rhs]
        )
        if not consistent:
            raise ArithmeticError(f"inconsistent recovery system for {label}")
        if nfree > 0:
            raise ArithmeticError(f"rank-deficient recovery system for {label}")
        return sol
    Am = np.asarray([[complex(x) for x in row] for row in A], dtype=complex)
    rv = np.asarray([complex(x) for x in rhs], dtype=complex)
    sol, _, rank, _ = np.linalg.lstsq(Am, rv, rcond=None)
    if rank < Am.shape[1]:
        raise ArithmeticError(f"rank-deficient recovery system for {label}")
    return list(sol)


def recover_coordinates(table, q, lam):
    """Space point from a coefficient table (inverse of extract_coeffs).

    Distinct q: the table is an F-table and the result a QuasiExpSpacePoint;
    q all equal to 1: the table is a G-table and the result a PolySpacePoint.
    The kernel condition D f_i = 0, truncated at the table order, is linear
    in the missing coefficients of f_i and determines them uniquely; the
    leading column of each response vanishes since prod_k (1 - q_k/q_i) = 0.
    """
    q = tuple(q)
    lam = tuple(int(x) for x in lam)
    N = len(lam)
    if len(q) != N:
        raise ValueError("q and lam must have a common length")
    if len(table) != N + 1:
        raise ValueError("table must have rows k = 0..N")
    smax = len(table[0]) - 1
    distinct = len(set(q)) == N
    uniform = all(x == 1 for x in q)
    if not distinct and not uniform:
        raise ValueError("twists must be distinct or all equal to 1")
    exact = all_exact(q) and all(all_exact(row) for row in table)

    if uniform and not distinct:
        # rebase G -> F, then work with the plain tau expansion
        trans = tau_transition_inverse(N)
        ftab = [
            [sum(trans[k][m] * table[m][s] for m in range(N + 1)) for s in range(smax + 1)]
            for k in range(N + 1)
        ]
    else:
        ftab = [list(row) for row in table]
    ak_rows = [[((-1) ** k) * v for v in ftab[k]] for k in range(N + 1)]

    rows_out = []
    for i in range(1, N + 1):
        if distinct:
            d = lam[i - 1]
            shifts = list(range(1, d + 1))
            base_inv = (Fraction(1) if exact else 1.0) / q[i - 1]
        else:
            d = lam[i - 1] + N - i
            shifts = allowed_shifts(lam, i)
            base_inv = Fraction(1) if exact else 1.0
        if not shifts:
            rows_out.append(())
            continue
        resp = {e: _response_rows(ak_rows, base_inv, e, smax) for e in {d} | {d - j for j in shifts}}
        # residual coefficient at u^{d-s} for s = 1..smax; unknown with
        # exponent e = d - j contributes its response shifted down by j
        A = []
        rhs = []
        for s in range(1, smax + 1):
            row = []
            for j in shifts:
                row.append(resp[d - j][s - j] if s >= j else 0)
            A.append(row)
            rhs.append(-resp[d][s])
        sol = _solve_rows(A, rhs, exact, f"row i={i}")
        rows_out.append(tuple(sol))

    if distinct:
        return QuasiExpSpacePoint(q=q, lam=lam, p=tuple(rows_out))
    return PolySpacePoint(lam=lam, f=tuple(rows_out))


def chi_polynomial(lam, N: int | None = None) -> Poly:
    """prod_{s=1}^N (x - lam_s - N + s); the roots are the exponent set."""
    lam = tuple(int(x) for x in lam)
    if N is None:
        N = len(lam)
    lam = lam + (0,) * (N - len(lam))
    if any(lam[i] < lam[i + 1] for i in range(N - 1)):
        raise ValueError("lam must be a partition")
    return Poly.from_roots([lam[s - 1] + N - s for s in range(1, N + 1)])


# ---- fibers of the Wronski map over Bethe data ----


def fiber_from_bethe(t: BetheRoots, prob: BetheProblem, tol: float = EIG_TOL):
    """Space point whose Wronski image is the elementary symmetric tuple of b.

    The point is read off the kernel of the fundamental difference operator
    of the root collection; the postcondition on the image is checked here
    and a breach raises (kernel defects propagate as-is).
    """
    D = fundamental_operator(t, prob.b, prob.q)
    kern = kernel_quasiexp(D, prob.q, prob.lam, tol=tol)
    if prob.q_distinct():
        p = []
        for li, f in zip(prob.lam, kern):
            p.append(tuple(f.poly.coeff(li - j) for j in range(1, li + 1)))
        X = QuasiExpSpacePoint(q=prob.q, lam=prob.lam, p=tuple(p))
    elif all(x == 1 for x in prob.q):
        rows = []
        for i, f in enumerate(kern, start=1):
            d = prob.lam[i - 1] + prob.N - i
            rows.append(tuple(f.poly.coeff(d - j) for j in allowed_shifts(prob.lam, i)))
        X = PolySpacePoint(lam=prob.lam, f=tuple(rows))
    else:
        raise ValueError("twists must be distinct or all equal to 1")
    img = wronski_map(X)
    target = elementary_symmetric(prob.b)
    for got, want in zip(img.a, target):
        if not scalar_eq(got, want, tol):
            raise ArithmeticError(
                f"fiber point misses the Wronski image: {got} vs {want}"
            )
    return X


def eigenvalue_table(t: BetheRoots, prob: BetheProblem, smax: int):
    """Spectral-side table of the same shape as extract_coeffs.

    Row k is the series of the transfer eigenvalue c_k(u) = sum over
    a_1 < ... < a_k of chi_{a_1}(u) ... chi_{a_k}(u-k+1); with uniform twist
    the rows are rebased exactly like the operator tables.
    """
    N = prob.N
    chis = [_chi_ratfun(a, t, prob.b, prob.q) for a in range(1, N + 1)]
    cks = [RatFun.const(1)]
    for k in range(1, N + 1):
        acc = RatFun.const(0)
        for comb in itertools.combinations(range(N), k):
            term = RatFun.const(1)
            for m, a in enumerate(comb):
                term = term * chis[a].shift(-m)
            acc = acc + term
        cks.append(acc)
    if not prob.q_distinct():
        trans = tau_transition(N)
        cks = [
            sum((cks[k] * trans[m][k] for k in range(N + 1) if trans[m][k]), RatFun.const(0))
            for m in range(N + 1)
        ]
    return _series_table(cks, smax)


def table_mismatch(table_a, table_b) -> float:
    """Largest entrywise deviation between two coefficient tables, relative
    for entries above 1: the entries grow like scale^s with the series
    order, so an absolute yardstick would conflate magnitude with error."""
    worst = 0.0
    for ra, rb in zip(table_a, table_b):
        for x, y in zip(ra, rb):
            d = abs(complex(x) - complex(y))
            worst = max(worst, d / max(1.0, abs(complex(x)), abs(complex(y))))
    return worst


# ---- serialization ----


def space_point_to_json(X):
    if isinstance(X, QuasiExpSpacePoint):
        return {
            "mode": "quasiexp",
            "q": [scalar_to_json(x) for x in X.q],
            "lambda": list(X.lam),
            "coordinates": [[scalar_to_json(v) for v in row] for row in X.p],
        }
    if isinstance(X, PolySpacePoint):
        return {
            "mode": "polynomial",
            "q": [scalar_to_json(1)] * X.N,
            "lambda": list(X.lam),
            "coordinates": [[scalar_to_json(v) for v in row] for row in X.f],
        }
    raise TypeError(f"not a space point: {X!r}")


def space_point_from_json(obj):
    mode = obj.get("mode")
    lam = tuple(int(x) for x in obj["lambda"])
    coords = tuple(tuple(scalar_from_json(v) for v in row) for row in obj["coordinates"])
    if mode == "quasiexp":
        q = tuple(scalar_from_json(x) for x in obj["q"])
        return QuasiExpSpacePoint(q=q, lam=lam, p=coords)
    if mode == "polynomial":
        return PolySpacePoint(lam=lam, f=coords)
    raise ValueError(f"unknown space point mode: {mode!r}")
