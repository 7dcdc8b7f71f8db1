"""Yangian action on tensor products of evaluation modules: the operator
L(u) = (u - b_n + P^(0,n)) ... (u - b_1 + P^(0,1)) on C^N tensor V, its matrix
entries T_{i,j}(u) = L_{i,j}(u)/prod_a(u - b_a), quantum minors with unit
argument shifts, transfer matrices B_k^q(u), and the rebased coefficients
C_k(u) on singular subspaces.

Operators are assembled as matrices of polynomial numerators over a known
denominator by exact evaluation at integer sample points away from all poles
followed by Lagrange interpolation, then re-verified at an extra point.  In
exact arithmetic this constitutes a proof of the matrix identity; in float
mode the verification is tolerance-based.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .linalg import mat_add, mat_identity, mat_scale
from .ratfun import InvSeries, Poly, RatFun, lagrange_interpolate, tau_transition
from .scalars import EIG_TOL, is_exact
from .tensorspace import (
    full_basis,
    singular_basis,
    weight_basis,
    vec_max_abs,
)


@dataclass(frozen=True)
class EvaluationData:
    """Tensor product of n evaluation modules with points b = (b_1, ..., b_n)."""

    N: int
    b: tuple

    def __post_init__(self):
        object.__setattr__(self, "b", tuple(self.b))

    @property
    def n(self) -> int:
        return len(self.b)

    def is_exact(self) -> bool:
        return all(is_exact(x) for x in self.b)

    def ordering_generic(self) -> bool:
        """b_i != b_j + 1 for i > j (module identification hypothesis)."""
        return all(
            self.b[i] != self.b[j] + 1
            for i in range(self.n)
            for j in range(i)
        )

    def irreducible(self) -> bool:
        """b_i != b_j + 1 for all i != j."""
        return all(
            self.b[i] != self.b[j] + 1
            for i in range(self.n)
            for j in range(self.n)
            if i != j
        )


def generic_b(n: int):
    """Default evaluation points b_s = 2(s-1): real with gaps 2."""
    return tuple(Fraction(2 * s) for s in range(n))


def rho_poly(ev: EvaluationData, shift: int = 0) -> Poly:
    """prod_a (u - b_a - shift)."""
    return Poly.from_roots([ba + shift for ba in ev.b])


# ---- applying operators to vectors ----
#
# Vectors are dicts {color tuple: coefficient}.  The auxiliary space is not
# materialized: L_{i,j}(u0) v is computed by lifting v to e_j (x) v, applying
# the n linear factors right-to-left, and projecting on auxiliary color i.


def apply_L_entry(ev: EvaluationData, i: int, j: int, u0, vec):
    """L_{i,j}(u0) vec with L(u) = (u-b_1+P^(0,1)) ... (u-b_n+P^(0,n)); the
    rightmost factor acts first.  This ordering pairs site s with b_s the way
    the weight functions do, making Bethe vectors right eigenvectors; the
    Yangian relations and the single-site entry formula are unaffected by it.
    u0 may be a scalar or a Poly (symbolic assembly)."""
    cur = {(j, colors): val for colors, val in vec.items()}
    for a in range(ev.n, 0, -1):
        ba = ev.b[a - 1]
        fac = u0 - ba
        nxt = {}
        for (c0, colors), val in cur.items():
            key = (c0, colors)
            prev = nxt.get(key)
            term = val * fac
            nxt[key] = term if prev is None else prev + term
            ca = colors[a - 1]
            key2 = (ca, colors[: a - 1] + (c0,) + colors[a:])
            prev = nxt.get(key2)
            nxt[key2] = val if prev is None else prev + val
        cur = nxt
    out = {}
    for (c0, colors), val in cur.items():
        if c0 == i and not (val == 0):
            out[colors] = out.get(colors, 0) + val
    return {k: v for k, v in out.items() if not (v == 0)}


def apply_T_entry(ev: EvaluationData, i: int, j: int, u0, vec):
    """T_{i,j}(u0) vec for a scalar u0 away from the poles b_a."""
    rho = 1
    for ba in ev.b:
        rho = rho * (u0 - ba)
    inv = (Fraction(1) / rho) if is_exact(rho) else 1.0 / rho
    w = apply_L_entry(ev, i, j, u0, vec)
    return {k: v * inv for k, v in w.items()}


def apply_minor(ev: EvaluationData, rows, cols, u0, vec):
    """Quantum minor M_{rows,cols}(u0) vec: signed sum over permutations of
    T_{i_1,j_sigma(1)}(u0) T_{i_2,j_sigma(2)}(u0-1) ... applied right-to-left."""
    k = len(rows)
    if k != len(cols):
        raise ValueError("minor needs equally many row and column indices")
    acc = {}
    for perm in itertools.permutations(range(k)):
        sign = _perm_sign(perm)
        w = vec
        for m in range(k - 1, -1, -1):
            w = apply_T_entry(ev, rows[m], cols[perm[m]], u0 - m, w)
        for key, val in w.items():
            acc[key] = acc.get(key, 0) + (val if sign > 0 else -val)
    return {k2: v for k2, v in acc.items() if not (v == 0)}


def apply_transfer(ev: EvaluationData, k: int, q, u0, vec):
    """B_k^q(u0) vec = sum over k-subsets ib of q_{i_1}...q_{i_k} M_{ib,ib}(u0) vec."""
    acc = {}
    for comb in itertools.combinations(range(1, ev.N + 1), k):
        coef = 1
        for i in comb:
            coef = coef * q[i - 1]
        w = apply_minor(ev, comb, comb, u0, vec)
        for key, val in w.items():
            acc[key] = acc.get(key, 0) + coef * val
    return {k2: v for k2, v in acc.items() if not (v == 0)}


def apply_qdet(ev: EvaluationData, u0, vec):
    full = tuple(range(1, ev.N + 1))
    return apply_minor(ev, full, full, u0, vec)


def _perm_sign(perm) -> int:
    sign = 1
    for a in range(len(perm)):
        for b in range(a + 1, len(perm)):
            if perm[a] > perm[b]:
                sign = -sign
    return sign


# ---- operator-valued rational functions ----


class OperatorRatFun:
    """Matrix of polynomial numerators over a common denominator, with respect
    to a fixed ordered basis of an invariant subspace."""

    __slots__ = ("basis", "den", "num")

    def __init__(self, basis, den: Poly, num):
        self.basis = list(basis)
        self.den = den
        self.num = num

    @property
    def dim(self) -> int:
        return len(self.basis)

    def entry(self, r: int, c: int) -> RatFun:
        return RatFun(self.num[r][c], self.den)

    def eval_at(self, u0):
        d = self.den(u0)
        inv = (Fraction(1) / d) if is_exact(d) else 1.0 / d
        return [[p(u0) * inv for p in row] for row in self.num]

    def series(self, order: int):
        """Matrices of the u^{-s} coefficients, s = 0..order."""
        mats = [
            [[None] * self.dim for _ in range(self.dim)] for _ in range(order + 1)
        ]
        for r in range(self.dim):
            for c in range(self.dim):
                ser = RatFun(self.num[r][c], self.den).series_at_infinity(order)
                for s in range(order + 1):
                    mats[s][r][c] = ser.coeff(s)
        return mats

    def __add__(self, other):
        self._check(other)
        if self.den == other.den:
            return OperatorRatFun(
                self.basis,
                self.den,
                [
                    [a + b for a, b in zip(ra, rb)]
                    for ra, rb in zip(self.num, other.num)
                ],
            )
        return OperatorRatFun(
            self.basis,
            self.den * other.den,
            [
                [a * other.den + b * self.den for a, b in zip(ra, rb)]
                for ra, rb in zip(self.num, other.num)
            ],
        )

    def __neg__(self):
        return OperatorRatFun(
            self.basis, self.den, [[-p for p in row] for row in self.num]
        )

    def __sub__(self, other):
        return self + (-other)

    def matmul(self, other: "OperatorRatFun") -> "OperatorRatFun":
        self._check(other)
        m = self.dim
        num = [[Poly() for _ in range(m)] for _ in range(m)]
        for r in range(m):
            for k in range(m):
                p = self.num[r][k]
                if p.is_zero():
                    continue
                for c in range(m):
                    num[r][c] = num[r][c] + p * other.num[k][c]
        return OperatorRatFun(self.basis, self.den * other.den, num)

    def lmul_matrix(self, mat) -> "OperatorRatFun":
        """Constant matrix times operator."""
        m = self.dim
        num = [[Poly() for _ in range(m)] for _ in range(m)]
        for r in range(m):
            for k in range(m):
                a = mat[r][k]
                if a == 0:
                    continue
                for c in range(m):
                    num[r][c] = num[r][c] + self.num[k][c] * a
        return OperatorRatFun(self.basis, self.den, num)

    def rmul_matrix(self, mat) -> "OperatorRatFun":
        m = self.dim
        num = [[Poly() for _ in range(m)] for _ in range(m)]
        for r in range(m):
            for k in range(m):
                p = self.num[r][k]
                if p.is_zero():
                    continue
                for c in range(m):
                    num[r][c] = num[r][c] + p * mat[k][c]
        return OperatorRatFun(self.basis, self.den, num)

    def mul_scalar_fun(self, r) -> "OperatorRatFun":
        """Multiply by a scalar Poly or RatFun."""
        if isinstance(r, Poly):
            return OperatorRatFun(
                self.basis, self.den, [[p * r for p in row] for row in self.num]
            )
        return OperatorRatFun(
            self.basis,
            self.den * r.den,
            [[p * r.num for p in row] for row in self.num],
        )

    def is_zero(self, tol: float = EIG_TOL) -> bool:
        if all(p.is_exact() for row in self.num for p in row):
            return all(p.is_zero() for row in self.num for p in row)
        scale = 1.0 + max(
            (abs(complex(c)) for row in self.num for p in row for c in p.coeffs),
            default=0.0,
        )
        return all(
            abs(complex(c)) <= tol * scale
            for row in self.num
            for p in row
            for c in p.coeffs
        )

    def eq(self, other: "OperatorRatFun") -> bool:
        self._check(other)
        for r in range(self.dim):
            for c in range(self.dim):
                if not self.entry(r, c).eq(other.entry(r, c)):
                    return False
        return True

    def eq_scalar(self, fun: RatFun) -> bool:
        """Operator equals fun * identity."""
        for r in range(self.dim):
            for c in range(self.dim):
                target = fun if r == c else RatFun.const(0)
                if not self.entry(r, c).eq(target):
                    return False
        return True

    def to_json(self):
        from .scalars import scalar_to_json

        max_deg = max(
            (p.degree for row in self.num for p in row), default=-1
        )
        return {
            "basis": [list(k) for k in self.basis],
            "den": self.den.to_json(),
            "num_by_power": [
                [[scalar_to_json(p.coeff(d)) for p in row] for row in self.num]
                for d in range(max_deg + 1)
            ],
        }

    def _check(self, other):
        if self.basis != other.basis:
            raise ValueError("operators live on different bases")


# ---- assembly by evaluation + interpolation ----


def _pick_nodes(ev: EvaluationData, den: Poly, count: int):
    if ev.is_exact():
        maxre = max((float(Fraction(x)) for x in ev.b), default=0.0)
    else:
        maxre = max((complex(x).real for x in ev.b), default=0.0)
    u0 = int(maxre) + ev.N + 2
    nodes = []
    while len(nodes) < count:
        val = den(u0)
        good = (val != 0) if ev.is_exact() else abs(complex(val)) > 1e-6
        if good:
            nodes.append(u0)
        u0 += 1
    return nodes


def _space_vectors(ev: EvaluationData, lam, space):
    """Resolve a subspace request to (labels, dict-vectors, coordinate_flag)."""
    if lam is None:
        basis = full_basis(ev.N, ev.n)
        return basis, [{k: 1} for k in basis], True
    if space == "weight":
        basis = weight_basis(ev.N, lam)
        return basis, [{k: 1} for k in basis], True
    if space == "singular":
        vecs = singular_basis(ev.N, lam)
        return list(range(len(vecs))), vecs, False
    return list(range(len(space))), list(space), False


def assemble_operator(
    ev: EvaluationData,
    apply_num,
    den: Poly,
    deg_bound: int,
    labels,
    vectors,
    coordinate: bool,
    leak_tol: float = EIG_TOL,
) -> OperatorRatFun:
    """Interpolate the matrix of the operator whose action times den(u) is
    given pointwise by apply_num(u0, vec) (a polynomial matrix of degree
    <= deg_bound), restricted to span(vectors); leakage outside the span is an
    error (exact) or checked against leak_tol (float)."""
    exact = ev.is_exact()
    nodes = _pick_nodes(ev, den, deg_bound + 2)
    m = len(vectors)
    key_index = {k: r for r, k in enumerate(labels)} if coordinate else None
    value_mats = []
    for u0 in nodes:
        mat = [[0] * m for _ in range(m)]
        for c, vec in enumerate(vectors):
            w = apply_num(u0, vec)
            if coordinate:
                scale = 1.0 + vec_max_abs(w)
                for key, val in w.items():
                    r = key_index.get(key)
                    if r is None:
                        if exact or abs(complex(val)) > leak_tol * scale:
                            raise ArithmeticError(
                                "operator leaks outside the requested subspace"
                            )
                        continue
                    mat[r][c] = val
            else:
                from .tensorspace import project_onto

                coords, resid = project_onto(w, vectors, "exact" if exact else "float")
                if not exact and resid > leak_tol * (1.0 + vec_max_abs(w)):
                    raise ArithmeticError(
                        "operator leaks outside the requested subspace"
                    )
                for r, val in enumerate(coords):
                    mat[r][c] = val
        value_mats.append(mat)
    interp_nodes = nodes[: deg_bound + 1]
    check_node = nodes[deg_bound + 1]
    check_mat = value_mats[deg_bound + 1]
    num = [[None] * m for _ in range(m)]
    for r in range(m):
        for c in range(m):
            vals = [value_mats[t][r][c] for t in range(deg_bound + 1)]
            p = lagrange_interpolate(interp_nodes, vals)
            if p.degree > deg_bound:
                raise ArithmeticError("interpolated numerator exceeds degree bound")
            got = p(check_node)
            want = check_mat[r][c]
            if exact:
                if got != want:
                    raise ArithmeticError("interpolation verification failed")
            elif abs(complex(got) - complex(want)) > 1e-7 * (
                1.0 + abs(complex(got)) + abs(complex(want))
            ):
                raise ArithmeticError("interpolation verification failed")
            num[r][c] = p
    return OperatorRatFun(labels, den, num)


def t_entry(ev: EvaluationData, i: int, j: int) -> OperatorRatFun:
    """T_{i,j}(u) on the full tensor-product basis."""
    den = rho_poly(ev)

    def apply_num(u0, vec):
        return apply_L_entry(ev, i, j, u0, vec)

    labels, vectors, coord = _space_vectors(ev, None, None)
    return assemble_operator(ev, apply_num, den, ev.n, labels, vectors, coord)


def quantum_minor(ev: EvaluationData, rows, cols, lam=None, space="weight") -> OperatorRatFun:
    """M_{rows,cols}(u); full basis by default, or restricted to a subspace."""
    k = len(rows)
    den = Poly([1])
    for m in range(k):
        den = den * rho_poly(ev, shift=m)

    def apply_num(u0, vec):
        w = apply_minor(ev, rows, cols, u0, vec)
        d = den(u0)
        return {key: val * d for key, val in w.items()}

    labels, vectors, coord = _space_vectors(ev, lam, space)
    return assemble_operator(ev, apply_num, den, k * ev.n, labels, vectors, coord)


def qdet(ev: EvaluationData) -> OperatorRatFun:
    full = tuple(range(1, ev.N + 1))
    return quantum_minor(ev, full, full, lam=None)


def transfer_matrix(ev: EvaluationData, k: int, q, lam=None, space="weight") -> OperatorRatFun:
    """B_k^q(u) restricted to a weight subspace (or the full space if lam is
    None); leakage outside the subspace signals an assembly bug."""
    den = Poly([1])
    for m in range(k):
        den = den * rho_poly(ev, shift=m)

    def apply_num(u0, vec):
        w = apply_transfer(ev, k, q, u0, vec)
        d = den(u0)
        return {key: val * d for key, val in w.items()}

    labels, vectors, coord = _space_vectors(ev, lam, space)
    return assemble_operator(ev, apply_num, den, k * ev.n, labels, vectors, coord)


def scalar_bn(ev: EvaluationData, q) -> RatFun:
    """The scalar value of B_N^q(u): q_1...q_N prod_a (u - b_a + 1)/(u - b_a)."""
    coef = 1
    for x in q:
        coef = coef * x
    num = Poly.from_roots([ba - 1 for ba in ev.b]) * coef
    return RatFun(num, rho_poly(ev))


def transfer_series(ev: EvaluationData, q, lam, order: int, space="weight"):
    """Series tables [k][s] -> matrix of the u^{-s} coefficient of B_k^q(u)."""
    out = {}
    for k in range(1, ev.N + 1):
        op = transfer_matrix(ev, k, q, lam, space=space)
        out[k] = op.series(order)
    return out


def c_coefficients(ev: EvaluationData, lam, order: int):
    """Tables C[m][s] of matrices on the singular subspace of V_lam, obtained
    by the triangular binomial rebasing of the q = 1 transfer series."""
    vecs = singular_basis(ev.N, lam)
    if not vecs:
        return [], []
    ones = tuple(Fraction(1) for _ in range(ev.N))
    bser = transfer_series(ev, ones, lam, order, space="singular")
    m = len(vecs)
    zero = [[Fraction(0)] * m for _ in range(m)]
    ident = mat_identity(m, Fraction(1))
    bser[0] = [ident] + [zero] * order
    trans = tau_transition(ev.N)
    c_tables = []
    for row in trans:
        table = []
        for s in range(order + 1):
            acc = zero
            for k, w in enumerate(row):
                if w == 0 or k > ev.N:
                    continue
                acc = mat_add(acc, mat_scale(bser[k][s], w))
            table.append(acc)
        c_tables.append(table)
    return c_tables, vecs


def build_L(ev: EvaluationData):
    """N x N table of End(V)-valued polynomials: entry (i,j) is a matrix of
    Poly over the full basis, L_{i,j}(u), degree <= n."""
    basis = full_basis(ev.N, ev.n)
    index = {k: r for r, k in enumerate(basis)}
    u = Poly.x()
    out = []
    for i in range(1, ev.N + 1):
        row = []
        for j in range(1, ev.N + 1):
            mat = [[Poly() for _ in basis] for _ in basis]
            for c, colors in enumerate(basis):
                w = apply_L_entry(ev, i, j, u, {colors: 1})
                for key, val in w.items():
                    mat[index[key]][c] = val if isinstance(val, Poly) else Poly.const(val)
            row.append(mat)
        out.append(row)
    return out
