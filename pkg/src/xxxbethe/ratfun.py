"""Univariate polynomial algebra over exact rationals or complex floats:
polynomials, rational functions, truncated series in u^{-1}, quasi-exponentials
q^u p(u), and difference operators in the shift tau, (tau f)(u) = f(u-1).

Composition convention for operators: c(u) tau^a . d(u) tau^b = c(u) d(u-a)
tau^{a+b}; coefficients always stand to the left of the shifts.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

from .scalars import EPS_EQ, is_exact, sample_points, scalar_eq, scalar_to_json


class Poly:
    """Dense univariate polynomial, ascending coefficients.

    The zero polynomial has an empty coefficient list and degree -1.  Trailing
    coefficients are trimmed only when exactly zero, so float-mode degrees are
    formal; use trim(tol) before relying on the degree of float data.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = list(coeffs)
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = cs

    @classmethod
    def const(cls, c):
        return cls([c])

    @classmethod
    def x(cls):
        return cls([0, 1])

    @classmethod
    def from_roots(cls, roots):
        p = cls([1])
        for r in roots:
            p = p * cls([-r, 1])
        return p

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, k: int):
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return 0

    def lead(self):
        if not self.coeffs:
            raise ZeroDivisionError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def is_exact(self) -> bool:
        return all(is_exact(c) for c in self.coeffs)

    def map_coeffs(self, fn) -> "Poly":
        return Poly([fn(c) for c in self.coeffs])

    def __eq__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other)
        return self.coeffs == other.coeffs

    __hash__ = None

    def almost_eq(self, other, tol: float = EPS_EQ) -> bool:
        n = max(len(self.coeffs), len(other.coeffs))
        scale = 1.0 + max(
            (abs(complex(c)) for c in self.coeffs + other.coeffs), default=0.0
        )
        return all(
            abs(complex(self.coeff(k)) - complex(other.coeff(k))) <= tol * scale
            for k in range(n)
        )

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly([self.coeff(k) + other.coeff(k) for k in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return Poly([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other if isinstance(other, Poly) else Poly.const(-other))

    def __rsub__(self, other):
        return Poly.const(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return Poly([c * other for c in self.coeffs])
        if self.is_zero() or other.is_zero():
            return Poly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(out)

    def __rmul__(self, other):
        return self * other

    def __pow__(self, m: int):
        out = Poly([1])
        base = self
        while m:
            if m & 1:
                out = out * base
            base = base * base
            m >>= 1
        return out

    def __divmod__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return Poly(), self
        quot = [0] * (dq + 1)
        inv = other.lead()
        if isinstance(inv, int):
            inv = Fraction(inv)  # keep int/int exact
        for k in range(dq, -1, -1):
            c = rem[k + other.degree] / inv
            quot[k] = c
            if c != 0:
                for j, b in enumerate(other.coeffs):
                    rem[k + j] -= c * b
        return Poly(quot), Poly(rem)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __call__(self, u0):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * u0 + c
        return acc

    def compose_shift(self, a) -> "Poly":
        """p(u + a) by Horner in the shifted variable."""
        acc = Poly()
        lin = Poly([a, 1])
        for c in reversed(self.coeffs):
            acc = acc * lin + Poly.const(c)
        return acc

    def monic(self) -> "Poly":
        lead = self.lead()
        if isinstance(lead, int):
            lead = Fraction(lead)  # int / int would fall into float division
        return Poly([c / lead for c in self.coeffs])

    def trim(self, tol: float) -> "Poly":
        cs = list(self.coeffs)
        scale = 1.0 + max((abs(complex(c)) for c in cs), default=0.0)
        while cs and abs(complex(cs[-1])) <= tol * scale:
            cs.pop()
        return Poly(cs)

    def to_json(self):
        return [scalar_to_json(c) for c in self.coeffs]

    def __repr__(self):
        if self.is_zero():
            return "Poly(0)"
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            terms.append(f"({c})*u^{k}" if k else f"({c})")
        return "Poly(" + " + ".join(terms) + ")"


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd by the Euclidean algorithm; exact coefficients only."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic() if not a.is_zero() else a


def lagrange_interpolate(nodes, values) -> Poly:
    """Exact (or float) interpolating polynomial through (nodes[i], values[i])."""
    full = Poly.from_roots(nodes)
    acc = Poly()
    for xi, yi in zip(nodes, values):
        if yi == 0:
            continue
        basis = full // Poly([-xi, 1])
        acc = acc + basis * (yi / basis(xi))
    return acc


class RatFun:
    """Rational function num/den.

    Exact data is reduced by the monic gcd and the denominator normalized
    monic; float data is left unreduced (equality is sampling-based there).
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if not isinstance(num, Poly):
            num = Poly.const(num) if not isinstance(num, (list, tuple)) else Poly(num)
        if den is None:
            den = Poly([1])
        elif not isinstance(den, Poly):
            den = Poly.const(den) if not isinstance(den, (list, tuple)) else Poly(den)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_exact() and den.is_exact():
            g = poly_gcd(num, den)
            if g.degree > 0:
                num, den = num // g, den // g
            lead = den.lead()
            if lead != 1:
                num = num * (Fraction(1) / Fraction(lead))
                den = den.monic()
        self.num = num
        self.den = den

    @classmethod
    def const(cls, c):
        return cls(Poly.const(c))

    def is_exact(self) -> bool:
        return self.num.is_exact() and self.den.is_exact()

    def is_zero(self) -> bool:
        if self.num.is_zero():
            return True
        if self.is_exact():
            return False
        return all(c == 0 for c in self.num.coeffs)

    def __add__(self, other):
        other = _as_ratfun(other)
        return RatFun(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFun(-self.num, self.den)

    def __sub__(self, other):
        return self + (-_as_ratfun(other))

    def __rsub__(self, other):
        return _as_ratfun(other) - self

    def __mul__(self, other):
        other = _as_ratfun(other)
        return RatFun(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_ratfun(other)
        if other.num.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RatFun(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return _as_ratfun(other) / self

    def __call__(self, u0):
        return self.num(u0) / self.den(u0)

    def shift(self, a) -> "RatFun":
        """r(u + a)."""
        return RatFun(self.num.compose_shift(a), self.den.compose_shift(a))

    def eq(self, other, tol: float = EPS_EQ) -> bool:
        other = _as_ratfun(other)
        if self.is_exact() and other.is_exact():
            return self.num * other.den == other.num * self.den
        npts = self.num.degree + other.den.degree + 2
        npts = max(npts, other.num.degree + self.den.degree + 2, 2)
        pts = iter(sample_points(8 * npts + 16))
        checked = 0
        while checked < npts:
            u0 = next(pts)
            dl, dr = self.den(u0), other.den(u0)
            if abs(complex(dl)) < 1e-8 or abs(complex(dr)) < 1e-8:
                continue  # too close to a pole, use the next abscissa
            v1 = self.num(u0) / dl
            v2 = other.num(u0) / dr
            scale = 1.0 + abs(complex(v1)) + abs(complex(v2))
            if abs(complex(v1 - v2)) > tol * scale:
                return False
            checked += 1
        return True

    def series_at_infinity(self, order: int) -> "InvSeries":
        """Expansion c_0 + c_1 u^{-1} + ... + c_S u^{-S}; needs deg num <= deg den.

        Float data is expanded in u/R with R a root-radius bound of the
        denominator: the series division is then contractive and coefficient
        noise stays at roundoff instead of growing like radius^order."""
        dn, dd = self.num.degree, self.den.degree
        if dn > dd:
            raise ValueError("pole at infinity: deg num > deg den")
        R = 1 if self.is_exact() else self._scale_radius()
        # substitute x = R/u and divide power series
        a = [self.num.coeff(dd - k) * R ** k for k in range(order + 1)]
        b = [self.den.coeff(dd - k) * R ** k for k in range(order + 1)]
        if b[0] == 0:
            raise ZeroDivisionError("denominator leading coefficient vanished")
        lead = Fraction(b[0]) if isinstance(b[0], int) else b[0]
        scaled = []
        for s in range(order + 1):
            acc = a[s]
            for j in range(s):
                acc = acc - scaled[j] * b[s - j]
            scaled.append(acc / lead)
        if R == 1:
            return InvSeries(scaled, order)
        out = [c * R ** (-s) for s, c in enumerate(scaled)]
        return InvSeries(out, order)

    def _scale_radius(self) -> float:
        """Fujiwara bound on the magnitude of the denominator roots."""
        d = self.den.degree
        if d <= 0:
            return 1.0
        lead = abs(complex(self.den.lead()))
        if lead == 0.0:
            return 1.0
        r = 1.0
        for j in range(d):
            cj = abs(complex(self.den.coeff(j)))
            if cj > 0.0:
                r = max(r, 2.0 * (cj / lead) ** (1.0 / (d - j)))
        return r

    def to_json(self):
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    def __repr__(self):
        return f"RatFun({self.num!r} / {self.den!r})"


def _as_ratfun(x) -> RatFun:
    if isinstance(x, RatFun):
        return x
    if isinstance(x, Poly):
        return RatFun(x)
    return RatFun(Poly.const(x))


class InvSeries:
    """Truncated series c_0 + c_1 u^{-1} + ... + c_order u^{-order}.

    Arithmetic truncates to the smaller order of the operands; nothing ever
    extends a truncation silently.
    """

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs, order=None):
        cs = list(coeffs)
        if order is None:
            order = len(cs) - 1
        if len(cs) < order + 1:
            cs = cs + [0] * (order + 1 - len(cs))
        self.coeffs = cs[: order + 1]
        self.order = order

    @classmethod
    def const(cls, c, order):
        return cls([c] + [0] * order, order)

    def coeff(self, s: int):
        if s > self.order:
            raise IndexError(f"series truncated at order {self.order}, asked for {s}")
        return self.coeffs[s]

    def __add__(self, other):
        if not isinstance(other, InvSeries):
            other = InvSeries.const(other, self.order)
        order = min(self.order, other.order)
        return InvSeries(
            [self.coeffs[s] + other.coeffs[s] for s in range(order + 1)], order
        )

    __radd__ = __add__

    def __neg__(self):
        return InvSeries([-c for c in self.coeffs], self.order)

    def __sub__(self, other):
        if not isinstance(other, InvSeries):
            other = InvSeries.const(other, self.order)
        return self + (-other)

    def __rsub__(self, other):
        return InvSeries.const(other, self.order) - self

    def __mul__(self, other):
        if not isinstance(other, InvSeries):
            return InvSeries([c * other for c in self.coeffs], self.order)
        order = min(self.order, other.order)
        out = [0] * (order + 1)
        for i in range(order + 1):
            a = self.coeffs[i]
            if a == 0:
                continue
            for j in range(order + 1 - i):
                out[i + j] += a * other.coeffs[j]
        return InvSeries(out, order)

    __rmul__ = __mul__

    def eq(self, other, tol: float = EPS_EQ) -> bool:
        order = min(self.order, other.order)
        return all(
            scalar_eq(self.coeffs[s], other.coeffs[s], tol) for s in range(order + 1)
        )

    def is_exact(self) -> bool:
        return all(is_exact(c) for c in self.coeffs)

    def __repr__(self):
        return f"InvSeries({self.coeffs}, order={self.order})"


class QuasiExp:
    """base^u * poly(u); base nonzero."""

    __slots__ = ("base", "poly")

    def __init__(self, base, poly):
        if base == 0:
            raise ValueError("quasi-exponential base must be nonzero")
        if not isinstance(poly, Poly):
            poly = Poly(poly) if isinstance(poly, (list, tuple)) else Poly.const(poly)
        # int bases would turn exact under ** into floats; keep them Fraction
        self.base = Fraction(base) if isinstance(base, int) else base
        self.poly = poly

    def shifted_poly(self, s: int) -> Poly:
        """Polynomial part of f(u+s) after stripping base^u: base^s * p(u+s)."""
        return self.poly.compose_shift(s) * (self.base ** s)

    def __repr__(self):
        return f"QuasiExp({self.base})^u * {self.poly!r}"


class DiffOp:
    """Finite sum sum_k c_k(u) tau^k with RatFun coefficients, k may be negative."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        cs = {}
        for k, c in (coeffs or {}).items():
            c = _as_ratfun(c)
            if not c.num.is_zero():
                cs[int(k)] = c
        self.coeffs = cs

    @classmethod
    def identity(cls):
        return cls({0: RatFun.const(1)})

    @classmethod
    def tau(cls, k: int = 1):
        return cls({k: RatFun.const(1)})

    def coeff(self, k: int) -> RatFun:
        return self.coeffs.get(k, RatFun.const(0))

    def powers(self):
        return sorted(self.coeffs)

    def __add__(self, other):
        other = _as_diffop(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out[k] + c if k in out else c
        return DiffOp(out)

    __radd__ = __add__

    def __neg__(self):
        return DiffOp({k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-_as_diffop(other))

    def __rsub__(self, other):
        return _as_diffop(other) - self

    def __mul__(self, other):
        if not isinstance(other, (DiffOp, RatFun, Poly)) and not _is_scalar(other):
            return NotImplemented
        other = _as_diffop(other)
        out = {}
        for a, c in self.coeffs.items():
            for b, d in other.coeffs.items():
                term = c * d.shift(-a)  # c(u) d(u-a) tau^{a+b}
                k = a + b
                out[k] = out[k] + term if k in out else term
        return DiffOp(out)

    def __rmul__(self, other):
        return _as_diffop(other) * self

    def apply_quasiexp(self, f: QuasiExp):
        """D(base^u p(u)) = base^u * r(u); returns (base, r: RatFun)."""
        acc = RatFun.const(0)
        for k, c in self.coeffs.items():
            acc = acc + c * RatFun(f.poly.compose_shift(-k)) * (f.base ** (-k))
        return f.base, acc

    def eq(self, other, tol: float = EPS_EQ) -> bool:
        other = _as_diffop(other)
        for k in set(self.coeffs) | set(other.coeffs):
            if not self.coeff(k).eq(other.coeff(k), tol):
                return False
        return True

    def is_exact(self) -> bool:
        return all(c.is_exact() for c in self.coeffs.values())

    def __repr__(self):
        return "DiffOp(" + ", ".join(
            f"tau^{k}: {self.coeffs[k]!r}" for k in self.powers()
        ) + ")"


def _is_scalar(x) -> bool:
    return isinstance(x, (int, float, complex, Fraction))


def _as_diffop(x) -> DiffOp:
    if isinstance(x, DiffOp):
        return x
    return DiffOp({0: _as_ratfun(x)})


def elementary_symmetric(vals):
    """(e_1, ..., e_n) with prod(u - v_s) = u^n + sum_j (-1)^j e_j u^{n-j}."""
    vals = list(vals)
    e = [1] + [0] * len(vals)
    for m, x in enumerate(vals, start=1):
        for j in range(m, 0, -1):
            e[j] = e[j] + x * e[j - 1]
    return e[1:]


def poly_det(rows) -> Poly:
    """Determinant of a small square matrix of Poly by permutation expansion."""
    m = len(rows)
    acc = Poly()
    for perm in itertools.permutations(range(m)):
        sign = _perm_sign(perm)
        term = Poly([1])
        for i in range(m):
            term = term * rows[i][perm[i]]
        acc = acc + (term if sign > 0 else -term)
    return acc


def _perm_sign(perm) -> int:
    sign = 1
    seen = [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def discrete_wronskian(fs, shift: int = 0):
    """det(f_i(u + shift - j + 1))_{i,j=1..N} for quasi-exponentials f_i.

    Returns (base_product, shift, poly) with the determinant equal to
    base_product^(u + shift) * poly(u); for all bases 1 the prefactor is 1
    and poly is the plain determinant.
    """
    n = len(fs)
    base_product = 1
    for f in fs:
        base_product = base_product * f.base
    rows = [
        [f.poly.compose_shift(shift - j) * (f.base ** (-j)) for j in range(n)]
        for f in fs
    ]
    return base_product, shift, poly_det(rows)


def rdet(entries) -> DiffOp:
    """Row determinant: sum over permutations of signed products taken in row
    order, a_{1,sigma(1)} ... a_{m,sigma(m)}.  Entries may be DiffOp, RatFun,
    Poly or scalars; only the last row usually carries shift operators."""
    m = len(entries)
    mat = [[_as_diffop(e) for e in row] for row in entries]
    acc = DiffOp()
    for perm in itertools.permutations(range(m)):
        sign = _perm_sign(perm)
        term = mat[0][perm[0]]
        for i in range(1, m):
            term = term * mat[i][perm[i]]
        acc = acc + (term if sign > 0 else -term)
    return acc


def binom(a: int, b: int) -> int:
    if b < 0 or b > a:
        return 0
    return math.comb(a, b)


def tau_transition(n: int):
    """Matrix T with C_m = sum_k T[m][k] B_k rebasing 1 + sum (-1)^k B_k tau^k
    onto the basis (-1)^m C_m (tau^{-1} - 1)^{n-m} after multiplying by tau^{-n}."""
    return [
        [(-1) ** ((m - k) % 2) * binom(n - k, n - m) for k in range(n + 1)]
        for m in range(n + 1)
    ]


def tau_transition_inverse(n: int):
    """Matrix S with B_k = sum_m S[k][m] C_m (binomial, unsigned)."""
    return [[binom(n - m, n - k) for m in range(n + 1)] for k in range(n + 1)]


def tau_basis_change(b_list):
    """Input (B_0=1, B_1, ..., B_N) of items supporting + and *int; output
    (C_0, ..., C_N) solving the triangular binomial system."""
    n = len(b_list) - 1
    t = tau_transition(n)
    return [_int_combo(t[m], b_list) for m in range(n + 1)]


def tau_basis_change_inverse(c_list):
    n = len(c_list) - 1
    s = tau_transition_inverse(n)
    return [_int_combo(s[k], c_list) for k in range(n + 1)]


def _int_combo(weights, items):
    acc = None
    for w, x in zip(weights, items):
        if w == 0:
            continue
        term = x * w
        acc = term if acc is None else acc + term
    if acc is None:
        acc = items[0] * 0
    return acc
