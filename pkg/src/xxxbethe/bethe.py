"""Bethe ansatz equations for gl_N weight subspaces, homotopy solvers,
weight functions, Bethe vectors, eigenvalue functions c_k and fundamental
difference operators with kernel recovery.

Conventions: t^(0) = b and t^(N) = (); a solution is off-diagonal when roots
within a block and across adjacent blocks are pairwise distinct.  Residuals
use the denominator-cleared polynomial form of the equations, so they are
defined (and exact for exact inputs) even near diagonals.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .linalg import solve_exact
from .ratfun import DiffOp, Poly, QuasiExp, RatFun
from .scalars import (
    DEDUP_TOL,
    NEWTON_TOL,
    OFFDIAG_TOL,
    all_exact,
    is_exact,
)
from .tensorspace import dim_singular, dim_weight, weight_basis


@dataclass(frozen=True)
class BetheProblem:
    N: int
    lam: tuple
    q: tuple
    b: tuple

    def __post_init__(self):
        object.__setattr__(self, "lam", tuple(self.lam))
        object.__setattr__(self, "q", tuple(self.q))
        object.__setattr__(self, "b", tuple(self.b))
        if len(self.lam) != self.N or len(self.q) != self.N:
            raise ValueError("lam and q must have length N")
        if sum(self.lam) != len(self.b):
            raise ValueError("|lam| must equal the number of evaluation points")
        if any(x == 0 for x in self.q):
            raise ValueError("twist parameters must be nonzero")

    @property
    def n(self) -> int:
        return len(self.b)

    @property
    def l(self) -> tuple:
        return tuple(sum(self.lam[a:]) for a in range(1, self.N))

    @property
    def total_roots(self) -> int:
        return sum(self.l)

    def q_distinct(self) -> bool:
        return len(set(self.q)) == self.N

    def q_uniform(self) -> bool:
        return len(set(self.q)) == 1

    def is_exact(self) -> bool:
        return all_exact(self.q) and all_exact(self.b)


@dataclass(frozen=True)
class BetheRoots:
    blocks: tuple  # N-1 tuples, block a holds l_a roots

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(tuple(bl) for bl in self.blocks))

    def flat(self):
        return [t for bl in self.blocks for t in bl]

    def canonical(self) -> "BetheRoots":
        return BetheRoots(
            tuple(
                tuple(sorted(bl, key=lambda z: (complex(z).real, complex(z).imag)))
                for bl in self.blocks
            )
        )

    def offdiag_margin(self) -> float:
        m = math.inf
        for a, bl in enumerate(self.blocks):
            for x, y in itertools.combinations(bl, 2):
                m = min(m, abs(complex(x) - complex(y)))
            if a + 1 < len(self.blocks):
                for x in bl:
                    for y in self.blocks[a + 1]:
                        m = min(m, abs(complex(x) - complex(y)))
        return m

    def is_offdiag(self, delta: float = OFFDIAG_TOL) -> bool:
        return self.offdiag_margin() > delta

    def to_json(self):
        from .scalars import scalar_to_json

        return [[scalar_to_json(t) for t in bl] for bl in self.blocks]


@dataclass
class BetheSolutionSet:
    solutions: list
    expected: int
    residuals: list = field(default_factory=list)
    margins: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def found(self) -> int:
        return len(self.solutions)

    @property
    def shortfall(self) -> int:
        return self.expected - self.found


def _from_flat(prob: BetheProblem, vec) -> BetheRoots:
    blocks = []
    pos = 0
    for la in prob.l:
        blocks.append(tuple(vec[pos : pos + la]))
        pos += la
    return BetheRoots(tuple(blocks))


# ---- residuals ----


def _equation_factors(prob: BetheProblem, blocks, a: int, j: int):
    """Linear factors of the two sides of equation (a, j), with sparse
    gradients over the flat variable index; a is 1-based block index."""
    l = prob.l
    offs = [0]
    for la in l:
        offs.append(offs[-1] + la)

    def idx(aa, jj):  # aa is 1-based
        return offs[aa - 1] + jj

    below = prob.b if a == 1 else blocks[a - 2]
    same = blocks[a - 1]
    above = blocks[a] if a < prob.N - 1 else ()
    tj = same[j]
    gj = {idx(a, j): 1}
    lhs, rhs = [], []
    for jp, x in enumerate(below):
        g = dict(gj)
        if a > 1:
            g[idx(a - 1, jp)] = -1
        lhs.append((tj - x + 1, g))
        rhs.append((tj - x, g))
    for jp, x in enumerate(same):
        if jp == j:
            continue
        g = dict(gj)
        g[idx(a, jp)] = -1
        lhs.append((tj - x - 1, g))
        rhs.append((tj - x + 1, g))
    for jp, x in enumerate(above):
        g = dict(gj)
        g[idx(a + 1, jp)] = -1
        lhs.append((tj - x, g))
        rhs.append((tj - x - 1, g))
    return lhs, rhs


def _product_and_grad(coef, factors, nvars, want_grad):
    val = coef
    for f, _ in factors:
        val = val * f
    if not want_grad:
        return val, None
    grad = [0] * nvars
    for i, (fi, gi) in enumerate(factors):
        part = coef
        for k, (fk, _) in enumerate(factors):
            if k != i:
                part = part * fk
        for v, s in gi.items():
            grad[v] = grad[v] + part * s
    return val, grad


def bae_residual(t: BetheRoots, prob: BetheProblem):
    """Denominator-cleared residuals, one per root; empty for lam=(n,0,...,0)."""
    res, _, _ = _residual_jac(t.blocks, prob, want_grad=False)
    return res


def _residual_jac(blocks, prob: BetheProblem, want_grad=True):
    nv = prob.total_roots
    res, jac, scales = [], [], []
    for a in range(1, prob.N):
        for j in range(len(blocks[a - 1])):
            lhs_f, rhs_f = _equation_factors(prob, blocks, a, j)
            lv, lg = _product_and_grad(prob.q[a - 1], lhs_f, nv, want_grad)
            rv, rg = _product_and_grad(prob.q[a], rhs_f, nv, want_grad)
            res.append(lv - rv)
            scales.append(max(1.0, abs(complex(lv)), abs(complex(rv))))
            if want_grad:
                jac.append([x - y for x, y in zip(lg, rg)])
    return res, jac, scales


def _newton_bae(prob: BetheProblem, start, tol=NEWTON_TOL, max_iter=200):
    """Newton on the cleared polynomial system; returns (roots, ok)."""
    x = np.asarray(start, dtype=complex)
    nv = len(x)
    if nv == 0:
        return x, True
    for _ in range(max_iter):
        blocks = _from_flat(prob, list(x)).blocks
        res, jac, scales = _residual_jac(blocks, prob)
        r = np.asarray(res, dtype=complex)
        err = max(abs(r[i]) / scales[i] for i in range(nv))
        if err < tol:
            return x, True
        J = np.asarray(jac, dtype=complex)
        try:
            dx = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError:
            dx, *_ = np.linalg.lstsq(J, -r, rcond=None)
        if not np.all(np.isfinite(dx)):
            return x, False
        step = 1.0
        base = err
        for _ in range(8):
            xn = x + step * dx
            bl = _from_flat(prob, list(xn)).blocks
            rn, _, sn = _residual_jac(bl, prob, want_grad=False)
            en = max(abs(complex(rn[i])) / sn[i] for i in range(nv))
            if en < base or en < tol:
                x = xn
                break
            step *= 0.5
        else:
            return x, False
    blocks = _from_flat(prob, list(x)).blocks
    res, _, scales = _residual_jac(blocks, prob, want_grad=False)
    err = max(abs(complex(res[i])) / scales[i] for i in range(nv))
    return x, err < tol


# ---- closed form for n = 1 ----


def solve_n1(k: int, q, b1) -> BetheRoots:
    """Unique Bethe root tuple for a single evaluation module with weight
    having the 1 in position k+1: t^(i) = b1 + sum_{j<=i} q_j/(q_{k+1}-q_j)."""
    N = len(q)
    if k < 0 or k >= N:
        raise ValueError("need 0 <= k < N")
    for j in range(k):
        if q[j] == q[k]:
            raise ValueError("twist parameters must be distinct up to position k+1")
    blocks = []
    acc = b1 * 1
    for i in range(1, k + 1):
        acc = acc + q[i - 1] / _as_div(q[k] - q[i - 1])
        blocks.append((acc,))
    blocks.extend(() for _ in range(k + 1, N))
    return BetheRoots(tuple(blocks))


def _as_div(x):
    # keep int/int exact
    return Fraction(x) if isinstance(x, int) else x


# ---- homotopy strategies ----


def _cluster_starts(prob: BetheProblem, y0: float):
    """One start per basis index decomposition: site s with color c seeds the
    single-module closed-form roots at levels 1..c-1, clustered near s*y0."""
    q = [complex(x) for x in prob.q]
    starts = []
    for colors in weight_basis(prob.N, prob.lam):
        flat_blocks = [[] for _ in range(prob.N - 1)]
        for s, c in enumerate(colors):
            base = (s + 1) * y0
            acc = 0.0 + 0.0j
            for i in range(1, c):
                acc = acc + q[i - 1] / (q[c - 1] - q[i - 1])
                flat_blocks[i - 1].append(base + acc)
        start = [t for bl in flat_blocks for t in bl]
        starts.append(start)
    return starts


def _on_degenerate_component(prob, x):
    """True when a converged iterate has locked onto a parameter-independent
    degenerate component of the cleared system: the root-collision diagonal,
    or the vanishing-vector families such as (b_s - 1, b_s).

    Those components satisfy the equations for every deformation parameter,
    so once Newton hops on, the path never leaves.  Converged capture sits
    exactly on the component; a genuine branch at closest approach stays many
    orders farther out, so the thresholds can be tight."""
    roots = _from_flat(prob, list(x))
    if roots.offdiag_margin() <= 1e-9:
        return True
    return bethe_vector_vanishing(prob.lam, roots, prob.b, N=prob.N) <= 1e-10


def _track_step(prob_of, x, g0, g1, tol, max_iter, depth=0):
    """One continuation step with basin-jump protection.

    Each root is predicted to move with its nearest evaluation point (the
    cluster it is glued to in the separated regime); if Newton lands farther
    from the prediction than half the point separation, or lands on a
    degenerate component, the step bisects."""
    b0 = [complex(v) for v in prob_of(g0).b]
    b1 = [complex(v) for v in prob_of(g1).b]
    pred = np.asarray(
        [
            t + (b1[s] - b0[s])
            for t in x
            for s in [min(range(len(b0)), key=lambda i: abs(t - b0[i]))]
        ],
        dtype=complex,
    )
    sep = min(
        (abs(p - r) for p, r in itertools.combinations(b1, 2)), default=math.inf
    )
    center = sum(b1) / len(b1) if b1 else 0.0
    xn, ok = _newton_bae(prob_of(g1), pred, tol=tol, max_iter=max_iter)
    # solution branches near the evaluation points sit ~sep apart; branches
    # far out (escaping roots) separate in proportion to their distance
    within = ok and all(
        abs(a - p) <= 0.5 * sep + 0.25 * abs(p - center)
        for a, p in zip(xn, pred)
    )
    if within:
        if not _on_degenerate_component(prob_of(g1), xn):
            return xn
        # small increments onto a degenerate point are an honest branch limit
        # (endpoint filters will judge it); a large hop is a capture
        jump = max((abs(a - t) for a, t in zip(xn, x)), default=0.0)
        if jump <= 1e-4 * (1.0 + max((abs(t) for t in x), default=0.0)):
            return xn
    if depth >= 14:
        return xn if ok else None
    gm = 0.5 * (g0 + g1)
    mid = _track_step(prob_of, x, g0, gm, tol, max_iter, depth + 1)
    if mid is None:
        return None
    return _track_step(prob_of, mid, gm, g1, tol, max_iter, depth + 1)


def _continuation(prob_of, t0, gammas, tol, max_iter):
    """Track a solution along the parameter list."""
    x, ok = _newton_bae(prob_of(gammas[0]), np.asarray(t0, dtype=complex),
                        tol=tol, max_iter=max_iter)
    if not ok:
        return None
    g_prev = gammas[0]
    for g in gammas[1:]:
        x = _track_step(prob_of, x, g_prev, g, tol, max_iter)
        if x is None:
            return None
        g_prev = g
    return x


def _gamma_schedule(shrink=0.7, floor=1e-9):
    """0 -> 1 with geometrically shrinking remaining distance.

    The floor must be small relative to the start/target scale ratio: the
    deformation parameter is not arc length, and roots keep moving at rate
    ~ scale per unit gamma all the way to the endpoint."""
    out = [0.0]
    rem = 1.0
    while rem > floor:
        rem *= shrink
        out.append(1.0 - rem)
    out.append(1.0)
    return out


def _dedup(solutions, tol=DEDUP_TOL):
    kept = []
    for s in solutions:
        c = s.canonical()
        dup = False
        for k in kept:
            if all(
                len(b1) == len(b2)
                and all(abs(complex(x) - complex(y)) <= tol for x, y in zip(b1, b2))
                for b1, b2 in zip(c.blocks, k.blocks)
            ):
                dup = True
                break
        if not dup:
            kept.append(c)
    return kept


_DETOUR = 0.35  # fixed complex detour amplitude for homotopy paths


def _solve_cluster(prob: BetheProblem, y0, tol, max_iter, dedup_tol, delta, workers=1):
    expected = dim_weight(prob.N, prob.lam)
    b_target = [complex(x) for x in prob.b]
    b_start = [(s + 1) * y0 for s in range(prob.n)]
    gammas = _gamma_schedule()

    def prob_of(g):
        # interpolate through complex parameter space: real paths can hit
        # root collisions (discriminant points), a fixed imaginary detour
        # avoids them while keeping both endpoints exact
        w = g + 1j * _DETOUR * g * (1 - g)
        b = tuple((1 - w) * x0 + w * x1 for x0, x1 in zip(b_start, b_target))
        return BetheProblem(prob.N, prob.lam, tuple(complex(x) for x in prob.q), b)

    def track(start):
        return _continuation(prob_of, start, gammas, tol, max_iter)

    starts = _cluster_starts(prob, y0)
    results = _run_tasks(track, starts, workers)
    warnings = []
    sols = []
    for x in results:
        if x is None:
            warnings.append("a continuation path failed to converge")
            continue
        sols.append(_from_flat(prob, list(x)))
    return sols, expected, warnings


def _solve_gaudin(prob: BetheProblem, y0, tol, max_iter, dedup_tol, delta, seed, restarts, workers=1):
    """Uniform-twist strategy: deform to distinct twists q_a = q (1+eps)^a,
    solve that problem by clustering, then continue eps -> 0.

    Paths whose roots stay bounded land on the singular-sector solutions;
    the rest run off to infinity (they carry the lower weight sectors that a
    generic twist separates) and are discarded once they leave a generous
    radius.  Deterministic; seed and restarts are accepted for signature
    compatibility but unused."""
    expected = dim_singular(prob.N, prob.lam)
    d = [complex(x) for x in prob.b]
    if len(set(d)) != len(d):
        return [], expected, ["evaluation points must be distinct for the uniform-twist strategy"]
    qu = complex(prob.q[0])
    center = sum(d) / len(d) if d else 0.0
    cap = 100.0 * (1.0 + max((abs(x - center) for x in d), default=0.0) + prob.total_roots)

    def prob_of(eps):
        # same complex detour as the cluster homotopy: the path from eps=1
        # to eps=0 must dodge real discriminant points where root pairs
        # collide before going complex
        e = eps + 1j * _DETOUR * eps * (1 - eps)
        q = tuple(qu * (1.0 + e) ** a for a in range(prob.N))
        return BetheProblem(prob.N, prob.lam, q, tuple(d))

    eps_path = [1.0]
    while eps_path[-1] > 1e-9:
        eps_path.append(eps_path[-1] * 0.7)
    eps_path.append(0.0)

    starts, _, warnings = _solve_cluster(
        prob_of(1.0), y0, tol, max_iter, dedup_tol, delta, workers
    )

    def track(t0):
        x = np.asarray([complex(t) for t in t0.flat()], dtype=complex)
        e_prev = eps_path[0]
        for e in eps_path[1:]:
            x = _track_step(prob_of, x, e_prev, e, tol, max_iter)
            if x is None:
                return None
            if any(abs(t - center) > cap for t in x):
                return "escaped"
            e_prev = e
        return x

    results = _run_tasks(track, _dedup(starts, dedup_tol), workers)
    sols = []
    for x in results:
        if x is None:
            warnings.append("a twist continuation path failed to converge")
            continue
        if isinstance(x, str):
            continue
        sols.append(_from_flat(prob, list(x)))
    return sols, expected, warnings


def _run_tasks(fn, items, workers):
    if workers and workers > 1 and len(items) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(fn, items))
    return [fn(it) for it in items]


def solve_bae(
    prob: BetheProblem,
    strategy: str = "auto",
    y0: float = 1e3,
    tol: float = NEWTON_TOL,
    max_iter: int = 200,
    dedup_tol: float = DEDUP_TOL,
    delta: float = OFFDIAG_TOL,
    seed: int = 0,
    restarts: int = 50,
    workers: int = 1,
) -> BetheSolutionSet:
    """Find off-diagonal Bethe root collections; cardinality is reported
    against dim of the weight space (distinct twists) or its singular part
    (uniform twists).  Shortfalls are flagged, not fatal."""
    if strategy == "auto":
        if prob.q_distinct():
            strategy = "cluster"
        elif prob.q_uniform():
            strategy = "gaudin"
        else:
            raise ValueError("twists neither distinct nor uniform; pick a strategy")
    if prob.total_roots == 0:
        expected = dim_weight(prob.N, prob.lam) if strategy == "cluster" else dim_singular(prob.N, prob.lam)
        empty = BetheRoots(tuple(() for _ in range(prob.N - 1)))
        return BetheSolutionSet([empty], expected, residuals=[0.0], margins=[math.inf])
    if strategy == "cluster":
        if not prob.q_distinct():
            raise ValueError("cluster strategy needs distinct twists")
        sols, expected, warnings = _solve_cluster(
            prob, y0, tol, max_iter, dedup_tol, delta, workers
        )
    elif strategy == "gaudin":
        if not prob.q_uniform():
            raise ValueError("gaudin strategy needs uniform twists")
        sols, expected, warnings = _solve_gaudin(
            prob, y0, tol, max_iter, dedup_tol, delta, seed, restarts, workers
        )
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    sols = _dedup(sols, dedup_tol)
    kept, residuals, margins = [], [], []
    for s in sols:
        m = s.offdiag_margin()
        if m <= delta:
            warnings.append("a solution failed the off-diagonality threshold")
            continue
        if bethe_vector_vanishing(prob.lam, s, prob.b, N=prob.N) <= delta:
            warnings.append("a solution with vanishing Bethe vector was discarded")
            continue
        res = bae_residual(s, prob)
        _, _, scales = _residual_jac(s.blocks, prob, want_grad=False)
        err = max(
            (abs(complex(r)) / sc for r, sc in zip(res, scales)), default=0.0
        )
        kept.append(s)
        residuals.append(err)
        margins.append(m)
    if len(kept) < expected:
        warnings.append(f"found {len(kept)} of {expected} expected solutions")
    return BetheSolutionSet(kept, expected, residuals, margins, warnings)


# ---- weight functions and Bethe vectors ----


def index_lists(I):
    """i^(a) = sorted union of I_c for c > a, a = 0..N-1 (1-based sites)."""
    N = len(I)
    return [sorted(set().union(*I[a:])) if I[a:] else [] for a in range(N)]


def _colors_to_I(colors, N):
    return tuple(
        tuple(s + 1 for s, c in enumerate(colors) if c == cc) for cc in range(1, N + 1)
    )


def _weight_terms(I, t: BetheRoots, b):
    """Summands of W_I(t;b), one per tuple of block permutations; sites with
    equal indices at adjacent levels contribute to neither inequality product.

    Yields (term, scale): scale is the same product with every factor
    magnitude floored at 1, the generic size the summand would have if no
    single factor were anomalously small.  Zero-vector detection cannot
    normalize by the summand values themselves, which all vanish together
    when a root sits on a shared factor zero."""
    N = len(I)
    ilists = [sorted(set().union(*[set(I[c]) for c in range(a, N)])) for a in range(1, N)]
    ilists = [sorted(range(1, len(b) + 1))] + ilists  # i^(0) = all sites
    blocks = t.blocks
    l = [len(bl) for bl in blocks]
    for perms in itertools.product(*(itertools.permutations(range(la)) for la in l)):
        tt = [b] + [
            tuple(blocks[a][perms[a][j]] for j in range(l[a])) for a in range(len(l))
        ]
        term = 1
        scale = 1.0
        for a in range(1, len(l) + 1):
            cur_idx = ilists[a]
            prev_idx = ilists[a - 1]
            for j in range(len(tt[a])):
                tj = tt[a][j]
                ij = cur_idx[j]
                for jp, ipv in enumerate(prev_idx):
                    if ipv < ij:
                        f = tj - tt[a - 1][jp] + 1
                        term = term * f
                        scale *= max(1.0, float(abs(f)))
                    elif ipv > ij:
                        f = tj - tt[a - 1][jp]
                        term = term * f
                        scale *= max(1.0, float(abs(f)))
                for jp in range(j + 1, len(tt[a])):
                    diff = tj - tt[a][jp]
                    term = term * (diff + 1) / _as_div(diff)
                    scale *= max(1.0, float(abs(diff + 1))) / max(float(abs(diff)), 1e-300)
        yield term, scale


def weight_function(I, t: BetheRoots, b):
    """W_I(t;b): symmetrization over each block of the product U_I."""
    total = 0
    for k, (term, _) in enumerate(_weight_terms(I, t, b)):
        total = term if k == 0 else total + term
    return total


def bethe_vector(lam, t: BetheRoots, b, N=None):
    """omega_lam(t, b) = sum over index decompositions of W_I v_I, as a dict
    over color tuples; the zero vector is legal output and must be checked."""
    if N is None:
        N = len(lam)
    basis = weight_basis(N, lam)
    out = {}
    for colors in basis:
        I = _colors_to_I(colors, N)
        w = weight_function(I, t, b)
        if not (w == 0):
            out[colors] = w
    return out


def bethe_vector_vanishing(lam, t: BetheRoots, b, N=None) -> float:
    """How close omega_lam(t, b) is to the zero vector, relative to the
    generic magnitude of its summands: max_I |W_I| / max_I sum of floored
    summand scales.

    Some off-diagonal solutions of the cleared equations (for instance a root
    pair (b_s - 1, b_s) inside one block) have identically zero Bethe vectors
    and carry no eigenvector.  Every summand of such a W_I contains a factor
    at zero, so the summand magnitudes collapse together with the sum and
    cannot serve as the yardstick; the floored scales from _weight_terms
    stay O(1) and make the ratio drop to root-error size."""
    if N is None:
        N = len(lam)
    worst_val = 0.0
    worst_scale = 0.0
    for colors in weight_basis(N, lam):
        I = _colors_to_I(colors, N)
        val, scale = 0, 0.0
        for k, (term, sc) in enumerate(_weight_terms(I, t, b)):
            val = term if k == 0 else val + term
            scale += sc
        worst_val = max(worst_val, float(abs(val)))
        worst_scale = max(worst_scale, scale)
    if worst_scale == 0.0:
        return 0.0
    return worst_val / worst_scale


# ---- eigenvalues and the fundamental operator ----


def _chi_ratfun(a: int, t: BetheRoots, b, q) -> RatFun:
    """chi_a(u) = q_a prod (u - t^(a-1) + 1)/(u - t^(a-1)) prod (u - t^(a) - 1)/(u - t^(a))."""
    N = len(q)
    below = b if a == 1 else t.blocks[a - 2]
    cur = t.blocks[a - 1] if a <= len(t.blocks) else ()
    num = Poly.from_roots([x - 1 for x in below] + [x + 1 for x in cur]) * q[a - 1]
    den = Poly.from_roots(list(below) + list(cur))
    return RatFun(num, den)


def eigenvalue_ck(k: int, u, t: BetheRoots, b, q):
    """c_k(u) = sum over a_1<...<a_k of chi_{a_1}(u) chi_{a_2}(u-1) ... ."""
    N = len(q)

    def chi_at(a, x):
        below = b if a == 1 else t.blocks[a - 2]
        cur = t.blocks[a - 1] if a <= len(t.blocks) else ()
        val = q[a - 1]
        for s in below:
            val = val * (x - s + 1) / _as_div(x - s)
        for s in cur:
            val = val * (x - s - 1) / _as_div(x - s)
        return val

    total = 0
    for comb in itertools.combinations(range(1, N + 1), k):
        term = 1
        for m, a in enumerate(comb):
            term = term * chi_at(a, u - m)
        total = total + term
    return total


def fundamental_operator(t: BetheRoots, b, q) -> DiffOp:
    """D_t = (1 - chi_1 tau) ... (1 - chi_N tau); constant term 1."""
    N = len(q)
    op = DiffOp.identity()
    for a in range(1, N + 1):
        factor = DiffOp({0: RatFun.const(1), 1: -_chi_ratfun(a, t, b, q)})
        op = op * factor
    return op


# ---- kernel recovery ----


def _monomial_responses(D: DiffOp, base, exponents, den_power: int, order):
    """Series at infinity of u^{-den_power} * base^{-u} D(base^u u^e) per e;
    order defaults to the largest denominator degree plus a margin, which
    suffices for the membership condition to be equivalent to its series."""
    shift_den = Poly([0, 1]) ** den_power
    rats = []
    for e in exponents:
        _, r = D.apply_quasiexp(QuasiExp(base, Poly.x() ** e if e else Poly([1])))
        rats.append(RatFun(r.num, r.den * shift_den))
    if order is None:
        order = max(rt.den.degree for rt in rats) + 2
    return [rt.series_at_infinity(order) for rt in rats], order


def _poles_radius(D: DiffOp):
    """Largest magnitude among the actual denominator roots of the operator
    coefficients (coefficient-based bounds overshoot by orders here)."""
    r = 0.0
    for c in D.coeffs.values():
        if c.is_zero() or c.den.degree <= 0:
            continue
        roots = np.roots([complex(x) for x in reversed(c.den.coeffs)])
        if roots.size:
            r = max(r, float(max(abs(roots))))
    return r


def _kernel_candidate_float(D: DiffOp, base, exps, deg, tol, k):
    """Float-path solve via the denominator-cleared functional equation.

    Multiplying base^{-u} D(base^u p(u)) = 0 by all coefficient denominators
    gives sum_m cleared_m(u) base^{-m} p(u - m) = 0 with small polynomial
    data; matching coefficients of u is a tiny well-scaled linear system,
    with none of the collinearity of far-out collocation rows."""
    cvals = {m: c for m, c in D.coeffs.items() if not c.is_zero()}
    shifts = sorted(cvals)
    binv = {m: complex(base) ** (-m) for m in cvals}
    cleared = {}
    for m in shifts:
        pm = cvals[m].num
        for mp in shifts:
            if mp != m:
                pm = pm * cvals[mp].den
        cleared[m] = pm
    rowdeg = max(cleared[m].degree + deg for m in shifts)
    ncols = len(exps) - 1

    def column(e):
        acc = Poly([])
        for m in shifts:
            acc = acc + cleared[m] * Poly.from_roots([m] * e) * Poly([binv[m]])
        return [complex(acc.coeff(s)) for s in range(rowdeg + 1)]

    cols = [column(e) for e in exps]
    A = np.asarray(cols[:-1], dtype=complex).T if ncols else np.zeros((rowdeg + 1, 0), dtype=complex)
    rhs = -np.asarray(cols[-1], dtype=complex)
    norms = np.maximum(np.abs(A).max(axis=0), 1e-300) if ncols else np.ones(0)
    coeffs, _, rank, _ = np.linalg.lstsq(A / norms, rhs, rcond=None)
    if ncols:
        coeffs = coeffs / norms
        if rank < ncols:
            raise ArithmeticError(f"kernel system rank-deficient at k={k}")
    poly_coeffs = [0.0] * (deg + 1)
    for j, e in enumerate(exps[:-1]):
        poly_coeffs[e] = complex(coeffs[j])
    poly_coeffs[deg] = 1.0
    p = Poly(poly_coeffs)
    # membership verified pointwise just outside the pole radius, relative
    # to the cancellation scale
    u0 = _poles_radius(D) + 1.5
    for u in (u0, u0 + 1.0, u0 + 2.0):
        terms = [
            complex(cvals[m](u)) * binv[m] * complex(p(u - m)) for m in shifts
        ]
        scale = max(sum(abs(x) for x in terms), 1e-300)
        if abs(sum(terms)) > tol * scale:
            raise ArithmeticError(f"recovered kernel element fails D f = 0 at k={k}")
    return p


def kernel_quasiexp(D: DiffOp, q, lam, order: int = None, tol: float = 1e-8):
    """Kernel basis of the fundamental operator: monic p_k with q_k^u p_k(u)
    in ker D (distinct twists, deg p_k = lam_k), or polynomials f_k of degree
    d_k = lam_k + N - k with coefficients only at exponents outside
    P = {d_1, ..., d_N} (uniform twists).  Membership of every recovered
    element is verified; tol governs only the float path."""
    N = len(q)
    distinct = len(set(q)) == N
    uniform = len(set(q)) == 1
    if not distinct and not uniform:
        raise ValueError("twists must be distinct or uniform")
    exact = all_exact(q) and all(c.is_exact() for c in D.coeffs.values())
    out = []
    for k in range(1, N + 1):
        if distinct:
            deg = lam[k - 1]
            exps = list(range(deg + 1))
            base = q[k - 1]
        else:
            deg = lam[k - 1] + N - k
            P = {lam[i] + N - i - 1 for i in range(N)}
            exps = [e for e in range(deg + 1) if e == deg or e not in P]
            base = q[0]
        if not exact:
            out.append(QuasiExp(base, _kernel_candidate_float(D, base, exps, deg, tol, k)))
            continue
        rows, somax = _monomial_responses(D, base, exps, deg, order)
        # unknowns: all exponents except the top one (monic)
        ncols = len(exps) - 1
        A = [[rows[j].coeff(s) for j in range(ncols)] for s in range(somax + 1)]
        rhs = [-rows[ncols].coeff(s) for s in range(somax + 1)]
        sol, nfree, consistent = solve_exact(
            [[Fraction(x) for x in row] for row in A], [Fraction(x) for x in rhs]
        )
        if not consistent:
            raise ArithmeticError(f"kernel system inconsistent at k={k}")
        if nfree > 0:
            raise ArithmeticError(f"kernel system rank-deficient at k={k}")
        poly_coeffs = [0] * (deg + 1)
        for j, e in enumerate(exps[:-1]):
            poly_coeffs[e] = sol[j]
        poly_coeffs[deg] = Fraction(1)
        p = Poly(poly_coeffs)
        f = QuasiExp(base, p)
        _, resid = D.apply_quasiexp(f)
        if not resid.eq(RatFun.const(0)):
            raise ArithmeticError(f"recovered kernel element fails D f = 0 at k={k}")
        out.append(f)
    return out


def kernel_wronskian_check(kernel, b, tol=1e-8) -> bool:
    """Polynomial part of Wr(f_1(u-1), ..., f_N(u-1)) vs prod (u - b_s),
    compared after monic normalization."""
    from .ratfun import discrete_wronskian

    _, _, poly = discrete_wronskian(kernel, shift=-1)
    target = Poly.from_roots(list(b))
    if poly.degree != target.degree:
        return False
    pm = poly.monic()
    tm = target.monic()
    if pm.is_exact() and tm.is_exact():
        return pm == tm
    return pm.almost_eq(tm, tol)
