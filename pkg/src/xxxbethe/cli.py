"""Batch driver: verification suites, solvers, reports, exit-code contract.

Subcommands read a JSON config, run a check suite, and emit a JSON report
(plus a CSV table for spectra).  Reports are deterministic for a fixed
config and seed.  Exit codes: 0 all checks passed, 1 at least one check
failed, 2 the solver fell short of the expected solution count, 64 bad
configuration.  The only environment override is XXXBETHE_THREADS, the
worker count for independent solver tracks.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

from .scalars import (
    DEDUP_TOL,
    EIG_TOL,
    NEWTON_TOL,
    OFFDIAG_TOL,
    SAMPLE_BASE,
    is_exact,
    scalar_to_json,
)
from .ratfun import Poly, elementary_symmetric
from .linalg import mat_identity, mat_mul, mat_sub, mat_is_zero, mat_max_abs
from .tensorspace import (
    dim_singular,
    dim_weight,
    full_basis,
    gl_action,
    vec_max_abs,
    vec_scale,
    vec_sub,
    weight_of,
)
from .yangian import (
    EvaluationData,
    apply_transfer,
    c_coefficients,
    qdet,
    scalar_bn,
    t_entry,
    transfer_matrix,
)
from .bethe import (
    BetheProblem,
    bethe_vector,
    eigenvalue_ck,
    solve_bae,
)
from .wronski import (
    chi_polynomial,
    eigenvalue_table,
    extract_coeffs,
    fiber_from_bethe,
    space_point_to_json,
    table_mismatch,
    wronski_map,
)
from . import symspace

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_NOCONV = 2
EXIT_CONFIG = 64


class ConfigError(ValueError):
    """Invalid configuration; mapped to exit code 64."""


_TOL_DEFAULTS = {
    "newton": NEWTON_TOL,
    "dedup": DEDUP_TOL,
    "offdiag": OFFDIAG_TOL,
    "eig": EIG_TOL,
}
_ALLOWED_KEYS = {
    "N", "n", "lambda", "q", "b", "mode", "smax", "tolerances",
    "seed", "cutoff", "out", "corrupt",
}


@dataclass
class RunConfig:
    N: int
    lam: tuple
    q: tuple
    b: tuple
    mode: str
    smax: int
    tolerances: dict
    seed: int
    cutoff: int
    out: str | None
    corrupt: bool

    @property
    def n(self) -> int:
        return sum(self.lam)

    def echo(self) -> dict:
        return {
            "N": self.N,
            "n": self.n,
            "lambda": list(self.lam),
            "q": [scalar_to_json(x) for x in self.q],
            "b": [scalar_to_json(x) for x in self.b],
            "mode": self.mode,
            "smax": self.smax,
            "tolerances": {k: float(v) for k, v in sorted(self.tolerances.items())},
            "seed": self.seed,
            "cutoff": self.cutoff,
            "corrupt": self.corrupt,
        }


def _parse_scalar(x, where: str):
    if isinstance(x, bool):
        raise ConfigError(f"{where}: expected a number, got a boolean")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"{where}: bad rational literal {x!r}") from None
    if isinstance(x, float):
        return complex(x)
    if isinstance(x, list) and len(x) == 2 and all(isinstance(t, (int, float)) for t in x):
        return complex(x[0], x[1])
    raise ConfigError(f"{where}: expected int, 'p/q', float, or [re, im]")


def load_config(obj) -> RunConfig:
    """Validate a raw JSON object into a RunConfig; raises ConfigError."""
    if not isinstance(obj, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(obj) - _ALLOWED_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {unknown}")
    lam = obj.get("lambda")
    if not (isinstance(lam, list) and lam and all(isinstance(x, int) and not isinstance(x, bool) and x >= 0 for x in lam)):
        raise ConfigError("lambda must be a nonempty list of nonnegative integers")
    lam = tuple(lam)
    N = obj.get("N", len(lam))
    if N != len(lam):
        raise ConfigError("N must equal the length of lambda")
    n = sum(lam)
    if "n" in obj and obj["n"] != n:
        raise ConfigError("n must equal the sum of lambda")
    mode = obj.get("mode", "exact")
    if mode not in ("exact", "float"):
        raise ConfigError("mode must be 'exact' or 'float'")

    q = obj.get("q", "ones")
    if q == "ones":
        q = tuple(Fraction(1) for _ in range(N))
    elif isinstance(q, list) and len(q) == N:
        q = tuple(_parse_scalar(x, f"q[{i}]") for i, x in enumerate(q))
    else:
        raise ConfigError("q must be 'ones' or a list of N values")
    if any(x == 0 for x in q):
        raise ConfigError("q entries must be nonzero")

    b = obj.get("b", "generic")
    if b == "generic":
        b = tuple(Fraction(2 * s) for s in range(n))
    elif isinstance(b, list) and len(b) == n:
        b = tuple(_parse_scalar(x, f"b[{i}]") for i, x in enumerate(b))
    else:
        raise ConfigError("b must be 'generic' or a list of |lambda| values")

    if mode == "float":
        q = tuple(complex(x) for x in q)
        b = tuple(complex(x) for x in b)
    else:
        if not all(is_exact(x) for x in q) or not all(is_exact(x) for x in b):
            raise ConfigError("exact mode needs rational q and b")

    smax = obj.get("smax", n + N)
    if not isinstance(smax, int) or smax < n + N:
        raise ConfigError(f"smax must be an integer >= n + N = {n + N}")
    tols = dict(_TOL_DEFAULTS)
    for key, val in (obj.get("tolerances") or {}).items():
        if key not in _TOL_DEFAULTS:
            raise ConfigError(f"unknown tolerance: {key!r}")
        if not isinstance(val, (int, float)) or isinstance(val, bool) or val <= 0:
            raise ConfigError(f"tolerance {key} must be a positive number")
        tols[key] = float(val)
    seed = obj.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise ConfigError("seed must be a nonnegative integer")
    cutoff = obj.get("cutoff", 3)
    if not isinstance(cutoff, int) or isinstance(cutoff, bool) or cutoff < 0:
        raise ConfigError("cutoff must be a nonnegative integer")
    out = obj.get("out")
    if out is not None and not isinstance(out, str):
        raise ConfigError("out must be a path string")
    corrupt = obj.get("corrupt", False)
    if not isinstance(corrupt, bool):
        raise ConfigError("corrupt must be a boolean")
    return RunConfig(N, lam, q, b, mode, smax, tols, seed, cutoff, out, corrupt)


def _workers_from_env() -> int:
    raw = os.environ.get("XXXBETHE_THREADS")
    if raw is None or raw == "":
        return 1
    try:
        w = int(raw)
    except ValueError:
        raise ConfigError(f"XXXBETHE_THREADS must be an integer, got {raw!r}") from None
    if w < 1:
        raise ConfigError("XXXBETHE_THREADS must be >= 1")
    return w


# ---- check records ----


def _record(name: str, ok: bool, residual=None, data=None) -> dict:
    rec = {"name": name, "status": "pass" if ok else "fail"}
    if residual is not None:
        rec["residual"] = float(residual)
    if data is not None:
        rec["data"] = data
    return rec


def _sample_u(cfg: RunConfig, count: int):
    """Deterministic abscissas clear of the poles b_s + m, m = 0..N."""
    shift = max((abs(complex(x).real) for x in cfg.b), default=0.0)
    start = SAMPLE_BASE + 2 * int(shift // 2 + 1)
    exact = cfg.mode == "exact"
    out = []
    u = start
    while len(out) < count:
        bad = any(
            abs(complex(u) - complex(bs) - m) < 1e-6
            for bs in cfg.b
            for m in range(cfg.N + 1)
        )
        if not bad:
            out.append(Fraction(u) if exact else float(u))
        u += 2
    return out


def _integer_nodes(cfg: RunConfig, count: int):
    """Integers clear of the poles, for pinning polynomial identities in v."""
    return [int(u) if cfg.mode == "exact" else u for u in _sample_u(cfg, count)]


# ---- verify-algebra ----


def _diag_color_count(N: int, n: int, i: int):
    """Matrix of e_{i,i} summed over slots on the full basis (diagonal)."""
    basis = full_basis(N, n)
    m = len(basis)
    mat = [[Fraction(0)] * m for _ in range(m)]
    for r, colors in enumerate(basis):
        mat[r][r] = Fraction(sum(1 for c in colors if c == i))
    return mat


def _gl_full_matrix(N: int, n: int, i: int, j: int):
    basis = full_basis(N, n)
    index = {k: r for r, k in enumerate(basis)}
    m = len(basis)
    mat = [[Fraction(0)] * m for _ in range(m)]
    for c, colors in enumerate(basis):
        for key, val in gl_action(i, j, {colors: Fraction(1)}).items():
            mat[index[key]][c] += val
    return mat


def run_verify_algebra(cfg: RunConfig):
    if cfg.mode != "exact":
        raise ConfigError("verify-algebra requires exact mode")
    ev = EvaluationData(cfg.N, cfg.b)
    N, n = cfg.N, cfg.n
    checks = []

    # defining relation: (u-v)[T_ij(u),T_kl(v)] = T_kj(v)T_il(u) - T_kj(u)T_il(v),
    # an exact identity in u with v pinned at n+2 integer nodes
    entries = {
        (i, j): t_entry(ev, i, j)
        for i in range(1, N + 1)
        for j in range(1, N + 1)
    }
    vs = _integer_nodes(cfg, n + 2)
    at_v = {v: {key: op.eval_at(v) for key, op in entries.items()} for v in vs}
    bad = None
    for i, j, k, l in itertools.product(range(1, N + 1), repeat=4):
        tij, tkj, til = entries[(i, j)], entries[(k, j)], entries[(i, l)]
        for v in vs:
            mkl, mkj, nil = at_v[v][(k, l)], at_v[v][(k, j)], at_v[v][(i, l)]
            comm = tij.rmul_matrix(mkl) - tij.lmul_matrix(mkl)
            lhs = comm.mul_scalar_fun(Poly([-v, 1]))
            rhs = til.lmul_matrix(mkj) - tkj.rmul_matrix(nil)
            if not (lhs - rhs).is_zero():
                bad = (i, j, k, l, v)
                break
        if bad:
            break
    checks.append(
        _record(
            "yangian-defining-relation",
            bad is None,
            data={"quadruples": N ** 4, "v_nodes": len(vs), "failure": bad},
        )
    )

    # transfer matrices commute: [B_k(u), B_l(v)] = 0 at 5 sample pairs
    bks = {k: transfer_matrix(ev, k, cfg.q, cfg.lam) for k in range(1, N + 1)}
    klpairs = list(itertools.product(range(1, N + 1), repeat=2))
    pairs = [klpairs[m % len(klpairs)] for m in range(5)]
    ok_comm = True
    fails = []
    for m, (k, l) in enumerate(pairs):
        v = vs[m % len(vs)]
        ml = bks[l].eval_at(v)
        comm = bks[k].rmul_matrix(ml) - bks[k].lmul_matrix(ml)
        if not comm.is_zero():
            ok_comm = False
            fails.append([k, l, v])
    checks.append(
        _record("transfer-commutativity", ok_comm, data={"pairs": [list(p) for p in pairs], "failures": fails})
    )

    # [B^q, U(h)] = 0 on the full space; for uniform q the whole gl_N commutes
    bfull = {k: transfer_matrix(ev, k, cfg.q, lam=None) for k in range(1, N + 1)}
    ok_h = True
    for k in range(1, N + 1):
        for i in range(1, N + 1):
            e = _diag_color_count(N, n, i)
            if not (bfull[k].rmul_matrix(e) - bfull[k].lmul_matrix(e)).is_zero():
                ok_h = False
    checks.append(_record("cartan-commutation", ok_h))
    if len(set(cfg.q)) == 1:
        ok_gl = True
        for k in range(1, N + 1):
            for i in range(1, N + 1):
                for j in range(1, N + 1):
                    if i == j:
                        continue
                    e = _gl_full_matrix(N, n, i, j)
                    if not (bfull[k].rmul_matrix(e) - bfull[k].lmul_matrix(e)).is_zero():
                        ok_gl = False
        checks.append(_record("gl-commutation-uniform-twist", ok_gl))

    # quantum determinant is central
    qd = qdet(ev)
    ok_qd = True
    for (i, j), op in entries.items():
        for v in vs[:2]:
            m = op.eval_at(v)
            if not (qd.rmul_matrix(m) - qd.lmul_matrix(m)).is_zero():
                ok_qd = False
    checks.append(_record("qdet-centrality", ok_qd))

    # B_N is the expected scalar function
    bn = bks[N]
    checks.append(_record("scalar-top-transfer", bn.eq_scalar(scalar_bn(ev, cfg.q))))

    if cfg.corrupt:
        # negative control: a corrupted operator must fail the scalar identity
        num = [[p for p in row] for row in bn.num]
        num[0][0] = num[0][0] + bn.den
        from .yangian import OperatorRatFun

        corrupted = OperatorRatFun(bn.basis, bn.den, num)
        detected = not corrupted.eq_scalar(scalar_bn(ev, cfg.q))
        checks.append(
            _record("negative-control-corrupted-operator", False, data={"detected": detected})
        )

    # B_1 structure: constant term sum(q), u^{-1} term sum q_i lam_i on V_lam
    ser = bks[1].series(1)
    dim = bks[1].dim
    target0 = mat_identity(dim, Fraction(1))
    sum_q = sum(cfg.q)
    s1val = sum(qi * li for qi, li in zip(cfg.q, cfg.lam))
    ok_b1 = mat_is_zero(mat_sub(ser[0], [[sum_q * x for x in row] for row in target0]))
    ok_b11 = mat_is_zero(mat_sub(ser[1], [[s1val * x for x in row] for row in target0]))
    checks.append(_record("first-transfer-series", ok_b1 and ok_b11,
                          data={"constant": scalar_to_json(sum_q), "inverse-u": scalar_to_json(s1val)}))

    # rebased tables: C_{k,s} vanish for s < k; C_{k,k} scalars satisfy the
    # chi identity sum_k (-1)^k C_{k,k} x(x-1)...(x-N+k+1) = prod (x - lam_s - N + s)
    is_partition = all(cfg.lam[i] >= cfg.lam[i + 1] for i in range(N - 1))
    if is_partition and dim_singular(N, cfg.lam) > 0:
        ctabs, svecs = c_coefficients(ev, cfg.lam, order=cfg.smax)
        m = len(svecs)
        ok_zero = True
        gs = []
        ok_scalar = True
        for k in range(N + 1):
            for s in range(min(k, cfg.smax + 1)):
                if not mat_is_zero(ctabs[k][s]):
                    ok_zero = False
            if k <= cfg.smax:
                mat = ctabs[k][k]
                g = mat[0][0]
                gs.append(g)
                if not mat_is_zero(mat_sub(mat, [[g * x for x in row] for row in mat_identity(m, Fraction(1))])):
                    ok_scalar = False
        acc = Poly()
        for k, g in enumerate(gs):
            term = Poly([1])
            for j in range(N - k):
                term = term * Poly([-j, 1])
            acc = acc + term * ((-1) ** k * g)
        ok_chi = acc == chi_polynomial(cfg.lam, N)
        checks.append(
            _record(
                "rebased-coefficient-tables",
                ok_zero and ok_scalar and ok_chi,
                data={"diagonal-scalars": [scalar_to_json(g) for g in gs]},
            )
        )

    severity = EXIT_FAIL if any(c["status"] == "fail" for c in checks) else EXIT_OK
    return checks, [], {}, severity


# ---- spectrum ----


def _solve(cfg: RunConfig):
    prob = BetheProblem(N=cfg.N, lam=cfg.lam, q=cfg.q, b=cfg.b)
    distinct = prob.q_distinct()
    uniform = prob.q_uniform()
    if not distinct and not uniform:
        raise ConfigError("q must be distinct or 'ones'")
    sol = solve_bae(
        prob,
        tol=cfg.tolerances["newton"],
        dedup_tol=cfg.tolerances["dedup"],
        delta=cfg.tolerances["offdiag"],
        seed=cfg.seed,
        workers=_workers_from_env(),
    )
    order = sorted(
        range(len(sol.solutions)),
        key=lambda i: tuple(
            (complex(x).real, complex(x).imag) for x in sol.solutions[i].canonical().flat()
        ),
    )
    sol.solutions = [sol.solutions[i].canonical() for i in order]
    sol.residuals = [sol.residuals[i] for i in order]
    sol.margins = [sol.margins[i] for i in order]
    return prob, sol


def _eigen_residual(prob: BetheProblem, t, u_points, omega=None) -> float:
    ev = EvaluationData(prob.N, prob.b)
    if omega is None:
        omega = bethe_vector(prob.lam, t, prob.b, N=prob.N)
    scale = vec_max_abs(omega)
    worst = 0.0
    for k in range(1, prob.N + 1):
        for u0 in u_points:
            got = apply_transfer(ev, k, prob.q, u0, omega)
            c = eigenvalue_ck(k, u0, t, prob.b, prob.q)
            resid = vec_sub(got, vec_scale(omega, c))
            worst = max(worst, vec_max_abs(resid) / ((1.0 + abs(complex(c))) * scale))
    return worst


def run_spectrum(cfg: RunConfig):
    prob, sol = _solve(cfg)
    checks = []
    warnings = list(sol.warnings)
    eig_tol = cfg.tolerances["eig"]
    checks.append(
        _record(
            "solution-count",
            sol.shortfall == 0,
            data={"found": sol.found, "expected": sol.expected},
        )
    )
    u_points = _sample_u(cfg, 3)
    rows = []
    worst_eig = 0.0
    tuples = []
    for idx, t in enumerate(sol.solutions):
        omega = bethe_vector(prob.lam, t, prob.b, N=prob.N)
        r = _eigen_residual(prob, t, u_points, omega=omega)
        worst_eig = max(worst_eig, r)
        eig_tuple = [eigenvalue_ck(k, u_points[0], t, prob.b, prob.q) for k in range(1, prob.N + 1)]
        tuples.append(eig_tuple)
        margin = float(sol.margins[idx])
        rows.append(
            {
                "index": idx,
                "roots": t.to_json(),
                "margin": margin if margin < float("inf") else None,
                "bae_residual": float(sol.residuals[idx]),
                "eigen_residual": float(r),
                "eigenvalues_at_u0": [scalar_to_json(x) for x in eig_tuple],
            }
        )
    checks.append(_record("eigenvector-property", worst_eig <= eig_tol, residual=worst_eig,
                          data={"u_points": [scalar_to_json(u) for u in u_points]}))

    if prob.q_uniform() and all(x == 1 for x in prob.q):
        worst_sing = 0.0
        for t in sol.solutions:
            omega = bethe_vector(prob.lam, t, prob.b, N=prob.N)
            scale = vec_max_abs(omega)
            for a in range(1, prob.N):
                worst_sing = max(worst_sing, vec_max_abs(gl_action(a, a + 1, omega)) / scale)
        checks.append(_record("singular-vector", worst_sing <= eig_tol, residual=worst_sing))
        worst_c = _rebased_eigencheck(cfg, prob, sol.solutions)
        if worst_c is not None:
            checks.append(_record("rebased-eigenvector-property", worst_c <= eig_tol, residual=worst_c))

    applicable = _simple_spectrum_applicable(prob)
    if applicable and len(tuples) > 1:
        sep = min(
            max(abs(complex(x) - complex(y)) for x, y in zip(ta, tb))
            for ta, tb in itertools.combinations(tuples, 2)
        )
        checks.append(_record("simple-spectrum", sep > eig_tol, residual=sep,
                              data={"applicable": True}))
    else:
        checks.append(_record("simple-spectrum", True,
                              data={"applicable": bool(applicable and len(tuples) > 1)}))

    severity = EXIT_OK
    if any(c["status"] == "fail" for c in checks):
        severity = EXIT_FAIL
    if sol.shortfall > 0:
        severity = EXIT_NOCONV
    return checks, warnings, {"solutions": rows}, severity


def _rebased_eigencheck(cfg: RunConfig, prob: BetheProblem, solutions):
    """C_{k,s} acting on the Bethe vector vs the rebased eigenvalue series."""
    from .tensorspace import project_onto

    if dim_singular(prob.N, prob.lam) == 0:
        return None
    ev = EvaluationData(prob.N, prob.b)
    ctabs, svecs = c_coefficients(ev, prob.lam, order=cfg.smax)
    worst = 0.0
    mode = "exact" if (prob.is_exact() and cfg.mode == "exact") else "float"
    for t in solutions:
        omega = bethe_vector(prob.lam, t, prob.b, N=prob.N)
        exact_roots = all(is_exact(x) for bl in t.blocks for x in bl)
        coords, _ = project_onto(omega, svecs, mode if exact_roots else "float")
        gtab = eigenvalue_table(t, prob, cfg.smax)
        scale = 1.0 + max(abs(complex(x)) for x in coords)
        for k in range(prob.N + 1):
            for s in range(cfg.smax + 1):
                got = [
                    sum(ctabs[k][s][r][c] * coords[c] for c in range(len(coords)))
                    for r in range(len(coords))
                ]
                want = [gtab[k][s] * x for x in coords]
                err = max(abs(complex(a) - complex(b)) for a, b in zip(got, want))
                worst = max(worst, err / (scale * (1.0 + abs(complex(gtab[k][s])))))
    return worst


def _simple_spectrum_applicable(prob: BetheProblem) -> bool:
    bs = [complex(x) for x in prob.b]
    if any(abs(x.imag) > 0 for x in bs):
        return False
    re = sorted(x.real for x in bs)
    if any(re[i + 1] - re[i] <= 1 for i in range(len(re) - 1)):
        return False
    qs = [complex(x) for x in prob.q]
    if any(abs(x.imag) > 0 for x in qs):
        return False
    return len(set(prob.q)) == len(prob.q)


# ---- fiber ----


def run_fiber(cfg: RunConfig):
    prob, sol = _solve(cfg)
    checks = []
    warnings = list(sol.warnings)
    eig_tol = cfg.tolerances["eig"]
    checks.append(
        _record(
            "solution-count",
            sol.shortfall == 0,
            data={"found": sol.found, "expected": sol.expected},
        )
    )
    target = elementary_symmetric(prob.b)
    rows = []
    worst_wr = 0.0
    worst_tab = 0.0
    ok_all = True
    for idx, t in enumerate(sol.solutions):
        try:
            X = fiber_from_bethe(t, prob, tol=eig_tol)
            img = wronski_map(X)
            tab_resid = table_mismatch(
                extract_coeffs(X, cfg.smax, tol=eig_tol),
                eigenvalue_table(t, prob, cfg.smax),
            )
        except (ArithmeticError, ValueError) as exc:
            ok_all = False
            rows.append({"index": idx, "error": str(exc)})
            continue
        wr_resid = max(
            (abs(complex(a) - complex(s)) for a, s in zip(img.a, target)), default=0.0
        )
        worst_wr = max(worst_wr, wr_resid)
        worst_tab = max(worst_tab, tab_resid)
        rows.append(
            {
                "index": idx,
                "point": space_point_to_json(X),
                "wronskian_residual": float(wr_resid),
                "table_residual": float(tab_resid),
            }
        )
    checks.append(_record("wronskian-image", ok_all and worst_wr <= eig_tol, residual=worst_wr,
                          data={"target": [scalar_to_json(x) for x in target]}))
    checks.append(_record("coefficients-match-eigenvalues", ok_all and worst_tab <= eig_tol,
                          residual=worst_tab))
    severity = EXIT_OK
    if any(c["status"] == "fail" for c in checks):
        severity = EXIT_FAIL
    if sol.shortfall > 0:
        severity = EXIT_NOCONV
    return checks, warnings, {"fibers": rows}, severity


# ---- characters ----


def run_characters(cfg: RunConfig):
    if cfg.mode != "exact":
        raise ConfigError("characters requires exact mode")
    lam, d = cfg.lam, cfg.cutoff
    checks = []
    chw = symspace.graded_character(lam, "weight", d)
    dims = [len(symspace.invariant_basis(lam, k, mode="weight")) for k in range(d + 1)]
    incr = [dims[0]] + [dims[k] - dims[k - 1] for k in range(1, d + 1)]
    checks.append(
        _record(
            "weight-character",
            tuple(incr) == chw.coeffs,
            data={"series": list(chw.coeffs), "observed": incr},
        )
    )
    is_partition = all(lam[i] >= lam[i + 1] for i in range(len(lam) - 1))
    if is_partition:
        chs = symspace.graded_character(lam, "singular", d)
        sdims = [len(symspace.invariant_basis(lam, k, mode="singular")) for k in range(d + 1)]
        sincr = [sdims[0]] + [sdims[k] - sdims[k - 1] for k in range(1, d + 1)]
        checks.append(
            _record(
                "singular-character",
                tuple(sincr) == chs.coeffs,
                data={"series": list(chs.coeffs), "observed": sincr},
            )
        )
        kmin = symspace.singular_start_degree(lam)
        lead_ok = all(chs.coeff(k) == 0 for k in range(min(kmin, d + 1))) and (
            kmin > d or chs.coeff(kmin) == 1
        )
        checks.append(_record("singular-leading-degree", lead_ok, data={"k_min": kmin}))
        if all(x == 0 for x in lam[1:]):
            checks.append(
                _record("row-weight-equals-singular", chw.coeffs == chs.coeffs)
            )
    severity = EXIT_FAIL if any(c["status"] == "fail" for c in checks) else EXIT_OK
    return checks, [], {}, severity


# ---- driver ----


_COMMANDS = {
    "verify-algebra": run_verify_algebra,
    "spectrum": run_spectrum,
    "fiber": run_fiber,
    "characters": run_characters,
}


def run_command(command: str, cfg: RunConfig) -> tuple:
    """Returns (report dict, exit code)."""
    if command == "all":
        sections = []
        severity = EXIT_OK
        for name in ("verify-algebra", "spectrum", "fiber", "characters"):
            if cfg.mode != "exact" and name in ("verify-algebra", "characters"):
                sections.append({"command": name, "skipped": "requires exact mode"})
                continue
            checks, warnings, payload, sev = _COMMANDS[name](cfg)
            sections.append(
                {
                    "command": name,
                    "checks": checks,
                    "warnings": warnings,
                    **payload,
                }
            )
            severity = max(severity, sev)
        report = {
            "command": "all",
            "config": cfg.echo(),
            "sections": sections,
            "status": "pass" if severity == EXIT_OK else "fail",
        }
        return report, severity
    checks, warnings, payload, severity = _COMMANDS[command](cfg)
    report = {
        "command": command,
        "config": cfg.echo(),
        "checks": checks,
        "warnings": warnings,
        "status": "pass" if severity == EXIT_OK else "fail",
        **payload,
    }
    return report, severity


def _spectrum_csv(report: dict) -> str:
    """CSV table of the solution records in a spectrum report."""
    rows = report.get("solutions", [])
    if not rows and report.get("sections"):
        for sec in report["sections"]:
            if sec.get("command") == "spectrum":
                rows = sec.get("solutions", [])
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["index", "roots", "margin", "bae_residual", "eigen_residual", "eigenvalues_at_u0"]
    )
    for row in rows:
        if "error" in row:
            writer.writerow([row["index"], "", "", "", "", row["error"]])
            continue
        writer.writerow(
            [
                row["index"],
                json.dumps(row["roots"], separators=(",", ":")),
                row["margin"],
                row["bae_residual"],
                row["eigen_residual"],
                json.dumps(row["eigenvalues_at_u0"], separators=(",", ":")),
            ]
        )
    return buf.getvalue()


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="xxxbethe",
        description="Transfer-matrix identity suites, Bethe solvers, and Wronski-map fibers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("verify-algebra", "spectrum", "fiber", "characters", "all"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to a JSON run configuration")
        p.add_argument("--out", default=None, help="report path (default: stdout)")
        p.add_argument("--mode", choices=("exact", "float"), default=None,
                       help="override the config arithmetic mode")
    args = parser.parse_args(argv)

    try:
        with open(args.config) as fh:
            raw = json.load(fh)
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except json.JSONDecodeError as exc:
        print(f"config error: invalid JSON: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.mode is not None and isinstance(raw, dict):
        raw["mode"] = args.mode
    try:
        cfg = load_config(raw)
        if args.out is not None:
            cfg.out = args.out
        report, code = run_command(args.command, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
        if args.command in ("spectrum", "all"):
            root, _ = os.path.splitext(cfg.out)
            with open(root + ".csv", "w") as fh:
                fh.write(_spectrum_csv(report))
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
