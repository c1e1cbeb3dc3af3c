"""Multivariate Mahler measure estimators.

* :func:`lawton_estimate` specialises along ``r_n = (1, n, n^2, ...)`` and
  takes one-variable measures; the trace is exposed, no limit is fitted.
* :func:`jensen_2d` integrates the inner one-variable measure over ``t1``.
* :func:`qmc_estimate` averages ``log|F|`` over shifted Kronecker points.
* :func:`measure_of_family_member` computes ``m(F_A)`` through the SHNF of
  ``A`` and dispatches on the number of variables that remain.

Before dispatch, polynomials are reduced exactly: the exponent lattice is
rebased so the polynomial uses as few variables as its support spans, and
integer polynomials are split into irreducible factors (the measure is
additive).  Neither step changes the measure.
"""

from __future__ import annotations

import copy
import functools
import itertools
import json
import math
from dataclasses import asdict, dataclass
from typing import Any, Sequence

import numpy as np
from scipy.stats import t as student_t

from .laurent import (
    LaurentPoly,
    ZeroPolynomialError,
    evaluate_many,
    substitute,
)
from .lattice import IntMatrix, _RowReducer, _solve_echelon, lawton_vector, shnf
from .measure_uni import (
    InconclusiveCertificate,
    MeasureResult,
    roots_batch,
    measure_uni,
    zero_certificate,
)

__all__ = [
    "MeasureConfig",
    "LawtonSchedule",
    "ConvergenceTrace",
    "lawton_estimate",
    "jensen_2d",
    "qmc_estimate",
    "measure_of_family_member",
    "measure",
    "intrinsic_form",
    "torus_breakpoints",
    "canonical_form",
    "DEFAULT_SCHEDULE",
]

DEFAULT_SCHEDULE = (5, 9, 13, 17, 25, 37)
QMC_SHIFTS = 8


@dataclass(frozen=True)
class LawtonSchedule:
    n_values: tuple[int, ...] = DEFAULT_SCHEDULE
    degree_cap: int = 6000

    def __post_init__(self) -> None:
        n = tuple(int(x) for x in self.n_values)
        if not n:
            raise ValueError("schedule needs at least one n")
        if any(x < 1 for x in n) or any(b <= a for a, b in zip(n, n[1:])):
            raise ValueError("schedule values must be positive and strictly increasing")
        if self.degree_cap < 1:
            raise ValueError("degree_cap must be positive")
        object.__setattr__(self, "n_values", n)


@dataclass(frozen=True)
class MeasureConfig:
    """Every numeric knob of the estimators; echoed in each result."""

    schedule: tuple[int, ...] = DEFAULT_SCHEDULE
    degree_cap: int = 6000
    nodes: int = 2048
    jensen_rule: str = "adaptive"
    samples: int = 4096
    seed: int = 0
    tolerance: float = 1e-7
    cross_check: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "schedule", tuple(int(x) for x in self.schedule))
        LawtonSchedule(self.schedule, self.degree_cap)
        if self.nodes < 2:
            raise ValueError("nodes must be at least 2")
        if self.jensen_rule not in ("uniform", "adaptive"):
            raise ValueError("jensen_rule must be 'uniform' or 'adaptive'")
        if self.samples < 1:
            raise ValueError("samples must be positive")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")

    @property
    def lawton(self) -> LawtonSchedule:
        return LawtonSchedule(self.schedule, self.degree_cap)

    def to_json(self) -> dict:
        d = asdict(self)
        d["schedule"] = list(self.schedule)
        return d

    @classmethod
    def from_json(cls, obj: dict) -> MeasureConfig:
        obj = dict(obj)
        if "schedule" in obj:
            obj["schedule"] = tuple(obj["schedule"])
        return cls(**obj)


@dataclass
class ConvergenceTrace:
    pairs: list[tuple[int, float]]
    final: float

    def to_json(self) -> dict:
        return {"pairs": [list(p) for p in self.pairs], "final": self.final}


# ---------------------------------------------------------------------------
# exact reductions

def intrinsic_form(F: LaurentPoly) -> LaurentPoly:
    """Rewrite ``F`` in as many variables as its support spans.

    With ``e_0`` the smallest exponent, the differences ``e_j - e_0`` generate
    a lattice with HNF basis ``B`` (``d`` rows); ``F = z^e_0 G(z^B)`` where
    ``G`` has exponents equal to the coordinates in that basis.  ``m(F) ==
    m(G)`` since ``B`` has full row rank.  The sign is normalised so the last
    coefficient is positive when it is real.
    """
    if F.is_zero():
        raise ZeroPolynomialError()
    exps = F.exponents()
    e0 = exps[0]
    diffs = [tuple(a - b for a, b in zip(e, e0)) for e in exps[1:]]
    if not diffs or not any(any(d) for d in diffs):
        return LaurentPoly(0, {(): F.coefficients()[0]})
    red = _RowReducer(IntMatrix.from_rows(diffs), track=False)
    pivots = red.echelonize()
    basis = red.M[: len(pivots)]
    items = [((0,) * len(pivots), F.coefficients()[0])]
    for d, c in zip(diffs, F.coefficients()[1:]):
        y = _solve_echelon(basis, pivots, d)
        assert y is not None
        items.append((tuple(y), c))
    G = LaurentPoly(len(pivots), items)
    last = G.coefficients()[-1]
    if isinstance(last, int) and last < 0:
        G = -G
    return G


def _unimodular_inverse(M: list[tuple[int, ...]]) -> list[list[int]] | None:
    d = len(M)
    if d == 2:
        (a, b), (c, e) = M
        det = a * e - b * c
        if det not in (1, -1):
            return None
        return [[e * det, -b * det], [-c * det, a * det]]
    arr = np.array(M, dtype=float)
    if abs(round(np.linalg.det(arr))) != 1:
        return None
    inv = np.rint(np.linalg.inv(arr)).astype(int).tolist()
    ident = [[sum(M[i][r] * inv[r][j] for r in range(d)) for j in range(d)] for i in range(d)]
    if ident != [[int(i == j) for j in range(d)] for i in range(d)]:
        return None
    return inv


def canonical_form(G: LaurentPoly, max_frames: int = 2000) -> LaurentPoly:
    """Representative of ``G`` under ``z -> ±z^v (z^M)`` with ``M`` unimodular.

    Every frame (a base exponent plus ``d`` further exponents whose
    differences form a basis of ``Z^d``) gives coordinates; the
    lexicographically smallest term list wins, with the overall sign chosen
    the same way.  All these maps preserve the measure.  Returns ``G`` itself
    for complex coefficients, when no frame exists, or when there are more
    than ``max_frames`` candidate frames.
    """
    d = G.k
    if d < 2 or not G.is_integral():
        return G
    exps = G.exponents()
    t = len(exps)
    if math.perm(t, d + 1) > max_frames:
        return G
    coeffs = G.coefficients()
    best = None
    for i0, e0 in enumerate(exps):
        rest = [j for j in range(t) if j != i0]
        for combo in itertools.permutations(rest, d):
            M = [tuple(a - b for a, b in zip(exps[j], e0)) for j in combo]
            # rows of M are the new basis; coordinates y solve y @ M = e - e0
            inv = _unimodular_inverse(M)
            if inv is None:
                continue
            for sign in (1, -1):
                items = []
                for e, c in zip(exps, coeffs):
                    v = [a - b for a, b in zip(e, e0)]
                    y = tuple(sum(v[r] * inv[r][j] for r in range(d)) for j in range(d))
                    items.append((y, sign * c))
                key = tuple(sorted(items))
                if best is None or key < best:
                    best = key
    if best is None:
        return G
    return LaurentPoly(d, best)


def _simplex_linear_form(G: LaurentPoly) -> LaurentPoly | None:
    """Affinely independent support: ``m(G)`` equals that of a linear form
    in the coefficient moduli, sorted (sign flips and relabelling of the
    variables preserve the measure)."""
    if len(G) != G.k + 1 or not G.is_integral():
        return None
    mags = sorted((abs(c) for c in G.coefficients()), reverse=True)
    items = [((0,) * G.k, mags[0])]
    for i, c in enumerate(mags[1:]):
        items.append((tuple(int(j == i) for j in range(G.k)), c))
    return LaurentPoly(G.k, items)


def _factor_integral(F: LaurentPoly) -> tuple[int, list[tuple[LaurentPoly, int]]]:
    """Integer content and irreducible factors of ``F`` (monomial factor dropped)."""
    from sympy import Poly, ZZ, symbols

    shifted, _ = F.monomial_normalized()
    gens = symbols(f"x1:{F.k + 1}")
    P = Poly.from_dict({e: c for e, c in shifted.items()}, *gens, domain=ZZ)
    content, facs = P.factor_list()
    out = []
    for g, m in facs:
        out.append((LaurentPoly(F.k, {tuple(e): int(c) for e, c in g.as_dict().items()}), m))
    return int(content), out


# ---------------------------------------------------------------------------
# estimators

def _degree_span(F: LaurentPoly, r: Sequence[int]) -> int:
    vals = [sum(a * b for a, b in zip(e, r)) for e in F.exponents()]
    return max(vals) - min(vals)


def lawton_estimate(F: LaurentPoly, schedule: LawtonSchedule | None = None) -> MeasureResult:
    """Measures of the one-variable specialisations ``F(z, z^n, z^(n^2), ...)``.

    Specialisations that vanish or exceed the degree cap are skipped.  The
    value is the last estimate; the error bound is the spread of the final
    three estimates plus the last root error (empirical: no convergence rate
    is assumed).  For integer ``F`` the last specialisation also gets a zero
    certificate, reported as a heuristic for ``m(F) == 0``.
    """
    schedule = schedule or LawtonSchedule()
    if F.is_zero():
        raise ZeroPolynomialError()
    if F.k < 1:
        raise ValueError("lawton_estimate needs at least one variable")
    pairs: list[tuple[int, float]] = []
    skipped: list[dict] = []
    last: MeasureResult | None = None
    last_spec: LaurentPoly | None = None
    for n in schedule.n_values:
        r = lawton_vector(n, F.k)
        span = _degree_span(F, r)
        if span > schedule.degree_cap:
            skipped.append({"n": n, "reason": f"degree {span} > cap"})
            continue
        spec = substitute(F, IntMatrix(1, F.k, (r,)))
        if spec.is_zero():
            skipped.append({"n": n, "reason": "specialisation vanishes"})
            continue
        last = measure_uni(spec, graeffe=False)
        last_spec = spec
        pairs.append((n, last.value))
    if last is None:
        raise ValueError(
            "every scheduled specialisation vanished or exceeded the degree cap: "
            + json.dumps(skipped)
        )
    tail = [v for _, v in pairs[-3:]]
    err = (max(tail) - min(tail)) + last.error_bound
    detail: dict[str, Any] = {
        "trace": ConvergenceTrace(pairs, last.value),
        "skipped": skipped,
        "schedule": list(schedule.n_values),
        "degree_cap": schedule.degree_cap,
        "error_bound_kind": "empirical spread of the final three estimates",
    }
    if F.is_integral():
        try:
            detail["zero_heuristic"] = zero_certificate(last_spec, last)
        except InconclusiveCertificate:
            detail["zero_heuristic"] = None
    return MeasureResult(last.value, err, "lawton", detail)


def _companion_roots(C: np.ndarray) -> np.ndarray | None:
    """Batched companion-matrix eigenvalues as Aberth starting points."""
    B, t = C.shape
    d = t - 1
    if d < 2 or d > 64:
        return None
    M = np.zeros((B, d, d), dtype=complex)
    M[:, np.arange(1, d), np.arange(d - 1)] = 1
    M[:, :, -1] = -C[:, :d] / C[:, d : d + 1]
    Z = np.linalg.eigvals(M)
    return Z if np.all(np.isfinite(Z)) else None


def _reciprocal(P, x, y):
    from sympy import Poly, ZZ

    dx, dy = P.degree(x), P.degree(y)
    return Poly.from_dict({(dx - i, dy - j): c for (i, j), c in P.as_dict().items()}, x, y, domain=ZZ)


def torus_breakpoints(F: LaurentPoly) -> list[float]:
    """Angles ``t1`` where ``F(e^{2 pi i t1}, .)`` may gain or lose a root on
    the unit circle, for integer ``F`` in two variables.

    Candidates are the unit-circle roots of ``Res_y(Q, Q*)`` with ``Q`` the
    part of ``F`` coprime to its reciprocal ``F*``, of the discriminant of
    the square-free part of ``F`` in ``y``, and of its leading and trailing
    coefficients.  Extra candidates only add panel endpoints.
    """
    from sympy import Poly, ZZ, discriminant, resultant, symbols

    if F.k != 2 or not F.is_integral():
        return []
    x, y = symbols("x y")
    shifted, _ = F.monomial_normalized()
    P = Poly.from_dict(dict(shifted.items()), x, y, domain=ZZ)
    sq = P.sqf_part()
    by_y = sq.as_poly(y)
    polys = [Poly(by_y.LC(), x, domain=ZZ), Poly(by_y.TC(), x, domain=ZZ)]
    Q = P.quo(P.gcd(_reciprocal(P, x, y)))
    if Q.degree(y) > 0:
        polys.append(Poly(resultant(Q.as_expr(), _reciprocal(Q, x, y).as_expr(), y), x, domain=ZZ))
    if sq.degree(y) > 1:
        polys.append(Poly(discriminant(sq.as_expr(), y), x, domain=ZZ))
    out: set[float] = set()
    for R in polys:
        if R.is_zero or R.degree() < 1:
            continue
        for f, _ in R.sqf_list()[1]:
            if f.degree() < 1:
                continue
            for z in np.roots([complex(c) for c in f.all_coeffs()]):
                if abs(abs(z) - 1) < 1e-7:
                    out.add(float(np.mod(np.angle(z) / (2 * np.pi), 1.0)))
    merged: list[float] = []
    for t in sorted(out):
        if t < 1e-12 or t > 1 - 1e-12:
            continue
        if not merged or t - merged[-1] > 1e-12:
            merged.append(t)
    return merged


def _inner_measures(F: LaurentPoly, t: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Inner measures ``m(F(e^{2 pi i t}, .))`` for an array of ``t``.

    Returns values, error bounds and a mask of usable nodes (False where
    the inner polynomial vanishes identically).
    """
    t = np.asarray(t, dtype=float)
    b_exps = [e[1] for e in F.exponents()]
    b_lo, b_hi = min(b_exps), max(b_exps)
    width = b_hi - b_lo + 1
    Q = np.zeros((len(t), width), dtype=complex)
    for (a, b), c in F.items():
        Q[:, b - b_lo] += complex(c) * np.exp(2j * np.pi * np.mod(a * t, 1.0))
    mags = np.abs(Q)
    scale = mags.max(axis=1, keepdims=True)
    live = mags > 1e-13 * np.maximum(scale, 1e-300)
    usable = live.any(axis=1)
    vals = np.zeros(len(t))
    errs = np.zeros(len(t))
    lo = np.where(usable, live.argmax(axis=1), 0)
    hi = np.where(usable, width - 1 - live[:, ::-1].argmax(axis=1), 0)
    groups: dict[tuple[int, int], list[int]] = {}
    for i in np.nonzero(usable)[0]:
        groups.setdefault((int(lo[i]), int(hi[i])), []).append(int(i))
    for (l, h), idx in groups.items():
        idx = np.array(idx)
        lead = np.abs(Q[idx, h])
        if h == l:
            vals[idx] = np.log(lead)
            continue
        C = Q[idx, l : h + 1].copy()
        C[np.abs(C) <= 1e-13 * scale[idx]] = 0
        res = roots_batch(np.arange(h - l + 1), C, start=_companion_roots(C))
        mod = np.abs(res.roots)
        vals[idx] = np.log(lead) + np.log(np.maximum(1, mod)).sum(axis=1)
        errs[idx] = (
            np.log(np.maximum(1, mod + res.bounds)) - np.log(np.maximum(1, mod - res.bounds))
        ).sum(axis=1)
    return vals, errs, usable


def _uniform_rule(F: LaurentPoly, nodes: int) -> tuple[float, float, dict]:
    """Mean over ``t = i / nodes``; error from the rule on every other node."""
    N = nodes
    vals, errs, usable = _inner_measures(F, np.arange(N) / N)
    if not usable.any():
        raise ZeroPolynomialError("inner polynomial vanishes at every node")
    full = float(np.mean(vals[usable]))
    if N % 2 == 0:
        half_vals = vals[::2][usable[::2]]
    else:
        hv, _, hu = _inner_measures(F, np.arange(N // 2) / (N // 2))
        half_vals = hv[hu]
    half = float(np.mean(half_vals)) if len(half_vals) else full
    err = abs(full - half) + float(np.mean(errs[usable]))
    return full, err, {
        "rule": "uniform",
        "nodes": N,
        "skipped_nodes": int((~usable).sum()),
        "half_nodes_value": half,
    }


_DE_XMAX = 3.0
_DE_MAX_LEVEL = 6


@functools.lru_cache(maxsize=None)
def _de_level(level: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, float]:
    """New tanh-sinh nodes of a level: distances from both ends (in units of
    the half-width) and weights.  Level 0 has step 1/2; each further level
    halves the step and adds the odd multiples."""
    h = 0.5 / 2**level
    K = int(_DE_XMAX / h)
    k = np.arange(-K, K + 1)
    if level:
        k = k[k % 2 == 1]
    x = k * h
    s = np.pi / 2 * np.sinh(x)
    left = 2 / (1 + np.exp(-2 * s))
    right = 2 / (1 + np.exp(2 * s))
    w = np.pi / 2 * np.cosh(x) * 4 / (np.exp(s) + np.exp(-s)) ** 2
    return left, right, w, h


def _adaptive_rule(
    F: LaurentPoly, tol: float = 1e-10, max_depth: int = 40, max_evals: int = 2_000_000
) -> tuple[float, float, dict]:
    """Tanh-sinh quadrature on panels of ``[0, 1]``.

    The outer integrand is smooth away from the finitely many ``t`` where an
    inner root meets the unit circle, with at worst algebraic or logarithmic
    behaviour there.  For integer ``F`` those points become panel edges (see
    :func:`torus_breakpoints`) and tanh-sinh absorbs the endpoint
    behaviour.  A panel is accepted once two successive step halvings agree
    to ``tol`` times its width; panels that do not settle by the finest
    level are bisected, which also locates singular points that were not
    predicted.  Nodes where the inner polynomial vanishes get weight 0.
    """
    edges = [0.0, *torus_breakpoints(F), 1.0]
    panels = []
    for lo, hi in zip(edges, edges[1:]):
        pieces = max(1, math.ceil((hi - lo) * 4))
        cuts = np.linspace(lo, hi, pieces + 1)
        panels.extend((float(x), float(y), 0) for x, y in zip(cuts[:-1], cuts[1:]))
    # per panel: (a, b, depth, level, running sum, previous estimate)
    active = [[a_, b_, d, 0, 0.0, None] for a_, b_, d in panels]
    value = err = root_err = 0.0
    evals = accepted = skipped = 0
    while active:
        ts, spans, offset = [], [], 0
        for p in active:
            a_, b_, lev = p[0], p[1], p[3]
            left, right, _, _ = _de_level(lev)
            half = (b_ - a_) / 2
            t = np.where(left <= right, a_ + half * left, b_ - half * right)
            spans.append((offset, len(t)))
            offset += len(t)
            ts.append(t)
        vals, errs, ok = _inner_measures(F, np.concatenate(ts))
        evals += len(vals)
        vals = np.where(ok, vals, 0.0)
        nxt = []
        for p, (start, n) in zip(active, spans):
            a_, b_, depth, lev = p[0], p[1], p[2], p[3]
            _, _, w, h = _de_level(lev)
            half = (b_ - a_) / 2
            p[4] += float(np.dot(w, vals[start : start + n]))
            est = half * h * p[4]
            rerr = half * h * float(np.dot(w, errs[start : start + n]))
            skipped += int((~ok[start : start + n]).sum())
            prev = p[5]
            if prev is not None and lev >= 2 and abs(est - prev) <= tol * (b_ - a_):
                value += est
                err += abs(est - prev)
                root_err += rerr
                accepted += 1
            elif lev < _DE_MAX_LEVEL and evals < max_evals:
                p[3] += 1
                p[5] = est
                nxt.append(p)
            elif depth < max_depth and evals < max_evals:
                m = (a_ + b_) / 2
                nxt.append([a_, m, depth + 1, 0, 0.0, None])
                nxt.append([m, b_, depth + 1, 0, 0.0, None])
            else:
                value += est
                err += abs(est - prev) if prev is not None else abs(est)
                root_err += rerr
                accepted += 1
        active = nxt
    return value, err + root_err, {
        "rule": "adaptive",
        "breakpoints": len(edges) - 2,
        "panels": accepted,
        "evaluations": evals,
        "panel_tolerance": tol,
        "vanishing_nodes": skipped,
    }


def jensen_2d(F: LaurentPoly, nodes: int = 2048, rule: str = "uniform") -> MeasureResult:
    """Iterated Jensen formula for two variables.

    Inner: one-variable measure in ``z2`` with complex coefficients.  Outer
    rule ``"uniform"``: mean over ``t1 = i / nodes``, error bound from the
    difference against every other node.  Outer rule ``"adaptive"``: tanh-sinh
    panels split at the torus breakpoints (``nodes`` is ignored), error bound
    from the accepted panel differences.  Both add the root errors.

    For integer ``F`` the factors that depend on a single monomial are split
    off and measured exactly, so the outer integrand never carries their
    logarithmic singularities.
    """
    if rule not in ("uniform", "adaptive"):
        raise ValueError(f"unknown outer rule {rule!r}")
    if F.k != 2:
        raise ValueError(f"jensen_2d needs exactly two variables, got {F.k}")
    if F.is_zero():
        raise ZeroPolynomialError()
    if nodes < 2:
        raise ValueError("nodes must be at least 2")
    if F.is_constant():
        return MeasureResult(math.log(abs(F.constant_value())), 0.0, "jensen2d", {"rule": rule})
    exact_value, exact_err = 0.0, 0.0
    split: list[str] = []
    rest = F
    if F.is_integral():
        content, facs = _factor_integral(F)
        exact_value = math.log(abs(content))
        rest = LaurentPoly.constant(1, 2)
        for g, m in facs:
            G = intrinsic_form(g)
            if G.k <= 1:
                r = measure_uni(G, graeffe=False) if G.k == 1 else None
                v = r.value if r else math.log(abs(G.constant_value()))
                exact_value += m * v
                exact_err += m * (r.error_bound if r else 0.0)
                split.append(str(g))
            else:
                rest = rest * g**m
    if rest.is_constant():
        value, err, detail = math.log(abs(rest.constant_value())), 0.0, {"rule": rule}
    elif rule == "uniform":
        value, err, detail = _uniform_rule(rest, nodes)
    else:
        value, err, detail = _adaptive_rule(rest)
    detail["split_factors"] = split
    return MeasureResult(value + exact_value, err + exact_err, "jensen2d", detail)


def _kronecker_direction(k: int) -> np.ndarray:
    # generalised golden ratio: the real root of x^(k+1) = x + 1
    phi = 2.0
    for _ in range(60):
        phi = (1 + phi) ** (1.0 / (k + 1))
    return np.mod(1.0 / phi ** np.arange(1, k + 1), 1.0)


def qmc_estimate(F: LaurentPoly, samples: int = 4096, seed: int = 0) -> MeasureResult:
    """Mean of ``log|F|`` on randomly shifted Kronecker points.

    Each of eight seeded uniform shifts gives an unbiased estimate.  The
    error bound is the two-sided 99.9% Student-t interval of their mean
    (the plain standard error is kept in ``detail``), because the value can
    sit exactly on a bracket edge and a one-sigma bar would miss it half the
    time.  A sanity estimator: the logarithmic singularities slow
    convergence.
    """
    if F.is_zero():
        raise ZeroPolynomialError()
    if samples < 1:
        raise ValueError("samples must be positive")
    if F.k == 0 or F.is_constant():
        v = math.log(abs(F.constant_value()))
        return MeasureResult(v, 0.0, "qmc", {"samples": samples, "seed": seed, "shifts": 0})
    rng = np.random.default_rng(seed)
    alpha = _kronecker_direction(F.k)
    base = np.outer(np.arange(samples), alpha)
    means = []
    skipped = 0
    for _ in range(QMC_SHIFTS):
        pts = np.mod(base + rng.random(F.k), 1.0)
        vals = np.abs(evaluate_many(F, pts))
        ok = vals > 0
        skipped += int((~ok).sum())
        means.append(float(np.mean(np.log(vals[ok]))) if ok.any() else 0.0)
    total = samples * QMC_SHIFTS
    if skipped > 1e-3 * total:
        raise ValueError(f"{skipped} of {total} sample points hit a zero of F")
    means = np.array(means)
    se = float(np.std(means, ddof=1) / math.sqrt(QMC_SHIFTS))
    quantile = float(student_t.ppf(0.9995, QMC_SHIFTS - 1))
    return MeasureResult(
        float(means.mean()),
        quantile * se,
        "qmc",
        {
            "samples": samples,
            "seed": seed,
            "shifts": QMC_SHIFTS,
            "skipped": skipped,
            "standard_error": se,
            "error_bound_kind": "99.9% Student-t interval over the shifts",
        },
    )


# ---------------------------------------------------------------------------
# dispatch

def _combine(parts: list[tuple[MeasureResult, int]], content: int) -> MeasureResult:
    order = ["bounds-forced", "roots", "jensen2d", "lawton", "qmc"]
    value = math.log(abs(content)) + math.fsum(m * r.value for r, m in parts)
    err = math.fsum(m * r.error_bound for r, m in parts)
    method = max((r.method for r, _ in parts), key=order.index, default="bounds-forced")
    detail: dict[str, Any] = {
        "content": content,
        "factors": [{"multiplicity": m, **r.to_json()} for r, m in parts],
    }
    certs = [r.detail.get("zero_certified") for r, _ in parts]
    if abs(content) == 1 and all(c is True for c in certs):
        detail["zero_certified"] = True
    elif any(c is False for c in certs) or abs(content) != 1:
        detail["zero_certified"] = False
    else:
        detail["zero_certified"] = None
    heur = [r.detail.get("zero_heuristic") for r, _ in parts if "zero_heuristic" in r.detail]
    if heur:
        detail["zero_heuristic"] = all(h is True for h in heur)
    return MeasureResult(value, err, method, detail)


def _forced(c) -> MeasureResult:
    detail = {"zero_certified": abs(c) == 1} if isinstance(c, int) else {}
    return MeasureResult(math.log(abs(c)), 0.0, "bounds-forced", detail)


@functools.lru_cache(maxsize=8192)
def _measure_reduced(G: LaurentPoly, config: MeasureConfig) -> MeasureResult:
    """Measure of a polynomial already in intrinsic form."""
    if G.k == 0:
        return _forced(G.constant_value())
    if G.k == 1:
        if len(G) == 1:
            return _forced(G.coefficients()[0])
        r = measure_uni(G, graeffe=False)
        if G.is_integral():
            try:
                r.detail["zero_certified"] = zero_certificate(G, r)
            except InconclusiveCertificate:
                r.detail["zero_certified"] = None
        return r
    if G.is_integral():
        content, facs = _factor_integral(G)
        if len(facs) > 1 or facs[0][1] > 1 or abs(content) != 1:
            parts = [(_measure_poly(g, config), m) for g, m in facs]
            return _combine(parts, content)
    lin = _simplex_linear_form(G)
    if lin is not None and lin != G:
        r = copy.deepcopy(_measure_reduced(lin, config))
        r.detail["linear_form"] = str(lin)
        return r
    if G.k == 2:
        r = jensen_2d(G, config.nodes, config.jensen_rule)
        if config.cross_check:
            lw = lawton_estimate(G, config.lawton)
            r.detail["lawton_cross_check"] = lw.value
            r.detail["cross_check_gap"] = abs(lw.value - r.value)
            if "zero_heuristic" in lw.detail:
                r.detail["zero_heuristic"] = lw.detail["zero_heuristic"]
        return r
    return lawton_estimate(G, config.lawton)


def _measure_poly(F: LaurentPoly, config: MeasureConfig) -> MeasureResult:
    return copy.deepcopy(_measure_reduced(canonical_form(intrinsic_form(F)), config))


def measure(F: LaurentPoly, config: MeasureConfig | None = None) -> MeasureResult:
    """``m(F)`` for any nonzero Laurent polynomial, via exact reduction and dispatch."""
    config = config or MeasureConfig()
    if F.is_zero():
        raise ZeroPolynomialError()
    r = _measure_poly(F, config)
    r.detail["intrinsic_variables"] = intrinsic_form(F).k
    r.detail["config"] = config.to_json()
    return r


def measure_of_family_member(
    F: LaurentPoly, A: IntMatrix, config: MeasureConfig | None = None
) -> MeasureResult:
    """``m(F_A)`` computed as ``m(F_H)`` with ``H`` the SHNF of ``A``."""
    config = config or MeasureConfig()
    if A.cols != F.k:
        raise ValueError(f"matrix has {A.cols} columns but the polynomial has {F.k} variables")
    H = shnf(A).H
    G = substitute(F, H)
    if G.is_zero():
        raise ZeroPolynomialError("F_A is the zero polynomial and has no Mahler measure")
    r = measure(G, config)
    r.detail["H"] = H.to_json()
    return r
