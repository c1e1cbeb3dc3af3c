"""One-variable Mahler measure from the roots.

``m(f) = log|a| + sum log max(1, |alpha_i|)``.  Roots come from a batched
Aberth-Ehrlich iteration whose polynomial evaluation is done term-by-term in
a rescaled logarithmic form, so sparse polynomials of degree several
thousand neither overflow nor cost a dense Horner pass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
from sympy import ZZ, Poly, Symbol

from .laurent import Coefficient, LaurentPoly, ZeroPolynomialError

__all__ = [
    "UniPoly",
    "MeasureResult",
    "RootsResult",
    "NonConvergenceError",
    "InconclusiveCertificate",
    "roots",
    "roots_batch",
    "measure_uni",
    "zero_certificate",
    "graeffe_bracket",
    "squarefree_parts",
    "mignotte_threshold",
]

ROOT_TOL = 1e-13
MAX_ITER = 400
_Z = Symbol("z")


class NonConvergenceError(RuntimeError):
    def __init__(self, message: str, best: "RootsResult"):
        super().__init__(message)
        self.best = best


class InconclusiveCertificate(RuntimeError):
    """The error interval straddles the Mignotte threshold."""


@dataclass(frozen=True)
class UniPoly:
    """``z^offset * sum coeffs[i] z^i`` with nonzero first and last coefficient."""

    coeffs: tuple[Coefficient, ...]
    offset: int = 0

    def __post_init__(self) -> None:
        cs = list(self.coeffs)
        lo = 0
        while lo < len(cs) and cs[lo] == 0:
            lo += 1
        hi = len(cs)
        while hi > lo and cs[hi - 1] == 0:
            hi -= 1
        if lo == hi:
            raise ZeroPolynomialError()
        norm = []
        for c in cs[lo:hi]:
            if isinstance(c, (int, np.integer)) and not isinstance(c, bool):
                norm.append(int(c))
            else:
                c = complex(c)
                norm.append(c)
        object.__setattr__(self, "coeffs", tuple(norm))
        object.__setattr__(self, "offset", int(self.offset) + lo)

    @classmethod
    def from_laurent(cls, F: LaurentPoly) -> UniPoly:
        if F.k == 0:
            return cls((F.constant_value(),))
        dense, lo = F.univariate()
        return cls(tuple(dense), lo)

    @classmethod
    def coerce(cls, f) -> UniPoly:
        if isinstance(f, UniPoly):
            return f
        if isinstance(f, LaurentPoly):
            return cls.from_laurent(f)
        return cls(tuple(f))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Coefficient:
        return self.coeffs[-1]

    def is_integral(self) -> bool:
        return all(isinstance(c, int) for c in self.coeffs)

    def length(self) -> float | int:
        if self.is_integral():
            return sum(abs(c) for c in self.coeffs)
        return math.fsum(abs(c) for c in self.coeffs)

    def support(self) -> tuple[np.ndarray, np.ndarray]:
        """Exponents (relative to the offset) and coefficients of nonzero terms."""
        e = np.array([i for i, c in enumerate(self.coeffs) if c != 0], dtype=float)
        c = np.array([complex(c) for c in self.coeffs if c != 0])
        return e, c

    def to_laurent(self) -> LaurentPoly:
        return LaurentPoly(1, {(i + self.offset,): c for i, c in enumerate(self.coeffs)})


@dataclass
class MeasureResult:
    value: float
    error_bound: float
    method: str
    detail: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "error_bound": self.error_bound,
            "method": self.method,
            "detail": _jsonable(self.detail),
        }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if hasattr(obj, "to_json"):
        return obj.to_json()
    return obj


@dataclass
class RootsResult:
    roots: np.ndarray
    bounds: np.ndarray
    iterations: int
    converged: bool


# ---------------------------------------------------------------------------
# Aberth-Ehrlich

def _newton_ratio(Z: np.ndarray, exps: np.ndarray, C: np.ndarray) -> np.ndarray:
    """``p(z)/p'(z)`` for each root estimate.

    ``Z``: (B, m) points; ``exps``: (t,) exponents; ``C``: (B, t) coefficients.
    Terms are formed as ``exp(e log z + log c - s)`` with ``s`` the largest
    real part, which keeps everything finite at any modulus.
    """
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        logz = np.log(Z)[..., None]
        logc = np.log(np.where(C == 0, 1.0, C))[:, None, :]
        X = exps[None, None, :] * logz + logc
        X = np.where((C == 0)[:, None, :], -np.inf, X)
        s = np.max(X.real, axis=-1, keepdims=True)
        T = np.exp(X - s)
        p = T.sum(axis=-1)
        dp = (T * exps).sum(axis=-1)
        ratio = Z * p / dp
    bad = ~np.isfinite(ratio)
    if bad.any():
        ratio = np.where(bad, 1e-3 * (1 + np.abs(Z)), ratio)
    return ratio


def _pair_sums(Z: np.ndarray, idx_b: np.ndarray, idx_r: np.ndarray) -> np.ndarray:
    """``sum_{j != i} 1/(z_i - z_j)`` for the selected (batch, root) pairs.

    Works in real arithmetic: ``1/d = conj(d)/|d|^2``.  Exactly coincident
    estimates give a non-finite sum; the caller then takes a Newton step.
    """
    out = np.empty(len(idx_b), dtype=complex)
    m = Z.shape[1]
    X, Y = Z.real, Z.imag
    chunk = max(1, 1_000_000 // max(m, 1))
    with np.errstate(divide="ignore", invalid="ignore"):
        for s in range(0, len(idx_b), chunk):
            b = idx_b[s : s + chunk]
            r = idx_r[s : s + chunk]
            dx = X[b, r][:, None] - X[b]
            dy = Y[b, r][:, None] - Y[b]
            q = dx * dx
            q += dy * dy
            q[np.arange(len(b)), r] = np.inf
            np.reciprocal(q, out=q)
            out[s : s + chunk].real = np.einsum("ij,ij->i", dx, q)
            out[s : s + chunk].imag = -np.einsum("ij,ij->i", dy, q)
    return out


def roots_batch(
    exps: Sequence[int],
    C: np.ndarray,
    tol: float = ROOT_TOL,
    max_iter: int = MAX_ITER,
    start: np.ndarray | None = None,
) -> RootsResult:
    """Simultaneous Aberth iteration for a batch of polynomials sharing support.

    ``exps`` are increasing nonnegative exponents starting at 0; ``C`` has
    shape (B, t) and nonzero first/last columns.  Returns roots (B, d) and
    per-root a-posteriori bounds ``|p/p'|`` (inflated on stagnating clusters).
    ``start`` optionally replaces the default circle of initial estimates.
    """
    exps = np.asarray(exps, dtype=float)
    C = np.atleast_2d(np.asarray(C, dtype=complex))
    B = C.shape[0]
    d = int(exps[-1])
    if d < 1:
        raise ValueError("root finding needs degree >= 1")
    if exps[0] != 0:
        raise ValueError("exponents must start at 0")
    radius = np.abs(C[:, 0] / C[:, -1]) ** (1.0 / d)
    angles = 2 * np.pi * np.arange(d) / d + 0.7 / d + 0.25
    Z = radius[:, None] * np.exp(1j * angles)[None, :]
    Z = Z * (1 + 1e-3 * np.cos(3.1 * np.arange(d)))[None, :]
    if d == 1:
        Z = (-C[:, 0] / C[:, -1])[:, None].astype(complex)
    elif start is not None:
        Z = np.array(start, dtype=complex).reshape(B, d)
        # coincident starts would stall the pair sums
        Z = Z * (1 + 1e-12 * np.arange(d))[None, :]
    active = np.ones((B, d), dtype=bool)
    best = np.full((B, d), np.inf)
    stale = np.zeros((B, d), dtype=int)
    ratio = np.zeros((B, d), dtype=complex)
    it = 0
    for it in range(1, max_iter + 1):
        ib, ir = np.nonzero(active)
        if len(ib) == 0:
            break
        # evaluate only rows that still have active roots
        rows = np.unique(ib)
        R = _newton_ratio(Z[rows], exps, C[rows])
        ratio[rows] = np.where(active[rows], R, ratio[rows])
        mag = np.abs(ratio)
        done = active & (mag < tol * (1 + np.abs(Z)))
        improved = mag < 0.5 * best
        best = np.where(active & improved, mag, best)
        stale = np.where(active & ~improved, stale + 1, 0)
        stuck = active & (stale >= 8) & (it > 20) & (mag < 1e-3 * (1 + np.abs(Z)))
        active &= ~(done | stuck)
        ib, ir = np.nonzero(active)
        if len(ib) == 0:
            break
        N = ratio[ib, ir]
        S = _pair_sums(Z, ib, ir)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            w = N / (1 - N * S)
        w = np.where(np.isfinite(w), w, N)
        Z[ib, ir] -= w
    final = np.abs(_newton_ratio(Z, exps, C))
    converged = bool(np.all(final < tol * (1 + np.abs(Z)) * 10))
    bounds = _cluster_bounds(Z, final, tol)
    return RootsResult(Z, bounds, it, converged)


def _cluster_bounds(Z: np.ndarray, mag: np.ndarray, tol: float) -> np.ndarray:
    """Inflate ``|p/p'|`` for unconverged roots by their cluster size and spread."""
    out = mag.copy()
    loose = np.nonzero(mag >= tol * (1 + np.abs(Z)))
    for b, i in zip(*loose):
        reach = max(50 * mag[b, i], 1e-12)
        near = np.abs(Z[b] - Z[b, i]) <= reach
        spread = np.max(np.abs(Z[b][near] - Z[b, i]))
        out[b, i] = near.sum() * np.max(mag[b][near]) + spread
    return out


def roots(f, tol: float = ROOT_TOL, max_iter: int = MAX_ITER, strict: bool = False) -> RootsResult:
    """All roots of ``f`` (with multiplicity) and their a-posteriori bounds.

    With ``strict=True`` a run that does not reach ``tol`` raises
    :class:`NonConvergenceError` carrying the best result.
    """
    f = UniPoly.coerce(f)
    if f.degree < 1:
        raise ValueError("root finding needs degree >= 1 after removing the Laurent offset")
    e, c = f.support()
    res = roots_batch(e, c[None, :], tol, max_iter)
    out = RootsResult(res.roots[0], res.bounds[0], res.iterations, res.converged)
    if strict and not out.converged:
        raise NonConvergenceError(
            f"root refinement did not reach {tol} after {out.iterations} iterations "
            f"(worst bound {out.bounds.max():.3g})",
            out,
        )
    return out


def _measure_from_roots(lead_abs: float, Z: np.ndarray, bounds: np.ndarray) -> tuple[float, float]:
    mod = np.abs(Z)
    value = math.log(lead_abs) + math.fsum(np.log(np.maximum(1.0, mod)))
    hi = np.log(np.maximum(1.0, mod + bounds))
    lo = np.log(np.maximum(1.0, mod - bounds))
    err = math.fsum(hi - lo)
    return value, err


def _refine_mp(f: UniPoly, Z: np.ndarray, prec: int, max_iter: int = 60) -> tuple[np.ndarray, np.ndarray]:
    """Aberth refinement in ``prec``-bit arithmetic, started from ``Z``."""
    import mpmath

    with mpmath.workprec(prec):
        cs = [mpmath.mpc(c) if not isinstance(c, int) else mpmath.mpf(c) for c in f.coeffs]
        d = f.degree
        zs = [mpmath.mpc(complex(z)) for z in Z]
        tol = mpmath.mpf(2) ** (-(prec - 8))

        def ratio(z):
            p = cs[-1]
            dp = mpmath.mpf(0)
            for c in reversed(cs[:-1]):
                dp = dp * z + p
                p = p * z + c
            return p / dp if dp != 0 else mpmath.mpf(0)

        rs = [ratio(z) for z in zs]
        for _ in range(max_iter):
            if all(abs(r) <= tol * (1 + abs(z)) for r, z in zip(rs, zs)):
                break
            new = []
            for i in range(d):
                s = mpmath.fsum(1 / (zs[i] - zs[j]) for j in range(d) if j != i and zs[i] != zs[j])
                new.append(zs[i] - rs[i] / (1 - rs[i] * s))
            zs = new
            rs = [ratio(z) for z in zs]
        Zr = np.array([complex(z) for z in zs])
        mags = np.array([float(abs(r)) for r in rs])
        # bounds below double resolution survive only as a modulus floor
        mags = np.maximum(mags, float(tol))
    return Zr, _cluster_bounds(Zr[None, :], mags[None, :], float(tol) * 10)[0]


def graeffe_bracket(f, iterations: int = 10) -> tuple[float, float]:
    """Rigorous ``(lower, upper)`` for ``m(f)`` by exact root squaring.

    Integer coefficients only.  After ``k`` squarings ``h`` has measure
    ``M(f)^(2^k)`` and ``||h||_1 / 2^d <= M(h) <= ||h||_1``.
    """
    f = UniPoly.coerce(f)
    if not f.is_integral():
        raise ValueError("graeffe_bracket needs integer coefficients")
    h = list(f.coeffs)
    d = f.degree
    for _ in range(iterations):
        even = h[0::2]
        odd = h[1::2]
        # h(z)h(-z) = E(z^2)^2 - z^2 O(z^2)^2
        e2 = _poly_sq(even)
        o2 = _poly_sq(odd)
        nxt = [0] * (d + 1)
        for i, c in enumerate(e2):
            nxt[i] += c
        for i, c in enumerate(o2):
            nxt[i + 1] -= c
        h = nxt
    norm = sum(abs(c) for c in h)
    scale = 2**iterations
    upper = math.log(norm) / scale
    lower = (math.log(norm) - d * math.log(2)) / scale
    return max(lower, 0.0), upper


def _poly_sq(a: list[int]) -> list[int]:
    if not a:
        return []
    out = [0] * (2 * len(a) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(a):
                out[i + j] += x * y
    return out


def squarefree_parts(f: UniPoly) -> tuple[int, list[tuple[UniPoly, int]]]:
    """Integer content and square-free factors ``(g_i, i)`` with ``f = c * prod g_i^i``."""
    p = Poly(list(reversed(f.coeffs)), _Z, domain=ZZ)
    content, parts = p.sqf_list()
    out = [(UniPoly(tuple(int(c) for c in reversed(g.all_coeffs()))), m) for g, m in parts]
    return int(content), out


def _measure_simple(f: UniPoly, tol: float) -> tuple[float, float, dict]:
    res = roots(f, tol=tol)
    value, err = _measure_from_roots(abs(f.leading), res.roots, res.bounds)
    return value, err, {
        "iterations": res.iterations,
        "converged": res.converged,
        "max_root_bound": float(res.bounds.max()),
    }


def measure_uni(f, tol: float = ROOT_TOL, graeffe: bool = True) -> MeasureResult:
    """Logarithmic Mahler measure of a one-variable (Laurent) polynomial.

    Integer input is first split into square-free parts so that repeated
    roots never reach the iteration.
    """
    f = UniPoly.coerce(f)
    lead = abs(f.leading)
    if f.degree == 0:
        return MeasureResult(math.log(lead), 0.0, "roots", {"degree": 0})
    detail: dict[str, Any] = {"degree": f.degree}
    if f.is_integral():
        content, parts = squarefree_parts(f)
        value, err = math.log(abs(content)), 0.0
        iters, conv, worst = 0, True, 0.0
        for g, mult in parts:
            if g.degree == 0:
                value += mult * math.log(abs(g.leading))
                continue
            v, e, d = _measure_simple(g, tol)
            value += mult * v
            err += mult * e
            iters += d["iterations"]
            conv &= d["converged"]
            worst = max(worst, d["max_root_bound"])
        detail.update(iterations=iters, converged=conv, max_root_bound=worst,
                      squarefree_multiplicities=[m for _, m in parts])
        if graeffe and f.degree <= 64:
            detail["graeffe_bracket"] = list(graeffe_bracket(f))
    else:
        value, err, d = _measure_simple(f, tol)
        detail.update(d)
    return MeasureResult(value, err, "roots", detail)


def _measure_extended(f: UniPoly, prec: int = 106) -> MeasureResult:
    """Re-run the root refinement of every square-free part at ``prec`` bits."""
    content, parts = squarefree_parts(f)
    value, err = math.log(abs(content)), 0.0
    for g, mult in parts:
        if g.degree == 0:
            value += mult * math.log(abs(g.leading))
            continue
        Z, bounds = _refine_mp(g, roots(g).roots, prec=prec)
        v, e = _measure_from_roots(abs(g.leading), Z, bounds)
        value += mult * v
        err += mult * e
    return MeasureResult(value, err, "roots", {"degree": f.degree, "precision_bits": prec})


def mignotte_threshold(length_: float) -> float:
    """``log(2) / (2 B)``: the least positive measure at length ``B``."""
    return math.log(2) / (2 * length_)


def zero_certificate(f, result: MeasureResult | None = None) -> bool:
    """Decide ``m(f) == 0`` for an integer polynomial.

    True when the measure interval lies below the Mignotte threshold, False
    when it is bounded away from 0.  An interval straddling both triggers one
    refinement in doubled precision and then :class:`InconclusiveCertificate`.
    """
    f = UniPoly.coerce(f)
    if not f.is_integral():
        raise ValueError("zero_certificate is defined for integer coefficients only")
    thr = mignotte_threshold(f.length())
    if f.degree == 0:
        return abs(f.leading) == 1
    r = result if result is not None else measure_uni(f, graeffe=False)
    verdict = _verdict(r, thr)
    if verdict is not None:
        return verdict
    r2 = _measure_extended(f)
    verdict = _verdict(r2, thr)
    if verdict is not None:
        return verdict
    raise InconclusiveCertificate(
        f"measure {r2.value:.3g} ± {r2.error_bound:.3g} straddles the threshold {thr:.3g}; "
        "raise root precision"
    )


def _verdict(r: MeasureResult, thr: float) -> bool | None:
    if r.value + r.error_bound < thr:
        return True
    if r.value - r.error_bound > 0:
        return False
    return None
