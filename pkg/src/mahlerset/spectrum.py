"""Finite samples of the measure set M(F) and the related constructions.

``M(F)`` is the set of all ``m(F_A)`` with ``F_A != 0``; every such value is
``m(F_H)`` for a matrix ``H`` in saturated Hermite normal form, so bounded
SHNF enumeration gives a monotone exhaustion of the set.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .laurent import LaurentPoly, ZeroPolynomialError, length, substitute
from .lattice import IntMatrix, enumerate_shnf
from .measure_multi import MeasureConfig, measure
from .measure_uni import MeasureResult

__all__ = [
    "SpectrumSample",
    "SignedPartition",
    "sample_measure_set",
    "dedup_values",
    "lehmer_element",
    "max_element",
    "linear_form_F_n",
    "embed_in_linear_form",
    "mb_generators",
    "cyclotomic_fixture",
    "mignotte_bound",
]


@dataclass
class SpectrumSample:
    """Height-``h`` exhaustion of ``M(F)``; no completeness claim is made."""

    F: LaurentPoly
    height: int
    entries: list[tuple[IntMatrix, MeasureResult]]
    distinct_values: list[float]
    tolerance: float = 1e-7
    config: MeasureConfig = field(default_factory=MeasureConfig)
    skipped: int = 0

    def to_json(self) -> dict:
        return {
            "polynomial": self.F.to_json(),
            "polynomial_text": str(self.F),
            "height": self.height,
            "label": f"height-{self.height} exhaustion",
            "tolerance": self.tolerance,
            "config": self.config.to_json(),
            "skipped_zero": self.skipped,
            "entries": [{"H": H.to_json(), "result": r.to_json()} for H, r in self.entries],
            "distinct_values": list(self.distinct_values),
        }


def dedup_values(values: Sequence[float], tol: float) -> list[float]:
    """Sorted values with neighbours closer than ``tol`` merged into the first."""
    out: list[float] = []
    for v in sorted(values):
        if not out or v - out[-1] > tol:
            out.append(v)
    return out


def sample_measure_set(
    F: LaurentPoly,
    height: int,
    config: MeasureConfig | None = None,
    ranks: Sequence[int] | None = None,
) -> SpectrumSample:
    """Measures ``m(F_H)`` over every SHNF matrix ``H`` with entries bounded by ``height``.

    Ranks run from 0 to ``F.k`` (or only ``ranks`` if given) and matrices come
    in :func:`enumerate_shnf` order, so partial runs are reproducible prefixes.
    Matrices with ``F_H == 0`` are skipped and counted.
    """
    config = config or MeasureConfig()
    if F.is_zero():
        raise ZeroPolynomialError()
    if height < 1:
        raise ValueError("height must be positive")
    ranks = range(F.k + 1) if ranks is None else sorted(set(ranks))
    entries: list[tuple[IntMatrix, MeasureResult]] = []
    skipped = 0
    for ell in ranks:
        if not 0 <= ell <= F.k:
            raise ValueError(f"rank {ell} outside [0, {F.k}]")
        for H in enumerate_shnf(F.k, ell, height):
            G = substitute(F, H)
            if G.is_zero():
                skipped += 1
                continue
            r = measure(G, config)
            r.detail.pop("config", None)
            r.detail["H"] = H.to_json()
            entries.append((H, r))
    values = dedup_values([r.value for _, r in entries], config.tolerance)
    return SpectrumSample(F, height, entries, values, config.tolerance, config, skipped)


def lehmer_element(sample: SpectrumSample) -> float | None:
    """Smallest sampled value above the dedup tolerance, or None."""
    pos = [v for v in sample.distinct_values if v > sample.tolerance]
    return min(pos) if pos else None


def max_element(sample: SpectrumSample) -> float:
    """Largest sampled value: a lower bound for the maximum of ``M(F)``."""
    if not sample.distinct_values:
        raise ValueError("empty sample has no maximal element")
    return max(sample.distinct_values)


def mignotte_bound(F: LaurentPoly) -> float:
    """``log 2 / (2 length(F))``, below which no positive element of ``M(F)`` lies."""
    return math.log(2) / (2 * length(F))


def linear_form_F_n(n: int) -> LaurentPoly:
    """``z1 + z3 + ... + z_{2n-1} - (z2 + z4 + ... + z_{2n})``."""
    if n < 1:
        raise ValueError("n must be positive")
    k = 2 * n
    return LaurentPoly(k, [(tuple(int(j == i) for j in range(k)), 1 if i % 2 == 0 else -1) for i in range(k)])


def embed_in_linear_form(F: LaurentPoly) -> tuple[int, IntMatrix]:
    """``(n, A)`` with ``substitute(linear_form_F_n(n), A) == (z1 - 1) * F``.

    Each exponent ``j`` of ``G = (z1 - 1) F`` contributes ``|c(j)|`` columns
    equal to ``j``: positive coefficients fill the odd positions and negative
    ones the even positions, both in decreasing exponent order.  ``G(1,...,1)
    = 0`` makes the two counts agree.
    """
    if F.is_zero():
        raise ZeroPolynomialError()
    if not F.is_integral():
        raise ValueError("embedding needs integer coefficients")
    if F.k == 0:
        F = LaurentPoly(1, {(0,): F.constant_value()})
    k = F.k
    z1 = LaurentPoly(k, {tuple(int(i == 0) for i in range(k)): 1, (0,) * k: -1})
    G = z1 * F
    pos, neg = [], []
    for e, c in sorted(G.items(), reverse=True):
        (pos if c > 0 else neg).extend([e] * abs(c))
    assert len(pos) == len(neg)
    n = len(pos)
    cols = [col for pair in zip(pos, neg) for col in pair]
    A = IntMatrix(k, 2 * n, tuple(tuple(col[i] for col in cols) for i in range(k)))
    assert substitute(linear_form_F_n(n), A) == G
    return n, A


@dataclass(frozen=True)
class SignedPartition:
    """Nonzero parts with nondecreasing moduli."""

    c: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.c or any(x == 0 for x in self.c):
            raise ValueError("parts must be nonzero")
        if any(abs(a) > abs(b) for a, b in zip(self.c, self.c[1:])):
            raise ValueError("moduli must be nondecreasing")

    @property
    def b(self) -> int:
        return sum(abs(x) for x in self.c)

    def form(self) -> LaurentPoly:
        t = len(self.c)
        return LaurentPoly(t, [(tuple(int(i == j) for j in range(t)), x) for i, x in enumerate(self.c)])


def _partitions(b: int, t: int, least: int = 1) -> Iterator[tuple[int, ...]]:
    """Partitions of ``b`` into ``t`` nondecreasing parts, each at least ``least``."""
    if t == 1:
        if b >= least:
            yield (b,)
        return
    for first in range(least, b // t + 1):
        for rest in _partitions(b - first, t - 1, first):
            yield (first,) + rest


def mb_generators(B: int) -> list[tuple[SignedPartition, LaurentPoly]]:
    """All signed partitions of ``b <= B`` with their linear forms.

    Ordered by ``b``, then number of parts, then moduli, then sign pattern
    (plus before minus).  All sign patterns are kept.
    """
    if B < 1:
        raise ValueError("B must be positive")
    out = []
    for b in range(1, B + 1):
        for t in range(1, b + 1):
            for parts in _partitions(b, t):
                for signs in itertools.product((1, -1), repeat=t):
                    sp = SignedPartition(tuple(s * p for s, p in zip(signs, parts)))
                    out.append((sp, sp.form()))
    return out


# Phi_n(1) = 1 unless n is a prime power (then it is p) or n = 1 (then 0)
_FIXTURE_ORDERS = (1, 6, 10, 12, 14, 15, 18, 20, 21)


def cyclotomic_fixture(k: int, rng: random.Random, factors: int = 2, max_exp: int = 2) -> LaurentPoly:
    """Random ``±z^j * prod Phi_n(z^a)``: an integer polynomial whose
    specialisations all have measure 0.

    Orders ``n`` avoid prime powers so that collapsing ``z^a`` to 1 gives
    ``Phi_n(1) = 1`` (or 0) rather than a prime.
    """
    from sympy import Poly, Symbol, cyclotomic_poly

    x = Symbol("x")
    F = LaurentPoly(k, {tuple(rng.randint(-max_exp, max_exp) for _ in range(k)): rng.choice((1, -1))})
    for _ in range(factors):
        a = (0,) * k
        while not any(a):
            a = tuple(rng.randint(-max_exp, max_exp) for _ in range(k))
        n = rng.choice(_FIXTURE_ORDERS)
        coeffs = Poly(cyclotomic_poly(n, x), x).all_coeffs()[::-1]
        F = F * LaurentPoly(k, [(tuple(d * ai for ai in a), int(c)) for d, c in enumerate(coeffs)])
    return F
