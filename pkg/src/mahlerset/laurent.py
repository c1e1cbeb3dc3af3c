"""Sparse multivariate Laurent polynomials with exact integer coefficients.

A polynomial in ``k`` variables is a mapping from exponent tuples to nonzero
coefficients.  Coefficients stay Python ints whenever the input is integral;
complex coefficients are carried as Python ``complex``.
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence, Union

import numpy as np

from .lattice import IntMatrix, matrix_rank

Coefficient = Union[int, complex]
Exponent = tuple[int, ...]

__all__ = [
    "LaurentPoly",
    "Polytope",
    "PolySyntaxError",
    "ZeroPolynomialError",
    "parse_poly",
    "substitute",
    "mul",
    "length",
    "evaluate",
    "evaluate_many",
    "exponent_polytope",
    "coefficient_bounds",
]


class PolySyntaxError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


class ZeroPolynomialError(ValueError):
    """Raised where a nonzero polynomial is required."""

    def __init__(self, message: str = "zero polynomial has no Mahler measure"):
        super().__init__(message)


def _norm_coeff(c) -> Coefficient:
    if isinstance(c, (bool, np.bool_)):
        raise TypeError("boolean coefficient")
    if isinstance(c, (int, np.integer)):
        return int(c)
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c)
    c = complex(c)
    if not (math.isfinite(c.real) and math.isfinite(c.imag)):
        raise ValueError("coefficients must be finite")
    return c


class LaurentPoly:
    """Immutable sparse Laurent polynomial in ``k`` variables.

    >>> F = LaurentPoly(2, {(0, 0): 1, (1, 0): 1, (0, 1): 1})
    >>> str(F)
    '1 + z2 + z1'
    """

    __slots__ = ("_k", "_terms", "_hash")

    def __init__(self, k: int, terms: Mapping[Sequence[int], Coefficient] | Iterable = ()):
        if k < 0:
            raise ValueError("variable count must be nonnegative")
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Exponent, Coefficient] = {}
        for e, c in items:
            e = tuple(int(x) for x in e)
            if len(e) != k:
                raise ValueError(f"exponent {e} has length {len(e)}, expected {k}")
            acc[e] = acc.get(e, 0) + _norm_coeff(c)
        self._k = k
        self._terms: tuple[tuple[Exponent, Coefficient], ...] = tuple(
            sorted((e, c) for e, c in acc.items() if c != 0)
        )
        self._hash = None

    # -- construction helpers -------------------------------------------------
    @classmethod
    def constant(cls, c: Coefficient, k: int = 0) -> LaurentPoly:
        return cls(k, {(0,) * k: c})

    @classmethod
    def variable(cls, i: int, k: int) -> LaurentPoly:
        """``z_i`` (1-based) in ``k`` variables."""
        if not 1 <= i <= k:
            raise ValueError(f"variable index {i} out of range 1..{k}")
        return cls(k, {tuple(int(j == i - 1) for j in range(k)): 1})

    @classmethod
    def monomial(cls, exponent: Sequence[int], c: Coefficient = 1) -> LaurentPoly:
        return cls(len(exponent), {tuple(exponent): c})

    # -- basic accessors --------------------------------------------------------
    @property
    def k(self) -> int:
        return self._k

    @property
    def terms(self) -> dict[Exponent, Coefficient]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[Exponent, Coefficient]]:
        return iter(self._terms)

    def exponents(self) -> list[Exponent]:
        return [e for e, _ in self._terms]

    def coefficients(self) -> list[Coefficient]:
        return [c for _, c in self._terms]

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_integral(self) -> bool:
        return all(isinstance(c, int) for _, c in self._terms)

    def is_constant(self) -> bool:
        return all(not any(e) for e, _ in self._terms)

    def constant_value(self) -> Coefficient:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self._terms[0][1] if self._terms else 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self._k == other._k and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._k, self._terms))
        return self._hash

    # -- arithmetic ---------------------------------------------------------------
    def _check(self, other: LaurentPoly) -> None:
        if self._k != other._k:
            raise ValueError(f"variable count mismatch: {self._k} vs {other._k}")

    def __add__(self, other: LaurentPoly) -> LaurentPoly:
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.constant(other, self._k)
        self._check(other)
        return LaurentPoly(self._k, list(self._terms) + list(other._terms))

    __radd__ = __add__

    def __neg__(self) -> LaurentPoly:
        return LaurentPoly(self._k, [(e, -c) for e, c in self._terms])

    def __sub__(self, other: LaurentPoly) -> LaurentPoly:
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.constant(other, self._k)
        return self + (-other)

    def __rsub__(self, other) -> LaurentPoly:
        return (-self) + other

    def __mul__(self, other) -> LaurentPoly:
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.constant(other, self._k)
        return mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> LaurentPoly:
        if n < 0:
            raise ValueError("negative powers are not polynomials")
        out = LaurentPoly.constant(1, self._k)
        for _ in range(n):
            out = out * self
        return out

    # -- structure ------------------------------------------------------------
    def monomial_normalized(self) -> tuple[LaurentPoly, Exponent]:
        """Divide out ``z^v`` with ``v`` the componentwise minimum exponent.

        Returns the normalized polynomial and ``v``; used for display and
        deduplication only (the measure is unchanged).
        """
        if self.is_zero():
            return self, (0,) * self._k
        v = tuple(min(e[i] for e in self.exponents()) for i in range(self._k))
        shifted = [(tuple(a - b for a, b in zip(e, v)), c) for e, c in self._terms]
        return LaurentPoly(self._k, shifted), v

    def univariate(self) -> tuple[list[Coefficient], int]:
        """Dense coefficients (low to high) and the lowest exponent, for ``k == 1``."""
        if self._k != 1:
            raise ValueError("univariate() needs a one-variable polynomial")
        if self.is_zero():
            raise ZeroPolynomialError()
        lo = self._terms[0][0][0]
        hi = self._terms[-1][0][0]
        dense: list[Coefficient] = [0] * (hi - lo + 1)
        for (e,), c in self._terms:
            dense[e - lo] = c
        return dense, lo

    # -- text / json -------------------------------------------------------------
    def __str__(self) -> str:
        return to_text(self)

    def __repr__(self) -> str:
        return f"LaurentPoly({self._k}, {to_text(self)!r})"

    def to_json(self) -> dict:
        terms = []
        for e, c in self._terms:
            terms.append({"e": list(e), "c": c if isinstance(c, int) else [c.real, c.imag]})
        return {"k": self._k, "terms": terms}

    @classmethod
    def from_json(cls, obj: dict) -> LaurentPoly:
        k = int(obj["k"])
        items = []
        for t in obj["terms"]:
            c = t["c"]
            if isinstance(c, list):
                if len(c) != 2:
                    raise ValueError("complex coefficient must be [re, im]")
                c = complex(float(c[0]), float(c[1]))
            elif not isinstance(c, int):
                raise ValueError(f"coefficient {c!r} is neither an integer nor [re, im]")
            items.append((tuple(t["e"]), c))
        return cls(k, items)


@dataclass(frozen=True)
class Polytope:
    vertices: frozenset[Exponent]
    dim: int


# ---------------------------------------------------------------------------
# text form

def _format_coeff(c: Coefficient) -> str:
    if isinstance(c, int):
        return str(c)
    return f"({c.real!r}{c.imag:+.17g}j)"


def to_text(F: LaurentPoly) -> str:
    if F.is_zero():
        return "0"
    parts = []
    for e, c in F.items():
        factors = []
        for i, x in enumerate(e, start=1):
            if x == 1:
                factors.append(f"z{i}")
            elif x:
                factors.append(f"z{i}^{x}")
        neg = isinstance(c, int) and c < 0
        mag = -c if neg else c
        if not factors:
            body = _format_coeff(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = "*".join([_format_coeff(mag)] + factors)
        parts.append(("-", body) if neg else ("+", body))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<var>z(?P<idx>\d+))|(?P<op>[-+*^()]))"
)


def parse_poly(text: str, k: int | None = None) -> LaurentPoly:
    """Parse ``'z1^10 + z1^9 - 3*z1*z2^-1'``-style text.

    Terms are joined by ``+``/``-``; a term is ``*``-joined integer factors
    and ``zI`` / ``zI^E`` factors (``E`` may be negative, optionally in
    parentheses).  ``k`` defaults to the largest variable index seen.
    """
    tokens: list[tuple[str, str, int]] = []
    pos = 0
    text_len = len(text)
    while pos < text_len:
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            j = pos
            while j < text_len and text[j].isspace():
                j += 1
            raise PolySyntaxError(f"unexpected character {text[j]!r}", j)
        start = m.start(m.lastgroup)
        if m.group("num") is not None:
            tokens.append(("num", m.group("num"), start))
        elif m.group("var") is not None:
            tokens.append(("var", m.group("idx"), start))
        else:
            tokens.append(("op", m.group("op"), start))
        pos = m.end()
    tokens.append(("end", "", text_len))

    i = 0
    terms: list[tuple[dict[int, int], int]] = []

    def peek():
        return tokens[i]

    def expect_int() -> int:
        nonlocal i
        sign = 1
        kind, val, p = tokens[i]
        if kind == "op" and val == "(":
            i += 1
            e = expect_int()
            kind, val, p = tokens[i]
            if (kind, val) != ("op", ")"):
                raise PolySyntaxError("expected ')'", p)
            i += 1
            return e
        while kind == "op" and val in "+-":
            if val == "-":
                sign = -sign
            i += 1
            kind, val, p = tokens[i]
        if kind != "num":
            raise PolySyntaxError("expected an integer exponent", p)
        i += 1
        return sign * int(val)

    def factor(exps: dict[int, int]) -> int:
        nonlocal i
        kind, val, p = tokens[i]
        if kind == "num":
            i += 1
            return int(val)
        if kind == "var":
            idx = int(val)
            if idx < 1:
                raise PolySyntaxError("variable indices start at 1", p)
            if k is not None and idx > k:
                raise PolySyntaxError(f"variable z{idx} out of range for k={k}", p)
            i += 1
            e = 1
            if tokens[i][:2] == ("op", "^"):
                i += 1
                e = expect_int()
            exps[idx] = exps.get(idx, 0) + e
            return 1
        raise PolySyntaxError("expected a coefficient or variable", p)

    sign = 1
    kind, val, p = peek()
    if kind == "end":
        raise PolySyntaxError("empty polynomial", p)
    while True:
        while tokens[i][0] == "op" and tokens[i][1] in "+-":
            if tokens[i][1] == "-":
                sign = -sign
            i += 1
        exps: dict[int, int] = {}
        coeff = factor(exps)
        while tokens[i][:2] == ("op", "*"):
            i += 1
            coeff *= factor(exps)
        terms.append((exps, sign * coeff))
        kind, val, p = tokens[i]
        if kind == "end":
            break
        if kind == "op" and val in "+-":
            sign = 1
            continue
        shown = f"z{val}" if kind == "var" else val
        raise PolySyntaxError(f"unexpected {shown!r}", p)

    nvars = max((max(e) for e, _ in terms if e), default=0)
    if k is None:
        k = nvars
    items = []
    for exps, c in terms:
        vec = [0] * k
        for idx, e in exps.items():
            vec[idx - 1] += e
        items.append((tuple(vec), c))
    return LaurentPoly(k, items)


# ---------------------------------------------------------------------------
# operations

def substitute(F: LaurentPoly, A: IntMatrix) -> LaurentPoly:
    """``F_A``: every exponent column ``j`` becomes ``A @ j`` (``A`` is ``l x k``)."""
    if A.cols != F.k:
        raise ValueError(f"matrix has {A.cols} columns but the polynomial has {F.k} variables")
    rows = A.data
    items = [(tuple(sum(a * x for a, x in zip(r, e)) for r in rows), c) for e, c in F.items()]
    return LaurentPoly(A.rows, items)


def mul(F: LaurentPoly, G: LaurentPoly) -> LaurentPoly:
    F._check(G)
    acc: dict[Exponent, Coefficient] = {}
    for e1, c1 in F.items():
        for e2, c2 in G.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            acc[e] = acc.get(e, 0) + c1 * c2
    return LaurentPoly(F.k, acc)


def length(F: LaurentPoly) -> float | int:
    """Sum of the moduli of the coefficients (exact int for integer input)."""
    if F.is_integral():
        return sum(abs(c) for c in F.coefficients())
    return math.fsum(abs(c) for c in F.coefficients())


def _unit(theta: float) -> complex:
    """``exp(2*pi*i*theta)`` for ``theta`` already reduced to [0, 1)."""
    return cmath.exp(2j * math.pi * theta)


def evaluate(F: LaurentPoly, angles: Sequence[float | Fraction]) -> complex:
    """``F(e^{2 pi i t_1}, ..., e^{2 pi i t_k})``.

    Each monomial's argument ``e . t`` is reduced mod 1 before exponentiation;
    with :class:`fractions.Fraction` angles that reduction is exact.
    """
    if len(angles) != F.k:
        raise ValueError(f"expected {F.k} angles, got {len(angles)}")
    exact = all(isinstance(t, (Fraction, int)) for t in angles)
    total = 0j
    for e, c in F.items():
        if exact:
            theta = float(sum((x * Fraction(t) for x, t in zip(e, angles)), Fraction(0)) % 1)
        else:
            theta = math.fsum(x * float(t) for x, t in zip(e, angles)) % 1.0
        total += c * _unit(theta)
    return total


def evaluate_many(F: LaurentPoly, angles: np.ndarray) -> np.ndarray:
    """Vectorised :func:`evaluate` over an ``(N, k)`` array of angles."""
    T = np.asarray(angles, dtype=float).reshape(-1, F.k)
    if F.is_zero():
        return np.zeros(len(T), dtype=complex)
    E = np.array(F.exponents(), dtype=float).reshape(len(F), F.k)
    C = np.array([complex(c) for c in F.coefficients()])
    phase = np.mod(T @ E.T, 1.0)
    return np.exp(2j * np.pi * phase) @ C


def _affine_dim(points: list[Exponent]) -> int:
    if not points:
        return -1
    p0 = points[0]
    diffs = [tuple(a - b for a, b in zip(p, p0)) for p in points[1:]]
    if not diffs or not points[0]:
        return 0
    return matrix_rank(IntMatrix.from_rows(diffs))


def _is_extreme(p: np.ndarray, others: np.ndarray) -> bool:
    """``p`` is not a convex combination of ``others`` (LP feasibility)."""
    from scipy.optimize import linprog

    n = len(others)
    if n == 0:
        return True
    A_eq = np.vstack([others.T, np.ones((1, n))])
    b_eq = np.concatenate([p, [1.0]])
    res = linprog(np.zeros(n), A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    return res.status != 0


def exponent_polytope(F: LaurentPoly) -> Polytope:
    """Extreme points and affine dimension of the convex hull of the exponents."""
    if F.is_zero():
        raise ZeroPolynomialError("the zero polynomial has no exponent polytope")
    pts = F.exponents()
    dim = _affine_dim(pts)
    if F.k == 0 or len(pts) == 1:
        return Polytope(frozenset(pts), dim)
    if F.k == 1 or dim == 1:
        # collinear: the two extremes along the line
        return Polytope(frozenset({min(pts), max(pts)}), dim)
    arr = np.array(pts, dtype=float)
    verts = []
    for i in range(len(pts)):
        if _is_extreme(arr[i], np.delete(arr, i, axis=0)):
            verts.append(pts[i])
    return Polytope(frozenset(verts), dim)


def coefficient_bounds(F: LaurentPoly) -> tuple[float, float]:
    """``(max log|c| over polytope vertices, log length)``: brackets ``m(F)``."""
    poly = exponent_polytope(F)
    terms = F.terms
    lower = max(math.log(abs(terms[v])) for v in poly.vertices)
    return lower, math.log(length(F))
