"""Integer matrix canonical forms: HNF, Saturated HNF, Smith invariants.

Matrices are small and dense; all arithmetic is exact on Python ints.
Row vectors act on the left, so ``U @ A`` applies row operations to ``A``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

__all__ = [
    "IntMatrix",
    "HnfResult",
    "ShnfResult",
    "hnf",
    "shnf",
    "smith_invariants",
    "is_hnf",
    "is_saturated",
    "check_shnf_gcd_condition",
    "q_value",
    "lawton_vector",
    "enumerate_shnf",
    "matrix_rank",
    "determinant",
]

LAWTON_N_CAP = 10**6
LAWTON_LEN_CAP = 64


@dataclass(frozen=True)
class IntMatrix:
    """Dense ``rows x cols`` integer matrix; ``0 x k`` is the empty matrix."""

    rows: int
    cols: int
    data: tuple[tuple[int, ...], ...] = field(default=())

    def __post_init__(self) -> None:
        if self.rows < 0 or self.cols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        data = tuple(tuple(int(x) for x in row) for row in self.data)
        if len(data) != self.rows or any(len(row) != self.cols for row in data):
            raise ValueError(
                f"entry count does not match a {self.rows}x{self.cols} matrix"
            )
        object.__setattr__(self, "data", data)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> IntMatrix:
        rows = [list(r) for r in rows]
        if cols is None:
            if not rows:
                raise ValueError("column count required for a matrix with no rows")
            cols = len(rows[0])
        return cls(len(rows), cols, tuple(tuple(r) for r in rows))

    @classmethod
    def empty(cls, cols: int) -> IntMatrix:
        return cls(0, cols, ())

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls(n, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntMatrix:
        return cls(rows, cols, tuple((0,) * cols for _ in range(rows)))

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.data[i][j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.data[i]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self.data)

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.data]

    def transpose(self) -> IntMatrix:
        return IntMatrix(self.cols, self.rows, tuple(zip(*self.data)) if self.rows else
                         tuple(() for _ in range(self.cols)))

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.rows:
            raise ValueError(
                f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}"
            )
        cols = other.column_tuples()
        return IntMatrix(
            self.rows,
            other.cols,
            tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in cols) for r in self.data),
        )

    def column_tuples(self) -> list[tuple[int, ...]]:
        return [self.column(j) for j in range(self.cols)]

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.data for x in r)

    def strip_zero_rows(self) -> IntMatrix:
        kept = [r for r in self.data if any(r)]
        return IntMatrix(len(kept), self.cols, tuple(kept))

    def to_json(self) -> dict:
        return {"rows": self.rows, "cols": self.cols, "data": self.tolist()}

    @classmethod
    def from_json(cls, obj: dict | list) -> IntMatrix:
        """Accept ``{"rows","cols","data"}`` or a bare list of rows."""
        if isinstance(obj, list):
            return cls.from_rows(obj)
        data = obj.get("data", [])
        rows = obj.get("rows", len(data))
        cols = obj.get("cols")
        if cols is None:
            if not data:
                raise ValueError("empty matrix needs an explicit 'cols'")
            cols = len(data[0])
        return cls(rows, cols, tuple(tuple(r) for r in data))

    def __repr__(self) -> str:
        return f"IntMatrix({self.rows}x{self.cols}, {self.tolist()})"


@dataclass(frozen=True)
class HnfResult:
    H: IntMatrix
    U: IntMatrix
    rank: int
    pivot_cols: tuple[int, ...]


@dataclass(frozen=True)
class ShnfResult:
    H: IntMatrix
    V: IntMatrix
    rank: int
    pivot_cols: tuple[int, ...]


class _RowReducer:
    """Mutable working copy of a matrix with tracked transforms.

    Keeps ``A = Vinv_left @ M`` where ``V`` is updated by the inverse column
    operation of every row operation applied to ``M``; ``U`` accumulates the
    row operations themselves (only meaningful while all ops are unimodular).
    """

    def __init__(self, A: IntMatrix, track: bool = True):
        self.M = [list(r) for r in A.data]
        self.n = A.rows
        self.k = A.cols
        self.track = track
        if track:
            self.U = [[int(i == j) for j in range(self.n)] for i in range(self.n)]
            self.V = [[int(i == j) for j in range(self.n)] for i in range(self.n)]

    def add(self, i: int, s: int, c: int) -> None:
        """row_i += c * row_s"""
        if c == 0:
            return
        Mi, Ms = self.M[i], self.M[s]
        for j in range(self.k):
            Mi[j] += c * Ms[j]
        if self.track:
            Ui, Us = self.U[i], self.U[s]
            for j in range(self.n):
                Ui[j] += c * Us[j]
            for row in self.V:
                row[s] -= c * row[i]

    def swap(self, a: int, b: int) -> None:
        if a == b:
            return
        self.M[a], self.M[b] = self.M[b], self.M[a]
        if self.track:
            self.U[a], self.U[b] = self.U[b], self.U[a]
            for row in self.V:
                row[a], row[b] = row[b], row[a]

    def negate(self, a: int) -> None:
        self.M[a] = [-x for x in self.M[a]]
        if self.track:
            self.U[a] = [-x for x in self.U[a]]
            for row in self.V:
                row[a] = -row[a]

    def divide(self, a: int, g: int) -> None:
        assert all(x % g == 0 for x in self.M[a])
        self.M[a] = [x // g for x in self.M[a]]
        if self.track:
            for row in self.V:
                row[a] *= g

    def echelonize(self) -> list[int]:
        """Bring M to HNF in place; return the pivot columns."""
        pivots: list[int] = []
        r = 0
        for j in range(self.k):
            if r == self.n:
                break
            found = False
            while True:
                nz = [i for i in range(r, self.n) if self.M[i][j] != 0]
                if not nz:
                    break
                found = True
                p = min(nz, key=lambda i: abs(self.M[i][j]))
                self.swap(r, p)
                piv = self.M[r][j]
                clean = True
                for i in range(r + 1, self.n):
                    if self.M[i][j]:
                        self.add(i, r, -(self.M[i][j] // piv))
                        if self.M[i][j]:
                            clean = False
                if clean:
                    break
            if not found:
                continue
            if self.M[r][j] < 0:
                self.negate(r)
            pivots.append(j)
            r += 1
        self.reduce_above(pivots)
        return pivots

    def reduce_above(self, pivots: Sequence[int]) -> None:
        for r, j in enumerate(pivots):
            piv = self.M[r][j]
            for i in range(r):
                q = self.M[i][j] // piv
                if q:
                    self.add(i, r, -q)

    def matrix(self) -> IntMatrix:
        return IntMatrix(self.n, self.k, tuple(tuple(r) for r in self.M))


def hnf(A: IntMatrix) -> HnfResult:
    """Row-echelon Hermite normal form with unimodular ``U`` such that ``U @ A == H``.

    Pivots are positive, entries above a pivot lie in ``[0, pivot)`` and zero
    rows sit at the bottom.
    """
    red = _RowReducer(A)
    pivots = red.echelonize()
    U = IntMatrix(A.rows, A.rows, tuple(tuple(r) for r in red.U))
    return HnfResult(red.matrix(), U, len(pivots), tuple(pivots))


def matrix_rank(A: IntMatrix) -> int:
    red = _RowReducer(A, track=False)
    return len(red.echelonize())


def determinant(A: IntMatrix) -> int:
    if A.rows != A.cols:
        raise ValueError("determinant of a non-square matrix")
    # Bareiss fraction-free elimination
    n = A.rows
    M = [list(r) for r in A.data]
    sign, prev = 1, 1
    for c in range(n):
        p = next((i for i in range(c, n) if M[i][c] != 0), None)
        if p is None:
            return 0
        if p != c:
            M[c], M[p] = M[p], M[c]
            sign = -sign
        for i in range(c + 1, n):
            for j in range(c + 1, n):
                M[i][j] = (M[i][j] * M[c][c] - M[i][c] * M[c][j]) // prev
        prev = M[c][c]
    return sign * M[n - 1][n - 1] if n else 1


def smith_invariants(A: IntMatrix) -> list[int]:
    """Nonzero invariant factors ``d_1 | d_2 | ...``; their count is the rank."""
    M = [list(r) for r in A.data]
    out: list[int] = []
    while M and M[0]:
        best = None
        for i, row in enumerate(M):
            for j, x in enumerate(row):
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
        if best is None:
            break
        _, pi, pj = best
        M[0], M[pi] = M[pi], M[0]
        for row in M:
            row[0], row[pj] = row[pj], row[0]
        p = M[0][0]
        dirty = False
        for i in range(1, len(M)):
            q = M[i][0] // p
            if q:
                M[i] = [a - q * b for a, b in zip(M[i], M[0])]
            dirty |= M[i][0] != 0
        for j in range(1, len(M[0])):
            q = M[0][j] // p
            if q:
                for row in M:
                    row[j] -= q * row[0]
            dirty |= M[0][j] != 0
        if dirty:
            continue
        bad = next((i for i in range(1, len(M)) if any(x % p for x in M[i])), None)
        if bad is not None:
            M[0] = [a + b for a, b in zip(M[0], M[bad])]
            continue
        out.append(abs(p))
        M = [row[1:] for row in M[1:]]
    return out


def is_hnf(A: IntMatrix) -> bool:
    last = -1
    seen_zero = False
    pivots: list[tuple[int, int]] = []
    for i, row in enumerate(A.data):
        nz = next((j for j, x in enumerate(row) if x), None)
        if nz is None:
            seen_zero = True
            continue
        if seen_zero or nz <= last or row[nz] <= 0:
            return False
        last = nz
        pivots.append((i, nz))
    for i, j in pivots:
        piv = A.data[i][j]
        if any(not (0 <= A.data[i2][j] < piv) for i2 in range(i)):
            return False
    return True


def _pivot_cols(H: IntMatrix) -> list[int]:
    return [next(j for j, x in enumerate(row) if x) for row in H.data]


def _solve_echelon(H: list[list[int]], pivots: Sequence[int], v: Sequence[int]) -> list[int] | None:
    """Integer ``c`` with ``c @ H == v`` for echelon ``H``, or None."""
    res = list(v)
    coeffs = []
    for r, j in enumerate(pivots):
        q, rem = divmod(res[j], H[r][j])
        if rem:
            return None
        coeffs.append(q)
        if q:
            res = [a - q * b for a, b in zip(res, H[r])]
    if any(res):
        return None
    return coeffs


def _congruence_multipliers(v: Sequence[int], lower: list[list[int]], g: int) -> list[int] | None:
    """Find ``u`` with ``v + u @ lower`` divisible by ``g`` (None if impossible)."""
    m, k = len(lower), len(v)
    stacked = lower + [[g * int(i == j) for j in range(k)] for i in range(k)]
    red = _RowReducer(IntMatrix(m + k, k, tuple(tuple(r) for r in stacked)))
    pivots = red.echelonize()
    c = _solve_echelon(red.M, pivots, v)
    if c is None:
        return None
    # v = x @ stacked with x = c @ U
    x = [sum(c[r] * red.U[r][t] for r in range(len(c))) for t in range(m + k)]
    return [_centered(-x[t], g) for t in range(m)]


def _centered(a: int, g: int) -> int:
    a %= g
    return a - g if 2 * a > g else a


def shnf(A: IntMatrix) -> ShnfResult:
    """Saturated Hermite normal form.

    HNF first; then, from the bottom nonzero row upwards, add integer
    multiples of the rows below so that the gcd of the current row is as large
    as possible and divide the row by it; finally re-reduce above the pivots.
    The largest attainable gcd equals the index of ``L + Z v`` in its
    saturation (``L`` the already saturated lower rows), i.e. the product of
    the Smith invariants of the stacked rows.

    Returns ``H`` with zero rows stripped and ``V`` with ``A == V @ H'`` where
    ``H'`` is ``H`` padded back with zero rows.
    """
    red = _RowReducer(A)
    pivots = red.echelonize()
    rank = len(pivots)
    for i in range(rank - 1, -1, -1):
        lower = [list(r) for r in red.M[i + 1 : rank]]
        stacked = IntMatrix(rank - i, A.cols, tuple(tuple(r) for r in red.M[i:rank]))
        g = math.prod(smith_invariants(stacked))
        if g == 1:
            continue
        u = _congruence_multipliers(red.M[i], lower, g)
        assert u is not None, "maximal gcd must be attainable"
        for t, c in enumerate(u):
            red.add(i, i + 1 + t, c)
        red.divide(i, g)
    red.reduce_above(pivots)
    H = IntMatrix(rank, A.cols, tuple(tuple(r) for r in red.M[:rank]))
    V = IntMatrix(A.rows, A.rows, tuple(tuple(r) for r in red.V))
    return ShnfResult(H, V, rank, tuple(pivots))


def is_saturated(H: IntMatrix) -> bool:
    """True iff the row lattice equals (row space over R) ∩ Z^k."""
    if any(not any(r) for r in H.data):
        raise ValueError("is_saturated requires a matrix without zero rows")
    return all(d == 1 for d in smith_invariants(H))


def _prime_factors(n: int) -> list[int]:
    n = abs(n)
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out.append(n)
    return out


def _solvable_mod_p(v: Sequence[int], lower: Sequence[Sequence[int]], p: int) -> bool:
    """Is ``v + u @ lower ≡ 0 (mod p)`` solvable for prime ``p``?"""
    m, k = len(lower), len(v)
    # augmented system lower^T u = -v over GF(p): k equations, m unknowns
    rows = [[lower[t][j] % p for t in range(m)] + [(-v[j]) % p] for j in range(k)]
    r = 0
    for c in range(m):
        piv = next((i for i in range(r, k) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][c], -1, p)
        rows[r] = [(x * inv) % p for x in rows[r]]
        for i in range(k):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], rows[r])]
        r += 1
    return all(row[m] == 0 for row in rows[r:])


def check_shnf_gcd_condition(H: IntMatrix, coefficient_bound: int = 20) -> bool:
    """Bounded check of the gcd characterisation of SHNF.

    True iff for every row ``i`` and every integer vector ``u`` with entries
    in ``[-bound, bound]`` the components of ``row_i + sum u_j row_j`` (over
    rows ``j > i``) are coprime. Any common prime divides the pivot of row
    ``i``; primes ``p <= 2*bound + 1`` are decided modulo ``p`` (every residue
    has a representative in the box), larger ones by scanning the box.
    """
    if coefficient_bound < 1:
        raise ValueError("coefficient_bound must be positive")
    if not is_hnf(H) or any(not any(r) for r in H.data):
        raise ValueError("check_shnf_gcd_condition requires an HNF matrix without zero rows")
    b = coefficient_bound
    pivots = _pivot_cols(H)
    for i in range(H.rows):
        v = H.data[i]
        lower = H.data[i + 1 :]
        for p in _prime_factors(v[pivots[i]]):
            if p <= 2 * b + 1:
                if _solvable_mod_p(v, lower, p):
                    return False
                continue
            for u in itertools.product(range(-b, b + 1), repeat=len(lower)):
                w = list(v)
                for c, row in zip(u, lower):
                    if c:
                        w = [a + c * x for a, x in zip(w, row)]
                if all(x % p == 0 for x in w):
                    return False
    return True


def lawton_vector(n: int, length: int) -> tuple[int, ...]:
    """``(1, n, n^2, ..., n^(length-1))``"""
    if not 1 <= n <= LAWTON_N_CAP:
        raise ValueError(f"n must lie in [1, {LAWTON_N_CAP}], got {n}")
    if not 1 <= length <= LAWTON_LEN_CAP:
        raise ValueError(f"length must lie in [1, {LAWTON_LEN_CAP}], got {length}")
    return tuple(n**i for i in range(length))


class NotFound(Exception):
    """No annihilating vector within the search bound."""


def q_value(r: Sequence[int], search_bound: int = 64) -> int:
    """Smallest sup-norm of a nonzero integer ``s`` with ``r . s == 0``.

    Scans sup-norm shells ``1, 2, ...``; inside a shell the coordinate with
    the largest ``|r_i|`` is solved for, the others are enumerated.
    Raises :class:`NotFound` if nothing exists up to ``search_bound``.
    """
    r = [int(x) for x in r]
    if len(r) < 2:
        raise ValueError("q is defined for vectors with at least 2 entries")
    if not any(r):
        raise ValueError("q is undefined for the zero vector")
    if search_bound < 1:
        raise ValueError("search_bound must be positive")
    solve = max(range(len(r)), key=lambda i: abs(r[i]))
    rest = np.array([x for i, x in enumerate(r) if i != solve], dtype=object)
    rs = r[solve]
    for s in range(1, search_bound + 1):
        grid = np.array(list(itertools.product(range(-s, s + 1), repeat=len(rest))), dtype=object)
        dots = grid.dot(rest)
        for row, d in zip(grid, dots):
            if d % rs:
                continue
            last = -d // rs
            if abs(last) > s:
                continue
            if last == 0 and not any(row):
                continue
            return s
    raise NotFound(f"no annihilating vector with sup-norm <= {search_bound}")


def _hnf_templates(k: int, ell: int, height: int) -> Iterator[IntMatrix]:
    """All ell x k HNF matrices of full row rank with entries in [-height, height]."""
    for pivots in itertools.combinations(range(k), ell):
        for piv_vals in itertools.product(range(1, height + 1), repeat=ell):
            ranges = []
            for i in range(ell):
                for j in range(k):
                    if j < pivots[i]:
                        ranges.append((0,))
                    elif j == pivots[i]:
                        ranges.append((piv_vals[i],))
                    elif j in pivots:
                        ranges.append(tuple(range(piv_vals[pivots.index(j)])))
                    else:
                        ranges.append(tuple(range(-height, height + 1)))
            for entries in itertools.product(*ranges):
                yield IntMatrix(ell, k, tuple(tuple(entries[i * k : (i + 1) * k]) for i in range(ell)))


def enumerate_shnf(k: int, ell: int, height: int) -> list[IntMatrix]:
    """Every rank-``ell`` ``ell x k`` SHNF matrix with entries in ``[-height, height]``.

    Ordered by (pivot columns, row-major entries); ``ell == 0`` gives the
    empty matrix only.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if not 0 <= ell <= k:
        raise ValueError(f"rank must lie in [0, {k}], got {ell}")
    if height < 1:
        raise ValueError("height must be positive")
    if ell == 0:
        return [IntMatrix.empty(k)]
    found = [H for H in _hnf_templates(k, ell, height) if is_saturated(H)]
    found.sort(key=lambda H: (tuple(_pivot_cols(H)), H.data))
    return found
