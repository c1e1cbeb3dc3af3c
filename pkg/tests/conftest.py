import random

import pytest
from hypothesis import settings
from hypothesis import strategies as st

from mahlerset.laurent import LaurentPoly
from mahlerset.lattice import IntMatrix

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

LEHMER = "z1^10+z1^9-z1^7-z1^6-z1^5-z1^4-z1^3+z1+1"


@st.composite
def laurent_polys(draw, k=None, max_terms=5, max_exp=3, max_coeff=3, nonzero=True):
    k = draw(st.integers(1, 3)) if k is None else k
    n = draw(st.integers(1 if nonzero else 0, max_terms))
    terms = {}
    for _ in range(n):
        e = tuple(draw(st.integers(-max_exp, max_exp)) for _ in range(k))
        c = draw(st.integers(-max_coeff, max_coeff).filter(bool))
        terms[e] = c
    F = LaurentPoly(k, terms)
    if nonzero and F.is_zero():
        F = LaurentPoly.constant(1, k)
    return F


@st.composite
def int_matrices(draw, rows, cols, bound=3):
    data = tuple(tuple(draw(st.integers(-bound, bound)) for _ in range(cols)) for _ in range(rows))
    return IntMatrix(rows, cols, data)


def random_poly(rng: random.Random, k: int, max_len: int, max_exp: int = 2) -> LaurentPoly:
    """Random nonzero integer polynomial with ``length <= max_len`` and at least two terms."""
    while True:
        target = rng.randint(2, max_len)
        terms: dict = {}
        total = 0
        while total < target:
            c = rng.choice([1, -1, 1, -1, 2, -2])
            if total + abs(c) > target:
                c = 1 if c > 0 else -1
            e = tuple(rng.randint(-max_exp, max_exp) for _ in range(k))
            terms[e] = terms.get(e, 0) + c
            total += abs(c)
        F = LaurentPoly(k, terms)
        if len(F) >= 2:
            return F


@pytest.fixture
def rng():
    return random.Random(20240611)


# acceptance criteria report: (number, title, passed, measured detail)
ACCEPTANCE: list[tuple[int, str, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num, title, passed, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {num:2d}. {title}: {detail}")
