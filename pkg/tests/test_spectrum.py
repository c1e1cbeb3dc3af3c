import itertools
import json
import math
import random

import pytest

from conftest import random_poly
from mahlerset.laurent import LaurentPoly, ZeroPolynomialError, length, parse_poly, substitute
from mahlerset.lattice import IntMatrix, is_hnf, is_saturated
from mahlerset.measure_multi import MeasureConfig, measure_of_family_member
from mahlerset.measure_uni import MeasureResult, measure_uni
from mahlerset.spectrum import (
    SignedPartition,
    SpectrumSample,
    cyclotomic_fixture,
    dedup_values,
    embed_in_linear_form,
    lehmer_element,
    linear_form_F_n,
    max_element,
    mb_generators,
    mignotte_bound,
    sample_measure_set,
)

M_1XY = 0.3230659472194505141
M_PLASTIC = 0.2811995743229618465
M_PLASTIC_SQ = 0.5623991486459236930


def P(text, k):
    return parse_poly(text, k)


def fake_sample(values):
    entries = [(IntMatrix.empty(1), MeasureResult(v, 0.0, "roots")) for v in values]
    return SpectrumSample(P("z1", 1), 1, entries, dedup_values(values, 1e-7))


def contains(values, v, tol=1e-7):
    return any(abs(v - w) <= tol for w in values)


class TestSample:
    @pytest.mark.parametrize("h", [1, 2])
    def test_f1_is_zero_set(self, h):
        s = sample_measure_set(P("z1-z2", 2), h)
        assert s.distinct_values == [0.0]
        assert lehmer_element(s) is None
        assert s.skipped >= 1

    def test_1xy_height_one(self):
        s = sample_measure_set(P("1+z1+z2", 2), 1)
        assert contains(s.distinct_values, math.log(3))
        assert contains(s.distinct_values, 0.0)
        assert contains(s.distinct_values, M_1XY)

    def test_one_variable_has_two_entries(self):
        s = sample_measure_set(P("z1^3-z1-1", 1), 3)
        assert len(s.entries) == 2
        assert s.entries[0][0].rows == 0 and s.entries[1][0].tolist() == [[1]]
        assert s.distinct_values == pytest.approx([0.0, M_PLASTIC], abs=1e-12)

    def test_entries_are_saturated_hnf(self):
        s = sample_measure_set(P("2+z1-z2+z1*z2^-1", 2), 2)
        for H, r in s.entries:
            if H.rows:
                assert is_hnf(H) and is_saturated(H)
            assert r.detail["H"] == H.to_json()

    def test_ranks_argument(self):
        s = sample_measure_set(P("1+z1+z2", 2), 1, ranks=[2])
        assert len(s.entries) == 1
        with pytest.raises(ValueError):
            sample_measure_set(P("1+z1+z2", 2), 1, ranks=[3])

    def test_errors(self):
        with pytest.raises(ZeroPolynomialError):
            sample_measure_set(LaurentPoly(2, {}), 1)
        with pytest.raises(ValueError):
            sample_measure_set(P("1+z1", 1), 0)

    def test_json(self):
        s = sample_measure_set(P("1+z1+z2", 2), 1)
        obj = json.loads(json.dumps(s.to_json()))
        assert obj["label"] == "height-1 exhaustion"
        assert obj["config"] == MeasureConfig().to_json()
        assert len(obj["entries"]) == len(s.entries)

    def test_dedup(self):
        assert dedup_values([0.3, 0.1, 0.1 + 5e-8, 0.2], 1e-7) == [0.1, 0.2, 0.3]


class TestExtremes:
    def test_lehmer_of_fixed_values(self):
        assert lehmer_element(fake_sample([0.0, 0.5])) == 0.5

    def test_max_single_entry(self):
        assert max_element(fake_sample([0.7])) == 0.7

    def test_max_empty(self):
        with pytest.raises(ValueError):
            max_element(fake_sample([]))

    def test_max_in_bracket(self):
        s = sample_measure_set(P("5+z1+z2", 2), 1)
        assert math.log(5) - 1e-12 <= max_element(s) <= math.log(7) + 1e-12

    def test_f2_lehmer_row(self):
        # z1 + z3 - z2 - z4 at the row (2, 1, -2, 0): z^2 - z + z^-2 - 1
        F2 = linear_form_F_n(2)
        r = measure_of_family_member(F2, IntMatrix.from_rows([[2, 1, -2, 0]]))
        assert abs(r.value - M_PLASTIC) < 1e-10

    def test_f2_max_at_least_twice_lehmer(self):
        F2 = linear_form_F_n(2)
        r = measure_of_family_member(F2, IntMatrix.from_rows([[4, 1, 2, 0]]))
        assert abs(r.value - math.log(1.75487766624669)) < 1e-10
        s = fake_sample([0.0, M_PLASTIC, r.value])
        assert max_element(s) >= 2 * lehmer_element(s) - 1e-10

    def test_mignotte_bound(self):
        assert mignotte_bound(P("z1-z2", 2)) == pytest.approx(math.log(2) / 4)

    def test_lehmer_above_mignotte(self):
        rng = random.Random(6)
        for _ in range(8):
            F = random_poly(rng, 2, 5, max_exp=1)
            s = sample_measure_set(F, 1)
            le = lehmer_element(s)
            if le is not None:
                assert le >= mignotte_bound(F) - s.tolerance


class TestLinearForms:
    def test_n1(self):
        assert linear_form_F_n(1) == P("z1-z2", 2)

    def test_n2(self):
        assert linear_form_F_n(2) == P("z1+z3-z2-z4", 4)

    @pytest.mark.parametrize("n", [1, 3, 6])
    def test_length(self, n):
        assert length(linear_form_F_n(n)) == 2 * n

    def test_bad_n(self):
        with pytest.raises(ValueError):
            linear_form_F_n(0)

    def test_embed_constant(self):
        n, A = embed_in_linear_form(LaurentPoly.constant(1, 0))
        assert n == 1 and A.tolist() == [[1, 0]]

    def test_embed_1xy(self):
        n, A = embed_in_linear_form(P("1+z1+z2", 2))
        assert n == 2 and A.tolist() == [[2, 0, 1, 0], [0, 1, 1, 0]]
        G = P("z1^2 + z1*z2 - z2 - 1", 2)
        assert substitute(linear_form_F_n(2), A) == G

    def test_embed_round_trip(self):
        rng = random.Random(50)
        for _ in range(50):
            k = rng.randint(1, 3)
            F = random_poly(rng, k, 6)
            n, A = embed_in_linear_form(F)
            z1 = LaurentPoly(k, {tuple(int(i == 0) for i in range(k)): 1, (0,) * k: -1})
            assert substitute(linear_form_F_n(n), A) == z1 * F
            assert n == sum(c for c in (z1 * F).coefficients() if c > 0)

    def test_embed_errors(self):
        with pytest.raises(ZeroPolynomialError):
            embed_in_linear_form(LaurentPoly(1, {}))
        with pytest.raises(ValueError):
            embed_in_linear_form(LaurentPoly(1, {(0,): 1j}))


class TestGenerators:
    def test_b1(self):
        out = mb_generators(1)
        assert [sp.c for sp, _ in out] == [(1,), (-1,)]
        assert [str(f) for _, f in out] == [str(P("z1", 1)), str(P("-z1", 1))]

    def test_b2(self):
        got = [sp.c for sp, _ in mb_generators(2)]
        assert got == [(1,), (-1,), (2,), (-2,), (1, 1), (1, -1), (-1, 1), (-1, -1)]

    def test_against_enumeration_oracle(self):
        # oracle: every tuple of nonzero integers with nondecreasing moduli and sum of moduli <= B
        B = 5
        expected = set()
        for t in range(1, B + 1):
            for c in itertools.product([x for x in range(-B, B + 1) if x], repeat=t):
                mods = [abs(x) for x in c]
                if sum(mods) <= B and mods == sorted(mods):
                    expected.add(c)
        out = mb_generators(B)
        assert {sp.c for sp, _ in out} == expected and len(out) == len(expected)
        for sp, form in out:
            assert length(form) == sp.b <= B
            assert form.k == len(sp.c)

    @pytest.mark.parametrize("c", [(), (0, 1), (2, 1)])
    def test_invalid_partitions(self, c):
        with pytest.raises(ValueError):
            SignedPartition(c)

    def test_bad_b(self):
        with pytest.raises(ValueError):
            mb_generators(0)


class TestStructure:
    def test_nesting_small(self):
        low = sample_measure_set(linear_form_F_n(1), 2).distinct_values
        high = sample_measure_set(linear_form_F_n(2), 1).distinct_values
        assert all(contains(high, v) for v in low)

    def test_monotone_exhaustion(self):
        rng = random.Random(12)
        for _ in range(4):
            F = random_poly(rng, 2, 5, max_exp=1)
            a = sample_measure_set(F, 1).distinct_values
            b = sample_measure_set(F, 2).distinct_values
            assert all(contains(b, v) for v in a)

    def test_cyclotomic_factor_gives_subset(self):
        # every value for (z1 - 1) F is a value for F at the same height
        rng = random.Random(2)
        for _ in range(5):
            F = random_poly(rng, 2, 5, max_exp=1)
            G = P("z1-1", 2) * F
            a = sample_measure_set(F, 1).distinct_values
            b = sample_measure_set(G, 1).distinct_values
            assert all(contains(a, v) for v in b)

    def test_cyclotomic_factor_can_drop_values(self):
        # (z - 1)(z + 2) vanishes at z = 1, so log 3 = m(F(1)) is lost
        F = P("z1+2", 1)
        a = sample_measure_set(F, 1).distinct_values
        b = sample_measure_set(P("z1-1", 1) * F, 1).distinct_values
        assert a == pytest.approx([math.log(2), math.log(3)])
        assert b == pytest.approx([math.log(2)])

    def test_fixtures_sample_to_zero(self):
        rng = random.Random(3)
        for _ in range(5):
            F = cyclotomic_fixture(2, rng)
            s = sample_measure_set(F, 1)
            assert all(r.detail.get("zero_certified") is True for _, r in s.entries)

    def test_fixture_shape(self):
        F = cyclotomic_fixture(3, random.Random(0), factors=3)
        assert F.k == 3 and F.is_integral()
        assert abs(measure_uni(substitute(F, IntMatrix.from_rows([[1, 5, 25]]))).value) < 1e-9
