import cmath
import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import LEHMER, int_matrices, laurent_polys
from mahlerset.laurent import (
    LaurentPoly,
    PolySyntaxError,
    ZeroPolynomialError,
    coefficient_bounds,
    evaluate,
    evaluate_many,
    exponent_polytope,
    length,
    mul,
    parse_poly,
    substitute,
)
from mahlerset.lattice import IntMatrix


def P(text, k=None):
    return parse_poly(text, k)


class TestParse:
    def test_three_terms(self):
        F = P("1+z1+z2", 2)
        assert F.terms == {(0, 0): 1, (1, 0): 1, (0, 1): 1}

    def test_cancellation_gives_zero(self):
        F = P("z1*z2^-1 - z1*z2^-1", 2)
        assert F.is_zero() and F.k == 2

    def test_lehmer_polynomial(self):
        F = P(LEHMER, 1)
        assert len(F) == 9
        assert length(F) == 9

    @pytest.mark.parametrize(
        "text, expected",
        [
            ("z1^-1", {(-1,): 1}),
            ("z1^(-2)", {(-2,): 1}),
            ("3*z1*z1", {(2,): 3}),
            ("-2 - -3", {(0,): 1}),
            ("2*3*z1^2", {(2,): 6}),
            ("z1 + z1", {(1,): 2}),
        ],
    )
    def test_forms(self, text, expected):
        assert P(text, 1).terms == expected

    def test_k_defaults_to_largest_index(self):
        assert P("z3").k == 3
        assert P("5").k == 0

    @pytest.mark.parametrize(
        "text, pos",
        [("1+", 2), ("z1^", 3), ("2 z1", 2), ("1 + $", 4), ("", 0), ("z0", 0)],
    )
    def test_syntax_errors_report_position(self, text, pos):
        with pytest.raises(PolySyntaxError) as info:
            P(text, 1)
        assert info.value.pos == pos

    def test_index_out_of_range(self):
        with pytest.raises(PolySyntaxError, match="out of range"):
            P("z3", 2)

    def test_error_names_token(self):
        with pytest.raises(PolySyntaxError, match="'z1'"):
            P("2 z1", 1)

    @given(laurent_polys(nonzero=False))
    def test_print_parse_round_trip(self, F):
        assert parse_poly(str(F), F.k) == F
        assert str(parse_poly(str(F), F.k)) == str(F)

    @given(laurent_polys(nonzero=False))
    def test_json_round_trip(self, F):
        assert LaurentPoly.from_json(F.to_json()) == F

    def test_json_complex(self):
        F = LaurentPoly(1, {(1,): 1 + 2j, (0,): 3})
        obj = F.to_json()
        assert obj["terms"][1]["c"] == [1.0, 2.0]
        assert LaurentPoly.from_json(obj) == F


class TestSubstitute:
    def test_row_vector(self):
        assert substitute(P("1+z1+z2", 2), IntMatrix.from_rows([[1, 2]])) == P("1+z1+z1^2", 1)

    def test_empty_matrix_evaluates_at_one(self):
        G = substitute(P("1+z1+z2", 2), IntMatrix.empty(2))
        assert G.k == 0 and G.constant_value() == 3

    def test_cancellation(self):
        assert substitute(P("z1-z2", 2), IntMatrix.from_rows([[1, 1]])).is_zero()

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="columns"):
            substitute(P("1+z1", 1), IntMatrix.from_rows([[1, 2]]))

    @given(st.data())
    def test_functoriality(self, data):
        k = data.draw(st.integers(1, 4))
        ell = data.draw(st.integers(0, 3))
        ell2 = data.draw(st.integers(0, 3))
        F = data.draw(laurent_polys(k=k))
        A = data.draw(int_matrices(ell, k))
        B = data.draw(int_matrices(ell2, ell))
        assert substitute(substitute(F, A), B) == substitute(F, B @ A)

    @given(st.data())
    def test_homomorphism(self, data):
        k = data.draw(st.integers(1, 3))
        F = data.draw(laurent_polys(k=k))
        G = data.draw(laurent_polys(k=k))
        A = data.draw(int_matrices(data.draw(st.integers(0, 3)), k))
        assert substitute(mul(F, G), A) == mul(substitute(F, A), substitute(G, A))

    @given(st.data())
    def test_length_never_grows(self, data):
        k = data.draw(st.integers(1, 3))
        F = data.draw(laurent_polys(k=k))
        A = data.draw(int_matrices(data.draw(st.integers(0, 3)), k))
        assert length(substitute(F, A)) <= length(F)

    @given(st.data())
    def test_evaluation_compatibility(self, data):
        k = data.draw(st.integers(1, 3))
        ell = data.draw(st.integers(1, 3))
        F = data.draw(laurent_polys(k=k))
        A = data.draw(int_matrices(ell, k))
        t = [data.draw(st.floats(0, 1, exclude_max=True)) for _ in range(ell)]
        tA = [math.fsum(t[i] * A.data[i][j] for i in range(ell)) % 1.0 for j in range(k)]
        assert abs(evaluate(substitute(F, A), t) - evaluate(F, tA)) < 1e-12 * max(1, length(F))


class TestMul:
    def test_expansion(self):
        # hand expansion, checked below by evaluation at torus points
        G = mul(P("z1-1", 2), P("1+z1+z2", 2))
        assert G == P("z1^2 + z1*z2 - z2 - 1", 2)
        rng = random.Random(3)
        for _ in range(10):
            t = [rng.random(), rng.random()]
            lhs = evaluate(P("z1-1", 2), t) * evaluate(P("1+z1+z2", 2), t)
            assert abs(evaluate(G, t) - lhs) < 1e-12

    def test_identity(self):
        F = P("3*z1^-2 + z2", 2)
        assert mul(F, LaurentPoly.constant(1, 2)) == F

    def test_difference_of_squares(self):
        assert mul(P("z1-1", 1), P("z1+1", 1)) == P("z1^2-1", 1)

    def test_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            mul(P("z1", 1), P("z2", 2))


class TestLengthAndEvaluate:
    @pytest.mark.parametrize("text, k, expected", [(LEHMER, 1, 9), ("0", 1, 0), ("5+z1+z2", 2, 7)])
    def test_length(self, text, k, expected):
        assert length(P(text, k)) == expected

    def test_length_complex(self):
        assert length(LaurentPoly(1, {(0,): 3 + 4j})) == pytest.approx(5.0)

    def test_quarter_turn(self):
        assert abs(evaluate(P("z1", 1), [0.25]) - 1j) < 1e-15

    def test_half_turn_root(self):
        assert abs(evaluate(P("1+z1", 1), [0.5])) < 1e-15

    def test_cube_roots_sum(self):
        # oracle: direct complex arithmetic
        direct = 1 + cmath.exp(2j * math.pi / 3) + cmath.exp(4j * math.pi / 3)
        val = evaluate(P("1+z1+z2", 2), [Fraction(1, 3), Fraction(2, 3)])
        assert abs(val - direct) < 1e-15 and abs(val) < 1e-15

    def test_exact_reduction_large_exponent(self):
        F = P("z1^1000001", 1)
        assert abs(evaluate(F, [Fraction(1, 4)]) - 1j) < 1e-15

    def test_angle_count(self):
        with pytest.raises(ValueError):
            evaluate(P("z1", 1), [0.1, 0.2])

    @given(laurent_polys(k=2))
    def test_vectorised_matches_scalar(self, F):
        T = np.array([[0.1, 0.7], [0.33, 0.5], [0.9, 0.01]])
        many = evaluate_many(F, T)
        for row, v in zip(T, many):
            assert abs(evaluate(F, list(row)) - v) < 1e-12 * length(F)


class TestPolytope:
    def test_simplex(self):
        poly = exponent_polytope(P("1+z1+z2", 2))
        assert poly.vertices == {(0, 0), (1, 0), (0, 1)} and poly.dim == 2

    def test_interior_point_dropped(self):
        poly = exponent_polytope(P("1+z1+z1^2", 1))
        assert poly.vertices == {(0,), (2,)} and poly.dim == 1

    def test_monomial(self):
        poly = exponent_polytope(P("7*z1^3*z2^-1", 2))
        assert poly.vertices == {(3, -1)} and poly.dim == 0

    def test_square_with_centre(self):
        poly = exponent_polytope(P("1+z1+z2+z1*z2+5*z1^2*z2^2+z1^2+z2^2", 2))
        assert poly.vertices == {(0, 0), (2, 0), (0, 2), (2, 2)}

    def test_collinear_in_plane(self):
        poly = exponent_polytope(P("1+z1*z2+z1^2*z2^2", 2))
        assert poly.vertices == {(0, 0), (2, 2)} and poly.dim == 1

    def test_zero_rejected(self):
        with pytest.raises(ZeroPolynomialError):
            exponent_polytope(LaurentPoly(2, {}))


class TestCoefficientBounds:
    def test_bracket(self):
        lo, hi = coefficient_bounds(P("5+z1+z2", 2))
        assert lo == pytest.approx(math.log(5)) and hi == pytest.approx(math.log(7))

    def test_monomial_forced(self):
        lo, hi = coefficient_bounds(P("3*z1", 1))
        assert lo == hi == pytest.approx(math.log(3))

    def test_unit_coefficients(self):
        assert coefficient_bounds(P("1+z1+z2", 2)) == (0.0, pytest.approx(math.log(3)))

    @given(laurent_polys())
    def test_lower_le_upper(self, F):
        lo, hi = coefficient_bounds(F)
        assert lo <= hi + 1e-15


class TestMonomialNormalization:
    def test_shift(self):
        G, v = P("z1^-2*z2 + z1*z2^3", 2).monomial_normalized()
        assert v == (-2, 1)
        assert G == P("1 + z1^3*z2^2", 2)

    def test_immutability_and_hash(self):
        F = P("1+z1", 1)
        assert hash(F) == hash(P("z1+1", 1))
        with pytest.raises(AttributeError):
            F.foo = 1
