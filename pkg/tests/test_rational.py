"""Exact rational-function arithmetic, canonical printing, and the parser."""

from fractions import Fraction
from math import factorial

import numpy as np
import pytest

from conftest import SEED
from fuchsia.errors import ParseError, ValidationError
from fuchsia.rational import (
    CR_I,
    CR_ONE,
    CR_ZERO,
    P_ONE,
    P_Z,
    P_ZERO,
    RF_ONE,
    RF_Z,
    RF_ZERO,
    ComplexRational,
    Polynomial,
    RationalFunction,
    parse_rational_function,
    polynomial_gcd,
)


def cr(re_n, re_d=1, im_n=0, im_d=1):
    return ComplexRational(Fraction(re_n, re_d), Fraction(im_n, im_d))


def random_cr(rng):
    return ComplexRational(
        Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 6))),
        Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 6))),
    )


def random_poly(rng, max_degree=3):
    deg = int(rng.integers(0, max_degree + 1))
    return Polynomial([random_cr(rng) for _ in range(deg + 1)])


def random_rf(rng):
    num = random_poly(rng)
    while True:
        den = random_poly(rng)
        if den:
            return RationalFunction(num, den)


class TestComplexRational:
    def test_construction_and_rejection(self):
        c = ComplexRational(1, Fraction(2, 3))
        assert c.re == 1 and c.im == Fraction(2, 3)
        with pytest.raises(ValidationError):
            ComplexRational(0.5)

    def test_field_axioms(self, rng):
        for _ in range(50):
            a, b, c = (random_cr(rng) for _ in range(3))
            assert (a + b) + c == a + (b + c)
            assert a * b == b * a
            assert a * (b + c) == a * b + a * c
            assert a + CR_ZERO == a
            assert a * CR_ONE == a
            if a:
                assert a / a == CR_ONE
                assert (b / a) * a == b

    def test_conjugate_norm_is_real(self, rng):
        for _ in range(20):
            a = random_cr(rng)
            n = a * a.conjugate()
            assert n.im == 0
            assert n.re >= 0

    def test_i_squares_to_minus_one(self):
        assert CR_I * CR_I == ComplexRational(-1)

    def test_power(self):
        a = cr(1, 2, 1, 3)
        assert a**0 == CR_ONE
        assert a**3 == a * a * a
        with pytest.raises(ValidationError):
            a ** (-1)

    def test_division_by_zero(self):
        with pytest.raises(ZeroDivisionError):
            CR_ONE / CR_ZERO

    def test_text_forms(self):
        assert str(CR_ZERO) == "0"
        assert str(CR_I) == "i"
        assert str(-CR_I) == "-i"
        assert str(cr(0, 1, 2, 5)) == "2i/5"
        assert str(cr(-3, 4)) == "-3/4"
        assert str(cr(1, 2, 2, 3)) == "(1/2+2i/3)"
        assert str(cr(-1, 2, -2, 3)) == "(-1/2-2i/3)"

    def test_hash_consistent_with_eq(self):
        assert hash(ComplexRational(Fraction(2, 4))) == hash(ComplexRational(Fraction(1, 2)))


class TestPolynomial:
    def test_trailing_zeros_trimmed(self):
        p = Polynomial([1, 2, 0, 0])
        assert p.degree == 1
        assert Polynomial([0, 0]) == P_ZERO

    def test_ring_axioms(self, rng):
        for _ in range(30):
            p, q, r = (random_poly(rng) for _ in range(3))
            assert (p + q) * r == p * r + q * r
            assert p * q == q * p
            assert p + P_ZERO == p
            assert p * P_ONE == p

    def test_divmod_invariant(self, rng):
        for _ in range(30):
            p = random_poly(rng, max_degree=5)
            q = random_poly(rng, max_degree=3)
            if not q:
                continue
            quot, rem = divmod(p, q)
            assert quot * q + rem == p
            assert rem.degree < q.degree or not rem

    def test_division_by_zero(self):
        with pytest.raises(ZeroDivisionError):
            divmod(P_Z, P_ZERO)

    def test_gcd_divides_and_is_monic(self, rng):
        for _ in range(20):
            g = random_poly(rng, max_degree=2)
            if not g:
                continue
            a = g * random_poly(rng, max_degree=2)
            b = g * random_poly(rng, max_degree=2)
            if not a or not b:
                continue
            d = polynomial_gcd(a, b)
            assert d.coeffs[-1] == CR_ONE
            assert not a % d
            assert not b % d
            assert d.degree >= g.degree

    def test_derivative_leibniz(self, rng):
        for _ in range(20):
            p, q = random_poly(rng), random_poly(rng)
            lhs = (p * q).derivative()
            rhs = p.derivative() * q + p * q.derivative()
            assert lhs == rhs

    def test_translate_matches_evaluation(self, rng):
        for _ in range(20):
            p = random_poly(rng)
            c = random_cr(rng)
            x = random_cr(rng)
            assert p.translate(c).evaluate(x) == p.evaluate(x + c)

    def test_monic_normalizes_leading_coefficient(self):
        p = Polynomial([1, 0, ComplexRational(0, 2)])
        assert p.monic().coeffs[-1] == CR_ONE
        with pytest.raises(ValidationError):
            P_ZERO.monic()


class TestRationalFunction:
    def test_reduction_to_lowest_terms(self):
        num = P_Z * P_Z - P_ONE
        den = P_Z - P_ONE
        f = RationalFunction(num, den)
        assert f.is_polynomial
        assert f == RationalFunction(P_Z + P_ONE)

    def test_monic_denominator_canonical_form(self):
        two = Polynomial.constant(ComplexRational(2))
        f = RationalFunction(P_ONE, two * P_Z - two)
        assert f.den == P_Z - P_ONE
        assert f.num == Polynomial.constant(cr(1, 2))

    def test_zero_is_canonical(self):
        f = RationalFunction(P_ZERO, P_Z * P_Z)
        assert f == RF_ZERO
        assert f.den == P_ONE

    def test_zero_denominator_rejected(self):
        with pytest.raises(ZeroDivisionError):
            RationalFunction(P_ONE, P_ZERO)

    def test_field_axioms(self, rng):
        for _ in range(25):
            f, g, h = (random_rf(rng) for _ in range(3))
            assert (f + g) + h == f + (g + h)
            assert f * (g + h) == f * g + f * h
            if f:
                assert f / f == RF_ONE
                assert (g / f) * f == g

    def test_quotient_rule(self, rng):
        for _ in range(15):
            f, g = random_rf(rng), random_rf(rng)
            assert (f * g).derivative() == f.derivative() * g + f * g.derivative()
            if g:
                lhs = (f / g).derivative()
                rhs = (f.derivative() * g - f * g.derivative()) / (g * g)
                assert lhs == rhs

    def test_geometric_series_taylor(self):
        f = RF_ONE / (RF_ONE - RF_Z)
        coeffs = f.taylor(CR_ZERO, 6)
        assert coeffs == [CR_ONE] * 7

    def test_taylor_matches_derivatives(self, rng):
        for _ in range(10):
            f = random_rf(rng)
            center = cr(7, 1)
            try:
                f.evaluate(center)
            except ZeroDivisionError:
                continue
            coeffs = f.taylor(center, 4)
            g = f
            for k in range(5):
                assert coeffs[k] == g.evaluate(center) / ComplexRational(factorial(k))
                g = g.derivative()

    def test_taylor_about_pole_rejected(self):
        f = RF_ONE / (RF_Z - RF_ONE)
        with pytest.raises(ValidationError):
            f.taylor(CR_ONE, 3)

    def test_evaluate_at_pole_rejected(self):
        f = RF_ONE / RF_Z
        with pytest.raises(ZeroDivisionError):
            f.evaluate(CR_ZERO)
        with pytest.raises(ZeroDivisionError):
            f.eval_complex(0.0)

    def test_eval_complex_matches_exact(self, rng):
        for _ in range(10):
            f = random_rf(rng)
            x = cr(3, 2, 1, 2)
            try:
                exact = f.evaluate(x)
            except ZeroDivisionError:
                continue
            approx = f.eval_complex(x.to_complex())
            assert abs(approx - exact.to_complex()) < 1e-12 * (1 + abs(approx))


class TestParser:
    def test_round_trip_random(self, rng):
        for _ in range(60):
            f = random_rf(rng)
            assert parse_rational_function(str(f)) == f

    @pytest.mark.parametrize(
        "text, expected",
        [
            ("2i/5", RationalFunction.constant(cr(0, 1, 2, 5))),
            ("i^2", RationalFunction.constant(cr(-1))),
            ("-z^2", RationalFunction(-(P_Z * P_Z))),
            ("(z+1)*(z-1)", RationalFunction(P_Z * P_Z - P_ONE)),
            ("1/(z-1)", RationalFunction(P_ONE, P_Z - P_ONE)),
            ("z/2 + z/2", RF_Z),
            ("2*z^3 - z + 1/2", RationalFunction(Polynomial([cr(1, 2), cr(-1), 0, cr(2)]))),
            ("  z ", RF_Z),
        ],
    )
    def test_specific_expressions(self, text, expected):
        assert parse_rational_function(text) == expected

    def test_imaginary_literal_binds_tighter_than_division(self):
        assert parse_rational_function("2i/5") == RationalFunction.constant(
            ComplexRational(0, Fraction(2, 5))
        )

    def test_decimals_rejected_with_position(self):
        with pytest.raises(ParseError) as info:
            parse_rational_function("1.5")
        assert info.value.position == 1

    def test_unexpected_character_position(self):
        with pytest.raises(ParseError) as info:
            parse_rational_function("2 + @")
        assert info.value.position == 4

    def test_unbalanced_parenthesis(self):
        with pytest.raises(ParseError):
            parse_rational_function("(z + 1")

    def test_trailing_input(self):
        with pytest.raises(ParseError):
            parse_rational_function("z z")

    def test_literal_division_by_zero(self):
        with pytest.raises(ParseError):
            parse_rational_function("1/0")
        with pytest.raises(ParseError):
            parse_rational_function("1/(z-z)")

    def test_empty_and_blank_rejected(self):
        with pytest.raises(ParseError):
            parse_rational_function("")
        with pytest.raises(ParseError):
            parse_rational_function("   ")

    def test_negative_exponent_rejected(self):
        with pytest.raises(ParseError):
            parse_rational_function("z^-1")
