from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import REF, T1, T12, T13, T23, polys, rational_points
from torelli.charvar import known_polys, relation_k
from torelli.polyring import (
    VARS,
    Poly,
    PolyMatrix,
    PolySyntaxError,
    det_bareiss,
    det_cofactor,
    det_leibniz,
    parse,
    sqrt_poly,
    to_text,
    variables,
)


class TestParse:
    def test_simple(self):
        p = parse("t12^2 - 2")
        assert p.terms == {(0, 0, 0, 0, 2, 0, 0): 1, (0,) * 7: -2}

    def test_zero(self):
        assert parse("0").is_zero()
        assert parse("0").terms == {}

    def test_grammar_example(self):
        p = parse("2*t23^2 - t2*t3*t23 - t1*t4*t23")
        x = variables()
        assert p == 2 * x[6] ** 2 - x[2] * x[3] * x[6] - x[1] * x[0] * x[6]

    def test_rational_and_juxtaposed(self):
        assert parse("3/4 t1 t2^2") == Fraction(3, 4) * T1 * variables()[2] ** 2
        assert parse(" - 1/2*t12 + t13 ") == Fraction(-1, 2) * T12 + T13

    def test_k_round_trip(self):
        k = relation_k()
        assert parse(str(k)) == k

    def test_canonical_print(self):
        assert str(parse("2*t23*t23")) == "2*t23^2"
        assert str(REF["s_4hs"]) == "t2*t4*t13 + t1*t3*t13 - t1*t4*t23 - t2*t3*t23 - 2*t13^2 + 2*t23^2"

    @pytest.mark.parametrize("bad", ["t5", "x1", "t12^", "2*", "t1 +", "1/0", "t1^-1", "(t1)", "t1 ** 2"])
    def test_errors(self, bad):
        with pytest.raises(PolySyntaxError):
            parse(bad)

    def test_error_position(self):
        with pytest.raises(PolySyntaxError) as err:
            parse("t1 + t9")
        assert err.value.pos == 5

    def test_corpus_round_trip(self):
        for name, p in known_polys().items():
            assert parse(str(p)) == p, name
            assert str(parse(str(p))) == str(p), name

    @given(polys())
    def test_round_trip_random(self, p):
        assert parse(str(p)) == p
        assert parse(to_text(p, "lex")) == p


class TestArithmetic:
    def test_inverse(self):
        k = relation_k()
        assert (k + (-k)).is_zero()

    def test_difference_of_squares(self):
        assert (T12 + 1) * (T12 - 1) == T12**2 - 1

    @given(polys(), polys(), polys())
    @settings(max_examples=60, deadline=None)
    def test_ring_laws(self, a, b, c):
        assert a + b == b + a
        assert a * b == b * a
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c

    @given(polys(), st.integers(0, 3))
    @settings(max_examples=30, deadline=None)
    def test_pow(self, a, n):
        expected = Poly.const(1)
        for _ in range(n):
            expected = expected * a
        assert a**n == expected

    @given(polys(), polys())
    @settings(max_examples=40, deadline=None)
    def test_exact_div(self, a, b):
        if b.is_zero():
            return
        assert (a * b).exact_div(b) == a

    def test_exact_div_raises(self):
        with pytest.raises(ArithmeticError):
            (T12**2 + 1).exact_div(T12 + 1)

    def test_no_zero_coefficients(self):
        p = T12 + T13 - T12
        assert all(c != 0 for c in p.terms.values())
        assert p == T13


class TestCalculus:
    def test_diff_k_t13(self):
        expected = 2 * T13 + T12 * T23 - (T1 * variables()[3] + variables()[2] * variables()[0])
        assert relation_k().diff("t13") == expected

    def test_diff_s_t23(self):
        c23 = variables()[2] * variables()[3] + T1 * variables()[0]
        assert REF["s_4hs"].diff("t23") == 4 * T23 - c23

    def test_diff_constant(self):
        for v in VARS:
            assert Poly.const(7).diff(v).is_zero()

    @given(polys(), polys(), st.sampled_from(VARS))
    @settings(max_examples=60, deadline=None)
    def test_linear_and_leibniz(self, a, b, v):
        assert (a + b).diff(v) == a.diff(v) + b.diff(v)
        assert (3 * a).diff(v) == 3 * a.diff(v)
        assert (a * b).diff(v) == a.diff(v) * b + a * b.diff(v)


class TestEval:
    def test_trivial_character(self):
        assert relation_k().eval([2] * 7) == 0
        assert REF["s_4hs"].eval([2] * 7) == 0

    def test_projection(self):
        assert T12.eval([0, 0, 0, 0, Fraction(3, 7), 0, 0]) == Fraction(3, 7)

    def test_float_mode(self):
        k = relation_k()
        x = [0.1, -0.3, 1.2, 0.7, -1.5, 0.2, 0.9]
        exact = k.eval([Fraction(v) for v in x])
        assert k.eval(x, exact=False) == pytest.approx(float(exact), abs=1e-12)

    @given(polys(), polys(), rational_points)
    @settings(max_examples=200, deadline=None)
    def test_homomorphism(self, a, b, x):
        assert (a * b).eval(x) == a.eval(x) * b.eval(x)
        assert (a + b).eval(x) == a.eval(x) + b.eval(x)

    def test_subs(self):
        k = relation_k()
        x = [Fraction(i, 5) for i in range(7)]
        assert k.subs("t13", x[5]).eval(x) == k.eval(x)


def _matrix(draw_polys, n):
    return PolyMatrix([draw_polys[i * n:(i + 1) * n] for i in range(n)])


class TestDeterminant:
    def test_identity(self):
        assert PolyMatrix.identity(7).det() == Poly.const(1)
        assert PolyMatrix.identity(7).det("cofactor") == Poly.const(1)

    def test_equal_rows(self):
        k = relation_k()
        rows = [p.gradient() for p in (k, k, T12, T13, T23, T1, variables()[0])]
        assert PolyMatrix(rows).det().is_zero()

    @given(st.lists(polys(max_terms=3, max_deg=2), min_size=16, max_size=16), st.sampled_from([3, 4]))
    @settings(max_examples=40, deadline=None)
    def test_methods_agree(self, entries, n):
        m = _matrix(entries, n)
        d = det_leibniz(m)
        assert det_bareiss(m) == d
        assert det_cofactor(m) == d

    def test_swap_rows_negates(self):
        x = variables()
        m = PolyMatrix([[x[0], x[1], 1], [x[4], 2, x[5]], [x[6] ** 2, x[2], x[3]]])
        assert m.swap_rows(0, 2).det() == -m.det()


class TestSqrt:
    @given(polys(max_terms=4, max_deg=2))
    @settings(max_examples=60, deadline=None)
    def test_squares(self, q):
        r = sqrt_poly(q * q)
        assert r is not None
        assert r * r == q * q

    def test_non_square(self):
        assert sqrt_poly(T12**2 + 1) is None
        assert sqrt_poly(2 * T12**2) is None
        assert sqrt_poly(T12**2 + T13) is None
