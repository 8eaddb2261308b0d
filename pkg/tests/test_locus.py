from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings

from conftest import REF, T4, T12, T13, T23, polys
from torelli.charvar import SPHERE, TORUS
from torelli.locus import (
    dependency_poly,
    on_locus,
    row_variant_quotient,
    split_all,
    try_quadratic_split,
)
from torelli.polyring import VARS, Poly
from torelli.su2dyn import random_rep, trace_coords


def test_sphere_s_matches_reference():
    res = dependency_poly(SPHERE)
    assert res.s == REF["s_4hs"]
    assert res.row_labels == ("t4", "t1", "t2", "t3", "k", "p0", "p12")
    assert res.check()


def test_sphere_bareiss_agrees():
    assert dependency_poly(SPHERE, method="bareiss").s == dependency_poly(SPHERE).s


def test_row_swap_negates():
    J = dependency_poly(SPHERE).jacobian
    assert J.swap_rows(5, 6).det("cofactor") == -REF["s_4hs"]


def test_torus_s_matches_oracle(derived):
    s = dependency_poly(TORUS).s
    assert s == derived["torus_s"]
    assert len(s) == 282
    assert s.total_degree() == 12
    degrees = {v: s.degree_in(v) for v in VARS}
    assert degrees == {"t4": 0, "t1": 6, "t2": 4, "t3": 6, "t12": 4, "t13": 4, "t23": 4}


def test_torus_s_factors_from_oracle(derived):
    s = dependency_poly(TORUS).s
    factors = [f for f, _ in derived["torus_factors"]]
    assert sorted(f.total_degree() for f in factors) == [5, 7]
    prod = Poly.const(int(derived["torus_s_content"]))
    for f in factors:
        prod = prod * f
    assert prod == s


def test_kp_variant_is_t4_multiple():
    assert row_variant_quotient(TORUS) == T4


def test_unknown_row_variant():
    with pytest.raises(ValueError):
        dependency_poly(TORUS, "kx")


def test_s_vanishes_nowhere_generic():
    rng = np.random.default_rng(3)
    vals = [dependency_poly(TORUS).s.eval(trace_coords(random_rep(rng)), exact=False) for _ in range(20)]
    assert max(abs(v) for v in vals) > 1e-3


class TestSplit:
    def test_difference_of_squares(self):
        f1, f2 = try_quadratic_split(T12**2 - 1, "t12")
        assert {f1, f2} == {T12 - 1, T12 + 1}

    def test_irreducible(self):
        assert try_quadratic_split(T12**2 + 1, "t12") is None

    def test_wrong_degree(self):
        assert try_quadratic_split(T12**3 - T12, "t12") is None
        assert try_quadratic_split(T13, "t12") is None

    def test_scalar_lands_on_first_factor(self):
        s = 6 * (T12 - T13) * (T12 + 2 * T23)
        f1, f2 = try_quadratic_split(s, "t12")
        assert f1 * f2 == s

    @given(polys(max_terms=3, max_deg=2), polys(max_terms=3, max_deg=2), polys(max_terms=3, max_deg=2))
    @settings(max_examples=60, deadline=None)
    def test_products_of_linear_factors(self, a, b, c):
        # (t12*a + b)(t12 + c) with a, b, c free of t12
        a, b, c = (p.subs("t12", 0) for p in (a, b, c))
        if a.is_zero():
            return
        s = (T12 * a + b) * (T12 + c)
        got = try_quadratic_split(s, "t12")
        if got is not None:
            assert got[0] * got[1] == s

    def test_sphere_s_has_no_linear_split(self):
        # 2(t23^2 - t13^2) + ... only splits if the discriminant is a square
        res = split_all(REF["s_4hs"])
        for v, pair in res.items():
            if pair is not None:
                assert pair[0] * pair[1] == REF["s_4hs"], v

    def test_torus_has_no_quadratic_variable(self):
        assert all(pair is None for pair in split_all(dependency_poly(TORUS).s).values())


def test_on_locus():
    x = [0, 0, 0, 0, 0, 0, 0]
    assert on_locus(SPHERE, x)
    y = [0, 0, 0, 0, 0, Fraction(1), 0]
    assert not on_locus(SPHERE, y)
    assert (REF["s_4hs"]).eval(y) == -2
