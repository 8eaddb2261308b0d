import numpy as np
import pytest

from conftest import C0, C12, C13, C23, REF, T1, T2, T3, T4, T12, T13
from torelli.charvar import (
    SPHERE,
    TORUS,
    boundary_residual,
    check_boundary_value,
    coefficient_polys,
    get_surface,
    relation_k,
    resolve_poly,
    sum_product,
    surface_kind,
    trace_fn,
    verify_relation_identity,
)
from torelli.polyring import parse
from torelli.su2dyn import random_rep, trace_coords


def test_k_matches_reference():
    assert relation_k() == REF["k"]


def test_k_known_coefficients():
    k = relation_k()
    # t12*t23*t13 appears with coefficient 1, t1*t2*t3*t4 with +1 (from -c0)
    assert k.coeff((0, 0, 0, 0, 1, 1, 1)) == 1
    assert k.coeff((1, 1, 1, 1, 0, 0, 0)) == 1
    assert k.coeff((0,) * 7) == -4
    assert k.coeff((0, 1, 1, 0, 1, 0, 0)) == -1


def test_coefficient_abbreviations():
    c = coefficient_polys()
    assert (c["c12"], c["c23"], c["c13"], c["c0"]) == (C12, C23, C13, C0)


def test_sum_product():
    ks, kp = sum_product()
    assert ks == REF["ks"]
    assert kp == REF["kp"]


def test_relation_identity():
    ks, kp = sum_product()
    assert (relation_k() - (kp - T4 * (ks - T4))).is_zero()
    assert verify_relation_identity()


def test_k_vanishes_on_su2_characters():
    rng = np.random.default_rng(11)
    k = relation_k()
    worst = max(abs(k.eval(trace_coords(random_rep(rng)), exact=False)) for _ in range(1000))
    assert worst < 1e-12


def test_ks_kp_are_sum_and_product():
    rng = np.random.default_rng(12)
    ks, kp = sum_product()
    for _ in range(50):
        r = random_rep(rng)
        x = trace_coords(r)
        A1, A2, A3 = r.matrices()
        a = np.trace(A1 @ A2 @ A3).real
        b = np.trace(A1 @ A3 @ A2).real
        assert ks.eval(x, exact=False) == pytest.approx(a + b, abs=1e-12)
        assert kp.eval(x, exact=False) == pytest.approx(a * b, abs=1e-12)


class TestSurfaces:
    def test_kinds(self):
        assert surface_kind("4hs") is SPHERE
        assert surface_kind("2ht") is TORUS
        assert surface_kind(get_surface("2ht")) is TORUS
        with pytest.raises(ValueError):
            surface_kind("3hs")

    def test_sphere_functions(self):
        s = get_surface(SPHERE)
        assert s.boundary_functions == (T1, T2, T3, T4)
        assert s.trace_functions["p12"] == T12
        assert s.trace_functions["p0"] == REF["p0_4hs"]

    def test_torus_functions(self):
        s = get_surface(TORUS)
        ks, _ = sum_product()
        assert s.boundary_functions == (T4, ks - T4)
        for name in ("p12", "p23", "p13", "p0"):
            assert s.trace_functions[name] == REF[f"{name}_2ht"], name

    def test_trace_fn_error(self):
        assert trace_fn("2ht", "p23") == REF["p23_2ht"]
        with pytest.raises(ValueError, match="p23"):
            trace_fn("4hs", "p23")

    def test_boundary_arity_and_range(self):
        assert check_boundary_value("2ht", [0.3, -1.1]) == (0.3, -1.1)
        with pytest.raises(ValueError):
            check_boundary_value("2ht", [0.3])
        with pytest.raises(ValueError):
            check_boundary_value("4hs", [0, 0, 0, 2.5])

    def test_boundary_residual_identity(self):
        assert np.allclose(boundary_residual("4hs", [2, 2, 2, 2], [2] * 7), 0)
        assert np.allclose(boundary_residual("2ht", [2, 2], [2] * 7), 0)


def test_resolve_poly_names_and_text():
    assert resolve_poly("k") == relation_k()
    assert resolve_poly("2ht:p12") == REF["p12_2ht"]
    assert resolve_poly("t12 + t13") == T12 + T13
    assert parse("t1*t2 + t3*t4") == C12
