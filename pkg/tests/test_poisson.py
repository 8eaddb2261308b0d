import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from conftest import REF, T1, T4, T12, T13, T23, TORUS_TABLE, polys
from torelli._kernels import PolySystem
from torelli.charvar import SPHERE, TORUS, get_surface, relation_k, sum_product
from torelli.locus import dependency_poly
from torelli.poisson import (
    apply_field,
    bivector,
    bracket,
    casimir_report,
    ham_field,
    is_skew,
    jacobi_report,
)
from torelli.polyring import VARS, parse
from torelli.su2dyn import random_rep

SURFACES = [SPHERE, TORUS]


@pytest.mark.parametrize("surface", SURFACES)
def test_bivector_skew(surface):
    assert is_skew(bivector(surface))


def test_torus_literal_table_verbatim():
    W = bivector(TORUS, "literal")
    for i in range(7):
        for j in range(i + 1, 7):
            expected = parse(TORUS_TABLE.get((i + 1, j + 1), "0"))
            assert W[i, j] == expected, (i + 1, j + 1)


def test_torus_goldman_flips_curve_block_only():
    Wp, Wg = bivector(TORUS, "literal"), bivector(TORUS, "goldman")
    block = {(4, 5), (4, 6), (5, 6)}
    for i in range(7):
        for j in range(7):
            flip = (min(i, j), max(i, j)) in block
            assert Wg[i, j] == (-Wp[i, j] if flip else Wp[i, j])


def test_unknown_variant():
    with pytest.raises(ValueError):
        bivector(TORUS, "other")


def test_sphere_h12_of_s():
    s = dependency_poly(SPHERE).s
    assert apply_field(ham_field(SPHERE, T12), s) == REF["h12s_4hs"]


@pytest.mark.parametrize("surface", SURFACES)
def test_t4_is_casimir(surface):
    assert ham_field(surface, T4).is_zero()


def test_sphere_boundary_casimirs():
    for f in get_surface(SPHERE).boundary_functions:
        assert ham_field(SPHERE, f).is_zero()


def test_torus_boundary_casimirs():
    ks, kp = sum_product()
    for f in (T4, ks, kp, relation_k()):
        for x in (T1, T12, T13, T23):
            assert bracket(TORUS, f, x).is_zero()


def test_literal_table_breaks_ks_casimir():
    ks, _ = sum_product()
    assert any(not bracket(TORUS, ks, x, "literal").is_zero() for x in (T12, T13, T23))


def test_casimir_report():
    for surface in SURFACES:
        for name, row in casimir_report(surface).items():
            assert all(b.is_zero() for b, _ in row.values()), name


@given(polys(max_terms=3, max_deg=2), polys(max_terms=3, max_deg=2), polys(max_terms=3, max_deg=2))
@settings(max_examples=25, deadline=None)
def test_bracket_antisymmetric_and_leibniz(f, g, h):
    for surface in SURFACES:
        assert bracket(surface, f, g) == -bracket(surface, g, f)
        assert bracket(surface, f, g * h) == bracket(surface, f, g) * h + g * bracket(surface, f, h)


@given(st.sampled_from(VARS))
def test_hamiltonian_conserves_itself(v):
    x = parse(v)
    for surface in SURFACES:
        assert bracket(surface, x, x).is_zero()


def test_jacobi_identity():
    assert jacobi_report(SPHERE) == {}
    assert jacobi_report(TORUS, "goldman") == {}


def test_literal_table_fails_jacobi():
    bad = jacobi_report(TORUS, "literal")
    assert len(bad) == 15


def _coords(M):
    A1, A2, A3 = M
    tr = lambda X: np.trace(X).real  # noqa: E731
    return np.array([tr(A1 @ A2 @ A3), tr(A1), tr(A2), tr(A3), tr(A1 @ A2), tr(A1 @ A3), tr(A2 @ A3)])


def _deform(M, name, eps):
    """Twist deformation along the curve of ``name``, fixing a boundary word."""
    inv = np.linalg.inv
    A1, A2, A3 = M
    if name == "p12":
        G, B = A1 @ A2 @ inv(A1) @ inv(A2), A1 @ A2 @ A3
    elif name == "p13":
        G, B = A1 @ A3 @ inv(A1) @ inv(A3), A1 @ A3 @ A2
    else:
        G, B = inv(A2) @ inv(A3) @ A2 @ A3, A1 @ A3 @ A2
    E = expm(eps * (G - np.trace(G) / 2 * np.eye(2)))
    N = [E @ A @ inv(E) for A in M]
    if name == "p12":
        return [N[0], N[1], inv(N[0] @ N[1]) @ B]
    if name == "p13":
        return [N[0], inv(N[0] @ N[2]) @ B, N[2]]
    return [B @ inv(N[2] @ N[1]), N[1], N[2]]


def _tangency_error(variant, name, rng, trials=20):
    H = PolySystem(ham_field(TORUS, get_surface(TORUS).trace_functions[name], variant).comps)
    worst = 0.0
    for _ in range(trials):
        M = random_rep(rng).matrices()
        h = 1e-6
        d = (_coords(_deform(M, name, h)) - _coords(_deform(M, name, -h))) / (2 * h)
        v = H(_coords(M))
        c = (d @ v) / (v @ v)
        worst = max(worst, np.linalg.norm(d - c * v) / np.linalg.norm(d))
    return worst


@pytest.mark.parametrize("name", ["p12", "p13", "p23"])
def test_goldman_fields_are_twist_flows(name):
    # the twist deformation's velocity is parallel to H(p) only for the corrected table
    rng = np.random.default_rng(5)
    assert _tangency_error("goldman", name, rng) < 1e-6
    assert _tangency_error("literal", name, rng) > 0.1
