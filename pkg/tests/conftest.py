import json
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import strategies as st

from torelli.polyring import NVARS, Poly, parse, variables

FIXTURES = Path(__file__).parent / "fixtures"

T4, T1, T2, T3, T12, T13, T23 = variables()
C12 = T1 * T2 + T3 * T4
C23 = T2 * T3 + T1 * T4
C13 = T1 * T3 + T2 * T4
C0 = 4 - T1**2 - T2**2 - T3**2 - T4**2 - T1 * T2 * T3 * T4

# reference polynomials, with the abbreviations c12, c23, c13, c0 expanded
REF = {
    "k": T12**2 + T23**2 + T13**2 + T12 * T23 * T13 - C12 * T12 - C23 * T23 - C13 * T13 - C0,
    "s_4hs": 2 * T23**2 - C23 * T23 - 2 * T13**2 + C13 * T13,
    "h12s_4hs": (2 * T13 + T12 * T23 - C13) * (4 * T23 - C23)
    + (-2 * T23 - T12 * T13 + C23) * (-4 * T13 + C13),
    "ks": T13 * T2 + T1 * T23 + T12 * T3 - T1 * T2 * T3,
    "kp": T2**2 + T3**2 + T1**2 + T12**2 + T13**2 + T23**2 + T12 * T13 * T23
    - T2 * T3 * T23 - T2 * T1 * T12 - T3 * T1 * T13 - 4,
    "p12_2ht": parse("-2 + t1^2 + t12^2 - t1*t12*t2 + t2^2"),
    "p23_2ht": parse("-2 + t2^2 + t23^2 - t2*t23*t3 + t3^2"),
    "p13_2ht": parse("-2 + t1^2 + t13^2 - t1*t13*t3 + t3^2"),
    "p0_2ht": C0 + parse(
        "t1*t12*t2 + t4*t13*t2 + t1*t4*t23 + t12*t4*t3 - t1*t13*t3"
        " - t1*t12*t23*t3 + t2*t23*t3 + t1^2*t3^2 - 2"
    ),
    "p0_4hs": C12 - T23 * T13 - T12,
}

# 1-based entries of the reference 2-holed torus bivector table
TORUS_TABLE = {
    (2, 3): "-2*t12 + t1*t2",
    (2, 4): "2*t13 - t1*t3",
    (2, 5): "-t1*t12 + 2*t2",
    (2, 6): "t1*t13 - 2*t3",
    (3, 4): "-2*t23 + t2*t3",
    (3, 5): "-2*t1 + t12*t2",
    (3, 7): "-t2*t23 + 2*t3",
    (4, 6): "2*t1 - t13*t3",
    (4, 7): "-2*t2 + t23*t3",
    (5, 6): "-t12*t13 - 2*t23 + 2*t2*t3",
    (5, 7): "2*t13 + t12*t23 - 2*t1*t3",
    (6, 7): "-2*t12 + 2*t1*t2 - t13*t23",
}


def poly_from_terms(terms) -> Poly:
    return Poly({tuple(m): Fraction(c) for m, c in terms})


@pytest.fixture(scope="session")
def derived():
    """Values recomputed by tests/oracle/make_fixtures.py (sympy) and frozen."""
    raw = json.loads((FIXTURES / "derived.json").read_text())
    out = {}
    for key, val in raw.items():
        if key == "torus_s":
            out[key] = poly_from_terms(val)
        elif key == "torus_factors":
            out[key] = [(poly_from_terms(f["poly"]), f["mult"]) for f in val]
        elif key.endswith(("_grevlex", "_lex")):
            out[key] = [poly_from_terms(g) for g in val]
        else:
            out[key] = val
    return out


@st.composite
def polys(draw, max_terms=6, max_deg=4, max_coeff=9):
    """Random polynomials with small integer or rational coefficients."""
    n = draw(st.integers(0, max_terms))
    terms = {}
    for _ in range(n):
        exps = draw(st.lists(st.integers(0, max_deg), min_size=NVARS, max_size=NVARS))
        while sum(exps) > max_deg:
            i = exps.index(max(exps))
            exps[i] -= 1
        num = draw(st.integers(-max_coeff, max_coeff))
        den = draw(st.integers(1, 3))
        terms[tuple(exps)] = terms.get(tuple(exps), 0) + Fraction(num, den)
    return Poly(terms)


rational_points = st.lists(
    st.fractions(min_value=-2, max_value=2, max_denominator=7), min_size=NVARS, max_size=NVARS
)


# ten small ideals exercising redundancy, non-principal bases and both orders
GB_CORPUS = [
    ["t12"],
    ["t12 - 1", "t12*t13 - t13"],
    ["t1^2 - t2", "t1*t2 - 1"],
    ["t1*t2 - t3", "t2*t3 - t1", "t1*t3 - t2"],
    ["t12^2 + t13^2 - 1", "t12 - t13"],
    ["t1^3 - 2*t1*t2", "t1^2*t2 - 2*t2^2 + t1"],
    ["t12*t23 - t13", "t13*t23 - t12", "t12*t13 - t23"],
    ["t1^2 + t2^2 + t3^2 - 4", "t1*t2*t3 - 1", "t1 + t2 + t3"],
    ["t4*t1 - t2*t3", "t4^2 - t1", "t2^2 - t3"],
    ["1/2*t12^2 - t23", "t13^2 - 3/4*t12", "t12*t13*t23 - 1"],
]


# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
