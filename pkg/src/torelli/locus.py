"""Dependency loci: where the chosen Hamiltonian differentials stop spanning.

The locus polynomial ``s`` is the 7x7 Jacobian determinant of the boundary
functions, the relation ``k`` and the trace functions whose twist flows
generate the action.  Its sign is normalized once, on the sphere, and that
normalization is reused for the torus.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .charvar import SPHERE, get_surface, relation_k, sum_product, surface_kind
from .polyring import Poly, PolyMatrix, jacobian, sqrt_poly, var_index, variables

ROW_VARIANTS = ("ks", "kp")

# det(jacobian) = NORMALIZATION * s; fixed by the sphere anchor
NORMALIZATION = Fraction(1)


@dataclass(frozen=True)
class DependencyResult:
    s: Poly
    jacobian: PolyMatrix
    row_labels: tuple
    normalization: Fraction = NORMALIZATION

    def check(self) -> bool:
        return self.jacobian.det("cofactor") == self.s * self.normalization


def _rows(surface, row_variant):
    kind = surface_kind(surface)
    surf = get_surface(kind)
    tf = surf.trace_functions
    k = relation_k()
    T4, T1, T2, T3 = variables()[:4]
    if kind is SPHERE:
        return ("t4", "t1", "t2", "t3", "k", "p0", "p12"), [T4, T1, T2, T3, k, tf["p0"], tf["p12"]]
    if row_variant not in ROW_VARIANTS:
        raise ValueError(f"unknown row variant {row_variant!r}; expected 'ks' or 'kp'")
    ks, kp = sum_product()
    second = (ks if row_variant == "ks" else kp) - T4
    labels = ("t4", f"{row_variant}-t4", "k", "p12", "p23", "p13", "p0")
    return labels, [T4, second, k, tf["p12"], tf["p23"], tf["p13"], tf["p0"]]


@lru_cache(maxsize=None)
def dependency_poly(surface, row_variant: str = "ks", method: str = "cofactor") -> DependencyResult:
    """Locus polynomial ``s`` of a surface as a Jacobian determinant.

    ``row_variant`` only matters on the torus, where ``"kp"`` swaps the
    second row for the gradient of ``k_p - t4``.
    """
    labels, rows = _rows(surface, row_variant)
    J = jacobian(rows)
    d = J.det(method)
    if d.is_zero():
        raise ArithmeticError(f"dependency determinant vanishes identically for rows {labels}")
    return DependencyResult(s=d * (1 / NORMALIZATION), jacobian=J, row_labels=labels)


def row_variant_quotient(surface) -> Poly:
    """``s_kp / s_ks`` for the torus; raises if the kp-variant is not a multiple."""
    a = dependency_poly(surface, "ks").s
    b = dependency_poly(surface, "kp").s
    return b.exact_div(a)


def try_quadratic_split(s: Poly, v) -> tuple | None:
    """Factor ``s`` as a product of two polynomials linear in ``v``.

    Works when ``s`` has degree exactly two in ``v`` and the discriminant is
    a perfect square in the polynomial ring.  Returns ``None`` otherwise.
    The first factor carries the scalar so that ``s1 * s2 == s`` exactly.
    """
    if s.degree_in(v) != 2:
        return None
    parts = s.coeffs_in(v)
    zero = Poly()
    a, b, c = parts.get(2, zero), parts.get(1, zero), parts.get(0, zero)
    q = sqrt_poly(b * b - 4 * a * c)
    if q is None:
        return None
    x = Poly.var(var_index(v))
    lin = 2 * a * x + b
    f1, f2 = lin - q, lin + q
    # f1 * f2 == 4 a s: strip the 4a, putting the 2a wherever it divides
    pair = _strip_factor(f1, f2, 2 * a)
    if pair is None:
        pair = _strip_factor(f2, f1, 2 * a)
        if pair is None:
            return None
        pair = pair[1], pair[0]
    g1, g2 = pair
    g1, g2 = g1.primitive(), g2.primitive()
    prod = g1 * g2
    g1 = g1 * (s.leading_coefficient() / prod.leading_coefficient())
    if g1 * g2 != s:
        return None
    return g1, g2


def _strip_factor(f, g, d):
    """Return ``(f / 2, g / d)`` if ``d`` divides ``g`` exactly."""
    try:
        return f * Fraction(1, 2), g.exact_div(d)
    except ArithmeticError:
        return None


def split_all(s: Poly) -> dict:
    """Run the split heuristic in every variable; maps variable name to the result or None."""
    from .polyring import VARS

    return {name: try_quadratic_split(s, name) for name in VARS}


def on_locus(surface, x, tol: float = 1e-9, row_variant: str = "ks") -> bool:
    s = dependency_poly(surface, row_variant).s
    return abs(s.eval(x, exact=False)) < tol
