"""Goldman Poisson bivectors on trace coordinates and their Hamiltonian fields.

Conventions: with ``W`` the bivector matrix indexed in ``VARS`` order,

    {f, g} = sum_ij W[i][j] * df/dt_i * dg/dt_j
    H(f)_j = sum_i W[i][j] * df/dt_i          so that  H(f)(g) = {f, g}.

For the sphere ``W`` is the contraction of d_t12 ^ d_t23 ^ d_t13 with dk.
For the torus two tables are available.  ``"literal"`` is the reference table taken verbatim;
``"goldman"`` (the default) flips the sign of the (t12, t13, t23) block,
which is the unique choice of that block making k_s and k_p Casimirs and
satisfying the Jacobi identity.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations

from .charvar import SPHERE, get_surface, relation_k, surface_kind
from .polyring import NVARS, VAR_INDEX, Poly, PolyMatrix, poly_sum, variables

T4, T1, T2, T3, T12, T13, T23 = variables()

TORUS_VARIANTS = ("goldman", "literal")

# 1-based (row, col), in the order t4, t1, t2, t3, t12, t13, t23
_TORUS_TABLE = {
    (2, 3): -2 * T12 + T1 * T2,
    (2, 4): 2 * T13 - T1 * T3,
    (2, 5): -T1 * T12 + 2 * T2,
    (2, 6): T1 * T13 - 2 * T3,
    (3, 4): -2 * T23 + T2 * T3,
    (3, 5): -2 * T1 + T12 * T2,
    (3, 7): -T2 * T23 + 2 * T3,
    (4, 6): 2 * T1 - T13 * T3,
    (4, 7): -2 * T2 + T23 * T3,
    (5, 6): -T12 * T13 - 2 * T23 + 2 * T2 * T3,
    (5, 7): 2 * T13 + T12 * T23 - 2 * T1 * T3,
    (6, 7): -2 * T12 + 2 * T1 * T2 - T13 * T23,
}
_FLIPPED_BLOCK = {(5, 6), (5, 7), (6, 7)}


def _skew(entries: dict) -> PolyMatrix:
    rows = [[Poly() for _ in range(NVARS)] for _ in range(NVARS)]
    for (i, j), p in entries.items():
        rows[i][j] = p
        rows[j][i] = -p
    return PolyMatrix(rows)


@lru_cache(maxsize=None)
def bivector(surface, variant: str = "goldman") -> PolyMatrix:
    """7x7 skew matrix of the Poisson bivector (``BivectorMatrix``)."""
    kind = surface_kind(surface)
    if kind is SPHERE:
        k = relation_k()
        a, b, c = VAR_INDEX["t12"], VAR_INDEX["t23"], VAR_INDEX["t13"]
        # i_{dk}(d_a ^ d_b ^ d_c) = k_a d_b^d_c - k_b d_a^d_c + k_c d_a^d_b
        return _skew({(b, c): k.diff(a), (a, c): -k.diff(b), (a, b): k.diff(c)})
    if variant not in TORUS_VARIANTS:
        raise ValueError(f"unknown torus bivector variant {variant!r}")
    entries = {}
    for (i, j), p in _TORUS_TABLE.items():
        if variant == "goldman" and (i, j) in _FLIPPED_BLOCK:
            p = -p
        entries[(i - 1, j - 1)] = p
    return _skew(entries)


class VectorField:
    """Derivation ``sum_i comps[i] * d/dt_i`` with polynomial components."""

    __slots__ = ("comps",)

    def __init__(self, comps):
        comps = tuple(comps)
        if len(comps) != NVARS:
            raise ValueError(f"vector field needs {NVARS} components")
        self.comps = comps

    def __getitem__(self, i):
        return self.comps[i]

    def __iter__(self):
        return iter(self.comps)

    def __eq__(self, other):
        return isinstance(other, VectorField) and self.comps == other.comps

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.comps)

    def __repr__(self):
        return f"VectorField({[str(c) for c in self.comps]})"


def ham_field(surface, f: Poly, variant: str = "goldman") -> VectorField:
    W = bivector(surface, variant)
    grad = f.gradient()
    comps = []
    for j in range(NVARS):
        comps.append(poly_sum(grad[i] * W[i, j] for i in range(NVARS) if grad[i] and W[i, j]))
    return VectorField(comps)


def apply_field(v: VectorField, g: Poly) -> Poly:
    return poly_sum(c * g.diff(i) for i, c in enumerate(v.comps) if c)


def bracket(surface, f: Poly, g: Poly, variant: str = "goldman") -> Poly:
    return apply_field(ham_field(surface, f, variant), g)


def is_skew(W: PolyMatrix) -> bool:
    n = W.n
    return all(W[i, j] == -W[j, i] for i in range(n) for j in range(n))


def jacobiator(surface, i, j, l, variant: str = "goldman") -> Poly:
    """``{t_i,{t_j,t_l}} + cyclic``; zero for a genuine Poisson structure."""
    x = variables()
    br = lambda f, g: bracket(surface, f, g, variant)  # noqa: E731
    return br(x[i], br(x[j], x[l])) + br(x[j], br(x[l], x[i])) + br(x[l], br(x[i], x[j]))


def jacobi_report(surface, variant: str = "goldman") -> dict:
    """Nonzero Jacobiators on coordinate triples, keyed by variable names."""
    from .polyring import VARS

    out = {}
    for i, j, l in combinations(range(NVARS), 3):
        r = jacobiator(surface, i, j, l, variant)
        if r:
            out[(VARS[i], VARS[j], VARS[l])] = r
    return out


def casimir_report(surface, variant: str = "goldman") -> dict:
    """Brackets of the boundary functions and of ``k`` with each coordinate.

    Values are ``(bracket, normal form modulo k)`` pairs; a Casimir of the
    leaf structure has both zero, one preserved only on ``k = 0`` has the
    second zero.
    """
    from .groebner import normal_form_ideal
    from .polyring import VARS

    surf = get_surface(surface_kind(surface))
    k = relation_k()
    named = {f"F{i + 1}": f for i, f in enumerate(surf.boundary_functions)}
    named["k"] = k
    out = {}
    for name, f in named.items():
        row = {}
        for i, x in enumerate(variables()):
            b = bracket(surface, f, x, variant)
            row[VARS[i]] = (b, normal_form_ideal(b, [k]) if b else b)
        out[name] = row
    return out
