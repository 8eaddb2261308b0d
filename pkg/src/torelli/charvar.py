"""Trace-coordinate polynomials of the rank-3 free group character variety.

Both surfaces handled here (the 4-holed sphere and the 2-holed torus) have
free fundamental group on F1, F2, F3; their character varieties sit inside
the cube [-2, 2]^7 as the zero set of the Fricke relation ``k``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .polyring import Poly, parse, variables

T4, T1, T2, T3, T12, T13, T23 = variables()


class SurfaceKind(enum.Enum):
    FOUR_HOLED_SPHERE = "4hs"
    TWO_HOLED_TORUS = "2ht"


SPHERE = SurfaceKind.FOUR_HOLED_SPHERE
TORUS = SurfaceKind.TWO_HOLED_TORUS


def surface_kind(value) -> SurfaceKind:
    if isinstance(value, SurfaceKind):
        return value
    if isinstance(value, Surface):
        return value.kind
    try:
        return SurfaceKind(value)
    except ValueError:
        raise ValueError(f"unknown surface {value!r}; expected '4hs' or '2ht'") from None


@lru_cache(maxsize=None)
def coefficient_polys() -> dict:
    """The abbreviations c12, c23, c13, c0 expanded in the coordinates."""
    return {
        "c12": T1 * T2 + T3 * T4,
        "c23": T2 * T3 + T1 * T4,
        "c13": T1 * T3 + T2 * T4,
        "c0": 4 - T1**2 - T2**2 - T3**2 - T4**2 - T1 * T2 * T3 * T4,
    }


@lru_cache(maxsize=None)
def relation_k() -> Poly:
    """Fricke relation cutting the character variety out of the cube."""
    c = coefficient_polys()
    return (
        T12**2 + T23**2 + T13**2 + T12 * T23 * T13
        - c["c12"] * T12 - c["c23"] * T23 - c["c13"] * T13 - c["c0"]
    )


@lru_cache(maxsize=None)
def sum_product() -> tuple:
    """``(k_s, k_p)``: sum and product of tr(F1F2F3) and tr(F1F3F2)."""
    ks = T13 * T2 + T1 * T23 + T12 * T3 - T1 * T2 * T3
    kp = (
        T2**2 + T3**2 + T1**2 + T12**2 + T13**2 + T23**2 + T12 * T13 * T23
        - T2 * T3 * T23 - T2 * T1 * T12 - T3 * T1 * T13 - 4
    )
    return ks, kp


def verify_relation_identity() -> bool:
    """Check ``k == k_p - t4 (k_s - t4)`` symbolically."""
    ks, kp = sum_product()
    return (relation_k() - (kp - T4 * (ks - T4))).is_zero()


@lru_cache(maxsize=None)
def _trace_functions(kind: SurfaceKind) -> dict:
    c = coefficient_polys()
    if kind is SPHERE:
        return {
            "p12": T12,
            "p0": c["c12"] - T23 * T13 - T12,
        }
    return {
        "p12": -2 + T1**2 + T12**2 - T1 * T12 * T2 + T2**2,
        "p23": -2 + T2**2 + T23**2 - T2 * T23 * T3 + T3**2,
        "p13": -2 + T1**2 + T13**2 - T1 * T13 * T3 + T3**2,
        "p0": (
            c["c0"] + T1 * T12 * T2 + T4 * T13 * T2 + T1 * T4 * T23
            + T12 * T4 * T3 - T1 * T13 * T3 - T1 * T12 * T23 * T3
            + T2 * T23 * T3 + T1**2 * T3**2 - 2
        ),
    }


@lru_cache(maxsize=None)
def _boundary_functions(kind: SurfaceKind) -> tuple:
    if kind is SPHERE:
        return (T1, T2, T3, T4)
    ks, _ = sum_product()
    return (T4, ks - T4)


@dataclass(frozen=True)
class Surface:
    """One of the two surfaces with free fundamental group of rank 3.

    ``curve_words`` gives, for each trace function name, a word in the free
    generators (1, 2, 3 and negatives for inverses) whose trace it is.
    """

    kind: SurfaceKind
    boundary_functions: tuple = field(repr=False)
    trace_functions: dict = field(repr=False)
    boundary_words: tuple = field(repr=False)
    curve_words: dict = field(repr=False)

    @property
    def name(self) -> str:
        return self.kind.value

    @property
    def n_boundary(self) -> int:
        return len(self.boundary_functions)

    @property
    def twist_table(self) -> dict:
        from .su2dyn import twist_table

        return twist_table(self.kind)


_BOUNDARY_WORDS = {
    # F4 = (F1 F2 F3)^-1 has the same trace as F1 F2 F3
    SPHERE: ((1,), (2,), (3,), (1, 2, 3)),
    TORUS: ((1, 2, 3), (1, 3, 2)),
}

_CURVE_WORDS = {
    SPHERE: {"p12": (1, 2), "p0": (1, -3, 2, 3)},
    TORUS: {
        "p12": (1, 2, -1, -2),
        "p23": (2, 3, -2, -3),
        "p13": (1, 3, -1, -3),
        "p0": (2, 3, -1, -2, -3, 1),
    },
}


@lru_cache(maxsize=None)
def get_surface(kind) -> Surface:
    kind = surface_kind(kind)
    return Surface(
        kind=kind,
        boundary_functions=_boundary_functions(kind),
        trace_functions=_trace_functions(kind),
        boundary_words=_BOUNDARY_WORDS[kind],
        curve_words=_CURVE_WORDS[kind],
    )


def trace_fn(surface, name: str) -> Poly:
    fns = get_surface(surface_kind(surface)).trace_functions
    try:
        return fns[name]
    except KeyError:
        raise ValueError(
            f"no trace function {name!r} on surface {surface_kind(surface).value}; "
            f"available: {', '.join(fns)}"
        ) from None


def check_boundary_value(surface, c) -> tuple:
    """Validate arity and range of boundary traces; returns them as a tuple of floats."""
    surf = get_surface(surface_kind(surface))
    c = tuple(float(v) for v in c)
    if len(c) != surf.n_boundary:
        raise ValueError(f"surface {surf.name} needs {surf.n_boundary} boundary values, got {len(c)}")
    if any(not -2.0 <= v <= 2.0 for v in c):
        raise ValueError(f"boundary values must lie in [-2, 2], got {c}")
    return c


def boundary_residual(surface, c, x) -> np.ndarray:
    """``F(x) - c`` followed by ``k(x)``; all zero exactly on the constraint set."""
    surf = get_surface(surface_kind(surface))
    c = tuple(float(v) for v in c)
    if len(c) != surf.n_boundary:
        raise ValueError(f"surface {surf.name} needs {surf.n_boundary} boundary values")
    vals = [f.eval(x, exact=False) - ci for f, ci in zip(surf.boundary_functions, c)]
    vals.append(relation_k().eval(x, exact=False))
    return np.array(vals)


def known_polys() -> dict:
    """Named corpus of the polynomials used throughout (for round-trip tests and the CLI)."""
    ks, kp = sum_product()
    out = {"k": relation_k(), "ks": ks, "kp": kp}
    out.update(coefficient_polys())
    for kind in SurfaceKind:
        for name, p in _trace_functions(kind).items():
            out[f"{kind.value}:{name}"] = p
    return out


def resolve_poly(text: str) -> Poly:
    """Parse polynomial text, also accepting a corpus name such as ``k`` or ``2ht:p12``."""
    named = known_polys()
    key = text.strip()
    if key in named:
        return named[key]
    return parse(text)
