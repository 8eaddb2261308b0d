"""Exact trace-coordinate algebra and SU(2) twist dynamics for rank-3 free-group character varieties."""

from .charvar import SPHERE, TORUS, Surface, SurfaceKind, get_surface, relation_k, sum_product
from .polyring import VARS, Poly, PolyMatrix, parse

__all__ = [
    "SPHERE",
    "TORUS",
    "VARS",
    "Poly",
    "PolyMatrix",
    "Surface",
    "SurfaceKind",
    "get_surface",
    "parse",
    "relation_k",
    "sum_product",
]

__version__ = "0.1.0"
