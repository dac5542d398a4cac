"""Exact checks of sufficient conditions for 3-Selmer companion curves."""

from .curves import WeierstrassCurve, invariants, is_isomorphic, minimal_model, quadratic_twist
from .hessian import family_E, family_H, hessian_curve
from .localred import conductor, tate_algorithm
from .modpoly import ModPolyStore, load_modpoly

__version__ = "0.1.0"

__all__ = [
    "WeierstrassCurve",
    "conductor",
    "family_E",
    "family_H",
    "hessian_curve",
    "invariants",
    "is_isomorphic",
    "load_modpoly",
    "minimal_model",
    "ModPolyStore",
    "quadratic_twist",
    "tate_algorithm",
]
