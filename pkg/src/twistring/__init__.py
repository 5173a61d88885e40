"""Exact computations in twisted homogeneous coordinate rings of an elliptic curve."""

from .curve_core import Curve, CurvePoint, Translation, make_automorphism
from .divisor_calc import Divisor, cumulative, is_virtually_effective, twist
from .riemann_roch import rr_basis
from .thcr_engine import SheafData, graded_piece, space_equal, space_product

__all__ = [
    "Curve", "CurvePoint", "Translation", "make_automorphism",
    "Divisor", "cumulative", "is_virtually_effective", "twist",
    "rr_basis", "SheafData", "graded_piece", "space_equal", "space_product",
]
__version__ = "0.1.0"
