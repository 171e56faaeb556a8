"""Exact arithmetic kernel: rationals, vectors, matrices, rank-3 arrays,
sparse polynomials, and invertible affine base maps."""

from .scalar import Scalar, ZERO, ONE, as_scalar, format_scalar, parse_scalar
from .linalg import Vec, Mat, mat_inverse
from .tensor import Bilinear, bilinear_apply
from .poly import Poly, BaseMap, poly_compose

__all__ = [
    "Scalar",
    "ZERO",
    "ONE",
    "as_scalar",
    "format_scalar",
    "parse_scalar",
    "Vec",
    "Mat",
    "mat_inverse",
    "Bilinear",
    "bilinear_apply",
    "Poly",
    "BaseMap",
    "poly_compose",
]
