"""Curvature estimators for soft masks viewed as graphs z = u(x).

Three estimators are provided: the 2D graph mean curvature, the 3D hypersurface
mean curvature (numerator chi over sqrt(1+|grad u|^2), implemented verbatim,
without the extra normalization a textbook graph mean curvature would carry),
and a fast 3D variant that sums the squared unmixed second derivatives and so
needs only three stencil passes. A plain second-derivative sum (laplacian_3d)
is included for comparison; note the fast variant is NOT the Laplacian despite
using the same kernels: it squares each term and is therefore nonnegative.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from .diffops import d1, d2, dmixed
from .field import FieldError, ScalarField


class CurvatureMode(Enum):
    MEAN_2D = "mean2d"
    MEAN_3D = "mean3d"
    FAST_3D = "fast3d"
    LAPLACIAN_3D = "lap3d"

    @property
    def required_ndim(self) -> int:
        return 2 if self is CurvatureMode.MEAN_2D else 3

    @classmethod
    def parse(cls, name: str) -> "CurvatureMode":
        for mode in cls:
            if mode.value == name.lower():
                return mode
        raise ValueError(f"unknown curvature mode {name!r}; choose from {[m.value for m in cls]}")


def _require_ndim(field: ScalarField, ndim: int, what: str) -> None:
    if field.ndim != ndim:
        raise FieldError(f"{what} requires a {ndim}D field, got {field.ndim}D")


def mean_curvature_2d_raw(a: np.ndarray, spacing: tuple[float, ...]) -> np.ndarray:
    hx, hy = spacing
    ux = d1(a, 0, hx)
    uy = d1(a, 1, hy)
    uxx = d2(a, 0, hx)
    uyy = d2(a, 1, hy)
    uxy = dmixed(a, 0, 1, hx, hy)
    num = (1.0 + ux * ux) * uyy + (1.0 + uy * uy) * uxx - 2.0 * ux * uy * uxy
    den = 2.0 * (1.0 + ux * ux + uy * uy) ** 1.5
    return num / den


def mean_curvature_3d_raw(a: np.ndarray, spacing: tuple[float, ...]) -> np.ndarray:
    hx, hy, hz = spacing
    ux = d1(a, 0, hx)
    uy = d1(a, 1, hy)
    uz = d1(a, 2, hz)
    ux2, uy2, uz2 = ux * ux, uy * uy, uz * uz
    chi = (
        d2(a, 0, hx) * (1.0 + uy2 + uz2)
        + d2(a, 1, hy) * (1.0 + ux2 + uz2)
        + d2(a, 2, hz) * (1.0 + ux2 + uy2)
        - 2.0
        * (
            ux * uy * dmixed(a, 0, 1, hx, hy)
            + ux * uz * dmixed(a, 0, 2, hx, hz)
            + uy * uz * dmixed(a, 1, 2, hy, hz)
        )
    )
    return chi / np.sqrt(1.0 + ux2 + uy2 + uz2)


def fast_curvature_3d_raw(a: np.ndarray, spacing: tuple[float, ...]) -> np.ndarray:
    hx, hy, hz = spacing
    uxx = d2(a, 0, hx)
    uyy = d2(a, 1, hy)
    uzz = d2(a, 2, hz)
    return uxx * uxx + uyy * uyy + uzz * uzz


def laplacian_3d_raw(a: np.ndarray, spacing: tuple[float, ...]) -> np.ndarray:
    hx, hy, hz = spacing
    return d2(a, 0, hx) + d2(a, 1, hy) + d2(a, 2, hz)


def mean_curvature_2d(u: ScalarField) -> ScalarField:
    """2D graph mean curvature; the denominator is >= 2, so always finite."""
    _require_ndim(u, 2, "mean_curvature_2d")
    return u.with_data(mean_curvature_2d_raw(u.data, u.spacing))


def mean_curvature_3d(u: ScalarField) -> ScalarField:
    """3D hypersurface curvature chi / sqrt(1 + |grad u|^2); always finite."""
    _require_ndim(u, 3, "mean_curvature_3d")
    return u.with_data(mean_curvature_3d_raw(u.data, u.spacing))


def fast_curvature_3d(u: ScalarField) -> ScalarField:
    """Sum of squared unmixed second derivatives; nonnegative everywhere."""
    _require_ndim(u, 3, "fast_curvature_3d")
    return u.with_data(fast_curvature_3d_raw(u.data, u.spacing))


def laplacian_3d(u: ScalarField) -> ScalarField:
    """Plain sum of unmixed second derivatives (comparison mode)."""
    _require_ndim(u, 3, "laplacian_3d")
    return u.with_data(laplacian_3d_raw(u.data, u.spacing))


_RAW_BY_MODE = {
    CurvatureMode.MEAN_2D: mean_curvature_2d_raw,
    CurvatureMode.MEAN_3D: mean_curvature_3d_raw,
    CurvatureMode.FAST_3D: fast_curvature_3d_raw,
    CurvatureMode.LAPLACIAN_3D: laplacian_3d_raw,
}


def curvature_raw(a: np.ndarray, spacing: tuple[float, ...], mode: CurvatureMode) -> np.ndarray:
    if a.ndim != mode.required_ndim:
        raise FieldError(f"mode {mode.value} requires {mode.required_ndim}D input, got {a.ndim}D")
    return _RAW_BY_MODE[mode](a, spacing)


def curvature(u: ScalarField, mode: CurvatureMode) -> ScalarField:
    """Dispatch to the estimator selected by ``mode``."""
    return u.with_data(curvature_raw(u.data, u.spacing, mode))
