"""Warping cornerpoints of a normalized diagram into the complex plane.

Both maps send the diagonal to the origin and a cornerpoint at distance
``d`` from the diagonal to a complex number of modulus ``d``. ``T`` turns the
ray by ``sqrt(u**2 + v**2)`` radians, ``R`` sends segments orthogonal to the
diagonal onto rays at angle ``pi * (u + v)``. Restricted to the triangle
``0 <= u <= v <= 1`` both are injective away from the diagonal.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diagram import PersistenceDiagram
from .exceptions import DomainError, InvalidArgumentError, NotFinitizedError

__all__ = ["WarpedMultiset", "warp_T", "warp_R", "warp_points", "warp_diagram", "TRANSFORMS"]

TRIANGLE_TOL = 1e-12
_SQRT2 = np.sqrt(2.0)


def _check_triangle(u, v):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    tol = TRIANGLE_TOL
    bad = ~((u >= -tol) & (v <= 1.0 + tol) & (u <= v + tol))
    if np.any(bad):
        i = int(np.flatnonzero(np.atleast_1d(bad))[0])
        uu, vv = np.atleast_1d(u)[i], np.atleast_1d(v)[i]
        raise DomainError(f"({uu}, {vv}) lies outside the triangle 0 <= u <= v <= 1")
    u = np.clip(u, 0.0, 1.0)
    v = np.clip(v, 0.0, 1.0)
    return u, np.maximum(u, v)


def _T(u, v):
    alpha = np.sqrt(u * u + v * v)
    c, s = np.cos(alpha), np.sin(alpha)
    half = (v - u) / 2.0
    return half * (c - s) + 1j * (half * (c + s))


def _R(u, v):
    theta = np.pi * (u + v)
    r = (v - u) / _SQRT2
    return r * np.cos(theta) + 1j * (r * np.sin(theta))


TRANSFORMS = {"T": _T, "R": _R}


def warp_T(u: float, v: float) -> complex:
    u, v = _check_triangle(u, v)
    return complex(_T(u, v))


def warp_R(u: float, v: float) -> complex:
    u, v = _check_triangle(u, v)
    return complex(_R(u, v))


def warp_points(u, v, transform: str = "R") -> np.ndarray:
    """Vectorized warp of coordinate arrays; validates the triangle."""
    try:
        fn = TRANSFORMS[transform]
    except KeyError:
        raise InvalidArgumentError(f"transform must be 'T' or 'R', got {transform!r}") from None
    u, v = _check_triangle(u, v)
    return np.asarray(fn(u, v), dtype=complex)


@dataclass(frozen=True)
class WarpedMultiset:
    """Complex values with multiplicities, in canonical order.

    ``values`` are distinct and sorted by (real, imag); ``source_count`` is the
    number of cornerpoints of the diagram it came from, with multiplicity.
    """

    values: np.ndarray
    multiplicities: np.ndarray
    source_count: int

    def __len__(self):
        return len(self.values)

    @property
    def total(self) -> int:
        return int(self.multiplicities.sum())

    @classmethod
    def from_values(cls, values, multiplicities=None, source_count=None) -> "WarpedMultiset":
        """Merge coincident values (exact equality) and sort canonically."""
        z = np.asarray(values, dtype=complex).ravel()
        if multiplicities is None:
            m = np.ones(len(z), dtype=np.int64)
        else:
            m = np.asarray(multiplicities, dtype=np.int64).ravel()
            if m.shape != z.shape:
                raise InvalidArgumentError("values and multiplicities differ in length")
            if np.any(m < 1):
                raise InvalidArgumentError("multiplicities must be positive")
        if len(z):
            # +0.0 normalizes negative zeros so that 0j and -0j merge.
            pairs = np.column_stack([z.real + 0.0, z.imag + 0.0])
            uniq, inverse = np.unique(pairs, axis=0, return_inverse=True)
            merged = np.zeros(len(uniq), dtype=np.int64)
            np.add.at(merged, inverse.ravel(), m)
            z = uniq[:, 0] + 1j * uniq[:, 1]
            m = merged
        else:
            z = np.empty(0, dtype=complex)
            m = np.empty(0, dtype=np.int64)
        if source_count is None:
            source_count = int(m.sum())
        z.setflags(write=False)
        m.setflags(write=False)
        return cls(z, m, int(source_count))


def warp_diagram(diagram: PersistenceDiagram, transform: str = "R") -> WarpedMultiset:
    """Map every cornerpoint through ``T`` or ``R``, carrying multiplicities.

    Raises
    ------
    NotFinitizedError
        If the diagram still holds cornerlines.
    DomainError
        If a point lies outside the normalized triangle.
    """
    if diagram.has_cornerlines:
        raise NotFinitizedError("diagram contains cornerlines; finitize it first")
    arr = diagram.array
    if len(arr) == 0:
        return WarpedMultiset.from_values([], source_count=0)
    z = warp_points(arr[:, 0], arr[:, 1], transform)
    return WarpedMultiset.from_values(z, arr[:, 2].astype(np.int64), diagram.count)
