"""Renormalized elementary symmetric functions of warped diagrams.

A diagram is summarized by the first ``k`` elementary symmetric functions of
its warped cornerpoints (the coefficients of the monic polynomial having
those points as roots, up to sign). Each coefficient is then tamed by taking
its ``j``-th root in modulus and dividing by the cornerpoint count, keeping
its argument. Two summaries are compared with the l1 distance of their
components.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .diagram import PersistenceDiagram
from .exceptions import DimensionError, InvalidArgumentError, InvalidCountError, ParseError
from .utils import atomic_write_text
from .warp import WarpedMultiset, warp_diagram

__all__ = [
    "SymVector",
    "elementary_symmetric",
    "elementary_symmetric_batch",
    "renormalize",
    "vector_distance",
    "vectorize",
    "read_symvector",
    "write_symvector",
    "DEFAULT_K",
]

DEFAULT_K = 10


def _check_k(k):
    if int(k) != k or k < 1:
        raise InvalidArgumentError(f"k must be a positive integer, got {k}")
    return int(k)


def elementary_symmetric(points, k: int, multiplicities=None) -> np.ndarray:
    """First ``k`` elementary symmetric functions of a complex multiset.

    Uses the coefficient recurrence ``e_j <- e_j + z * e_{j-1}`` (``j``
    descending), one step per point counted with multiplicity, for a cost of
    ``O(m * k)``. Entries beyond the multiset size come out as exact zeros,
    which is what padding the multiset with zeros would give.

    Parameters
    ----------
    points : WarpedMultiset or array-like of complex
    k : int
    multiplicities : array-like of int, optional
        Ignored when ``points`` is a :class:`WarpedMultiset`.

    Returns
    -------
    ndarray of complex, shape (k,)
        ``e_1, ..., e_k``.
    """
    k = _check_k(k)
    if isinstance(points, WarpedMultiset):
        z, m = points.values, points.multiplicities
    else:
        z = np.asarray(points, dtype=complex).ravel()
        m = np.ones(len(z), dtype=np.int64) if multiplicities is None else \
            np.asarray(multiplicities, dtype=np.int64).ravel()
        if m.shape != z.shape:
            raise InvalidArgumentError("points and multiplicities differ in length")
    e = np.zeros(k + 1, dtype=complex)
    e[0] = 1.0
    for zi, mi in zip(z.tolist(), m.tolist()):
        for _ in range(mi):
            # The right-hand side is evaluated before assignment, which gives
            # the descending-j update in one vector step.
            e[1:] = e[1:] + zi * e[:-1]
    return e[1:]


def elementary_symmetric_batch(rows, k: int) -> np.ndarray:
    """Elementary symmetric functions for many multisets at once.

    ``rows`` is a sequence of complex arrays (already expanded by
    multiplicity). They are zero-padded to a common length and the
    recurrence runs column by column across all rows; zero entries leave
    every coefficient unchanged, so each row matches
    :func:`elementary_symmetric` on its own points exactly.

    Returns
    -------
    ndarray of complex, shape (len(rows), k)
    """
    k = _check_k(k)
    rows = [np.asarray(r, dtype=complex).ravel() for r in rows]
    width = max((len(r) for r in rows), default=0)
    padded = np.zeros((len(rows), width), dtype=complex)
    for i, r in enumerate(rows):
        padded[i, : len(r)] = r
    e = np.zeros((len(rows), k + 1), dtype=complex)
    e[:, 0] = 1.0
    for col in padded.T:
        e[:, 1:] = e[:, 1:] + col[:, None] * e[:, :-1]
    return e[:, 1:]


def renormalize(a, N: int) -> np.ndarray:
    """Replace ``a[j-1]`` by ``|a[j-1]|**(1/j) / N`` with its argument kept.

    Zero coefficients stay zero (their argument is undefined).

    Raises
    ------
    InvalidCountError
        If ``N`` is negative, or zero while some coefficient is nonzero.
    """
    a = np.asarray(a, dtype=complex)
    if int(N) != N or N < 0:
        raise InvalidCountError(f"N must be a nonnegative integer, got {N}")
    mod = np.abs(a)
    nonzero = mod > 0
    if N == 0:
        if np.any(nonzero):
            raise InvalidCountError("N = 0 with nonzero coefficients")
        return np.zeros_like(a)
    j = np.arange(1, a.shape[-1] + 1, dtype=float)
    out = np.zeros_like(a)
    # Scaling a by |a|**(1/j - 1) / N sets the modulus and keeps the argument
    # without a round trip through angle().
    scale = np.power(mod, 1.0 / j - 1.0, where=nonzero, out=np.ones_like(mod)) / N
    np.multiply(a, scale, out=out, where=nonzero)
    return out


@dataclass(frozen=True, eq=False)
class SymVector:
    """Renormalized components ``a~(1..k)`` with the source cornerpoint count."""

    components: np.ndarray
    N: int

    def __post_init__(self):
        c = np.array(self.components, dtype=complex).ravel()
        if len(c) < 1:
            raise InvalidArgumentError("a SymVector needs at least one component")
        if int(self.N) != self.N or self.N < 0:
            raise InvalidCountError(f"N must be a nonnegative integer, got {self.N}")
        if self.N == 0 and np.any(c != 0):
            raise InvalidCountError("an empty diagram must map to the zero vector")
        c.setflags(write=False)
        object.__setattr__(self, "components", c)
        object.__setattr__(self, "N", int(self.N))

    @property
    def k(self) -> int:
        return len(self.components)

    def __eq__(self, other):
        if not isinstance(other, SymVector):
            return NotImplemented
        return self.N == other.N and np.array_equal(self.components, other.components)

    def to_json(self) -> str:
        comps = [[float(z.real), float(z.imag)] for z in self.components]
        return json.dumps({"N": self.N, "k": self.k, "components": comps})

    @classmethod
    def from_json(cls, text: str, path=None) -> "SymVector":
        try:
            data = json.loads(text)
            comps = [complex(re, im) for re, im in data["components"]]
            vec = cls(np.array(comps, dtype=complex), int(data["N"]))
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, path, exc.lineno) from None
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad SymVector record: {exc}", path) from None
        if "k" in data and int(data["k"]) != vec.k:
            raise ParseError(f"k={data['k']} but {vec.k} components", path)
        return vec


def _components(x):
    return x.components if isinstance(x, SymVector) else np.asarray(x, dtype=complex)


def vector_distance(x, y) -> float:
    """Sum over components of ``|x_j - y_j|``."""
    cx, cy = _components(x), _components(y)
    if cx.shape != cy.shape:
        raise DimensionError(f"k mismatch: {cx.shape[-1]} vs {cy.shape[-1]}")
    return float(np.abs(cx - cy).sum())


def vectorize(diagram: PersistenceDiagram, transform: str = "R", k: int = DEFAULT_K) -> SymVector:
    """Warp, take the first ``k`` symmetric functions, renormalize.

    The diagram must be normalized to ``[0, 1]`` and finitized. An empty
    diagram yields the zero vector with ``N = 0``.
    """
    k = _check_k(k)
    warped = warp_diagram(diagram, transform)
    N = warped.source_count
    if N == 0:
        return SymVector(np.zeros(k, dtype=complex), 0)
    return SymVector(renormalize(elementary_symmetric(warped, k), N), N)


def read_symvector(path) -> SymVector:
    path = Path(path)
    return SymVector.from_json(path.read_text(encoding="utf-8"), path=path)


def write_symvector(vec: SymVector, path) -> None:
    atomic_write_text(path, vec.to_json() + "\n")
