"""Persistence diagrams: storage, filtration normalization, cornerline handling.

A diagram is a multiset of cornerpoints ``(birth, death)`` with ``birth <
death``; ``death`` may be ``inf`` for essential classes (cornerlines). Points
on the diagonal are implicit and never stored.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .exceptions import (
    DegenerateRangeError,
    InvalidArgumentError,
    OutOfRangeError,
    ParseError,
)
from .utils import atomic_write_text

__all__ = [
    "Cornerpoint",
    "PersistenceDiagram",
    "normalize_filtration",
    "finitize_cornerlines",
    "read_diagram",
    "write_diagram",
    "format_diagram",
    "parse_diagram",
]


@dataclass(frozen=True, order=True)
class Cornerpoint:
    birth: float
    death: float
    multiplicity: int = 1

    def __post_init__(self):
        b, d, m = float(self.birth), float(self.death), self.multiplicity
        if not math.isfinite(b):
            raise InvalidArgumentError(f"birth must be finite, got {b}")
        if math.isnan(d) or d == -math.inf:
            raise InvalidArgumentError(f"death must be a real or +inf, got {d}")
        if not b < d:
            raise InvalidArgumentError(f"cornerpoint needs birth < death, got ({b}, {d})")
        if int(m) != m or m < 1:
            raise InvalidArgumentError(f"multiplicity must be a positive integer, got {m}")
        object.__setattr__(self, "birth", b)
        object.__setattr__(self, "death", d)
        object.__setattr__(self, "multiplicity", int(m))

    @property
    def is_cornerline(self) -> bool:
        return self.death == math.inf

    @property
    def persistence(self) -> float:
        return self.death - self.birth


PointLike = Union[Cornerpoint, Sequence[float]]


def _merge(points: Iterable[PointLike]) -> tuple:
    counts: dict = {}
    for p in points:
        if not isinstance(p, Cornerpoint):
            p = Cornerpoint(*p)
        key = (p.birth, p.death)
        counts[key] = counts.get(key, 0) + p.multiplicity
    return tuple(Cornerpoint(b, d, m) for (b, d), m in sorted(counts.items()))


@dataclass(frozen=True)
class PersistenceDiagram:
    """Multiset of cornerpoints in canonical (sorted, merged) form.

    Points sharing the same ``(birth, death)`` are merged by summing their
    multiplicities, and the stored tuple is sorted by ``(birth, death)``.
    Equality therefore compares multisets, not input order.

    Parameters
    ----------
    points : iterable of Cornerpoint or (birth, death[, multiplicity])
    label : str, optional
        Free-form identifier carried along for bookkeeping.
    """

    points: tuple = ()
    label: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "points", _merge(self.points))

    @classmethod
    def from_array(cls, array, label=None) -> "PersistenceDiagram":
        """Build from an ``(n, 2)`` or ``(n, 3)`` array of birth, death[, multiplicity]."""
        arr = np.asarray(array, dtype=float)
        if arr.size == 0:
            return cls((), label=label)
        if arr.ndim != 2 or arr.shape[1] not in (2, 3):
            raise InvalidArgumentError(
                f"expected an (n, 2) or (n, 3) array, got shape {arr.shape}"
            )
        if arr.shape[1] == 2:
            pts = [Cornerpoint(b, d) for b, d in arr]
        else:
            pts = [Cornerpoint(b, d, m) for b, d, m in arr]
        return cls(pts, label=label)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    @property
    def count(self) -> int:
        """Number of cornerpoints counted with multiplicity."""
        return sum(p.multiplicity for p in self.points)

    @property
    def has_cornerlines(self) -> bool:
        return any(p.is_cornerline for p in self.points)

    @property
    def cornerlines(self) -> tuple:
        return tuple(p for p in self.points if p.is_cornerline)

    @property
    def proper(self) -> tuple:
        return tuple(p for p in self.points if not p.is_cornerline)

    @cached_property
    def array(self) -> np.ndarray:
        """``(h, 3)`` float array of distinct points: birth, death, multiplicity."""
        out = np.empty((len(self.points), 3), dtype=float)
        for i, p in enumerate(self.points):
            out[i] = (p.birth, p.death, p.multiplicity)
        out.setflags(write=False)
        return out

    @cached_property
    def expanded(self) -> np.ndarray:
        """``(N, 2)`` array with each point repeated by its multiplicity."""
        arr = self.array
        if len(arr) == 0:
            out = np.empty((0, 2), dtype=float)
        else:
            out = np.repeat(arr[:, :2], arr[:, 2].astype(np.int64), axis=0)
        out.setflags(write=False)
        return out

    def with_label(self, label) -> "PersistenceDiagram":
        return PersistenceDiagram(self.points, label=label)


def normalize_filtration(
    diagram: PersistenceDiagram, f_min: float, f_max: float
) -> PersistenceDiagram:
    """Map finite coordinates affinely from ``[f_min, f_max]`` onto ``[0, 1]``.

    Infinite deaths and multiplicities are preserved.

    Raises
    ------
    DegenerateRangeError
        If ``f_min >= f_max``.
    OutOfRangeError
        If a finite coordinate lies outside ``[f_min, f_max]``.
    """
    f_min, f_max = float(f_min), float(f_max)
    if not f_min < f_max:
        raise DegenerateRangeError(f"need f_min < f_max, got [{f_min}, {f_max}]")
    span = f_max - f_min

    def scale(x):
        if x == math.inf:
            return x
        if x < f_min or x > f_max:
            raise OutOfRangeError(f"coordinate {x} outside [{f_min}, {f_max}]")
        return (x - f_min) / span

    return PersistenceDiagram(
        [Cornerpoint(scale(p.birth), scale(p.death), p.multiplicity) for p in diagram],
        label=diagram.label,
    )


def finitize_cornerlines(diagram: PersistenceDiagram) -> PersistenceDiagram:
    """Replace every cornerline ``(w, inf)`` by a finite cornerpoint.

    The new ordinate is the largest finite death among the diagram's own
    proper cornerpoints. When there is none, or it does not exceed ``w``,
    the normalized filtration maximum 1.0 is used instead. A cornerline born
    at or above 1.0 has no finite representative off the diagonal and is
    dropped.

    The diagram is expected to be normalized to ``[0, 1]`` already.
    """
    if not diagram.has_cornerlines:
        return diagram
    proper = diagram.proper
    top = max((p.death for p in proper), default=None)
    out = list(proper)
    for line in diagram.cornerlines:
        death = top if top is not None and top > line.birth else 1.0
        if death > line.birth:
            out.append(Cornerpoint(line.birth, death, line.multiplicity))
    return PersistenceDiagram(out, label=diagram.label)


# -- CSV format: ``birth,death,multiplicity`` per line, ``#`` comments --------


def format_diagram(diagram: PersistenceDiagram) -> str:
    lines = []
    if diagram.label is not None:
        lines.append(f"# label: {diagram.label}")
    lines.append("# birth,death,multiplicity")
    for p in diagram:
        death = "inf" if p.is_cornerline else repr(p.death)
        lines.append(f"{p.birth!r},{death},{p.multiplicity}")
    return "\n".join(lines) + "\n"


def parse_diagram(text: str, path=None, label=None) -> PersistenceDiagram:
    """Parse the CSV diagram format; a ``# label: ...`` comment overrides ``label``."""
    points = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if line[1:].strip().startswith("label:"):
                label = line[1:].strip()[len("label:"):].strip()
            continue
        fields = [f.strip() for f in line.split(",")]
        if len(fields) not in (2, 3):
            raise ParseError(f"expected 'birth,death,multiplicity', got {raw!r}", path, lineno)
        try:
            birth = float(fields[0])
            death = float(fields[1])
            mult = int(fields[2]) if len(fields) == 3 else 1
            points.append(Cornerpoint(birth, death, mult))
        except ValueError as exc:
            raise ParseError(str(exc), path, lineno) from None
    return PersistenceDiagram(points, label=label)


def read_diagram(path) -> PersistenceDiagram:
    path = Path(path)
    return parse_diagram(path.read_text(encoding="utf-8"), path=path, label=path.stem)


def write_diagram(diagram: PersistenceDiagram, path) -> None:
    atomic_write_text(path, format_diagram(diagram))
