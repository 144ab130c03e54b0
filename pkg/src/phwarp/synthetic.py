"""Seeded synthetic diagrams in the open unit triangle.

Signal points have persistence at least 0.2 and are uniform over that part
of the triangle; noise points hug the diagonal with persistence at most 0.05.
"""
from __future__ import annotations

import numpy as np

from .diagram import PersistenceDiagram
from .exceptions import InvalidArgumentError

__all__ = ["signal_points", "noise_points", "synthetic_diagram", "make_diagrams", "make_two_class"]

SIGNAL_MIN_PERSISTENCE = 0.2
NOISE_MAX_PERSISTENCE = 0.05


def signal_points(rng: np.random.Generator, n: int) -> np.ndarray:
    """``n`` points uniform over ``{0 < u, v < 1, v - u >= 0.2}``, by rejection."""
    out = np.empty((0, 2))
    while len(out) < n:
        uv = rng.random((2 * (n - len(out)) + 8, 2))
        keep = (uv[:, 0] > 0) & (uv[:, 1] - uv[:, 0] >= SIGNAL_MIN_PERSISTENCE)
        out = np.vstack([out, uv[keep]])
    return out[:n]


def noise_points(rng: np.random.Generator, n: int) -> np.ndarray:
    """``n`` near-diagonal points with persistence in ``(0, 0.05]``."""
    # The 1e-9 margins keep points strictly inside the triangle and off the diagonal.
    birth = rng.uniform(1e-9, 1.0 - NOISE_MAX_PERSISTENCE - 1e-9, n)
    pers = rng.uniform(1e-9, NOISE_MAX_PERSISTENCE, n)
    return np.column_stack([birth, birth + pers])


def synthetic_diagram(rng, n_signal: int, n_noise: int, label=None) -> PersistenceDiagram:
    pts = np.vstack([signal_points(rng, n_signal), noise_points(rng, n_noise)])
    return PersistenceDiagram.from_array(pts, label=label)


def make_diagrams(count: int, points: int, noise_fraction: float = 0.5, seed: int = 0,
                  prefix: str = "syn") -> list:
    """``count`` diagrams of ``points`` cornerpoints each, reproducible from ``seed``.

    ``round(points * noise_fraction)`` of the points are noise, the rest signal.
    """
    if int(count) != count or count < 1 or int(points) != points or points < 1:
        raise InvalidArgumentError("count and points must be positive integers")
    if not 0.0 <= noise_fraction <= 1.0:
        raise InvalidArgumentError(f"noise_fraction must lie in [0, 1], got {noise_fraction}")
    rng = np.random.default_rng(seed)
    n_noise = int(round(points * noise_fraction))
    width = len(str(count - 1))
    return [
        synthetic_diagram(rng, points - n_noise, n_noise, label=f"{prefix}{i:0{width}d}")
        for i in range(int(count))
    ]


def make_two_class(n_per_class: int = 20, signal_a: int = 5, signal_b: int = 25,
                   noise: int = 50, seed: int = 0):
    """Two classes differing only in their number of signal points.

    Returns
    -------
    diagrams : list of PersistenceDiagram
    labels : list of str, ``"A"`` or ``"B"``
    """
    rng = np.random.default_rng(seed)
    diagrams, labels = [], []
    for cls, n_sig in (("A", signal_a), ("B", signal_b)):
        for i in range(n_per_class):
            diagrams.append(synthetic_diagram(rng, n_sig, noise, label=f"{cls}{i:02d}"))
            labels.append(cls)
    return diagrams, labels
