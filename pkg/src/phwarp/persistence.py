"""Zero-dimensional persistence of sublevel filtrations on vertex-weighted graphs.

Edges enter the filtration at the larger of their endpoint values, so the
sublevel subgraph at level ``t`` is induced by the vertices with value
``<= t``. Components are tracked with a union-find and the elder rule.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .diagram import Cornerpoint, PersistenceDiagram
from .exceptions import (
    EmptyInputError,
    InvalidArgumentError,
    InvalidEpsilonError,
    InvalidPairError,
    ParseError,
)

__all__ = [
    "FilteredGraph",
    "zero_dim_persistence",
    "persistent_betti_0",
    "multiplicity_oracle",
    "downsample_blocks",
    "grid_to_graph",
    "read_graph",
    "read_grid",
]


@dataclass(frozen=True)
class FilteredGraph:
    """Undirected graph with one finite filtration value per vertex.

    Duplicate edges are collapsed and each edge is stored as ``(i, j)`` with
    ``i < j``.
    """

    vertex_values: tuple
    edges: tuple = ()

    def __post_init__(self):
        values = tuple(float(v) for v in self.vertex_values)
        if not all(math.isfinite(v) for v in values):
            raise InvalidArgumentError("vertex values must be finite")
        n = len(values)
        canon = set()
        for e in self.edges:
            i, j = (int(x) for x in e)
            if not (0 <= i < n and 0 <= j < n):
                raise InvalidArgumentError(f"edge ({i}, {j}) references a missing vertex")
            if i == j:
                raise InvalidArgumentError(f"self-loop at vertex {i}")
            canon.add((min(i, j), max(i, j)))
        object.__setattr__(self, "vertex_values", values)
        object.__setattr__(self, "edges", tuple(sorted(canon)))

    @property
    def n_vertices(self) -> int:
        return len(self.vertex_values)

    def adjacency(self) -> list:
        adj = [[] for _ in range(self.n_vertices)]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        return adj

    def shifted(self, c: float) -> "FilteredGraph":
        return FilteredGraph(tuple(v + c for v in self.vertex_values), self.edges)


def _find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        parent[x], x = root, parent[x]
    return root


def zero_dim_persistence(graph: FilteredGraph, label=None) -> PersistenceDiagram:
    """Compute the 0-dimensional persistence diagram of ``graph``.

    Vertices are processed in order of ``(value, index)``. When an edge joins
    two components, the one born later dies at the current level; on equal
    births the component whose root has the larger index dies. Pairs with
    zero persistence are discarded. Every component of the whole graph
    contributes a cornerline at its minimum value.

    Raises
    ------
    EmptyInputError
        If the graph has no vertices.
    """
    n = graph.n_vertices
    if n == 0:
        raise EmptyInputError("graph has no vertices")
    values = graph.vertex_values
    adj = graph.adjacency()
    order = sorted(range(n), key=lambda i: (values[i], i))
    rank = [0] * n
    for r, i in enumerate(order):
        rank[i] = r

    # Roots always carry the oldest vertex of their component, so comparing
    # root ranks implements the elder rule together with its tie-break.
    parent = list(range(n))
    active = [False] * n
    pairs: dict = {}
    for v in order:
        active[v] = True
        level = values[v]
        for w in adj[v]:
            if not active[w]:
                continue
            rv, rw = _find(parent, v), _find(parent, w)
            if rv == rw:
                continue
            elder, younger = (rv, rw) if rank[rv] < rank[rw] else (rw, rv)
            parent[younger] = elder
            birth = values[younger]
            if birth < level:
                key = (birth, level)
                pairs[key] = pairs.get(key, 0) + 1

    lines: dict = {}
    for v in range(n):
        if _find(parent, v) == v:
            lines[values[v]] = lines.get(values[v], 0) + 1

    points = [Cornerpoint(b, d, m) for (b, d), m in pairs.items()]
    points += [Cornerpoint(b, math.inf, m) for b, m in lines.items()]
    return PersistenceDiagram(points, label=label)


def _sublevel_roots(graph: FilteredGraph, level: float) -> list:
    """Component representative per vertex of the sublevel subgraph (None if absent)."""
    n = graph.n_vertices
    values = graph.vertex_values
    parent = list(range(n))
    for i, j in graph.edges:
        if values[i] <= level and values[j] <= level:
            ri, rj = _find(parent, i), _find(parent, j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
    return [_find(parent, v) if values[v] <= level else None for v in range(n)]


def persistent_betti_0(graph: FilteredGraph, u: float, v: float) -> int:
    """Rank of the map on components induced by the inclusion of sublevel sets at ``u`` and ``v``.

    Counts the components of the sublevel subgraph at ``u``, identifying two
    of them when they fall into the same component at ``v``.
    """
    if not u < v:
        raise InvalidPairError(f"need u < v, got u={u}, v={v}")
    roots_v = _sublevel_roots(graph, v)
    values = graph.vertex_values
    return len({roots_v[x] for x in range(graph.n_vertices) if values[x] <= u})


def multiplicity_oracle(graph: FilteredGraph, u: float, v: float, epsilon: float) -> int:
    """Multiplicity of ``(u, v)`` as an alternating sum of four persistent Betti numbers.

    ``epsilon`` must be positive, keep ``u + epsilon < v - epsilon``, and stay
    below half the smallest gap between distinct vertex values so that every
    shifted level sees the same sublevel sets as the exact limit.
    """
    eps = float(epsilon)
    if not eps > 0:
        raise InvalidEpsilonError(f"epsilon must be positive, got {eps}")
    if not u + eps < v - eps:
        raise InvalidEpsilonError(f"need u + eps < v - eps, got u={u}, v={v}, eps={eps}")
    distinct = sorted(set(graph.vertex_values))
    if len(distinct) > 1:
        gap = min(b - a for a, b in zip(distinct, distinct[1:]))
        if not eps < gap / 2:
            raise InvalidEpsilonError(
                f"epsilon {eps} is not below half the minimal value gap {gap}"
            )
    beta = persistent_betti_0
    return (
        beta(graph, u + eps, v - eps)
        - beta(graph, u - eps, v - eps)
        - beta(graph, u + eps, v + eps)
        + beta(graph, u - eps, v + eps)
    )


def downsample_blocks(grid, block: int) -> np.ndarray:
    """Average a 2-D grid over ``block x block`` tiles.

    Border tiles that run past the edge are averaged over the cells they
    actually cover, so the output shape is ``ceil(shape / block)``.
    """
    if int(block) != block or block < 1:
        raise InvalidArgumentError(f"block must be a positive integer, got {block}")
    block = int(block)
    arr = np.asarray(grid, dtype=float)
    if arr.ndim != 2:
        raise InvalidArgumentError(f"expected a 2-D grid, got shape {arr.shape}")
    if block == 1:
        return arr.copy()
    rows = np.arange(0, arr.shape[0], block)
    cols = np.arange(0, arr.shape[1], block)
    sums = np.add.reduceat(np.add.reduceat(arr, rows, axis=0), cols, axis=1)
    row_n = np.minimum(block, arr.shape[0] - rows)
    col_n = np.minimum(block, arr.shape[1] - cols)
    return sums / np.outer(row_n, col_n)


_OFFSETS = {
    4: ((0, 1), (1, 0)),
    8: ((0, 1), (1, 0), (1, 1), (1, -1)),
}


def grid_to_graph(grid, connectivity: int = 4) -> FilteredGraph:
    """One vertex per cell (row-major), edges between 4- or 8-adjacent cells."""
    if connectivity not in _OFFSETS:
        raise InvalidArgumentError(f"connectivity must be 4 or 8, got {connectivity}")
    arr = np.asarray(grid, dtype=float)
    if arr.ndim != 2 or arr.size == 0:
        raise InvalidArgumentError(f"expected a nonempty 2-D grid, got shape {arr.shape}")
    h, w = arr.shape
    edges = []
    for r in range(h):
        for c in range(w):
            for dr, dc in _OFFSETS[connectivity]:
                rr, cc = r + dr, c + dc
                if 0 <= rr < h and 0 <= cc < w:
                    edges.append((r * w + c, rr * w + cc))
    return FilteredGraph(tuple(arr.ravel().tolist()), tuple(edges))


# -- file formats -------------------------------------------------------------


def read_graph(path) -> FilteredGraph:
    """Load ``{"values": [...], "edges": [[i, j], ...]}``."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, path, exc.lineno) from None
    if not isinstance(data, dict) or "values" not in data:
        raise ParseError("graph JSON needs a 'values' list", path)
    try:
        return FilteredGraph(tuple(data["values"]), tuple(map(tuple, data.get("edges", []))))
    except (TypeError, ValueError) as exc:
        raise ParseError(str(exc), path) from None


def read_grid(path) -> np.ndarray:
    """Load a CSV of rows of decimal floats; ``#`` lines are skipped."""
    path = Path(path)
    rows = []
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            rows.append([float(x) for x in line.split(",")])
        except ValueError as exc:
            raise ParseError(str(exc), path, lineno) from None
        if rows and len(rows[-1]) != len(rows[0]):
            raise ParseError("ragged grid row", path, lineno)
    if not rows:
        raise ParseError("empty grid", path)
    return np.array(rows)
