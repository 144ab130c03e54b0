"""Exact bottleneck distance between finitized persistence diagrams.

The cost of pairing ``P = (u, v)`` with ``P' = (u', v')`` is

    min(max(|u - u'|, |v - v'|), max((v - u) / 2, (v' - u') / 2))

and a point may instead be sent to the diagonal at cost ``(v - u) / 2``.
The distance is the smallest threshold ``delta`` admitting a bijection whose
every pair costs at most ``delta``.

Feasibility at ``delta`` reduces to bipartite matching: points with
half-persistence ``<= delta`` ("short") can always fall back to the
diagonal, so a bijection exists iff the sup-norm graph ``{d_inf <= delta}``
has a matching covering every long point on both sides. By the
Mendelsohn-Dulmage theorem that holds iff one matching covers the long
points of the first diagram and another covers those of the second. Each is
found with Hopcroft-Karp, and the threshold is located by binary search
over the finite set of pair costs and diagonal costs, narrowed first by a
nearest-neighbour lower bound and a doubling upper bound.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit

from .diagram import Cornerpoint, PersistenceDiagram
from .exceptions import NotFinitizedError, SizeError

__all__ = [
    "point_cost",
    "bottleneck_distance",
    "brute_force_bottleneck",
    "candidate_thresholds",
    "BRUTE_FORCE_MAX_POINTS",
]

BRUTE_FORCE_MAX_POINTS = 10


@njit(cache=True)
def _dinf(a0, a1, b0, b1):
    return max(abs(a0 - b0), abs(a1 - b1))


@njit(cache=True)
def _max_matching(nl, nr, indptr, indices):
    """Hopcroft-Karp on a CSR bipartite graph; returns the matching size."""
    inf = nl + 1
    pair_l = np.full(nl, -1, np.int64)
    pair_r = np.full(nr, -1, np.int64)
    dist = np.empty(nl, np.int64)
    queue = np.empty(nl, np.int64)
    cursor = np.empty(nl, np.int64)
    stack = np.empty(nl, np.int64)
    via = np.empty(nl, np.int64)
    matched = 0
    for u in range(nl):
        for p in range(indptr[u], indptr[u + 1]):
            v = indices[p]
            if pair_r[v] == -1:
                pair_l[u] = v
                pair_r[v] = u
                matched += 1
                break
    while matched < nl:
        head = 0
        tail = 0
        for u in range(nl):
            if pair_l[u] == -1:
                dist[u] = 0
                queue[tail] = u
                tail += 1
            else:
                dist[u] = inf
        found = False
        while head < tail:
            u = queue[head]
            head += 1
            for p in range(indptr[u], indptr[u + 1]):
                w = pair_r[indices[p]]
                if w == -1:
                    found = True
                elif dist[w] == inf:
                    dist[w] = dist[u] + 1
                    queue[tail] = w
                    tail += 1
        if not found:
            break
        for u in range(nl):
            cursor[u] = indptr[u]
        for root in range(nl):
            if pair_l[root] != -1:
                continue
            top = 0
            stack[0] = root
            while top >= 0:
                x = stack[top]
                if cursor[x] < indptr[x + 1]:
                    v = indices[cursor[x]]
                    cursor[x] += 1
                    w = pair_r[v]
                    if w == -1:
                        for level in range(top, -1, -1):
                            y = stack[level]
                            t = v if level == top else via[y]
                            pair_l[y] = t
                            pair_r[t] = y
                        matched += 1
                        top = -1
                    elif dist[w] == dist[x] + 1:
                        via[x] = v
                        top += 1
                        stack[top] = w
                else:
                    dist[x] = inf
                    top -= 1
    return matched


@njit(cache=True)
def _covers_long(X, hx, Y, delta):
    """Whether ``{d_inf <= delta}`` has a matching covering every x with hx > delta.

    ``Y`` must be sorted by birth so each x only scans births within delta.
    """
    n = X.shape[0]
    m = Y.shape[0]
    left = np.empty(n, np.int64)
    nl = 0
    for i in range(n):
        if hx[i] > delta:
            left[nl] = i
            nl += 1
    if nl == 0:
        return True
    if nl > m:
        return False
    ybirth = Y[:, 0]
    start = np.empty(nl, np.int64)
    stop = np.empty(nl, np.int64)
    indptr = np.zeros(nl + 1, np.int64)
    for a in range(nl):
        i = left[a]
        start[a] = np.searchsorted(ybirth, X[i, 0] - delta - 1e-9, side="left")
        stop[a] = np.searchsorted(ybirth, X[i, 0] + delta + 1e-9, side="right")
        c = 0
        for j in range(start[a], stop[a]):
            if _dinf(X[i, 0], X[i, 1], Y[j, 0], Y[j, 1]) <= delta:
                c += 1
        if c == 0:
            return False
        indptr[a + 1] = indptr[a] + c
    indices = np.empty(indptr[nl], np.int64)
    for a in range(nl):
        i = left[a]
        p = indptr[a]
        for j in range(start[a], stop[a]):
            if _dinf(X[i, 0], X[i, 1], Y[j, 0], Y[j, 1]) <= delta:
                indices[p] = j
                p += 1
    return _max_matching(nl, m, indptr, indices) == nl


@njit(cache=True)
def _feasible(A, ha, B, hb, delta):
    return _covers_long(A, ha, B, delta) and _covers_long(B, hb, A, delta)


@njit(cache=True)
def _lower_bound_side(X, hx, Y, start):
    # Every point pays at least min(its diagonal cost, its nearest partner).
    lo = start
    order = np.argsort(-hx)
    for a in range(X.shape[0]):
        i = order[a]
        if hx[i] <= lo:
            break
        best = hx[i]
        for j in range(Y.shape[0]):
            d = _dinf(X[i, 0], X[i, 1], Y[j, 0], Y[j, 1])
            if d < best:
                best = d
                if best <= lo:
                    break
        if best > lo:
            lo = best
    return lo


@njit(cache=True)
def _window_candidates(A, ha, B, hb, lo, hi):
    """Distinct pair and diagonal costs in ``(lo, hi]``, ascending; ``B`` sorted by birth."""
    n = A.shape[0]
    m = B.shape[0]
    out = []
    for i in range(n):
        if lo < ha[i] <= hi:
            out.append(ha[i])
    for j in range(m):
        if lo < hb[j] <= hi:
            out.append(hb[j])
    # A pair whose two diagonal costs are both <= lo costs at most lo; skip it.
    # B is sorted by birth, and a sup-norm cost <= hi needs births within hi.
    bbirth = B[:, 0]
    for i in range(n):
        j0 = np.searchsorted(bbirth, A[i, 0] - hi - 1e-9, side="left")
        j1 = np.searchsorted(bbirth, A[i, 0] + hi + 1e-9, side="right")
        for j in range(j0, j1):
            top = max(ha[i], hb[j])
            if top <= lo:
                continue
            d = _dinf(A[i, 0], A[i, 1], B[j, 0], B[j, 1])
            if lo < d <= hi and d <= top:
                out.append(d)
    return np.unique(np.array(out, dtype=np.float64))


@njit(cache=True)
def _bottleneck(A, B):
    n = A.shape[0]
    m = B.shape[0]
    A = A[np.argsort(A[:, 0], kind="mergesort")]
    B = B[np.argsort(B[:, 0], kind="mergesort")]
    ha = (A[:, 1] - A[:, 0]) / 2.0
    hb = (B[:, 1] - B[:, 0]) / 2.0
    if n + m == 0:
        return 0.0
    upper = 0.0
    if n:
        upper = max(upper, ha.max())
    if m:
        upper = max(upper, hb.max())
    lo = _lower_bound_side(A, ha, B, 0.0)
    lo = _lower_bound_side(B, hb, A, lo)
    if _feasible(A, ha, B, hb, lo):
        return lo
    # Double the threshold until feasible; the answer then lies in (prev, cur].
    prev = lo
    cur = 2.0 * lo if lo > 0.0 else upper / 1024.0
    while cur < upper and not _feasible(A, ha, B, hb, cur):
        prev = cur
        cur *= 2.0
    if cur > upper:
        cur = upper
    cand = _window_candidates(A, ha, B, hb, prev, cur)
    left = 0
    right = cand.shape[0] - 1
    while left < right:
        mid = (left + right) // 2
        if _feasible(A, ha, B, hb, cand[mid]):
            right = mid
        else:
            left = mid + 1
    return cand[left]


def _coords(diagram: PersistenceDiagram) -> np.ndarray:
    if diagram.has_cornerlines:
        raise NotFinitizedError("diagram contains cornerlines; finitize it first")
    return np.ascontiguousarray(diagram.expanded, dtype=np.float64)


def _as_pair(p):
    if isinstance(p, Cornerpoint):
        return p.birth, p.death
    u, v = p[0], p[1]
    return float(u), float(v)


def point_cost(p, q) -> float:
    """Cost of taking cornerpoint ``p`` to ``q`` (sup-norm move or both to the diagonal)."""
    u, v = _as_pair(p)
    u2, v2 = _as_pair(q)
    if not all(math.isfinite(x) for x in (u, v, u2, v2)):
        raise NotFinitizedError("point_cost needs finite coordinates")
    return min(max(abs(u - u2), abs(v - v2)), max((v - u) / 2.0, (v2 - u2) / 2.0))


def bottleneck_distance(D: PersistenceDiagram, D2: PersistenceDiagram) -> float:
    """Exact bottleneck distance between two finitized diagrams.

    Multiplicities are expanded into repeated points. The returned value is
    always one of the pair costs or diagonal costs of the instance.

    Raises
    ------
    NotFinitizedError
        If either diagram still holds cornerlines.
    """
    return float(_bottleneck(_coords(D), _coords(D2)))


def candidate_thresholds(D: PersistenceDiagram, D2: PersistenceDiagram) -> np.ndarray:
    """All pairwise costs and diagonal costs, deduplicated and sorted."""
    A, B = _coords(D), _coords(D2)
    vals = [(v - u) / 2.0 for u, v in A] + [(v - u) / 2.0 for u, v in B]
    vals += [point_cost(a, b) for a in A for b in B]
    return np.unique(np.array(vals, dtype=float))


def brute_force_bottleneck(D: PersistenceDiagram, D2: PersistenceDiagram) -> float:
    """Bottleneck distance by enumerating every partial matching.

    Each point of ``D`` either goes to the diagonal or to a distinct point of
    ``D2``; unmatched points of ``D2`` go to the diagonal. Only intended as a
    reference for tiny instances.

    Raises
    ------
    SizeError
        If the two diagrams hold more than 10 points together.
    """
    A, B = _coords(D), _coords(D2)
    n, m = len(A), len(B)
    if n + m > BRUTE_FORCE_MAX_POINTS:
        raise SizeError(f"brute force limited to {BRUTE_FORCE_MAX_POINTS} points, got {n + m}")
    diag_a = [(v - u) / 2.0 for u, v in A]
    diag_b = [(v - u) / 2.0 for u, v in B]
    cost = [[point_cost(a, b) for b in B] for a in A]
    best = math.inf

    # Point i of D goes to the diagonal or to any still-unused point of D2.
    def visit(i, used, worst):
        nonlocal best
        if i == n:
            rest = max((diag_b[j] for j in range(m) if j not in used), default=0.0)
            best = min(best, max(worst, rest))
            return
        visit(i + 1, used, max(worst, diag_a[i]))
        for j in range(m):
            if j not in used:
                visit(i + 1, used | {j}, max(worst, cost[i][j]))

    visit(0, frozenset(), 0.0)
    return float(best)
