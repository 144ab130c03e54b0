"""Acceptance checks, one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (lines are repeated in the
terminal summary) or directly with ``python3 tests/test_acceptance.py``.
"""
import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oracles import esym  # noqa: E402
from phwarp import (  # noqa: E402
    FilteredGraph,
    PersistenceDiagram,
    SymVector,
    bottleneck_distance,
    brute_force_bottleneck,
    compute_distance_matrix,
    multiplicity_oracle,
    vector_distance,
    vectorize,
    warp_diagram,
    warp_R,
    warp_T,
    zero_dim_persistence,
)
from phwarp.cli import run_bench  # noqa: E402
from phwarp.estimators import SymmetricFunctionVectorizer  # noqa: E402
from phwarp.retrieval import loo_accuracy, optimize_weights  # noqa: E402
from phwarp.symfun import elementary_symmetric  # noqa: E402
from phwarp.synthetic import make_diagrams, make_two_class  # noqa: E402
from phwarp.warp import warp_points  # noqa: E402

RESULTS = []


def record(number, name, passed, detail):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:2d} {name}: {detail}"
    RESULTS.append(line)
    print(line)
    assert passed, line


def triangle(rng, n):
    """``n`` points uniform in the closed triangle ``0 <= u <= v <= 1``."""
    return np.sort(rng.random((n, 2)), axis=1)


def random_pd(rng, max_points):
    uv = triangle(rng, int(rng.integers(0, max_points + 1)))
    return PersistenceDiagram.from_array(uv[uv[:, 0] < uv[:, 1]])


def test_c01_warp_modulus():
    rng = np.random.default_rng(1)
    uv = triangle(rng, 10_000)
    target = (uv[:, 1] - uv[:, 0]) / math.sqrt(2)
    t0 = time.perf_counter()
    err = {name: np.max(np.abs(np.abs(warp_points(uv[:, 0], uv[:, 1], name)) - target)) for name in "TR"}
    elapsed = time.perf_counter() - t0
    record(1, "warp modulus identity", max(err.values()) <= 1e-12 and elapsed < 1.0,
           f"max error T={err['T']:.2e} R={err['R']:.2e} (tol 1e-12), {elapsed:.3f}s (< 1s)")


def test_c02_diagonal_collapse():
    rng = np.random.default_rng(2)
    us = np.concatenate([[0.0, 1.0], rng.random(998)])
    nonzero = sum(warp_T(u, u) != 0 or warp_R(u, u) != 0 for u in us)
    record(2, "diagonal collapse", nonzero == 0, f"{nonzero} of {len(us)} diagonal points map off 0 (exact)")


def test_c03_symmetric_function_oracle():
    rng = np.random.default_rng(3)
    worst, t_impl = 0.0, 0.0
    t0 = time.perf_counter()
    for _ in range(500):
        m = int(rng.integers(1, 13))
        k = int(rng.integers(1, m + 1))
        # A multiset: h distinct warped points, the rest repeats of them.
        h = int(rng.integers(1, m + 1))
        uv = triangle(rng, h)
        distinct = warp_points(uv[:, 0], uv[:, 1], str(rng.choice(["T", "R"])))
        z = np.concatenate([distinct, rng.choice(distinct, m - h)])
        t1 = time.perf_counter()
        got = elementary_symmetric(z, k)
        t_impl += time.perf_counter() - t1
        for j in range(1, k + 1):
            ref = esym(z, j)
            err = abs(got[j - 1] - ref)
            worst = max(worst, err / abs(ref) if ref != 0 else err)
    elapsed = time.perf_counter() - t0
    record(3, "symmetric-function oracle", worst <= 1e-9 and t_impl < 5.0,
           f"worst relative error {worst:.2e} (tol 1e-9) on 500 multisets, "
           f"{t_impl:.3f}s in the recurrence (< 5s), {elapsed:.2f}s with oracle")


def test_c04_padding_equivalence():
    rng = np.random.default_rng(4)
    changed = 0
    for _ in range(300):
        m = int(rng.integers(0, 30))
        uv = triangle(rng, m)
        z = warp_points(uv[:, 0], uv[:, 1], str(rng.choice(["T", "R"])))
        k = int(rng.integers(1, 51))
        padded = np.concatenate([z, np.zeros(int(rng.integers(1, 101)), complex)])
        changed += not np.array_equal(elementary_symmetric(padded, k), elementary_symmetric(z, k))
    record(4, "padding equivalence", changed == 0, f"{changed} of 300 padded multisets changed some a(j) (exact)")


def test_c05_bottleneck_oracle():
    rng = np.random.default_rng(5)
    bottleneck_distance(PersistenceDiagram([(0.0, 1.0)]), PersistenceDiagram())  # JIT warm-up
    worst = 0.0
    t0 = time.perf_counter()
    for _ in range(200):
        a, b = random_pd(rng, 5), random_pd(rng, 5)
        worst = max(worst, abs(bottleneck_distance(a, b) - brute_force_bottleneck(a, b)))
    elapsed = time.perf_counter() - t0
    record(5, "bottleneck oracle", worst <= 1e-12 and elapsed < 10.0,
           f"max |fast - brute force| {worst:.2e} (tol 1e-12) on 200 pairs, {elapsed:.2f}s (< 10s)")


def test_c06_bottleneck_stability():
    rng = np.random.default_rng(6)
    eps = 0.01
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 21))
        # Persistence above 2 eps keeps every perturbed point off the diagonal.
        u = rng.uniform(0.0, 0.9, n)
        v = u + rng.uniform(0.03, 1.0 - u)
        d = PersistenceDiagram.from_array(np.column_stack([u, v]))
        moved = PersistenceDiagram.from_array(d.expanded + rng.uniform(-eps, eps, (d.count, 2)))
        worst = max(worst, bottleneck_distance(d, moved))
    record(6, "bottleneck stability", worst <= eps + 1e-12,
           f"max d_B after eps={eps} perturbation {worst:.6f} (bound {eps} + 1e-12) over 100 trials")


def test_c07_persistence_oracle():
    rng = np.random.default_rng(7)
    mismatches, pairs = 0, 0
    t0 = time.perf_counter()
    for _ in range(100):
        n = int(rng.integers(1, 21))
        values = rng.integers(0, 8, n).astype(float)
        p = rng.uniform(0.05, 0.5)
        edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
        g = FilteredGraph(values, edges)
        mult = {(q.birth, q.death): q.multiplicity for q in zero_dim_persistence(g)}
        levels = sorted(set(values))
        eps = min((b - a for a, b in zip(levels, levels[1:])), default=1.0) / 4
        for a, u in enumerate(levels):
            for v in levels[a + 1:]:
                pairs += 1
                mismatches += multiplicity_oracle(g, u, v, eps) != mult.get((u, v), 0)
    elapsed = time.perf_counter() - t0
    record(7, "persistence oracle", mismatches == 0 and elapsed < 30.0,
           f"{mismatches} mismatches over {pairs} grid pairs on 100 graphs, {elapsed:.2f}s (< 30s)")


def test_c08_pseudometric():
    rng = np.random.default_rng(8)
    neg = asym = tri = 0
    worst = 0.0
    for _ in range(1000):
        x, y, z = (SymVector(rng.uniform(-1, 1, 10) + 1j * rng.uniform(-1, 1, 10), int(rng.integers(1, 2000)))
                   for _ in range(3))
        dxy, dyx = vector_distance(x, y), vector_distance(y, x)
        excess = vector_distance(x, z) - dxy - vector_distance(y, z)
        neg += dxy < 0
        asym += dxy != dyx
        tri += excess > 1e-12
        worst = max(worst, excess)
    record(8, "pseudometric suite", neg == asym == tri == 0,
           f"violations: negative {neg}, asymmetric {asym}, triangle {tri} (max excess {worst:.2e}, tol 1e-12)")


def test_c09_magnitude_taming():
    k = 50
    tamed_max, raw_max = 0.0, {}
    finite = True
    for N in (50, 500, 2000):
        d = make_diagrams(1, N, noise_fraction=0.5, seed=N)[0]
        for name in "TR":
            comps = vectorize(d, name, k).components
            finite &= bool(np.all(np.isfinite(comps)))
            tamed_max = max(tamed_max, float(np.max(np.abs(comps))))
            if N == 2000:
                raw_max[name] = float(np.max(np.abs(elementary_symmetric(warp_diagram(d, name), k))))
    passed = finite and tamed_max < 1.0 and min(raw_max.values()) > 1e3
    record(9, "magnitude taming", passed,
           f"max |renormalized a(j)| {tamed_max:.3f} (< 1), raw max at N=2000: "
           f"T {raw_max['T']:.2e}, R {raw_max['R']:.2e} (> 1e3)")


@pytest.mark.slow
def test_c10_performance_directionality():
    diagrams = make_diagrams(200, 1000, noise_fraction=0.9, seed=10)
    t0 = time.perf_counter()
    report = run_bench(diagrams, k=10)
    elapsed = time.perf_counter() - t0
    s = report["speedup"]
    sec = report["seconds"]
    record(10, "performance directionality", min(s.values()) >= 5.0 and elapsed <= 600,
           f"M1 {sec['M1_bottleneck']:.1f}s, M2 {sec['M2_T']:.2f}s, M3 {sec['M3_R']:.2f}s; "
           f"speedup M2 {s['M2_T']:.0f}x, M3 {s['M3_R']:.0f}x (>= 5x), total {elapsed:.0f}s (<= 600s)")


def test_c11_complexity_scaling():
    sizes = [250, 500, 1000, 2000]
    times = []
    vectorize(make_diagrams(1, 10)[0], "R", 10)
    for n in sizes:
        db = make_diagrams(20, n, noise_fraction=0.5, seed=n)
        runs = []
        for _ in range(5):
            t0 = time.perf_counter()
            for d in db:
                vectorize(d, "R", 10)
            runs.append(time.perf_counter() - t0)
        times.append(min(runs))
    slope = float(np.polyfit(np.log(sizes), np.log(times), 1)[0])
    record(11, "complexity scaling", 0.8 <= slope <= 1.3,
           f"log-log slope {slope:.3f} (in [0.8, 1.3]); seconds per 20 diagrams "
           + ", ".join(f"n={n}: {t:.4f}" for n, t in zip(sizes, times)))


def test_c12_retrieval_sanity():
    diagrams, labels = make_two_class(n_per_class=20, signal_a=5, signal_b=25, noise=50, seed=12)
    ids = tuple(d.label for d in diagrams)
    matrices = {"M1": compute_distance_matrix(diagrams, "bottleneck", ids, labels)}
    for name, warp in (("M2", "T"), ("M3", "R")):
        vecs = SymmetricFunctionVectorizer(warp, 10).fit().symvectors(diagrams)
        matrices[name] = compute_distance_matrix(vecs, "vector_d", ids, labels)
    acc = {name: loo_accuracy(m) for name, m in matrices.items()}
    weights, combined = optimize_weights(list(matrices.values()), grid_step=0.05)
    passed = min(acc.values()) >= 90.0 and combined >= max(acc.values())
    record(12, "end-to-end retrieval", passed,
           "leave-one-out 1-NN accuracy " + ", ".join(f"{k} {v:.1f}%" for k, v in acc.items())
           + f" (>= 90%); optimized weights {np.round(weights, 2).tolist()} give {combined:.1f}% "
           f"(>= best single {max(acc.values()):.1f}%)")


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_c") and callable(fn):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
