import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from phwarp import PersistenceDiagram, bottleneck_distance, brute_force_bottleneck, candidate_thresholds, point_cost
from phwarp.exceptions import NotFinitizedError, SizeError

from conftest import diagrams, random_diagram
from oracles import matching_bottleneck

D = PersistenceDiagram


class TestPointCost:
    def test_examples(self):
        assert point_cost((0.3, 0.6), (0.3, 0.6)) == 0
        assert point_cost((0.0, 0.2), (0.5, 0.7)) == pytest.approx(0.1)
        assert point_cost((0.0, 1.0), (0.1, 0.9)) == pytest.approx(0.1)

    def test_infinite(self):
        with pytest.raises(NotFinitizedError):
            point_cost((0.0, math.inf), (0.0, 1.0))

    @given(st.tuples(st.floats(0, 1), st.floats(0, 1)), st.tuples(st.floats(0, 1), st.floats(0, 1)))
    def test_symmetric(self, p, q):
        assert point_cost(p, q) == point_cost(q, p)


class TestBottleneck:
    def test_identity(self):
        d = D([(0.0, 1.0), (0.2, 0.4, 3)])
        assert bottleneck_distance(d, d) == 0

    def test_against_empty(self):
        assert bottleneck_distance(D([(0.0, 1.0)]), D()) == 0.5
        assert brute_force_bottleneck(D([(0.0, 1.0)]), D()) == 0.5

    def test_shift(self):
        assert bottleneck_distance(D([(0.0, 1.0)]), D([(0.0, 0.8)])) == pytest.approx(0.2)
        assert brute_force_bottleneck(D([(0.0, 1.0)]), D([(0.0, 0.8)])) == pytest.approx(0.2)

    def test_destroy_short_point(self):
        a, b = D([(0.0, 0.4), (0.0, 1.0)]), D([(0.0, 1.0)])
        assert brute_force_bottleneck(a, b) == 0.2
        assert bottleneck_distance(a, b) == 0.2

    def test_both_empty(self):
        assert brute_force_bottleneck(D(), D()) == 0
        assert bottleneck_distance(D(), D()) == 0

    def test_multiplicity_expanded(self):
        # Two copies on one side, one on the other: the spare copy goes to the diagonal.
        assert bottleneck_distance(D([(0.0, 0.6, 2)]), D([(0.0, 0.6)])) == pytest.approx(0.3)

    def test_not_finitized(self):
        with pytest.raises(NotFinitizedError):
            bottleneck_distance(D([(0.0, math.inf)]), D())
        with pytest.raises(NotFinitizedError):
            brute_force_bottleneck(D(), D([(0.0, math.inf)]))

    def test_brute_force_size_limit(self):
        with pytest.raises(SizeError):
            brute_force_bottleneck(D([(0.0, 1.0, 6)]), D([(0.0, 1.0, 5)]))

    @given(diagrams(max_points=4, max_mult=1), diagrams(max_points=4, max_mult=1))
    def test_matches_brute_force(self, a, b):
        assert abs(bottleneck_distance(a, b) - brute_force_bottleneck(a, b)) <= 1e-12

    @given(diagrams(max_points=5, max_mult=2), diagrams(max_points=5, max_mult=2))
    def test_symmetric_and_in_candidates(self, a, b):
        d = bottleneck_distance(a, b)
        assert d == bottleneck_distance(b, a)
        assert d in set(candidate_thresholds(a, b).tolist()) | {0.0}

    @given(diagrams(max_points=4), diagrams(max_points=4), diagrams(max_points=4))
    def test_triangle(self, a, b, c):
        assert bottleneck_distance(a, c) <= bottleneck_distance(a, b) + bottleneck_distance(b, c) + 1e-12

    @given(diagrams(max_points=8), st.floats(0, 0.01), st.integers(0, 2**32 - 1))
    def test_stability(self, d, eps, seed):
        rng = np.random.default_rng(seed)
        pts = d.expanded + rng.uniform(-eps, eps, size=d.expanded.shape)
        pts = pts[pts[:, 0] < pts[:, 1]] if len(pts) else pts
        moved = D.from_array(pts)
        if moved.count != d.count:
            return
        assert bottleneck_distance(d, moved) <= eps + 1e-12

    @pytest.mark.parametrize("seed", range(6))
    def test_matches_matching_oracle_medium(self, seed):
        rng = np.random.default_rng(seed)
        a, b = random_diagram(rng, 14), random_diagram(rng, 11)
        assert bottleneck_distance(a, b) == matching_bottleneck(a.expanded, b.expanded)

    @pytest.mark.parametrize("seed", range(3))
    def test_matches_matching_oracle_near_diagonal(self, seed):
        # Many short points force long matchings and many candidate thresholds.
        rng = np.random.default_rng(100 + seed)
        def noisy(n):
            b = rng.uniform(0, 0.9, n)
            return D.from_array(np.column_stack([b, b + rng.uniform(1e-6, 0.05, n)]))
        a, b = noisy(25), noisy(20)
        assert bottleneck_distance(a, b) == matching_bottleneck(a.expanded, b.expanded)

    def test_ties_at_threshold(self):
        # Grid-valued points put many costs exactly on candidate values.
        rng = np.random.default_rng(3)

        def grid_diagram():
            uv = np.sort(rng.integers(0, 9, (6, 2)), axis=1)
            return D([(u / 8, v / 8) for u, v in uv if u < v])

        for _ in range(30):
            a, b = grid_diagram(), grid_diagram()
            assert bottleneck_distance(a, b) == matching_bottleneck(a.expanded, b.expanded)


class TestCandidates:
    def test_contents(self):
        a, b = D([(0.0, 1.0)]), D([(0.0, 0.8)])
        assert candidate_thresholds(a, b).tolist() == pytest.approx([0.2, 0.4, 0.5])
