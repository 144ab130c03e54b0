import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from phwarp import PersistenceDiagram

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@st.composite
def triangle_points(draw, allow_diagonal=False):
    """A point ``0 <= u < v <= 1`` (``u <= v`` when ``allow_diagonal``)."""
    a = draw(st.floats(0.0, 1.0))
    b = draw(st.floats(0.0, 1.0))
    u, v = min(a, b), max(a, b)
    if not allow_diagonal and u == v:
        v = min(1.0, u + 0.125) if u < 1.0 else 1.0
        u = min(u, 0.875)
    return u, v


@st.composite
def diagrams(draw, max_points=6, max_mult=3):
    pts = draw(st.lists(triangle_points(), max_size=max_points))
    mults = draw(st.lists(st.integers(1, max_mult), min_size=len(pts), max_size=len(pts)))
    return PersistenceDiagram([(u, v, m) for (u, v), m in zip(pts, mults)])


@st.composite
def graphs(draw, max_vertices=10, n_levels=5):
    """Small vertex-filtered graphs with values on a coarse grid (so ties occur)."""
    n = draw(st.integers(1, max_vertices))
    values = draw(st.lists(st.integers(0, n_levels - 1), min_size=n, max_size=n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    edges = draw(st.lists(st.sampled_from(pairs), max_size=2 * n)) if pairs else []
    return [float(x) for x in values], edges


def random_diagram(rng, n, lo=0.0, hi=1.0):
    """``n`` uniform points with ``lo <= u < v <= hi``."""
    uv = np.sort(rng.uniform(lo, hi, size=(n, 2)), axis=1)
    uv = uv[uv[:, 0] < uv[:, 1]]
    return PersistenceDiagram.from_array(uv)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    # Repeat the acceptance PASS/FAIL lines at the end of the run.
    module = sys.modules.get("test_acceptance")
    if module is not None and module.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in module.RESULTS:
            terminalreporter.write_line(line)
