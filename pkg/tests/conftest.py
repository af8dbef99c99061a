import numpy as np
import pytest
from hypothesis import strategies as st

from subtraj.trajectory import Trajectory, concatenate


def store_of(*trajs):
    return concatenate([Trajectory(np.asarray(t, dtype=float)) for t in trajs])


@st.composite
def small_stores(draw, max_total=12, max_pieces=3, coord_max=8):
    """Stores of integer-coordinate trajectories, at most ``max_total`` vertices."""
    pieces = draw(st.integers(1, max_pieces))
    trajs, left = [], max_total
    for _ in range(pieces):
        if left == 0:
            break
        k = draw(st.integers(1, left))
        left -= k
        pts = draw(st.lists(st.tuples(st.integers(0, coord_max), st.integers(0, coord_max)),
                            min_size=k, max_size=k))
        trajs.append(pts)
    return store_of(*trajs)


deltas = st.sampled_from([0.0, 1.0, 1.5, 2.0, 3.0, 5.0, 12.0])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
