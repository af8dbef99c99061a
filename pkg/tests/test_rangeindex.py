import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subtraj.rangeindex import build_index, enumerate_row_free, prev_free_column
from subtraj.trajectory import EmptyStoreError, Point
from subtraj.verify import random_store

from conftest import store_of


def test_single_vertex_is_one_leaf():
    ix = build_index(store_of([(1, 1)]))
    assert ix.node_ranges(0) == [(1, 1)]
    assert ix.depth == 0


def test_eight_vertices_three_levels():
    ix = build_index(store_of([(i, 0) for i in range(8)]))
    assert ix.depth == 3
    assert ix.node_ranges(1) == [(1, 4), (5, 8)]
    assert ix.node_ranges(3) == [(i, i) for i in range(1, 9)]



def test_empty_store_rejected_after_removal():
    from subtraj.trajectory import SubtrajectoryRef, remove_intervals

    s = remove_intervals(store_of([(0, 0), (1, 1)]), [SubtrajectoryRef(1, 2)])
    with pytest.raises(EmptyStoreError):
        build_index(s)


def test_prev_free_column_self_and_none():
    s = store_of([(0, 0), (5, 5), (9, 9)])
    ix = build_index(s)
    assert prev_free_column(ix, s, Point(5, 5), 0.0, 3) == 2
    assert prev_free_column(ix, s, (5, 5), 0.0, 1) is None
    assert prev_free_column(ix, s, (100, 100), 1.0, 3) is None


def test_enumerate_edge_cases():
    s = store_of([(0, 0), (1, 0), (2, 0)])
    ix = build_index(s)
    assert list(enumerate_row_free(ix, s, (0.5, 0.5), 0.0)) == []
    c = store_of([(3, 3)] * 6)
    assert list(enumerate_row_free(build_index(c), c, (3, 3), 0.0)) == [6, 5, 4, 3, 2, 1]


def test_random_queries_match_linear_scan(rng):
    s = random_store(rng, [120, 80], coord_max=50)
    ix = build_index(s)
    for _ in range(500):
        q = rng.uniform(-5, 55, size=2)
        delta = float(rng.uniform(0, 15))
        j = int(rng.integers(1, s.n + 1))
        d = np.hypot(*(s.xy - q).T)
        hits = [k + 1 for k in range(s.n) if d[k] <= delta]
        below = [h for h in hits if h <= j]
        assert prev_free_column(ix, s, q, delta, j) == (below[-1] if below else None)
        assert list(enumerate_row_free(ix, s, q, delta)) == hits[::-1]


@given(st.lists(st.tuples(st.integers(0, 6), st.integers(0, 6)), min_size=1, max_size=40),
       st.integers(0, 6), st.integers(0, 6), st.sampled_from([0.0, 1.0, 2.5, 4.0]))
@settings(max_examples=100, deadline=None)
def test_stream_is_strictly_descending_and_complete(pts, qx, qy, delta):
    s = store_of(pts)
    got = list(enumerate_row_free(build_index(s), s, (qx, qy), delta))
    assert got == sorted(set(got), reverse=True)
    want = [k for k, (x, y) in enumerate(pts, 1) if (x - qx) ** 2 + (y - qy) ** 2 <= delta * delta]
    assert sorted(got) == want
