import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subtraj.trajectory import (
    BoundaryViolationError,
    DisjointnessError,
    EmptyStoreError,
    IndexRangeError,
    Point,
    SubtrajectoryRef,
    Trajectory,
    concatenate,
    make_subtrajectory,
    remove_intervals,
)

from conftest import small_stores, store_of


def line(k, offset=0.0):
    return [(offset + i, 0.0) for i in range(k)]


def test_point_rejects_non_finite():
    with pytest.raises(ValueError):
        Point(float("nan"), 0.0)
    assert Point(1, 2).x == 1


def test_trajectory_must_be_non_empty():
    with pytest.raises(ValueError):
        Trajectory([])


def test_concatenate_two():
    s = store_of(line(3), line(2, 10))
    assert s.n == 5
    assert s.boundaries == frozenset({3})
    assert s.segments() == [(1, 3), (4, 5)]


def test_concatenate_single_has_no_boundary():
    s = store_of(line(4))
    assert s.n == 4 and s.boundaries == frozenset()


def test_concatenate_empty_input():
    with pytest.raises(EmptyStoreError):
        concatenate([])


def test_origin_round_trip():
    trajs = [line(3), line(1, 5), line(4, 9)]
    s = store_of(*trajs)
    for i in range(1, s.n + 1):
        t, k = s.origin(i)
        assert tuple(s.xy[i - 1]) == tuple(trajs[t][k - 1])
    assert [len(t) for t in s.trajectories()] == [3, 1, 4]


def test_make_subtrajectory():
    s = store_of(line(3), line(2, 10))
    assert make_subtrajectory(s, 1, 3) == SubtrajectoryRef(1, 3)
    assert len(make_subtrajectory(s, 2, 2)) == 1
    with pytest.raises(BoundaryViolationError):
        make_subtrajectory(s, 3, 4)
    with pytest.raises(IndexRangeError):
        make_subtrajectory(s, 0, 2)
    with pytest.raises(IndexRangeError):
        make_subtrajectory(s, 4, 6)


def test_ref_length_conventions():
    r = SubtrajectoryRef(2, 5)
    assert len(r) == 4  # vertices
    assert r.ell == 3   # edges
    assert r.overlaps(SubtrajectoryRef(5, 7))
    assert not r.overlaps(SubtrajectoryRef(6, 7))


def test_remove_single_split():
    s = store_of(line(10))
    out = remove_intervals(s, [SubtrajectoryRef(4, 6)])
    assert out.n == 7
    assert out.boundaries == frozenset({3})


def test_remove_everything():
    s = store_of(line(10))
    assert remove_intervals(s, [SubtrajectoryRef(1, 10)]).n == 0


def test_remove_two_against_list_surgery():
    s = store_of(line(10))
    out = remove_intervals(s, [SubtrajectoryRef(2, 3), SubtrajectoryRef(7, 8)])
    keep = [i for i in range(1, 11) if not (2 <= i <= 3 or 7 <= i <= 8)]
    assert out.n == 6
    assert out.boundaries == frozenset({1, 4})
    assert [out.to_original(SubtrajectoryRef(i, i)).a for i in range(1, 7)] == keep
    assert np.array_equal(out.xy, s.xy[np.array(keep) - 1])


def test_remove_overlap_rejected():
    s = store_of(line(10))
    with pytest.raises(DisjointnessError):
        remove_intervals(s, [SubtrajectoryRef(2, 5), SubtrajectoryRef(5, 6)])


def test_reversed_maps_indices():
    s = store_of(line(3), line(2, 10))
    r = s.reversed()
    assert r.n == 5
    assert r.boundaries == frozenset({2})
    assert np.array_equal(r.xy, s.xy[::-1])


@given(small_stores(max_total=15), st.data())
@settings(max_examples=80, deadline=None)
def test_remove_preserves_survivors(store, data):
    # random disjoint intervals inside pieces
    chosen = []
    for lo, hi in store.segments():
        if data.draw(st.booleans()):
            a = data.draw(st.integers(lo, hi))
            b = data.draw(st.integers(a, hi))
            chosen.append(SubtrajectoryRef(a, b))
    out = remove_intervals(store, chosen)
    removed = sum(len(r) for r in chosen)
    assert out.n == store.n - removed
    dead = {i for r in chosen for i in range(r.a, r.b + 1)}
    survivors = [i for i in range(1, store.n + 1) if i not in dead]
    mapped = [out.to_original(SubtrajectoryRef(i, i)).a for i in range(1, out.n + 1)]
    assert mapped == survivors
    for i, orig in enumerate(survivors, 1):
        assert out.origin(i) == store.origin(orig)
    # a boundary appears exactly where survivors stop being adjacent in one piece
    for i in range(1, out.n):
        p, q = survivors[i - 1], survivors[i]
        joined = q == p + 1 and p not in store.boundaries
        assert (i in out.boundaries) != joined
