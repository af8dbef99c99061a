"""Discrete Fréchet distance by dynamic programming."""

import math

import numpy as np
from numba import njit

__all__ = [
    "discrete_frechet",
    "frechet_leq",
]


def _as_curve(P):
    if hasattr(P, "coords") and not isinstance(P, np.ndarray):
        P = P.coords
    if len(P) and hasattr(P[0], "x"):
        P = [(p.x, p.y) for p in P]
    arr = np.ascontiguousarray(P, dtype=np.float64).reshape(-1, 2)
    if arr.shape[0] == 0:
        raise ValueError("Vertices must not be empty.")
    return arr


def discrete_frechet(P, Q):
    """Discrete Fréchet distance between two planar curves.

    Parameters
    ----------
    P, Q : array_like
        ``(p, 2)`` and ``(q, 2)`` vertex arrays, or sequences of points.

    Returns
    -------
    float
        The minimum over monotone walks of the largest pairwise distance.

    Raises
    ------
    ValueError
        If either curve is empty.

    Examples
    --------
    >>> discrete_frechet([(0, 0)], [(3, 4)])
    5.0
    """
    return _threshold_root(_dfd_squared(_as_curve(P), _as_curve(Q)))


def _threshold_root(d2):
    """Smallest double ``d`` with ``d * d >= d2`` in floating point.

    Free cells are tested as ``dist2 <= delta * delta``, so this root makes
    ``frechet_leq(P, Q, delta)`` hold exactly when the returned value is at
    most ``delta``. It differs from ``sqrt`` by at most one ulp.
    """
    d = math.sqrt(d2)
    while d * d < d2:
        d = math.nextafter(d, math.inf)
    while d > 0:
        lower = math.nextafter(d, 0.0)
        if lower * lower < d2:
            break
        d = lower
    return d


def frechet_leq(P, Q, delta):
    """Decide ``discrete_frechet(P, Q) <= delta`` without computing the value."""
    if delta < 0:
        return False
    return bool(_dfd_leq(_as_curve(P), _as_curve(Q), float(delta) * float(delta)))


@njit(cache=True)
def _d2(P, i, Q, j):
    dx = P[i, 0] - Q[j, 0]
    dy = P[i, 1] - Q[j, 1]
    return dx * dx + dy * dy


@njit(cache=True)
def _dfd_squared(P, Q):
    # one rolling row of the Eiter-Mannila table, squared distances
    p, q = P.shape[0], Q.shape[0]
    row = np.empty(q)
    row[0] = _d2(P, 0, Q, 0)
    for j in range(1, q):
        row[j] = max(row[j - 1], _d2(P, 0, Q, j))
    for i in range(1, p):
        diag = row[0]
        row[0] = max(row[0], _d2(P, i, Q, 0))
        for j in range(1, q):
            up = row[j]
            row[j] = max(min(up, row[j - 1], diag), _d2(P, i, Q, j))
            diag = up
    return row[q - 1]


@njit(cache=True)
def _dfd_leq(P, Q, delta2):
    p, q = P.shape[0], Q.shape[0]
    row = np.zeros(q, dtype=np.bool_)
    ok = _d2(P, 0, Q, 0) <= delta2
    row[0] = ok
    for j in range(1, q):
        row[j] = row[j - 1] and _d2(P, 0, Q, j) <= delta2
    for i in range(1, p):
        diag = row[0]
        row[0] = row[0] and _d2(P, i, Q, 0) <= delta2
        any_true = row[0]
        for j in range(1, q):
            up = row[j]
            row[j] = (up or row[j - 1] or diag) and _d2(P, i, Q, j) <= delta2
            any_true = any_true or row[j]
            diag = up
        if not any_true:
            return False
    return row[q - 1]
