"""Reading, writing and generating trajectory datasets.

The text format holds one vertex per line as two whitespace-separated
numbers; trajectories are separated by one or more blank lines.
"""

from __future__ import annotations

import math
import os
from pathlib import Path

import numpy as np

from .trajectory import Trajectory

__all__ = [
    "DatasetError",
    "load_dataset",
    "write_dataset",
    "generate_synthetic",
    "generate_road_like",
    "convert_trip_files",
]


class DatasetError(ValueError):
    pass


def load_dataset(path) -> list[Trajectory]:
    """Parse a dataset file into trajectories, in file order.

    Raises
    ------
    DatasetError
        On a malformed line (the message names the line number) or when the
        file holds no vertices.
    """
    trajectories, current = [], []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.split()
            if not parts:
                if current:
                    trajectories.append(Trajectory(current))
                    current = []
                continue
            if len(parts) != 2:
                raise DatasetError(f"{path}:{lineno}: expected two numbers, got {line.strip()!r}")
            try:
                x, y = float(parts[0]), float(parts[1])
            except ValueError:
                raise DatasetError(f"{path}:{lineno}: not a number: {line.strip()!r}") from None
            if not (math.isfinite(x) and math.isfinite(y)):
                raise DatasetError(f"{path}:{lineno}: non-finite coordinate")
            current.append((x, y))
    if current:
        trajectories.append(Trajectory(current))
    if not trajectories:
        raise DatasetError(f"{path}: no trajectories")
    return trajectories


def write_dataset(trajectories, path):
    """Write trajectories so that :func:`load_dataset` reproduces them exactly."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w") as fh:
        for k, traj in enumerate(trajectories):
            if k:
                fh.write("\n")
            for x, y in traj.coords:
                fh.write(f"{float(x)!r} {float(y)!r}\n")
    os.replace(tmp, path)


def _tour_length(pts, order):
    seg = np.diff(pts[order], axis=0)
    return float(np.hypot(seg[:, 0], seg[:, 1]).sum())


def _nearest_neighbour_order(pts):
    k = len(pts)
    order = [0]
    left = np.ones(k, dtype=bool)
    left[0] = False
    for _ in range(k - 1):
        d = np.hypot(*(pts - pts[order[-1]]).T)
        d[~left] = np.inf
        nxt = int(np.argmin(d))  # argmin breaks ties by lowest index
        order.append(nxt)
        left[nxt] = False
    return np.array(order)


def _two_opt(pts, order):
    """Improve an open path by segment reversals until none helps."""
    improved = True
    while improved:
        improved = False
        k = len(order)
        for i in range(k - 2):
            p = pts[order]
            a, b = p[i], p[i + 1]
            c = p[i + 2 :]
            d_next = np.vstack([p[i + 3 :], [[np.nan, np.nan]]])
            before = np.hypot(*(a - b)) + np.hypot(*(c - d_next).T)
            after = np.hypot(*(a - c).T) + np.hypot(*(b - d_next).T)
            # the last vertex has no successor
            before[-1] = np.hypot(*(a - b))
            after[-1] = np.hypot(*(a - c[-1]))
            gain = before - after
            j = int(np.argmax(gain))
            if gain[j] > 1e-9:
                jj = i + 2 + j
                order[i + 1 : jj + 1] = order[i + 1 : jj + 1][::-1]
                improved = True
    return order


def generate_synthetic(domain_size: int, trajectories: int, c_percent: float, seed: int = 0,
                       extent: float = 1000.0) -> list[Trajectory]:
    """Random domain, then per trajectory a random c% subset ordered by a TSP heuristic.

    The domain is ``domain_size`` uniform points in ``[0, extent]^2``. Each
    subset is ordered by nearest-neighbour construction followed by 2-opt.
    """
    if domain_size < 2 or not (0 < c_percent <= 100):
        raise ValueError("need domain_size >= 2 and 0 < c_percent <= 100")
    rng = np.random.default_rng(seed)
    domain = rng.uniform(0.0, extent, size=(domain_size, 2))
    k = max(1, int(round(domain_size * c_percent / 100.0)))
    out = []
    for _ in range(trajectories):
        chosen = np.sort(rng.choice(domain_size, size=k, replace=False))
        pts = domain[chosen]
        order = _two_opt(pts, _nearest_neighbour_order(pts)) if k > 2 else np.arange(k)
        out.append(Trajectory(pts[order]))
    return out


def generate_road_like(trajectories: int = 128, vertices: int = 2840, seed: int = 0,
                       block: float = 120.0, blocks: int = 10, spacing: float = 30.0,
                       noise: float = 5.0) -> list[Trajectory]:
    """GPS-like traces: random walks along a square street grid with sampling noise.

    Lengths are drawn so that the total is exactly ``vertices``. Units are
    metres, so a city-scale ``delta`` such as 50 is meaningful.
    """
    rng = np.random.default_rng(seed)
    cuts = np.sort(rng.choice(np.arange(1, vertices), size=trajectories - 1, replace=False))
    lengths = np.diff(np.concatenate([[0], cuts, [vertices]]))
    steps = int(round(block / spacing))
    moves = np.array([(1, 0), (-1, 0), (0, 1), (0, -1)])
    out = []
    for length in lengths:
        node = rng.integers(0, blocks, size=2)
        heading = moves[rng.integers(4)]
        pts = []
        while len(pts) < length:
            if rng.random() < 0.3:
                heading = moves[rng.integers(4)]
            nxt = np.clip(node + heading, 0, blocks - 1)
            if np.array_equal(nxt, node):
                heading = -heading
                continue
            for s in range(steps):
                pts.append((node + heading * s / steps) * block)
            node = nxt
        pts = np.array(pts[:length], dtype=np.float64)
        pts += rng.normal(0.0, noise, size=pts.shape)
        out.append(Trajectory(pts))
    return out


def convert_trip_files(directory, path):
    """Merge a directory of per-trip text files into one dataset file.

    Trip files hold one sample per line starting with x and y; any further
    columns, such as a timestamp, are ignored. Files are read in sorted name
    order.
    """
    trajs = []
    for trip in sorted(Path(directory).iterdir()):
        if not trip.is_file():
            continue
        rows = [line.split()[:2] for line in trip.read_text().splitlines() if line.strip()]
        if rows:
            trajs.append(Trajectory(np.array(rows, dtype=np.float64)))
    if not trajs:
        raise DatasetError(f"{directory}: no trip files")
    write_dataset(trajs, path)
    return len(trajs), sum(len(t) for t in trajs)
