"""Greedy k-centre / k-means subtrajectory clustering under a weighted cost.

The score of a clustering is a cost to minimise::

    c1 * |C|  +  c2 * (Fréchet term)  +  c3 * uncovered / |X|

where the Fréchet term is the largest member distance (k-centre) or the
sum of all member distances (k-means). A candidate is accepted only when
it strictly lowers the cost.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np

from .frechet import discrete_frechet
from .psc import KEY_COVERAGE, KEY_EVALUATION, psc_select
from .sc import Cluster, sc_max_cardinality, sc_max_length
from .trajectory import SubtrajectoryRef, TrajectoryStore, remove_intervals

__all__ = [
    "ScoringVector",
    "Objective",
    "Clustering",
    "ScoreBreakdown",
    "ClusteringConfig",
    "RunTimeout",
    "score",
    "kcentre_contribution",
    "kmeans_contribution",
    "evaluation",
    "member_distances",
    "greedy_k_centre",
    "greedy_k_means",
    "delta_schedule",
    "sc_length_subroutine",
    "sc_size_subroutine",
    "psc_subroutine",
    "run_configuration",
    "clustering_metrics",
]


class RunTimeout(Exception):
    """The configured time limit ran out."""


@dataclass(frozen=True)
class ScoringVector:
    c1: float
    c2: float
    c3: float

    def __post_init__(self):
        if not all(math.isfinite(c) for c in (self.c1, self.c2, self.c3)):
            raise ValueError("scoring weights must be finite")
        if self.c1 <= 0 or self.c2 < 0 or self.c3 < 0:
            raise ValueError("need c1 > 0, c2 >= 0, c3 >= 0")

    def __iter__(self):
        return iter((self.c1, self.c2, self.c3))


class Objective(str, Enum):
    K_CENTRE = "k-centre"
    K_MEANS = "k-means"


@dataclass(frozen=True)
class ScoreBreakdown:
    cluster_term: float
    frechet_term: float
    uncovered_term: float

    @property
    def total(self) -> float:
        return self.cluster_term + self.frechet_term + self.uncovered_term


def member_distances(cluster: Cluster, store: TrajectoryStore) -> tuple:
    """Exact Fréchet distance from the centre to every member, in member order."""
    if cluster.member_distances is not None:
        return cluster.member_distances
    centre = store.coords(cluster.centre)
    return tuple(discrete_frechet(centre, store.coords(m)) for m in cluster.members)


@dataclass
class Clustering:
    """Accepted clusters in original-store coordinates, with coverage bookkeeping."""

    total_vertices: int
    clusters: list = field(default_factory=list)
    covered: list = field(default_factory=list)
    covered_count: int = 0
    delta: Optional[float] = None
    score_trace: list = field(default_factory=list)

    def add(self, cluster: Cluster):
        if cluster.member_distances is None:
            raise ValueError("clusters must carry member distances before being added")
        self.clusters.append(cluster)
        self.covered.extend(cluster.members)
        self.covered_count += cluster.coverage

    def uncovered_from_scratch(self) -> int:
        mask = np.zeros(self.total_vertices + 1, dtype=bool)
        for ref in self.covered:
            mask[ref.a : ref.b + 1] = True
        return self.total_vertices - int(mask.sum())

    def is_disjoint(self) -> bool:
        ordered = sorted(self.covered)
        return all(p.b < q.a for p, q in zip(ordered, ordered[1:]))

    def __len__(self):
        return len(self.clusters)


def score(clustering: Clustering, vector: ScoringVector, objective: Objective) -> ScoreBreakdown:
    """Cost of ``clustering``; member distances must already be attached.

    Raises
    ------
    ValueError
        If the clustering covers a store with no vertices.
    """
    if clustering.total_vertices <= 0:
        raise ValueError("score is undefined for an empty vertex set")
    dists = [d for cl in clustering.clusters for d in cl.member_distances]
    if not dists:
        frechet = 0.0
    elif Objective(objective) is Objective.K_CENTRE:
        frechet = vector.c2 * max(dists)
    else:
        frechet = vector.c2 * sum(dists)
    uncovered = clustering.total_vertices - clustering.covered_count
    return ScoreBreakdown(
        vector.c1 * len(clustering.clusters),
        frechet,
        vector.c3 * uncovered / clustering.total_vertices,
    )


def kcentre_contribution(cluster: Cluster, vector: ScoringVector, total_vertices: int) -> float:
    """Cost change from adding ``cluster`` when the radius term is already paid."""
    return vector.c1 - vector.c3 * cluster.coverage / total_vertices


def kmeans_contribution(cluster: Cluster, vector: ScoringVector, total_vertices: int) -> float:
    return vector.c1 + sum(
        vector.c2 * d - vector.c3 * len(m) / total_vertices
        for m, d in zip(cluster.members, cluster.member_distances)
    )


def evaluation(cluster: Optional[Cluster], vector: ScoringVector, total_vertices: int) -> float:
    """Coverage gained per unit of cost added; 0 for no cluster."""
    if cluster is None:
        return 0.0
    gain = sum(vector.c3 * len(m) / total_vertices for m in cluster.members)
    return gain / (vector.c1 + sum(vector.c2 * d for d in cluster.member_distances))


def _deadline_check(deadline):
    if deadline is not None and time.monotonic() > deadline:
        raise RunTimeout()


def _to_original(cluster: Cluster, residual: TrajectoryStore) -> Cluster:
    return Cluster(
        residual.to_original(cluster.centre),
        tuple(residual.to_original(m) for m in cluster.members),
        cluster.delta,
        member_distances(cluster, residual),
    )


def _level_cost(clustering, vector, delta, extra=None):
    # k-centre cost when the radius of a non-empty clustering is taken to be delta
    k = len(clustering.clusters) + (extra is not None)
    covered = clustering.covered_count + (extra.coverage if extra is not None else 0)
    radius = vector.c2 * delta if k else 0.0
    return vector.c1 * k + radius + vector.c3 * (clustering.total_vertices - covered) / clustering.total_vertices


def greedy_k_centre(vector: ScoringVector, delta: float, store: TrajectoryStore, subroutine: Callable,
                    deadline: float = None) -> Clustering:
    """Repeatedly add the subroutine's cluster while the cost at radius ``delta`` drops."""
    result = Clustering(store.n, delta=delta)
    result.score_trace.append(_level_cost(result, vector, delta))
    residual = store
    while residual.n > 0:
        _deadline_check(deadline)
        found = subroutine(delta, residual, vector=vector, objective=Objective.K_CENTRE,
                           total_vertices=store.n)
        if found is None:
            break
        new_cost = _level_cost(result, vector, delta, found)
        if not new_cost < result.score_trace[-1]:
            break
        result.add(_to_original(found, residual))
        result.score_trace.append(new_cost)
        residual = remove_intervals(residual, found.members)
    return result


def greedy_k_means(vector: ScoringVector, store: TrajectoryStore, subroutine: Callable,
                   delta_grid: Sequence[float], deadline: float = None) -> Clustering:
    """Each round keeps the best-evaluated candidate over ``delta_grid``; stops when it does not pay."""
    result = Clustering(store.n)
    result.score_trace.append(score(result, vector, Objective.K_MEANS).total)
    residual = store
    X = store.n
    while residual.n > 0:
        best, best_eval = None, 0.0
        for delta in delta_grid:
            _deadline_check(deadline)
            found = subroutine(delta, residual, vector=vector, objective=Objective.K_MEANS,
                               total_vertices=X)
            if found is None:
                continue
            found = found.with_distances(member_distances(found, residual))
            value = evaluation(found, vector, X)
            if value > best_eval:
                best, best_eval = found, value
        if best is None:
            break
        new_cost = result.score_trace[-1] + kmeans_contribution(best, vector, X)
        if not new_cost < result.score_trace[-1]:
            break
        result.add(_to_original(best, residual))
        result.score_trace.append(new_cost)
        residual = remove_intervals(residual, best.members)
    return result


def delta_schedule(delta_min: float, delta_max: float) -> list[float]:
    """Doubling values ``delta_min, 2 * delta_min, ...`` not exceeding ``delta_max``.

    The first value is always included.
    """
    if delta_min <= 0:
        raise ValueError("delta_min must be positive")
    out = [float(delta_min)]
    while out[-1] * 2 <= delta_max:
        out.append(out[-1] * 2)
    return out


def sc_length_subroutine(ell: int, dense: bool = False) -> Callable:
    def run(delta, store, **_):
        return sc_max_cardinality(ell, delta, store, dense=dense)
    run.__name__ = f"SC-l-{ell}"
    return run


def sc_size_subroutine(m: int, dense: bool = False) -> Callable:
    def run(delta, store, **_):
        return sc_max_length(m, delta, store, dense=dense)
    run.__name__ = f"SC-m-{m}"
    return run


def psc_subroutine(dense: bool = False) -> Callable:
    """Picks the most covering streamed cluster (k-centre) or the best evaluation (k-means)."""
    def run(delta, store, vector=None, objective=Objective.K_CENTRE, total_vertices=None):
        if Objective(objective) is Objective.K_CENTRE:
            found, _ = psc_select(delta, store, KEY_COVERAGE, dense=dense)
        else:
            found, _ = psc_select(delta, store, KEY_EVALUATION, tuple(vector),
                                  total_vertices=total_vertices, dense=dense)
        return found
    run.__name__ = "PSC"
    return run


@dataclass
class ClusteringConfig:
    algorithm: str  # "SC-l", "SC-m" or "PSC"
    objective: Objective
    vector: ScoringVector
    ell: Optional[int] = None
    m: Optional[int] = None
    delta_min: float = 2.0
    delta_max: Optional[float] = None
    dense: bool = False

    def __post_init__(self):
        self.objective = Objective(self.objective)
        if self.algorithm == "SC-l" and (self.ell is None or self.m is not None):
            raise ValueError("SC-l needs ell and no m")
        if self.algorithm == "SC-m" and (self.m is None or self.ell is not None):
            raise ValueError("SC-m needs m and no ell")
        if self.algorithm not in ("SC-l", "SC-m", "PSC"):
            raise ValueError(f"unknown algorithm {self.algorithm!r}")

    @property
    def name(self) -> str:
        if self.algorithm == "SC-l":
            return f"SC-l-{self.ell}"
        if self.algorithm == "SC-m":
            return f"SC-m-{self.m}"
        return "PSC"

    def subroutine(self) -> Callable:
        if self.algorithm == "SC-l":
            return sc_length_subroutine(self.ell, self.dense)
        if self.algorithm == "SC-m":
            return sc_size_subroutine(self.m, self.dense)
        return psc_subroutine(self.dense)


def bbox_diagonal(store: TrajectoryStore) -> float:
    span = store.xy.max(axis=0) - store.xy.min(axis=0)
    return float(math.hypot(*span))


def run_configuration(config: ClusteringConfig, store: TrajectoryStore, deadline: float = None):
    """Run one configuration end to end.

    k-centre runs the greedy loop once per level of the doubling schedule
    and keeps the cheapest result; k-means runs once with the schedule as
    its internal grid.

    Returns
    -------
    (Clustering, ScoreBreakdown)
    """
    delta_max = config.delta_max if config.delta_max is not None else bbox_diagonal(store)
    grid = delta_schedule(config.delta_min, max(delta_max, config.delta_min))
    f = config.subroutine()
    if config.objective is Objective.K_MEANS:
        best = greedy_k_means(config.vector, store, f, grid, deadline=deadline)
        return best, score(best, config.vector, config.objective)
    best, best_score = None, None
    for delta in grid:
        run = greedy_k_centre(config.vector, delta, store, f, deadline=deadline)
        s = score(run, config.vector, config.objective)
        if best is None or s.total < best_score.total:
            best, best_score = run, s
    return best, best_score


def clustering_metrics(clustering: Clustering) -> dict:
    """Cluster count, Fréchet and cardinality summaries; NaN / -inf when empty."""
    dists = [d for cl in clustering.clusters for d in cl.member_distances]
    sizes = [cl.cardinality for cl in clustering.clusters]
    return {
        "clusters": len(clustering.clusters),
        "max_frechet": max(dists) if dists else -math.inf,
        "avg_frechet": sum(dists) / len(dists) if dists else math.nan,
        "max_size": max(sizes) if sizes else -math.inf,
        "avg_size": sum(sizes) / len(sizes) if sizes else math.nan,
    }
