"""Experiment orchestration: one configuration in, a metrics row and a clustering file out."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import threading
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import psutil

from .clustering import (
    ClusteringConfig,
    Objective,
    RunTimeout,
    ScoringVector,
    clustering_metrics,
    run_configuration,
)
from .datasets import generate_synthetic, load_dataset
from .sc import sc_max_length
from .trajectory import TrajectoryStore, concatenate

__all__ = [
    "ExperimentConfig",
    "MetricsRow",
    "PeakMemory",
    "run_experiment",
    "scoring_vector_protocol",
    "clustering_to_json",
    "bench_sc",
    "METRIC_COLUMNS",
]

METRIC_COLUMNS = ["Name", "Seconds", "GBytes", "c", "Clusters", "Max Frechet", "Avg Frechet",
                  "Score", "Max Size", "Avg Size"]


@dataclass
class ExperimentConfig:
    algorithm: str
    objective: str
    vector: tuple
    dataset: Optional[str] = None
    synthetic: Optional[dict] = None  # keyword arguments for generate_synthetic
    ell: Optional[int] = None
    m: Optional[int] = None
    delta_min: float = 2.0
    delta_max: Optional[float] = None
    time_limit: float = 3600.0
    seed: int = 0
    dense: bool = False

    def __post_init__(self):
        if (self.dataset is None) == (self.synthetic is None):
            raise ValueError("give exactly one of dataset or synthetic")
        if self.time_limit <= 0:
            raise ValueError("time limit must be positive")
        self.vector = tuple(float(c) for c in self.vector)

    def clustering_config(self) -> ClusteringConfig:
        return ClusteringConfig(self.algorithm, Objective(self.objective), ScoringVector(*self.vector),
                                ell=self.ell, m=self.m, delta_min=self.delta_min,
                                delta_max=self.delta_max, dense=self.dense)

    def load(self):
        if self.dataset is not None:
            return load_dataset(self.dataset)
        kwargs = dict(self.synthetic)
        kwargs.setdefault("seed", self.seed)
        return generate_synthetic(**kwargs)


def _fmt_num(x, digits=2):
    if x is None:
        return "---"
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    if isinstance(x, float) and math.isinf(x):
        return "-inf" if x < 0 else "inf"
    if isinstance(x, int):
        return str(x)
    return f"{x:.{digits}f}"


def _fmt_vector(vector):
    c1, c2, c3 = (float(f"{c:.12g}") for c in vector)
    # c3 is a trajectory count in the usual protocol
    last = str(int(c3)) if c3.is_integer() else repr(c3)
    return f"({c1!r}, {c2!r}, {last})"


@dataclass
class MetricsRow:
    """One line of the results table; ``None`` metric fields mark a timeout."""

    name: str
    seconds: float
    peak_bytes: Optional[int]
    vector: tuple
    clusters: Optional[int] = None
    max_frechet: Optional[float] = None
    avg_frechet: Optional[float] = None
    score: Optional[float] = None
    max_size: Optional[float] = None
    avg_size: Optional[float] = None
    timed_out: bool = False

    def cells(self) -> list[str]:
        gbytes = None if self.peak_bytes is None else self.peak_bytes / 1e9
        vec = _fmt_vector(self.vector)
        if self.timed_out:
            return [self.name, "---", "---", vec] + ["---"] * 6
        return [
            self.name,
            _fmt_num(self.seconds),
            _fmt_num(gbytes),
            vec,
            _fmt_num(self.clusters),
            _fmt_num(self.max_frechet),
            _fmt_num(self.avg_frechet),
            _fmt_num(self.score),
            _fmt_num(self.max_size),
            _fmt_num(self.avg_size),
        ]

    def to_csv(self, header: bool = True, objective: str = "k-means") -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if header:
            cols = list(METRIC_COLUMNS)
            cols[7] = "kMeans" if Objective(objective) is Objective.K_MEANS else "kCenters"
            w.writerow(cols)
        w.writerow(self.cells())
        return buf.getvalue()


class PeakMemory:
    """Samples resident set size in a background thread; reports growth over the baseline.

    Best effort only: short spikes between samples are missed.
    """

    def __init__(self, interval: float = 0.01):
        self.interval = interval
        self._proc = psutil.Process()
        self._stop = threading.Event()
        self.baseline = 0
        self.peak = 0

    def _run(self):
        while not self._stop.is_set():
            self.peak = max(self.peak, self._proc.memory_info().rss)
            self._stop.wait(self.interval)

    def __enter__(self):
        self.baseline = self._proc.memory_info().rss
        self.peak = self.baseline
        self._thread = threading.Thread(target=self._run, daemon=True)
        self._thread.start()
        return self

    def __exit__(self, *exc):
        self._stop.set()
        self._thread.join()
        self.peak = max(self.peak, self._proc.memory_info().rss)

    @property
    def growth(self) -> int:
        return self.peak - self.baseline


def _ref_json(store: TrajectoryStore, ref):
    traj, start = store.origin(ref.a)
    _, end = store.origin(ref.b)
    return {"traj": traj, "start": start, "end": end}


def clustering_to_json(config: ExperimentConfig, store: TrajectoryStore, clustering, breakdown) -> dict:
    """Serialisable form of a clustering; deterministic for a fixed config (no timings)."""
    clusters = []
    for cl in clustering.clusters:
        members = []
        for ref, d in zip(cl.members, cl.member_distances):
            members.append({**_ref_json(store, ref), "frechet": d})
        clusters.append({
            "centre": _ref_json(store, cl.centre),
            "delta": cl.delta,
            "members": members,
            "coverage": cl.coverage,
        })
    return {
        "config": asdict(config),
        "clusters": clusters,
        "score_breakdown": {
            "cluster_term": breakdown.cluster_term,
            "frechet_term": breakdown.frechet_term,
            "uncovered_term": breakdown.uncovered_term,
            "total": breakdown.total,
        },
    }


def _atomic_write(path: Path, text: str):
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def run_experiment(config: ExperimentConfig, out_dir=None, name: str = None):
    """Run one configuration under its time limit.

    Returns
    -------
    (MetricsRow, dict or None)
        The metrics row and the clustering document (``None`` on timeout).
        When ``out_dir`` is given both are also written there, as
        ``<name>.csv``, ``<name>.json`` and a ``<name>.run.json`` record
        holding the wall-clock figures.
    """
    store = concatenate(config.load())
    cc = config.clustering_config()
    name = name or cc.name
    start = time.perf_counter()
    deadline = time.monotonic() + config.time_limit
    doc = None
    with PeakMemory() as mem:
        try:
            clustering, breakdown = run_configuration(cc, store, deadline=deadline)
        except RunTimeout:
            clustering = None
    seconds = time.perf_counter() - start
    if clustering is None:
        row = MetricsRow(name, seconds, None, config.vector, timed_out=True)
    else:
        metrics = clustering_metrics(clustering)
        row = MetricsRow(name, seconds, mem.growth, config.vector, score=breakdown.total, **metrics)
        doc = clustering_to_json(config, store, clustering, breakdown)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        _atomic_write(out / f"{name}.csv", row.to_csv(objective=config.objective))
        if doc is not None:
            _atomic_write(out / f"{name}.json", json.dumps(doc, indent=1, sort_keys=True) + "\n")
        record = {"name": name, "seconds": seconds, "peak_bytes_approx": row.peak_bytes,
                  "timed_out": row.timed_out}
        _atomic_write(out / f"{name}.run.json", json.dumps(record, indent=1) + "\n")
    return row, doc


def scoring_vector_protocol(trajectory_count: int, base_c2: float) -> list[ScoringVector]:
    """``c1 = 1``, ``c3`` = number of trajectories, ``c2`` at 0.1x, 1x and 10x the base."""
    if base_c2 <= 0:
        raise ValueError("base_c2 must be positive")
    return [ScoringVector(1.0, float(f"{base_c2 * f:.12g}"), float(trajectory_count))
            for f in (0.1, 1.0, 10.0)]


@dataclass
class BenchRow:
    name: str
    seconds: float
    peak_bytes: int
    delta: float
    m: int
    ell: int = field(default=-1)


def bench_sc(store: TrajectoryStore, deltas=(50, 100, 200), ms=(10, 20, 40), dense=False):
    """Time single SC(m, max, delta) calls over a grid."""
    rows = []
    for delta in deltas:
        for m in ms:
            t0 = time.perf_counter()
            with PeakMemory() as mem:
                found = sc_max_length(m, delta, store, dense=dense)
            rows.append(BenchRow("SC-m-max", time.perf_counter() - t0, mem.growth, delta, m,
                                 -1 if found is None else found.centre.ell))
    return rows
