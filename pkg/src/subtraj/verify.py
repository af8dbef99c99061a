"""Randomised differential checks of the sweeps and solvers against the oracles."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .freespace import NEG_INF, ColState, RowWindow, col_step_second, window_step_second
from .frechet import frechet_leq
from .oracle import ExplicitMatrix, brute_max_cardinality, brute_pareto_front, brute_reach
from .psc import psc_stream
from .sc import _fixed_windows, sc_max_cardinality, sc_max_length
from .trajectory import SubtrajectoryRef, Trajectory, concatenate

__all__ = [
    "CheckResult",
    "random_store",
    "check_frechet_reachability",
    "check_labels",
    "check_sc_optimality",
    "check_psc_two_approx",
    "run_all",
]

DELTAS = (0.0, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0)


@dataclass
class CheckResult:
    name: str
    passed: bool
    instances: int
    seconds: float
    detail: str = ""

    def summary(self) -> str:
        extra = f" ({self.detail})" if self.detail else ""
        return f"{self.instances} instances in {self.seconds:.1f}s{extra}"

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: {self.summary()}"


def random_store(rng, lengths, coord_max=8):
    """Store of integer-coordinate trajectories with the given vertex counts."""
    return concatenate([Trajectory(rng.integers(0, coord_max + 1, size=(k, 2))) for k in lengths])


def _split(rng, n, max_pieces=3):
    pieces = int(rng.integers(1, max_pieces + 1))
    if pieces == 1 or n < pieces:
        return [n]
    cuts = np.sort(rng.choice(np.arange(1, n), size=pieces - 1, replace=False))
    return list(np.diff(np.concatenate([[0], cuts, [n]])))


def _intervals(store):
    for lo, hi in store.segments():
        for c in range(lo, hi + 1):
            for d in range(c, hi + 1):
                yield c, d


def check_frechet_reachability(instances=1000, seed=0) -> CheckResult:
    """``frechet_leq`` on every pair of subtrajectories agrees with path existence."""
    rng = np.random.default_rng(seed)
    t0 = time.perf_counter()
    failures = []
    for k in range(instances):
        lengths = [int(x) for x in rng.integers(1, 13, size=int(rng.integers(1, 3)))]
        store = random_store(rng, lengths)
        delta = float(rng.choice(DELTAS))
        M = ExplicitMatrix(store, delta)
        ivs = list(_intervals(store))
        for a, b in ivs:
            P = store.xy[a - 1 : b]
            for c, d in ivs:
                fast = frechet_leq(P, store.xy[c - 1 : d], delta)
                if fast != M.has_path((b, d), (a, c)):
                    failures.append((k, (a, b), (c, d)))
        # intervals that cross a boundary edge must never be connected
        for lo, hi in store.segments()[1:]:
            if M.has_path((hi, hi), (lo - 1, lo - 1)):
                failures.append((k, "boundary", lo))
    return CheckResult("frechet/reachability equivalence", not failures, instances,
                       time.perf_counter() - t0, f"{len(failures)} mismatches" if failures else "")


def check_labels(instances=200, n=30, seed=0) -> CheckResult:
    """Window reach labels and ``col_a`` labels equal the explicit-graph closure at every step."""
    rng = np.random.default_rng(seed)
    t0 = time.perf_counter()
    failures = []
    for k in range(instances):
        store = random_store(rng, _split(rng, n))
        delta = float(rng.choice(DELTAS[1:]))
        dense = bool(k % 2)
        M = ExplicitMatrix(store, delta)
        reach = {}

        def oracle(cell):
            if cell not in reach:
                reach[cell] = brute_reach(M, cell)
            return reach[cell]

        def check_rows(window, exact):
            a = window.a
            for i in range(a, window.b + 1):
                row = window.row(i)
                free = [j for j in range(1, n + 1) if M.free[i][j]]
                if [j for j, _ in row] != free:
                    failures.append((k, "cells", i))
                for j, label in row:
                    true = oracle((i, j))[0]
                    # after the top row is dropped a label may be stale, but it is
                    # never below the true minimum and agrees on the test "<= a"
                    ok = label == true if exact else (label >= true and max(label, a) == max(true, a))
                    if not ok:
                        failures.append((k, "reach", i, j, label, true))

        # a window that only grows from a piece start holds exact labels
        window = RowWindow(store, delta, dense=dense)
        for lo, hi in store.segments():
            window.reset(lo)
            for i in range(lo, hi + 1):
                window_step_second(window, store, i)
                check_rows(window, exact=True)
        ell = int(rng.integers(0, 7))
        for _ in _fixed_windows(store, ell, delta, None, dense, lambda w: check_rows(w, exact=False)):
            pass
        for lo, hi in store.segments():
            for a in range(lo, hi + 1):
                state = ColState(store, delta, a, dense=dense)
                for c in range(a, hi + 1):
                    col_step_second(state, store, c)
                    labels = state.labels()
                    for y in range(1, n + 1):
                        expect = oracle((c, y))[1].get(a, NEG_INF) if M.free[c][y] else NEG_INF
                        if labels[y - 1] != expect:
                            failures.append((k, "col", a, c, y, labels[y - 1], expect))
    return CheckResult("window and col_a labels", not failures, instances,
                       time.perf_counter() - t0, f"{len(failures)} mismatches" if failures else "")


def _all_cardinalities(store, delta):
    out = {}
    for lo, hi in store.segments():
        for a in range(lo, hi + 1):
            for b in range(a, hi + 1):
                out[(a, b)] = brute_max_cardinality(SubtrajectoryRef(a, b), delta, store)[0]
    return out


def check_sc_optimality(instances=200, deltas_per_instance=3, seed=0) -> CheckResult:
    """SC(max, l) cardinality and SC(m, max) length equal exhaustive maxima."""
    rng = np.random.default_rng(seed)
    t0 = time.perf_counter()
    failures = []
    for k in range(instances):
        n = int(rng.integers(5, 31))
        store = random_store(rng, _split(rng, n))
        for delta in rng.choice(DELTAS, size=deltas_per_instance, replace=False):
            delta = float(delta)
            card = _all_cardinalities(store, delta)
            ell = int(rng.integers(0, 5))
            m = int(rng.integers(1, 5))
            expect_card = max((v for (a, b), v in card.items() if b - a == ell), default=None)
            got = sc_max_cardinality(ell, delta, store)
            if (None if got is None else got.cardinality) != expect_card:
                failures.append((k, delta, "max-card", ell, got, expect_card))
            expect_ell = max((b - a for (a, b), v in card.items() if v >= m), default=None)
            got = sc_max_length(m, delta, store)
            if (None if got is None else got.centre.ell) != expect_ell:
                failures.append((k, delta, "max-len", m, got, expect_ell))
            elif got is not None and got.cardinality != m:
                failures.append((k, delta, "max-len-card", m, got))
    return CheckResult("SC optimality", not failures, instances,
                       time.perf_counter() - t0, f"{len(failures)} mismatches" if failures else "")


def check_psc_two_approx(instances=100, seed=0) -> CheckResult:
    """Every exhaustive Delta-cluster is dominated by a streamed one within a factor 2 in length."""
    rng = np.random.default_rng(seed)
    t0 = time.perf_counter()
    failures = []
    for k in range(instances):
        n = int(rng.integers(2, 26))
        store = random_store(rng, _split(rng, n))
        delta = float(rng.choice(DELTAS))
        # best streamed cardinality per centre vertex count
        best = np.zeros(n + 2, dtype=np.int64)

        def consume(cl):
            v = len(cl.centre)
            best[v] = max(best[v], cl.cardinality)

        psc_stream(delta, store, consume, dense=bool(k % 2))
        at_least = np.maximum.accumulate(best[::-1])[::-1]  # best over lengths >= v
        orc = brute_pareto_front(delta, store)
        for (a, b), m, _ in orc.clusters:
            need = -(-(b - a + 1) // 2)
            if at_least[need] < m:
                failures.append((k, (a, b), m))
    return CheckResult("PSC 2-approximate Pareto front", not failures, instances,
                       time.perf_counter() - t0, f"{len(failures)} uncovered clusters" if failures else "")


def run_all(scale: float = 1.0, seed: int = 0) -> list[CheckResult]:
    def count(full):
        return max(1, int(full * scale))

    return [
        check_frechet_reachability(count(1000), seed),
        check_labels(count(200), seed=seed),
        check_sc_optimality(count(200), seed=seed),
        check_psc_two_approx(count(100), seed),
    ]
