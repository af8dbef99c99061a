import math

import numpy as np
import pytest

from subtraj.clustering import (
    Clustering,
    ClusteringConfig,
    Objective,
    ScoringVector,
    clustering_metrics,
    delta_schedule,
    evaluation,
    greedy_k_centre,
    greedy_k_means,
    kcentre_contribution,
    kmeans_contribution,
    member_distances,
    psc_subroutine,
    run_configuration,
    sc_length_subroutine,
    sc_size_subroutine,
    score,
)
from subtraj.frechet import discrete_frechet
from subtraj.sc import Cluster
from subtraj.trajectory import SubtrajectoryRef as R
from subtraj.verify import random_store

from conftest import store_of

KC, KM = Objective.K_CENTRE, Objective.K_MEANS


def cl(centre, members, dists, delta=1.0):
    return Cluster(R(*centre), tuple(R(*m) for m in members), delta, tuple(dists))


def test_scoring_vector_validation():
    with pytest.raises(ValueError):
        ScoringVector(0, 1, 1)
    with pytest.raises(ValueError):
        ScoringVector(1, -1, 1)
    with pytest.raises(ValueError):
        ScoringVector(1, 1, math.inf)
    assert tuple(ScoringVector(1, 2, 3)) == (1, 2, 3)


def test_empty_clustering_costs_c3():
    s = score(Clustering(2840), ScoringVector(1.0, 3e-05, 128), KM)
    assert s.total == 128.0
    assert (s.cluster_term, s.frechet_term) == (0, 0)


def test_full_cover_single_cluster_costs_c1():
    c = Clustering(5)
    c.add(cl((1, 5), [(1, 5)], [0.0]))
    assert score(c, ScoringVector(2.0, 0.0, 7.0), KC).total == 2.0


def test_zero_vertices_undefined():
    with pytest.raises(ValueError):
        score(Clustering(0), ScoringVector(1, 1, 1), KC)


def test_two_cluster_hand_arithmetic():
    c = Clustering(20)
    c.add(cl((1, 3), [(1, 3), (5, 7)], [0.0, 2.0]))
    c.add(cl((10, 11), [(10, 11), (14, 16), (18, 18)], [0.0, 1.5, 3.0]))
    v = ScoringVector(1.0, 0.5, 10.0)
    covered = 3 + 3 + 2 + 3 + 1
    kc = score(c, v, KC)
    assert kc.cluster_term == 2.0
    assert kc.frechet_term == 0.5 * 3.0
    assert kc.uncovered_term == pytest.approx(10.0 * (20 - covered) / 20)
    km = score(c, v, KM)
    assert km.frechet_term == pytest.approx(0.5 * 6.5)
    assert km.total == pytest.approx(2.0 + 3.25 + 4.0)


def test_kcentre_contribution_values():
    v = ScoringVector(1.0, 0.0, 1.0)
    assert kcentre_contribution(cl((1, 1), [], []), v, 10) == 1.0
    assert kcentre_contribution(cl((1, 10), [(1, 10)], [0.0]), v, 10) == 0.0


def test_kmeans_contribution_values():
    assert kmeans_contribution(cl((1, 1), [(1, 1)], [0.0]), ScoringVector(1, 0, 0), 10) == 1.0
    full = cl((1, 10), [(1, 10)], [0.0])
    assert kmeans_contribution(full, ScoringVector(1, 0, 2), 10) == -1.0


def test_contributions_equal_score_differences(rng):
    v = ScoringVector(1.0, 0.3, 12.0)
    for _ in range(50):
        base = Clustering(40)
        base.add(cl((1, 4), [(1, 4), (6, 8)], rng.uniform(0, 3, 2)))
        extra = cl((20, 22), [(20, 22), (25, 30)], rng.uniform(0, 3, 2))
        after = Clustering(40)
        for c in base.clusters + [extra]:
            after.add(c)
        diff = score(after, v, KM).total - score(base, v, KM).total
        assert kmeans_contribution(extra, v, 40) == pytest.approx(diff)
        # at a fixed radius the k-centre cost changes by exactly the contribution
        kc_diff = (score(after, v, KC).uncovered_term + score(after, v, KC).cluster_term
                   - score(base, v, KC).uncovered_term - score(base, v, KC).cluster_term)
        assert kcentre_contribution(extra, v, 40) == pytest.approx(kc_diff)


def test_evaluation_values():
    v = ScoringVector(2.0, 0.0, 6.0)
    assert evaluation(None, v, 10) == 0.0
    assert evaluation(cl((1, 1), [], []), v, 10) == 0.0
    small = cl((1, 2), [(1, 2)], [0.0])
    big = cl((1, 2), [(1, 2), (4, 6)], [0.0, 0.0])
    assert evaluation(small, v, 10) == pytest.approx(6 * 2 / (10 * 2))
    assert evaluation(big, v, 10) > evaluation(small, v, 10)
    w = ScoringVector(1.0, 1.0, 6.0)
    near = cl((1, 2), [(1, 2), (4, 5)], [0.0, 0.5])
    far = cl((1, 2), [(1, 2), (4, 5)], [0.0, 2.0])
    assert evaluation(near, w, 10) > evaluation(far, w, 10)


def test_member_distances_computed_on_demand():
    s = store_of([(0, 0), (1, 0), (0, 3), (1, 3)])
    c = Cluster(R(1, 2), (R(1, 2), R(3, 4)), 3.0)
    assert member_distances(c, s) == (0.0, 3.0)


def scripted(candidates):
    """Subroutine replaying fixed answers, ignoring its input."""
    it = iter(candidates)

    def run(delta, store, **_):
        return next(it, None)

    return run


def test_k_centre_none_subroutine_is_empty():
    s = store_of([(0, 0)] * 10)
    c = greedy_k_centre(ScoringVector(1, 1, 5), 1.0, s, scripted([]))
    assert len(c) == 0
    assert score(c, ScoringVector(1, 1, 5), KC).total == 5


def test_k_centre_hand_trace():
    # 10 vertices, c1=1, c2=0.1, c3=10, delta=2: cost starts at 10
    s = store_of([(float(i), 0.0) for i in range(10)])
    v = ScoringVector(1.0, 0.1, 10.0)
    first = Cluster(R(1, 2), (R(1, 2), R(5, 8)), 2.0)   # covers 6: 1 + 0.2 + 4 = 5.2
    # the residual holds vertices 3, 4, 9, 10, renumbered 1..4
    second = Cluster(R(1, 1), (R(1, 1),), 2.0)         # covers 1: 2 + 0.2 + 3 = 5.2, not lower
    c = greedy_k_centre(v, 2.0, s, scripted([first, second]))
    assert len(c) == 1
    assert c.score_trace == pytest.approx([10.0, 5.2])
    assert c.clusters[0].members == (R(1, 2), R(5, 8))


def test_k_centre_maps_residual_clusters_to_original():
    s = store_of([(float(i), 0.0) for i in range(10)])
    v = ScoringVector(1.0, 0.0, 10.0)
    first = Cluster(R(4, 6), (R(4, 6),), 1.0)
    second = Cluster(R(1, 3), (R(1, 3), R(4, 7)), 1.0)  # on the 7-vertex residual
    c = greedy_k_centre(v, 1.0, s, scripted([first, second]))
    assert [m for x in c.clusters for m in x.members] == [R(4, 6), R(1, 3), R(7, 10)]
    assert c.is_disjoint()


def test_k_centre_acceptance_is_contribution_sign(rng):
    # at a fixed level, accepting on cost equals accepting on contribution < 0
    s = random_store(rng, [12, 10, 8])
    for c3 in (2.0, 5.0, 30.0):
        v = ScoringVector(1.0, 0.2, c3)
        run = greedy_k_centre(v, 2.0, s, sc_length_subroutine(2))
        for cluster in run.clusters:
            assert kcentre_contribution(cluster, v, s.n) < 0


def test_k_means_single_delta_single_candidate():
    s = store_of([(float(i), 0.0) for i in range(10)])
    v = ScoringVector(1.0, 0.0, 10.0)
    cand = Cluster(R(1, 5), (R(1, 5),), 1.0, (0.0,))
    c = greedy_k_means(v, s, scripted([cand]), [1.0])
    assert len(c) == 1
    assert c.score_trace == pytest.approx([10.0, 6.0])


def test_k_means_break_even_rejected():
    s = store_of([(float(i), 0.0) for i in range(10)])
    v = ScoringVector(1.0, 0.0, 1.0)
    cand = Cluster(R(1, 10), (R(1, 10),), 1.0, (0.0,))  # 1 - 1 = 0, no strict gain
    assert len(greedy_k_means(v, s, scripted([cand]), [1.0])) == 0


def test_k_means_hand_trace_over_grid():
    s = store_of([(float(i), 0.0) for i in range(10)])
    v = ScoringVector(1.0, 0.1, 10.0)
    # round 1 sees a then b; b has the better evaluation
    a = Cluster(R(1, 2), (R(1, 2),), 1.0, (0.0,))           # 2 / 1 = 2
    b = Cluster(R(1, 3), (R(1, 3), R(6, 8)), 2.0, (0.0, 1.0))  # 6 / 1.1
    # round 2 on the 4-vertex residual: one weak candidate, then nothing
    c = Cluster(R(1, 1), (R(1, 1),), 1.0, (0.0,))           # +1 - 1 = 0, rejected
    run = greedy_k_means(v, s, scripted([a, b, c, None]), [1.0, 2.0])
    assert [x.members for x in run.clusters] == [(R(1, 3), R(6, 8))]
    assert run.score_trace == pytest.approx([10.0, 10.0 + 1 + 0.1 - 6.0])


def test_delta_schedule():
    assert delta_schedule(2, 20) == [2, 4, 8, 16]
    assert delta_schedule(2, 16) == [2, 4, 8, 16]
    assert delta_schedule(5, 1) == [5]
    with pytest.raises(ValueError):
        delta_schedule(0, 10)


def test_config_validation():
    v = ScoringVector(1, 1, 1)
    with pytest.raises(ValueError):
        ClusteringConfig("SC-l", KM, v)
    with pytest.raises(ValueError):
        ClusteringConfig("SC-m", KM, v, m=2, ell=3)
    with pytest.raises(ValueError):
        ClusteringConfig("XYZ", KM, v)
    assert ClusteringConfig("SC-l", "k-centre", v, ell=4).name == "SC-l-4"


def test_single_level_schedule_equals_one_run(rng):
    s = random_store(rng, [12, 9])
    v = ScoringVector(1.0, 0.1, 9.0)
    cfg = ClusteringConfig("SC-m", KC, v, m=2, delta_min=4.0, delta_max=4.0)
    best, _ = run_configuration(cfg, s)
    direct = greedy_k_centre(v, 4.0, s, sc_size_subroutine(2))
    assert best.clusters == direct.clusters


def test_best_of_levels_picks_lower_cost():
    # two far-apart copies of one trajectory: only the big level pairs them
    t = [(0, 0), (1, 0), (2, 0), (3, 0)]
    s = store_of(t, [(x, y + 50) for x, y in t])
    v = ScoringVector(1.0, 0.001, 10.0)
    cfg = ClusteringConfig("SC-m", KC, v, m=2, delta_min=2.0, delta_max=64.0)
    best, breakdown = run_configuration(cfg, s)
    costs = {}
    for d in delta_schedule(2.0, 64.0):
        run = greedy_k_centre(v, d, s, sc_size_subroutine(2))
        costs[d] = score(run, v, KC).total
    assert breakdown.total == min(costs.values())


def soundness(run, store, vector):
    assert run.is_disjoint()
    assert all(a > b for a, b in zip(run.score_trace, run.score_trace[1:]))
    assert run.total_vertices - run.covered_count == run.uncovered_from_scratch()
    for c in run.clusters:
        P = store.coords(c.centre)
        for m, d in zip(c.members, c.member_distances):
            assert d == discrete_frechet(P, store.coords(m))
            assert d <= c.delta


@pytest.mark.parametrize("algo,kw", [("SC-l", {"ell": 2}), ("SC-m", {"m": 2}), ("PSC", {})])
@pytest.mark.parametrize("objective", [KC, KM])
def test_greedy_soundness_on_random_runs(rng, algo, kw, objective):
    for _ in range(4):
        s = random_store(rng, [14, 11, 9], coord_max=10)
        v = ScoringVector(1.0, 0.05, float(rng.choice([3.0, 10.0, 40.0])))
        cfg = ClusteringConfig(algo, objective, v, delta_min=1.0, **kw)
        best, breakdown = run_configuration(cfg, s)
        soundness(best, s, v)
        assert breakdown == score(best, v, objective)


def test_metrics_empty_and_filled():
    m = clustering_metrics(Clustering(10))
    assert m["clusters"] == 0 and m["max_frechet"] == -math.inf and math.isnan(m["avg_frechet"])
    c = Clustering(10)
    c.add(cl((1, 2), [(1, 2), (4, 5)], [0.0, 2.0]))
    c.add(cl((7, 7), [(7, 7)], [0.0]))
    m = clustering_metrics(c)
    assert (m["clusters"], m["max_frechet"], m["max_size"]) == (2, 2.0, 2)
    assert m["avg_frechet"] == pytest.approx(2 / 3)
    assert m["avg_size"] == 1.5
