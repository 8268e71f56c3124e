from __future__ import annotations

import math

import numpy as np
import pytest

from netlab import (
    Graph,
    InputError,
    PprParams,
    StopParams,
    approximate_ppr,
    brute_force_best_partition,
    conductance,
    entropy_ratio,
    exact_ppr,
    find_community,
    greedy_entropy_partition,
    greedy_modularity_partition,
    modularity,
    ppr_detect_all,
    stop_beta_for_exponent,
    sweep,
)
from netlab.detection import exact_ppr_vector
from conftest import random_connected_graph


def _exact_dense(g, v, kappa):
    chi = np.zeros(g.n)
    chi[v] = 1.0
    return exact_ppr_vector(g, chi, kappa)


class TestExactPpr:
    def test_kappa_one_is_indicator(self, k4):
        p = exact_ppr(k4, 2, kappa=1.0)
        assert p == {2: pytest.approx(1.0)}

    def test_single_edge_solution(self):
        g = Graph(2, [(0, 1)])
        p = exact_ppr(g, 0, kappa=0.2)
        assert p[0] == pytest.approx(0.6)
        assert p[1] == pytest.approx(0.4)

    def test_small_kappa_regular_graph_near_uniform(self):
        g = Graph(6, [(i, (i + 1) % 6) for i in range(6)])
        p = exact_ppr(g, 0, kappa=1e-5)
        for v in range(6):
            assert p[v] == pytest.approx(1 / 6, abs=1e-4)

    def test_entries_sum_to_one(self):
        for seed in range(5):
            g = random_connected_graph(20, 0.15, seed)
            p = exact_ppr(g, seed % g.n, kappa=0.15)
            assert sum(p.values()) == pytest.approx(1.0, abs=1e-9)

    def test_isolated_start_rejected(self):
        g = Graph(3, [(0, 1)])
        with pytest.raises(InputError):
            exact_ppr(g, 2, kappa=0.5)


class TestApproximatePpr:
    def test_unpushable_start_returns_indicator_residual(self, k4):
        # eps strictly above 1/deg(v): the initial residual is below the
        # push threshold, so nothing moves
        p, r = approximate_ppr(k4, 0, PprParams(kappa=0.2, epsilon=0.5))
        assert p == {}
        assert r == {0: pytest.approx(1.0)}

    def test_kappa_one_concentrates_on_start(self, k4):
        p, r = approximate_ppr(k4, 1, PprParams(kappa=1.0, epsilon=1e-6))
        assert p[1] == pytest.approx(1.0)
        assert not r

    def test_single_edge_matches_exact(self):
        g = Graph(2, [(0, 1)])
        p, _ = approximate_ppr(g, 0, PprParams(kappa=0.2, epsilon=1e-8))
        assert p[0] == pytest.approx(0.6, abs=1e-6)
        assert p[1] == pytest.approx(0.4, abs=1e-6)

    def test_residual_bound_and_error_bound(self):
        for seed in range(8):
            g = random_connected_graph(30, 0.12, seed)
            params = PprParams(kappa=0.15, epsilon=1e-4)
            v = seed % g.n
            p, r = approximate_ppr(g, v, params)
            for u in range(g.n):
                assert r.get(u, 0.0) < params.epsilon * max(g.degree[u], 1)
            exact = _exact_dense(g, v, params.kappa)
            for u in range(g.n):
                err = abs(p.get(u, 0.0) - exact[u])
                assert err <= params.epsilon * g.degree[u] + 1e-12

    def test_mass_conservation(self):
        for seed in range(5):
            g = random_connected_graph(25, 0.15, seed)
            p, r = approximate_ppr(g, 0, PprParams(kappa=0.3, epsilon=1e-5))
            total = sum(p.values()) + sum(r.values())
            assert total == pytest.approx(1.0, abs=1e-9)

    def test_push_exactness_identity(self):
        # p + pr(r) must reconstruct pr(chi_v) exactly
        for seed in range(5):
            g = random_connected_graph(20, 0.2, seed)
            kappa = 0.2
            p, r = approximate_ppr(g, 1, PprParams(kappa=kappa, epsilon=1e-3))
            r_dense = np.zeros(g.n)
            for u, val in r.items():
                r_dense[u] = val
            reconstructed = np.zeros(g.n)
            for u, val in p.items():
                reconstructed[u] = val
            reconstructed += exact_ppr_vector(g, r_dense, kappa)
            expect = _exact_dense(g, 1, kappa)
            assert np.allclose(reconstructed, expect, atol=1e-12)

    def test_support_reachable_from_start(self, two_triangles):
        p, r = approximate_ppr(two_triangles, 0, PprParams(kappa=0.1, epsilon=1e-8))
        assert set(p) <= {0, 1, 2}
        assert set(r) <= {0, 1, 2}


class TestSweep:
    def test_single_support(self, two_triangle_bridge):
        g = two_triangle_bridge
        res = sweep(g, {2: 1.0})
        assert len(res) == 1
        # node 2 has degree 3; all 3 edges leave the prefix
        assert res.conductance[0] == pytest.approx(3 / 3)

    def test_star_hub_only(self):
        g = Graph(5, [(0, i) for i in range(1, 5)])
        res = sweep(g, {0: 1.0})
        assert res.conductance[0] == pytest.approx(1.0)

    def test_two_triangle_order_contains_1_7(self, two_triangle_bridge):
        # force the sweep order 0,1,2,3,4,5 via p proportional to degree*rank
        g = two_triangle_bridge
        p = {v: (6 - v) * g.degree[v] for v in range(6)}
        res = sweep(g, p)
        assert res.order.tolist() == [0, 1, 2, 3, 4, 5]
        assert res.conductance[2] == pytest.approx(1 / 7)

    def test_ties_broken_by_node_id(self, two_triangles):
        res = sweep(two_triangles, {v: 1.0 for v in range(6)})
        assert res.order.tolist() == [0, 1, 2, 3, 4, 5]

    def test_matches_naive_recomputation(self):
        for seed in range(6):
            g = random_connected_graph(24, 0.15, seed)
            rng = np.random.default_rng(seed)
            support = rng.choice(g.n, size=12, replace=False)
            p = {int(v): float(rng.random() + 0.01) ** 2 for v in support}
            res = sweep(g, p)
            for i, prefix, phi in res.items():
                vol = int(g.degree[prefix].sum())
                if min(vol, 2 * g.m - vol) == 0:
                    assert math.isinf(phi)
                else:
                    assert phi == pytest.approx(conductance(g, prefix))

    def test_empty_support_rejected(self, k4):
        with pytest.raises(InputError):
            sweep(k4, {})


class TestFindCommunity:
    def test_disjoint_triangle_found_whole_component(self, two_triangles):
        comm = find_community(two_triangles, 0, PprParams(0.15, 1e-6),
                              StopParams(alpha=1.0, beta=0.2))
        assert comm is not None
        assert comm.tolist() == [0, 1, 2]

    def test_k5_returns_first_qualifying_prefix(self, k5):
        # prefixes of K5 have conductance 1, 0.75, 0.75, 1; the threshold
        # alpha/i^0.2 admits i=3 and the rise 0.75 < 1 accepts it
        comm = find_community(k5, 0, PprParams(0.15, 1e-6), StopParams(1.0, 0.2))
        assert comm is not None
        assert len(comm) == 3

    def test_huge_eps_returns_none(self, k5):
        comm = find_community(k5, 0, PprParams(0.15, 2.0), StopParams(1.0, 0.2))
        assert comm is None

    def test_output_satisfies_threshold(self):
        for seed in range(5):
            g = random_connected_graph(40, 0.08, seed)
            comm = find_community(g, 0, PprParams(0.15, 1e-5), StopParams(1.0, 0.2))
            if comm is None:
                continue
            phi = conductance(g, comm)
            assert phi <= 1.0 / len(comm) ** 0.2 + 1e-12

    def test_beta_for_exponent(self):
        assert stop_beta_for_exponent(1.2) == pytest.approx(0.2 / 8.8)


class TestDetectAll:
    def test_edgeless_graph_empty(self):
        g = Graph(5, [])
        assert ppr_detect_all(g) == []

    def test_two_triangles_both_found(self, two_triangles):
        comms = ppr_detect_all(two_triangles, PprParams(0.15, 1e-6), StopParams(1.0, 0.2))
        assert sorted(c.tolist() for c in comms) == [[0, 1, 2], [3, 4, 5]]

    def test_k5_rejected_by_size_rule(self, k5):
        # the 3-node prefix is found but fails the n/2 size rule on n=5
        comms = ppr_detect_all(k5, PprParams(0.15, 1e-6), StopParams(1.0, 0.2))
        assert comms == []

    def test_deterministic(self):
        g = random_connected_graph(60, 0.05, seed=3)
        a = ppr_detect_all(g, PprParams(0.15, 1e-4), StopParams(1.0, 0.2))
        b = ppr_detect_all(g, PprParams(0.15, 1e-4), StopParams(1.0, 0.2))
        assert [c.tolist() for c in a] == [c.tolist() for c in b]


@pytest.fixture
def parallel_pairs() -> Graph:
    """0=1 and 2=3 joined by doubled edges, single bridge 1-2 (m=5)."""
    return Graph(4, [(0, 1), (0, 1), (2, 3), (2, 3), (1, 2)])


class TestMultigraphPaths:
    def test_sweep_counts_multiplicity(self, parallel_pairs):
        g = parallel_pairs
        res = sweep(g, {0: 0.4, 1: 0.3, 2: 0.2, 3: 0.1})
        assert res.order.tolist() == [0, 1, 2, 3]
        assert res.conductance[0] == pytest.approx(1.0)   # cut 3 / vol 3
        assert res.conductance[1] == pytest.approx(0.2)   # cut 1 / vol 5
        for i in range(1, len(res)):
            assert res.conductance[i - 1] == pytest.approx(conductance(g, res.prefix(i)))

    def test_ppr_respects_edge_multiplicity(self, parallel_pairs):
        g = parallel_pairs
        exact = exact_ppr(g, 0, 0.2)
        apx, _ = approximate_ppr(g, 0, PprParams(kappa=0.2, epsilon=1e-9))
        for v in range(4):
            assert apx.get(v, 0.0) == pytest.approx(exact.get(v, 0.0), abs=1e-6)

    def test_find_community_on_parallel_pairs(self, parallel_pairs):
        comm = find_community(parallel_pairs, 0, PprParams(0.15, 1e-8), StopParams(1.0, 0.2))
        assert comm is not None
        assert comm.tolist() == [0, 1]

    def test_greedy_handles_parallel_edges(self):
        from netlab import HomophylyParams, gen_homophyly

        cg = gen_homophyly(HomophylyParams(n=300, a=1.2, d=3, rng_seed=5))
        g = cg.graph
        pm = greedy_modularity_partition(g)
        pe = greedy_entropy_partition(g)
        assert modularity(g, pm) > 0.5
        assert entropy_ratio(g, pe) > 0.3
        pm2 = greedy_modularity_partition(g)
        assert [s.tolist() for s in pm.sets()] == [s.tolist() for s in pm2.sets()]


@pytest.fixture(scope="module")
def net():
    from netlab import HomophylyParams, gen_homophyly

    return gen_homophyly(HomophylyParams(n=10000, a=1.2, d=5, rng_seed=1))


@pytest.mark.slow
class TestHomophylyDetection:
    def test_ppr_cover_theta(self, net):
        from netlab import conductance_ratio

        g = net.graph
        a = net.params["a"]
        comms = ppr_detect_all(g, PprParams(0.15, 1e-4),
                               StopParams(1.0, stop_beta_for_exponent(a)))
        theta = conductance_ratio(g, comms)
        # the size rule caps coverage: roughly a fifth of the nodes live in
        # color classes below the ceil(ln n) floor and stay uncovered
        assert theta >= 0.6
        assert len(comms) >= 300

    def test_entropy_greedy_recovers_structure(self, net):
        g = net.graph
        part = greedy_entropy_partition(g)
        assert entropy_ratio(g, part) >= 0.5


class TestGreedyModularity:
    def test_two_disjoint_triangles_exact(self, two_triangles):
        part = greedy_modularity_partition(two_triangles)
        assert modularity(two_triangles, part) == pytest.approx(0.5)
        assert sorted(tuple(s.tolist()) for s in part.sets()) == \
            [(0, 1, 2), (3, 4, 5)]

    def test_single_edge_merges_to_one_module(self):
        g = Graph(2, [(0, 1)])
        part = greedy_modularity_partition(g)
        assert part.module_count == 1
        assert modularity(g, part) == pytest.approx(0.0)

    def test_bridge_graph_at_least_split_value(self, two_triangle_bridge):
        part = greedy_modularity_partition(two_triangle_bridge)
        assert modularity(two_triangle_bridge, part) >= 5 / 14 - 1e-12

    def test_never_beats_brute_force(self):
        for seed in range(12):
            g = random_connected_graph(7, 0.25, seed)
            part = greedy_modularity_partition(g)
            _, best = brute_force_best_partition(g, "modularity")
            assert modularity(g, part) <= best + 1e-12

    def test_isolated_nodes_stay_singletons(self):
        g = Graph(5, [(0, 1), (1, 2)])
        part = greedy_modularity_partition(g)
        sets = [tuple(s.tolist()) for s in part.sets()]
        assert (3,) in sets and (4,) in sets


class TestGreedyEntropy:
    def test_two_disjoint_triangles_recovered(self, two_triangles):
        part = greedy_entropy_partition(two_triangles)
        assert sorted(tuple(s.tolist()) for s in part.sets()) == \
            [(0, 1, 2), (3, 4, 5)]

    def test_objective_nonnegative(self):
        for seed in range(8):
            g = random_connected_graph(12, 0.2, seed)
            part = greedy_entropy_partition(g)
            assert entropy_ratio(g, part) >= -1e-12

    def test_never_beats_brute_force(self):
        for seed in range(10):
            g = random_connected_graph(6, 0.3, seed)
            part = greedy_entropy_partition(g)
            _, best = brute_force_best_partition(g, "entropy_ratio")
            assert entropy_ratio(g, part) <= best + 1e-12

    def test_incremental_gain_matches_scratch_score(self):
        # the engine's internal bookkeeping must agree with recomputation
        for seed in range(6):
            g = random_connected_graph(15, 0.25, seed)
            for detect, score in (
                (greedy_modularity_partition, modularity),
                (greedy_entropy_partition, entropy_ratio),
            ):
                part = detect(g)
                # merging any two modules must not improve the objective
                base = score(g, part)
                sets = part.sets()
                for i in range(len(sets)):
                    for j in range(i + 1, len(sets)):
                        merged = [s for k, s in enumerate(sets) if k not in (i, j)]
                        merged.append(np.concatenate([sets[i], sets[j]]))
                        from netlab import Partition

                        assert score(g, Partition.from_sets(g, merged)) <= base + 1e-9
