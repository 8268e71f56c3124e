from __future__ import annotations

import math

import numpy as np
import pytest

from netlab import (
    ColoredGraph,
    Graph,
    HomophylyParams,
    InputError,
    InsufficientDataError,
    community_width,
    degree_profile,
    fit_powerlaw_exponent,
    gen_homophyly,
    homochromatic_sets,
    king_amplifier,
    node_width,
    powerlaw_consistency,
    verify_structure,
)
from netlab.structure import all_node_widths, sample_powerlaw


@pytest.fixture(scope="module")
def homophyly_net() -> ColoredGraph:
    return gen_homophyly(HomophylyParams(n=10000, a=1.2, d=5, rng_seed=2))


@pytest.fixture(scope="module")
def homophyly_large() -> ColoredGraph:
    # large enough that dozens of color classes clear the 50-member bar
    return gen_homophyly(HomophylyParams(n=50000, a=1.2, d=5, rng_seed=1))


def crafted_colored() -> ColoredGraph:
    """Two color classes: {0,1,2,3} (seed 0) and {4,5} (seed 4).

    Nodes 1 and 2 touch the foreign class; node 2's foreign neighbor is the
    seed 4, node 1's is the non-seed 5.
    """
    g = Graph(6, [(0, 1), (0, 2), (0, 3), (1, 2), (4, 5), (2, 4), (1, 5)])
    return ColoredGraph(
        graph=g,
        color=np.array([0, 0, 0, 0, 1, 1]),
        is_seed=np.array([True, False, False, False, True, False]),
        creation_time=np.arange(1, 7),
    )


class TestPowerlawFit:
    def test_synthetic_cubic_law(self):
        sample = sample_powerlaw(3.0, x_min=5, size=100_000, rng_seed=1)
        alpha = fit_powerlaw_exponent(sample, x_min=5)
        assert 2.9 <= alpha <= 3.1

    def test_constant_sample_flagged(self):
        with pytest.raises(InsufficientDataError):
            fit_powerlaw_exponent(np.full(200, 7), x_min=5)

    def test_too_few_samples(self):
        with pytest.raises(InsufficientDataError):
            fit_powerlaw_exponent(np.arange(30) + 5, x_min=5)

    def test_homophyly_degrees_in_range(self, homophyly_net):
        alpha = fit_powerlaw_exponent(homophyly_net.graph.degree, x_min=5)
        assert 2.5 <= alpha <= 3.5


class TestDegreeProfile:
    def test_all_own_color(self):
        cg = crafted_colored()
        prof = degree_profile(cg, 3)
        assert prof.length == 1
        assert prof.jth_degree(1) == prof.total_degree == 1

    def test_split_profile(self):
        # node with 3 edges to color 0 and 2 edges to color 1
        g = Graph(6, [(0, 1), (0, 2), (0, 3), (0, 4), (0, 4)])
        cg = ColoredGraph(
            graph=g,
            color=np.array([0, 0, 0, 0, 1, 1]),
            is_seed=np.array([True, False, False, False, True, False]),
            creation_time=np.arange(1, 7),
        )
        prof = degree_profile(cg, 0)
        assert prof.color_counts.tolist() == [3, 2]
        assert prof.length == 2
        assert prof.jth_degree(2) == 2
        assert prof.jth_degree(3) == 0

    def test_counts_sum_to_degree(self, homophyly_net):
        g = homophyly_net.graph
        for v in (0, 1, 17, 256, g.n - 1):
            prof = degree_profile(homophyly_net, v)
            assert int(prof.color_counts.sum()) == int(g.degree[v])

    def test_nonseed_first_degree_is_own_color(self, homophyly_net):
        rng = np.random.default_rng(0)
        nonseeds = np.flatnonzero(~homophyly_net.is_seed)
        for v in rng.choice(nonseeds, size=50, replace=False):
            prof = degree_profile(homophyly_net, int(v))
            assert prof.colors[0] == homophyly_net.color[v]


class TestWidths:
    def test_community_width_crafted(self):
        cg = crafted_colored()
        assert community_width(cg, np.array([0, 1, 2, 3])) == 2

    def test_isolated_color_zero_width(self):
        g = Graph(4, [(0, 1), (2, 3)])
        cg = ColoredGraph(
            graph=g,
            color=np.array([0, 0, 1, 1]),
            is_seed=np.array([True, False, True, False]),
            creation_time=np.arange(1, 5),
        )
        assert community_width(cg, np.array([0, 1])) == 0

    def test_non_homochromatic_rejected(self):
        cg = crafted_colored()
        with pytest.raises(InputError):
            community_width(cg, np.array([0, 4]))

    def test_node_width_crafted(self):
        cg = crafted_colored()
        assert node_width(cg, 1) == 1  # touches non-seed 5 of the other class
        assert node_width(cg, 2) == 0  # its foreign neighbor is a seed
        assert node_width(cg, 3) == 0

    def test_all_node_widths_matches_scalar(self, homophyly_net):
        widths = all_node_widths(homophyly_net)
        rng = np.random.default_rng(1)
        for v in rng.choice(homophyly_net.graph.n, size=60, replace=False):
            assert widths[v] == node_width(homophyly_net, int(v))

    def test_nonseed_width_exactly_zero(self, homophyly_net):
        widths = all_node_widths(homophyly_net)
        assert int(widths[~homophyly_net.is_seed].max()) == 0

    def test_seed_width_at_most_d(self, homophyly_net):
        widths = all_node_widths(homophyly_net)
        assert int(widths[homophyly_net.is_seed].max()) <= 5


class TestKingAmplifier:
    def test_singleton_undefined(self):
        g = Graph(3, [(0, 1), (0, 2)])
        cg = ColoredGraph(
            graph=g,
            color=np.array([0, 0, 1]),
            is_seed=np.array([True, False, True]),
            creation_time=np.arange(1, 4),
        )
        assert king_amplifier(cg, np.array([2])) is None

    def test_crafted_ratio(self):
        # seed 0 with degree 10, best non-seed degree 5
        edges = [(0, i) for i in range(1, 11)] + [(1, j) for j in range(2, 6)]
        g = Graph(11, edges)
        cg = ColoredGraph(
            graph=g,
            color=np.zeros(11, dtype=np.int64),
            is_seed=np.array([True] + [False] * 10),
            creation_time=np.arange(1, 12),
        )
        assert king_amplifier(cg, np.arange(11)) == pytest.approx(2.0)

    def test_mean_amplifier_on_homophyly(self, homophyly_net):
        n = homophyly_net.graph.n
        min_size = math.ceil(math.log(n))
        amps = [king_amplifier(homophyly_net, c)
                for c in homochromatic_sets(homophyly_net) if c.size >= min_size]
        amps = [a for a in amps if a is not None]
        assert np.mean(amps) >= 1.5


class TestPowerlawConsistency:
    def test_too_few_qualifying_classes(self):
        # one color class spanning the whole graph: below the 5-class minimum
        sample_graph = gen_homophyly(HomophylyParams(n=400, a=3.0, d=5, rng_seed=3))
        cg = ColoredGraph(
            graph=sample_graph.graph,
            color=np.zeros(400, dtype=np.int64),
            is_seed=np.array([True] + [False] * 399),
            creation_time=np.arange(1, 401),
        )
        with pytest.raises(InsufficientDataError):
            powerlaw_consistency(cg, x_min=5)

    def test_homophyly_gap(self, homophyly_large):
        report = powerlaw_consistency(homophyly_large, x_min=5)
        assert report.max_gap <= 0.8
        assert len(report.community_exponents) >= 5
        assert 2.5 <= report.global_exponent <= 3.5

    def test_small_classes_skipped(self, homophyly_large):
        report = powerlaw_consistency(homophyly_large, x_min=5, min_size=50)
        sizes = [c.size for c in homochromatic_sets(homophyly_large)]
        assert len(report.community_exponents) <= sum(1 for s in sizes if s >= 50)


class TestVerifyStructure:
    def test_full_report_flags(self, homophyly_net):
        report = verify_structure(homophyly_net, distance_samples=100, rng_seed=0)
        assert report.seed_bounds_ok
        assert report.size_bound_ok
        assert report.nonseed_width_ok
        assert report.seed_width_ok
        assert report.second_degree_le1_fraction >= 0.99
        assert report.diameter_ok
        assert report.king_ok
        assert report.informative["seed_count_equals_colors"]
        assert report.late_width_median <= report.late_width_bound
        assert report.community_diameters["max"] <= report.diameter_bound
        d = report.to_dict()
        assert isinstance(d["seed_bounds"], list)
