from __future__ import annotations

import random

import pytest

from netlab import Graph


@pytest.fixture
def two_triangle_bridge() -> Graph:
    """Triangles 0-1-2 and 3-4-5 joined by the bridge 2-3 (m=7)."""
    return Graph(6, [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5), (2, 3)])


@pytest.fixture
def two_triangles() -> Graph:
    """Two disjoint triangles (m=6)."""
    return Graph(6, [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)])


@pytest.fixture
def path4() -> Graph:
    return Graph(4, [(0, 1), (1, 2), (2, 3)])


@pytest.fixture
def k4() -> Graph:
    return Graph(4, [(u, v) for u in range(4) for v in range(u + 1, 4)])


@pytest.fixture
def k5() -> Graph:
    return Graph(5, [(u, v) for u in range(5) for v in range(u + 1, 5)])


def random_graph(n: int, p: float, seed: int, ensure_edge: bool = True) -> Graph:
    rng = random.Random(seed)
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    if ensure_edge and not edges:
        edges = [(0, 1 % max(1, n - 1) + 0)] if n >= 2 else []
        edges = [(0, 1)] if n >= 2 else []
    return Graph(n, edges)


def random_connected_graph(n: int, extra_p: float, seed: int) -> Graph:
    """Random spanning tree plus independent extra edges."""
    rng = random.Random(seed)
    edges = set()
    order = list(range(n))
    rng.shuffle(order)
    for i in range(1, n):
        edges.add(tuple(sorted((order[i], order[rng.randrange(i)]))))
    for u in range(n):
        for v in range(u + 1, n):
            if (u, v) not in edges and rng.random() < extra_p:
                edges.add((u, v))
    return Graph(n, sorted(edges))


def naive_cut(g: Graph, members) -> int:
    s = set(int(x) for x in members)
    return sum(1 for u, v in zip(g.edges_u, g.edges_v) if (int(u) in s) != (int(v) in s))


def naive_volume(g: Graph, members) -> int:
    s = set(int(x) for x in members)
    return sum(int(g.degree[v]) for v in s)


def naive_conductance(g: Graph, members) -> float:
    c = naive_cut(g, members)
    vol = naive_volume(g, members)
    rest = 2 * g.m - vol
    return c / min(vol, rest)


__all__ = [
    "random_graph",
    "random_connected_graph",
    "naive_cut",
    "naive_volume",
    "naive_conductance",
]
