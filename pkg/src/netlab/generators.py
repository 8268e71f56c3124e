"""Seeded random-graph constructions: Erdős–Rényi, preferential attachment,
and the homophyly model (preferential attachment restricted by node color).

All generators are deterministic per seed and reproduce the same edge list
byte-for-byte across runs.  Degree-proportional sampling draws a uniform
entry from an endpoint list (one entry per incident edge endpoint), which is
exactly degree-proportional.  Natural log is used for the seed-creation
probability; entropy metrics elsewhere use log2.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InputError
from .graph import Graph, write_edge_list


@dataclass(frozen=True)
class HomophylyParams:
    """Parameters of the homophyly construction.

    a is the homophyly exponent (> 1): a new node becomes the seed of a fresh
    color with probability min(1, 1/(ln t)^a) at step t, otherwise it adopts a
    uniformly random existing color.  d edges are attached per node.
    """

    n: int
    a: float
    d: int
    rng_seed: int

    def __post_init__(self):
        if self.n < 2:
            raise InputError("n must be >= 2")
        if self.a <= 1:
            raise InputError("homophyly exponent a must be > 1")
        if self.d < 1:
            raise InputError("d must be >= 1")


@dataclass
class ColoredGraph:
    """Graph plus per-node color, seed flag and creation time.

    Every color class contains exactly one seed node (its earliest member)
    and induces a connected subgraph; the graph has exactly d*(n-1) edges.
    """

    graph: Graph
    color: np.ndarray
    is_seed: np.ndarray
    creation_time: np.ndarray
    params: dict = field(default_factory=dict)

    @property
    def n_colors(self) -> int:
        return int(self.color.max()) + 1 if self.color.size else 0


def gen_er(n: int, p: float, rng_seed: int) -> Graph:
    """Erdős–Rényi G(n, p): each unordered pair is an edge independently.

    Uses geometric skipping over the pair index space, so the cost is
    O(expected edges) rather than O(n^2).
    """
    if not 0.0 <= p <= 1.0:
        raise InputError(f"edge probability must be in [0, 1], got {p}")
    rng = random.Random(rng_seed)
    edges: list[tuple[int, int]] = []
    total = n * (n - 1) // 2
    if p >= 1.0:
        edges = [(u, v) for u in range(n) for v in range(u + 1, n)]
    elif p > 0.0:
        log_q = math.log1p(-p)
        k = -1
        while True:
            k += 1 + int(math.log(1.0 - rng.random()) / log_q)
            if k >= total:
                break
            u = int((2 * n - 1 - math.sqrt((2 * n - 1) ** 2 - 8 * k)) / 2)
            base = u * (2 * n - u - 1) // 2
            while base > k:  # guard against float rounding at row boundaries
                u -= 1
                base = u * (2 * n - u - 1) // 2
            while base + (n - u - 1) <= k:
                base += n - u - 1
                u += 1
            v = u + 1 + (k - base)
            edges.append((u, v))
    return Graph(n, edges)


def gen_pa(n: int, d: int, rng_seed: int) -> Graph:
    """Preferential attachment: each new node sends d degree-proportional edges.

    The initial graph is two nodes joined by d parallel edges, so the result
    has exactly d*(n-1) edges.
    """
    if n < 2:
        raise InputError("n must be >= 2")
    if d < 1:
        raise InputError("d must be >= 1")
    rng = random.Random(rng_seed)
    edges_u = [0] * d
    edges_v = [1] * d
    endpoints = [0] * d + [1] * d
    for v in range(2, n):
        targets = [endpoints[rng.randrange(len(endpoints))] for _ in range(d)]
        for u in targets:
            edges_u.append(v)
            edges_v.append(u)
            endpoints.append(v)
            endpoints.append(u)
    return Graph(n, np.column_stack([np.array(edges_u), np.array(edges_v)]))


def gen_homophyly(params: HomophylyParams) -> ColoredGraph:
    """Grow a homophyly network.

    Steps 1..2 create the initial graph: two seed nodes of distinct colors
    joined by d parallel edges.  At step t >= 3 a node arrives and either
    (with probability min(1, 1/((ln t)^a))) becomes a seed with a fresh color
    and d degree-proportional edges over the whole current graph, or adopts a
    uniformly random existing color and sends d degree-proportional edges
    restricted to that color class.
    """
    n, a, d = params.n, params.a, params.d
    rng = random.Random(params.rng_seed)
    color = [0, 1]
    is_seed = [True, True]
    edges_u = [0] * d
    edges_v = [1] * d
    all_endpoints = [0] * d + [1] * d
    color_endpoints: list[list[int]] = [[0] * d, [1] * d]
    n_colors = 2
    for t in range(3, n + 1):
        v = t - 1
        p_t = min(1.0, 1.0 / math.log(t) ** a)
        if rng.random() < p_t:
            c = n_colors
            n_colors += 1
            color.append(c)
            is_seed.append(True)
            color_endpoints.append([])
            pool = all_endpoints
        else:
            c = rng.randrange(n_colors)
            color.append(c)
            is_seed.append(False)
            pool = color_endpoints[c]
        # all d targets are drawn against the previous step's degrees
        targets = [pool[rng.randrange(len(pool))] for _ in range(d)]
        for u in targets:
            edges_u.append(v)
            edges_v.append(u)
            all_endpoints.append(v)
            all_endpoints.append(u)
            color_endpoints[c].append(v)
            color_endpoints[color[u]].append(u)
    g = Graph(n, np.column_stack([np.array(edges_u), np.array(edges_v)]))
    return ColoredGraph(
        graph=g,
        color=np.array(color, dtype=np.int64),
        is_seed=np.array(is_seed, dtype=bool),
        creation_time=np.arange(1, n + 1, dtype=np.int64),
        params={"n": n, "a": a, "d": d, "rng_seed": params.rng_seed},
    )


def homochromatic_sets(cg: ColoredGraph) -> list[np.ndarray]:
    """Partition of the nodes by color, one sorted id array per color."""
    ncol = cg.n_colors
    order = np.argsort(cg.color, kind="stable")
    bounds = np.searchsorted(cg.color[order], np.arange(ncol + 1))
    return [order[bounds[c]:bounds[c + 1]] for c in range(ncol)]


# ---------------------------------------------------------------------------
# Colored-graph I/O: edge list + JSON sidecar
# ---------------------------------------------------------------------------

def write_colored(cg: ColoredGraph, edge_path: str | Path, sidecar_path: str | Path) -> None:
    write_edge_list(cg.graph, edge_path, header=["homophyly network"])
    payload = {
        "schema_version": 1,
        "params": cg.params,
        "color": cg.color.tolist(),
        "is_seed": cg.is_seed.astype(int).tolist(),
        "creation_time": cg.creation_time.tolist(),
    }
    Path(sidecar_path).write_text(json.dumps(payload))


def read_colored(edge_path: str | Path, sidecar_path: str | Path) -> ColoredGraph:
    from .graph import read_edge_list_multigraph

    raw = json.loads(Path(sidecar_path).read_text())
    g = read_edge_list_multigraph(edge_path, n=len(raw["color"]))
    color = np.asarray(raw["color"], dtype=np.int64)
    if color.size != g.n:
        raise InputError("sidecar color array does not match graph size")
    return ColoredGraph(
        graph=g,
        color=color,
        is_seed=np.asarray(raw["is_seed"], dtype=bool),
        creation_time=np.asarray(raw["creation_time"], dtype=np.int64),
        params=raw.get("params", {}),
    )
