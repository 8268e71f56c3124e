"""Undirected multigraph with CSR adjacency and the primitive set quantities.

Node ids are dense integers ``0..n-1``; for generated graphs the id order is
the creation order.  Parallel edges are allowed and every count (degree,
volume, cut) respects multiplicity.  Self-loops are rejected at construction.
"""

from __future__ import annotations

import json
import math
import random
from collections import deque
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError, ParseError

INF_DIAMETER = math.inf


class Graph:
    """Immutable undirected multigraph.

    Attributes:
        n: node count.
        m: edge count (with multiplicity).
        edges_u, edges_v: endpoint arrays, one entry per edge.
        indptr, indices: CSR adjacency over both directions (2m entries).
        degree: per-node endpoint count.
    """

    __slots__ = ("n", "m", "edges_u", "edges_v", "indptr", "indices", "degree",
                 "_unq_indptr", "_unq_indices", "_unq_counts")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] | np.ndarray):
        if n < 0:
            raise InputError(f"node count must be nonnegative, got {n}")
        arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        if arr.size == 0:
            arr = arr.reshape(0, 2)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise InputError("edges must be (u, v) pairs")
        u, v = arr[:, 0], arr[:, 1]
        if arr.size and (u.min() < 0 or v.min() < 0 or u.max() >= n or v.max() >= n):
            raise InputError("edge endpoint out of range")
        if np.any(u == v):
            raise InputError("self-loops are not allowed")
        self.n = int(n)
        self.m = int(len(u))
        self.edges_u = u
        self.edges_v = v
        src = np.concatenate([u, v])
        dst = np.concatenate([v, u])
        order = np.argsort(src, kind="stable")
        counts = np.bincount(src, minlength=n)
        self.indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=self.indptr[1:])
        self.indices = dst[order]
        self.degree = counts
        self._unq_indptr = None
        self._unq_indices = None
        self._unq_counts = None

    def unique_adjacency(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """CSR over distinct neighbors with per-neighbor edge multiplicity.

        Built lazily and cached; lets hot loops use fancy-index updates
        (r[nbrs] += w) instead of np.add.at.
        """
        if self._unq_indptr is None:
            src = np.repeat(np.arange(self.n, dtype=np.int64), self.degree)
            dst = self.indices
            order = np.lexsort((dst, src))
            s, d = src[order], dst[order]
            if s.size:
                new = np.ones(s.size, dtype=bool)
                new[1:] = (s[1:] != s[:-1]) | (d[1:] != d[:-1])
                starts = np.flatnonzero(new)
                counts = np.diff(np.append(starts, s.size))
                self._unq_indices = d[starts]
                self._unq_counts = counts.astype(np.float64)
                per_node = np.bincount(s[starts], minlength=self.n)
            else:
                self._unq_indices = np.empty(0, dtype=np.int64)
                self._unq_counts = np.empty(0, dtype=np.float64)
                per_node = np.zeros(self.n, dtype=np.int64)
            indptr = np.zeros(self.n + 1, dtype=np.int64)
            np.cumsum(per_node, out=indptr[1:])
            self._unq_indptr = indptr
        return self._unq_indptr, self._unq_indices, self._unq_counts

    def neighbors(self, v: int) -> np.ndarray:
        """Neighbor ids of ``v`` with multiplicity (read-only view)."""
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def edge_pairs(self) -> np.ndarray:
        return np.column_stack([self.edges_u, self.edges_v])

    def __repr__(self) -> str:  # pragma: no cover
        return f"Graph(n={self.n}, m={self.m})"


def as_node_set(g: Graph, members: Iterable[int]) -> np.ndarray:
    """Normalize ``members`` into a sorted duplicate-free id array, validated against ``g``."""
    s = np.unique(np.asarray(list(members) if not isinstance(members, np.ndarray) else members, dtype=np.int64))
    if s.size and (s[0] < 0 or s[-1] >= g.n):
        raise InputError("node id out of range for this graph")
    return s


def volume(g: Graph, s: Iterable[int]) -> int:
    """Sum of degrees over the set; the whole vertex set has volume 2m."""
    s = as_node_set(g, s)
    return int(g.degree[s].sum())


def _member_mask(g: Graph, s: np.ndarray) -> np.ndarray:
    mask = np.zeros(g.n, dtype=bool)
    mask[s] = True
    return mask


def cut_size(g: Graph, s: Iterable[int]) -> int:
    """Number of edges (with multiplicity) having exactly one endpoint in ``s``."""
    s = as_node_set(g, s)
    mask = _member_mask(g, s)
    return int(np.count_nonzero(mask[g.edges_u] != mask[g.edges_v]))


def conductance(g: Graph, s: Iterable[int]) -> float:
    """cut(s) / min(vol(s), vol(complement)); undefined when the smaller side has volume 0."""
    s = as_node_set(g, s)
    if s.size == 0 or s.size == g.n:
        raise InputError("conductance needs a nonempty proper subset")
    vol_s = int(g.degree[s].sum())
    vol_rest = 2 * g.m - vol_s
    smaller = min(vol_s, vol_rest)
    if smaller == 0:
        from .errors import UndefinedMetricError

        raise UndefinedMetricError("conductance undefined: one side has zero volume")
    return cut_size(g, s) / smaller


def is_connected_induced(g: Graph, s: Iterable[int]) -> bool:
    """True iff the subgraph induced by ``s`` is connected (BFS inside the set)."""
    s = as_node_set(g, s)
    if s.size == 0:
        raise InputError("connectivity of the empty set is undefined")
    if s.size == 1:
        return True
    members = set(int(x) for x in s)
    start = int(s[0])
    seen = {start}
    q = deque([start])
    while q:
        u = q.popleft()
        for w in g.neighbors(u):
            w = int(w)
            if w in members and w not in seen:
                seen.add(w)
                q.append(w)
    return len(seen) == s.size


def subgraph_diameter(g: Graph, s: Iterable[int]) -> float:
    """Exact diameter of the induced subgraph; ``math.inf`` if it is disconnected.

    Intended for small sets (BFS from every member).
    """
    s = as_node_set(g, s)
    if s.size == 0:
        raise InputError("diameter of the empty set is undefined")
    if s.size == 1:
        return 0
    members = {int(x): i for i, x in enumerate(s)}
    best = 0
    for start in s:
        dist = {int(start): 0}
        q = deque([int(start)])
        while q:
            u = q.popleft()
            du = dist[u]
            for w in g.neighbors(u):
                w = int(w)
                if w in members and w not in dist:
                    dist[w] = du + 1
                    q.append(w)
        if len(dist) < s.size:
            return INF_DIAMETER
        best = max(best, max(dist.values()))
    return best


def bfs_distances(g: Graph, source: int) -> np.ndarray:
    """Distances from ``source`` to every node (-1 for unreachable), frontier-at-a-time."""
    if not 0 <= source < g.n:
        raise InputError("source out of range")
    dist = np.full(g.n, -1, dtype=np.int64)
    dist[source] = 0
    frontier = np.array([source], dtype=np.int64)
    level = 0
    while frontier.size:
        level += 1
        starts = g.indptr[frontier]
        lens = g.degree[frontier]
        nxt = g.indices[_concat_ranges(starts, lens)]
        nxt = nxt[dist[nxt] < 0]
        if nxt.size == 0:
            break
        frontier = np.unique(nxt)
        dist[frontier] = level
    return dist


def _concat_ranges(starts: np.ndarray, lens: np.ndarray) -> np.ndarray:
    """Indices covering [starts[i], starts[i]+lens[i]) for all i, concatenated."""
    keep = lens > 0
    starts, lens = starts[keep], lens[keep]
    total = int(lens.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64)
    out = np.ones(total, dtype=np.int64)
    ends = np.cumsum(lens)
    out[0] = starts[0]
    out[ends[:-1]] = starts[1:] - (starts[:-1] + lens[:-1]) + 1
    return np.cumsum(out)


def connected_components(g: Graph) -> np.ndarray:
    """Component label per node, labels in first-seen order."""
    comp = np.full(g.n, -1, dtype=np.int64)
    cur = 0
    for v in range(g.n):
        if comp[v] >= 0:
            continue
        comp[v] = cur
        q = deque([v])
        while q:
            u = q.popleft()
            for w in g.neighbors(u):
                w = int(w)
                if comp[w] < 0:
                    comp[w] = cur
                    q.append(w)
        cur += 1
    return comp


def avg_distance_estimate(g: Graph, sample_pairs: int, rng_seed: int) -> float:
    """Mean shortest-path distance over node pairs of the largest component.

    Enumerates all pairs exactly when the component has at most ``sample_pairs``
    of them, otherwise draws that many pairs uniformly (with replacement).
    Deterministic for a given seed.
    """
    if sample_pairs < 1:
        raise InputError("sample_pairs must be >= 1")
    comp = connected_components(g)
    sizes = np.bincount(comp)
    cid = int(np.argmax(sizes))
    nodes = np.flatnonzero(comp == cid)
    k = nodes.size
    if k < 2:
        raise InputError("largest component has no pairs")
    total_pairs = k * (k - 1) // 2
    if total_pairs <= sample_pairs:
        acc = 0
        for i, u in enumerate(nodes):
            d = bfs_distances(g, int(u))
            acc += int(d[nodes[i + 1:]].sum())
        return acc / total_pairs
    rng = random.Random(rng_seed)
    acc = 0.0
    cache: dict[int, np.ndarray] = {}
    for _ in range(sample_pairs):
        i = rng.randrange(k)
        j = rng.randrange(k - 1)
        if j >= i:
            j += 1
        u, v = int(nodes[i]), int(nodes[j])
        if u not in cache:
            if len(cache) > 256:
                cache.clear()
            cache[u] = bfs_distances(g, u)
        acc += float(cache[u][v])
    return acc / sample_pairs


# ---------------------------------------------------------------------------
# Edge-list I/O
# ---------------------------------------------------------------------------

def write_edge_list(g: Graph, path: str | Path, header: Sequence[str] = ()) -> None:
    path = Path(path)
    with path.open("w") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        fh.write(f"# nodes {g.n} edges {g.m}\n")
        for u, v in zip(g.edges_u, g.edges_v):
            fh.write(f"{u}\t{v}\n")


def read_edge_list_multigraph(path: str | Path, n: int | None = None) -> Graph:
    """Read an edge list written by this package: one undirected edge per line,
    dense integer ids, parallel edges preserved verbatim.
    """
    path = Path(path)
    us: list[int] = []
    vs: list[int] = []
    with path.open() as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ParseError(f"expected 'u<TAB>v', got {line!r}", lineno)
            try:
                us.append(int(parts[0]))
                vs.append(int(parts[1]))
            except ValueError as exc:
                raise ParseError(f"non-integer node id in {line!r}", lineno) from exc
    if n is None:
        n = max(max(us, default=-1), max(vs, default=-1)) + 1
    return Graph(n, np.column_stack([np.array(us, dtype=np.int64), np.array(vs, dtype=np.int64)]).reshape(-1, 2))


def read_edge_list(
    path: str | Path,
    *,
    idmap_path: str | Path | None = None,
) -> tuple[Graph, dict[str, int]]:
    """Parse a tab/space separated edge list into a dense-id Graph.

    Lines starting with ``#`` are ignored.  Arcs are treated as directed input:
    duplicate arcs (in either orientation) collapse to a single undirected
    edge, and self-loop arcs are dropped.  Returns the graph plus the
    original-id -> dense-id mapping; the mapping is also written to
    ``idmap_path`` as JSON when given.
    """
    path = Path(path)
    ids: dict[str, int] = {}
    pairs: set[tuple[int, int]] = set()
    dropped_loops = 0
    with path.open() as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ParseError(f"expected 'u<TAB>v', got {line!r}", lineno)
            a = ids.setdefault(parts[0], len(ids))
            b = ids.setdefault(parts[1], len(ids))
            if a == b:
                dropped_loops += 1
                continue
            pairs.add((a, b) if a < b else (b, a))
    n = len(ids)
    edges = np.array(sorted(pairs), dtype=np.int64).reshape(-1, 2)
    g = Graph(n, edges)
    if idmap_path is not None:
        payload = {
            "schema_version": 1,
            "node_count": n,
            "dropped_self_loops": dropped_loops,
            "original_to_dense": ids,
        }
        Path(idmap_path).write_text(json.dumps(payload, indent=1, sort_keys=True))
    return g, ids
