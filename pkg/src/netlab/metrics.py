"""Community-structure quality metrics.

Three ratios over a graph G with m edges:

* modularity of a partition P:  sigma = sum_l [ k_l/m - (V_l/2m)^2 ]
  where k_l counts intra-module edges and V_l is the module volume;
* entropy ratio of a partition: tau = 1 - L_P / L_U, comparing the
  module-node code length of a lazy random-walk step against the uniform
  code length L_U = -sum_i (d_i/2m) log2(d_i/2m);
* conductance ratio of a community set X (overlap allowed):
  theta = (1/n) * sum over covered nodes of mean(1 - conductance) across
  the communities covering the node.

The joint empirical criterion declares a community structure present when
tau > 0, sigma > 0.3 and theta > 0.3.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Literal

import numpy as np

from .errors import InputError, SizeLimitError, UndefinedMetricError
from .graph import Graph, as_node_set, is_connected_induced

logger = logging.getLogger(__name__)


@dataclass
class Partition:
    """Total assignment of nodes to modules, ids dense 0..L-1, no empty module."""

    assignment: np.ndarray
    module_count: int

    @classmethod
    def from_assignment(cls, assignment: Iterable[int]) -> "Partition":
        arr = np.asarray(list(assignment) if not isinstance(assignment, np.ndarray) else assignment, dtype=np.int64)
        if arr.size == 0:
            raise InputError("partition of an empty node set")
        uniq = np.unique(arr)
        if uniq[0] != 0 or uniq[-1] != len(uniq) - 1:
            # compact to dense module ids, preserving order of first appearance
            remap = {int(x): i for i, x in enumerate(uniq)}
            arr = np.array([remap[int(x)] for x in arr], dtype=np.int64)
            uniq = np.arange(len(uniq))
        return cls(assignment=arr, module_count=int(len(uniq)))

    @classmethod
    def from_sets(cls, g: Graph, sets: Iterable[Iterable[int]]) -> "Partition":
        arr = np.full(g.n, -1, dtype=np.int64)
        count = 0
        for i, s in enumerate(sets):
            mem = as_node_set(g, s)
            if mem.size == 0:
                raise InputError("empty module in partition")
            if np.any(arr[mem] >= 0):
                raise InputError("partition modules overlap")
            arr[mem] = i
            count += 1
        if np.any(arr < 0):
            raise InputError("partition does not cover all nodes")
        return cls(assignment=arr, module_count=count)

    def sets(self) -> list[np.ndarray]:
        order = np.argsort(self.assignment, kind="stable")
        bounds = np.searchsorted(self.assignment[order], np.arange(self.module_count + 1))
        return [np.sort(order[bounds[i]:bounds[i + 1]]) for i in range(self.module_count)]

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls(assignment=np.arange(n, dtype=np.int64), module_count=n)

    @classmethod
    def single_module(cls, n: int) -> "Partition":
        return cls(assignment=np.zeros(n, dtype=np.int64), module_count=1)


@dataclass
class CommunitySet:
    """List of node sets; overlap is permitted and coverage may be partial."""

    communities: list[np.ndarray]

    @classmethod
    def from_lists(cls, g: Graph, lists: Iterable[Iterable[int]]) -> "CommunitySet":
        comms = []
        for s in lists:
            mem = as_node_set(g, s)
            if mem.size == 0:
                raise InputError("empty community")
            comms.append(mem)
        return cls(communities=comms)

    def __len__(self) -> int:
        return len(self.communities)

    def __iter__(self):
        return iter(self.communities)


@dataclass
class RatioReport:
    sigma: float
    tau: float
    theta: float
    criterion_met: bool

    def to_dict(self) -> dict:
        return {
            "sigma": self.sigma,
            "tau": self.tau,
            "theta": self.theta,
            "criterion_met": self.criterion_met,
        }


def _check_nonempty(g: Graph) -> None:
    if g.m == 0:
        raise UndefinedMetricError("metric undefined on a graph with no edges")


def _module_stats(g: Graph, p: Partition) -> tuple[np.ndarray, np.ndarray, int]:
    """(intra-edge count, volume) per module, plus the crossing-edge count."""
    mod = p.assignment
    vol = np.bincount(mod, weights=g.degree.astype(np.float64), minlength=p.module_count)
    same = mod[g.edges_u] == mod[g.edges_v]
    k_l = np.bincount(mod[g.edges_u][same], minlength=p.module_count).astype(np.float64)
    m_g = g.m - int(same.sum())
    return k_l, vol, m_g


def modularity(g: Graph, p: Partition) -> float:
    """sigma = sum_l [ k_l/m - (V_l/2m)^2 ]; exactly 0 for the single-module partition."""
    _check_nonempty(g)
    _validate_partition(g, p)
    k_l, vol, _ = _module_stats(g, p)
    two_m = 2.0 * g.m
    return float(np.sum(k_l / g.m - (vol / two_m) ** 2))


def _validate_partition(g: Graph, p: Partition) -> None:
    if p.assignment.shape != (g.n,):
        raise InputError("partition does not cover exactly the graph's nodes")


def entropy_uniform(g: Graph) -> float:
    """Entropy (bits) of the stationary degree distribution; 0*log0 terms are 0."""
    _check_nonempty(g)
    d = g.degree[g.degree > 0].astype(np.float64)
    pi = d / (2.0 * g.m)
    return float(-np.sum(pi * np.log2(pi)))


def entropy_partition(g: Graph, p: Partition) -> float:
    """Module-node code length (bits) of one lazy random-walk step.

    L_P = -sum_j sum_{i in j} (d_i/2m) log2(d_i/V_j)
          - (m_g/m) * sum_j (V_j/2m) log2(V_j/2m)

    with d_i the full degree of node i, V_j the module volume and m_g the
    crossing-edge count.  Equals L_U exactly for both the single-module and
    the all-singleton partitions.
    """
    _check_nonempty(g)
    _validate_partition(g, p)
    _, vol, m_g = _module_stats(g, p)
    two_m = 2.0 * g.m
    d = g.degree[g.degree > 0].astype(np.float64)
    intra = -np.sum(d / two_m * np.log2(d))  # node-level part of the first term
    vpos = vol[vol > 0]
    vol_term = np.sum(vpos / two_m * np.log2(vpos))
    inter = -np.sum(vpos / two_m * np.log2(vpos / two_m))
    return float(intra + vol_term + (m_g / g.m) * inter)


def entropy_ratio(g: Graph, p: Partition) -> float:
    """tau = 1 - L_P/L_U; requires L_U > 0."""
    lu = entropy_uniform(g)
    if lu <= 0.0:
        raise UndefinedMetricError("uniform code length is zero")
    return 1.0 - entropy_partition(g, p) / lu


def is_possible_community(g: Graph, s: Iterable[int]) -> bool:
    """Connected induced subgraph with size in [ceil(ln n), floor(sqrt n)].

    For n < 32 those bounds are infeasible or vacuous, so the rule relaxes to
    2 <= |s| <= n/2.
    """
    s = as_node_set(g, s)
    if s.size == 0:
        return False
    n = g.n
    if n >= 32:
        if not (math.ceil(math.log(n)) <= s.size <= math.floor(math.sqrt(n))):
            return False
    else:
        if not (2 <= s.size <= n / 2):
            return False
    return is_connected_induced(g, s)


def conductance_ratio(
    g: Graph,
    x: CommunitySet | Iterable[Iterable[int]],
    *,
    require_possible: bool = True,
) -> float:
    """theta in [0, 1]: average over all n nodes of the mean (1 - conductance)
    across the communities covering each node; uncovered nodes contribute 0.

    Communities failing the possible-community test are dropped (logged), so
    arbitrary algorithm output can always be scored.  Ground-truth community
    sets can be scored unfiltered with ``require_possible=False``.
    """
    comms = list(x.communities if isinstance(x, CommunitySet) else x)
    if not comms:
        return 0.0
    kept: list[np.ndarray] = []
    dropped = 0
    for c in comms:
        c = as_node_set(g, c)
        if c.size == 0:
            dropped += 1
            continue
        if require_possible and not is_possible_community(g, c):
            dropped += 1
            continue
        kept.append(c)
    if dropped:
        logger.warning("conductance_ratio: dropped %d of %d communities failing the size/connectivity rule",
                       dropped, len(comms))
    if not kept:
        return 0.0
    two_m = 2 * g.m
    mask_u = g.edges_u
    mask_v = g.edges_v
    acc = np.zeros(g.n, dtype=np.float64)
    cnt = np.zeros(g.n, dtype=np.int64)
    member = np.zeros(g.n, dtype=bool)
    for c in kept:
        member[c] = True
        cut = int(np.count_nonzero(member[mask_u] != member[mask_v]))
        vol_c = int(g.degree[c].sum())
        smaller = min(vol_c, two_m - vol_c)
        phi = 1.0 if smaller == 0 else cut / smaller
        acc[c] += 1.0 - phi
        cnt[c] += 1
        member[c] = False
    covered = cnt > 0
    return float(np.sum(acc[covered] / cnt[covered]) / g.n)


def empirical_criterion(tau: float, sigma: float, theta: float) -> bool:
    """True iff tau > 0, sigma > 0.3 and theta > 0.3 (all strict)."""
    return tau > 0.0 and sigma > 0.3 and theta > 0.3


def _set_partitions(n: int):
    """Yield all set partitions of range(n) as assignment lists (restricted growth)."""
    a = [0] * n
    b = [0] * n  # b[i] = max(a[:i+1])
    while True:
        yield list(a)
        i = n - 1
        while i > 0 and a[i] == b[i - 1] + 1:
            i -= 1
        if i == 0:
            return
        a[i] += 1
        b[i] = max(b[i - 1], a[i])
        for j in range(i + 1, n):
            a[j] = 0
            b[j] = b[i]


def brute_force_best_partition(
    g: Graph,
    objective: Literal["modularity", "entropy_ratio"],
) -> tuple[Partition, float]:
    """Exact maximizer over all set partitions (Bell-number enumeration, n <= 10)."""
    if g.n > 10:
        raise SizeLimitError("exhaustive partition search is limited to n <= 10")
    if g.n == 0:
        raise InputError("empty graph")
    _check_nonempty(g)
    score = modularity if objective == "modularity" else entropy_ratio
    best_val = -math.inf
    best: Partition | None = None
    for assignment in _set_partitions(g.n):
        p = Partition.from_assignment(assignment)
        val = score(g, p)
        if val > best_val:
            best_val = val
            best = p
    assert best is not None
    return best, float(best_val)


# ---------------------------------------------------------------------------
# Partition / community-set JSON serialization
# ---------------------------------------------------------------------------

def write_sets_json(sets: Iterable[Iterable[int]], path: str | Path, kind: str) -> None:
    payload = {
        "schema_version": 1,
        "kind": kind,
        "sets": [[int(x) for x in s] for s in sets],
    }
    Path(path).write_text(json.dumps(payload))


def read_sets_json(path: str | Path) -> list[list[int]]:
    raw = json.loads(Path(path).read_text())
    if isinstance(raw, list):  # accept bare arrays of arrays
        return [[int(x) for x in s] for s in raw]
    return [[int(x) for x in s] for s in raw["sets"]]
