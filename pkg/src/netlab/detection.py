"""Community detectors.

Three algorithms, named after the quantity each one optimizes:

* ``find_community`` / ``ppr_detect_all`` ("c"): approximate personalized
  PageRank from a seed node, a conductance sweep over the support, and a
  stopping rule that accepts the first prefix S_i with
  conductance(S_i) <= alpha / i**beta that sits at a local rise
  (conductance(S_i) < conductance(S_{i+1})).
* ``greedy_modularity_partition`` ("m"): agglomerative merging of the module
  pair with the largest positive modularity gain.
* ``greedy_entropy_partition`` ("e"): same merge skeleton, scoring the gain
  of the entropy ratio instead.

The PageRank vector solves p = kappa*s + (1-kappa)*p*W for the lazy walk
W = (I + D^-1 A)/2.  The approximate version is the standard push method:
while some node u holds residual r(u) >= eps*deg(u), move kappa*r(u) into
p(u), keep (1-kappa)*r(u)/2 at u and spread (1-kappa)*r(u)/2 across u's
edges.  The queue is FIFO; every push preserves p + pr(r) = pr(chi_v).
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import InputError, SizeLimitError
from .graph import Graph
from .metrics import Partition, is_possible_community

SparseVector = dict[int, float]


@dataclass(frozen=True)
class PprParams:
    kappa: float = 0.15
    epsilon: float = 1e-5

    def __post_init__(self):
        if not 0.0 < self.kappa <= 1.0:
            raise InputError("kappa must be in (0, 1]")
        if self.epsilon <= 0.0:
            raise InputError("epsilon must be positive")


@dataclass(frozen=True)
class StopParams:
    alpha: float = 1.0
    beta: float = 0.2

    def __post_init__(self):
        if self.alpha <= 0.0:
            raise InputError("alpha must be positive")
        if not 0.0 < self.beta < 1.0:
            raise InputError("beta must be in (0, 1)")


def stop_beta_for_exponent(a: float) -> float:
    """Sweep-threshold exponent matched to a homophyly exponent a: (a-1)/(4(a+1))."""
    return (a - 1.0) / (4.0 * (a + 1.0))


# ---------------------------------------------------------------------------
# Personalized PageRank
# ---------------------------------------------------------------------------

def _lazy_walk_dense(g: Graph) -> np.ndarray:
    adj = np.zeros((g.n, g.n), dtype=np.float64)
    np.add.at(adj, (g.edges_u, g.edges_v), 1.0)
    np.add.at(adj, (g.edges_v, g.edges_u), 1.0)
    deg = g.degree.astype(np.float64)
    dinv = np.where(deg > 0, 1.0 / np.maximum(deg, 1.0), 0.0)
    w = (np.eye(g.n) + dinv[:, None] * adj) / 2.0
    isolated = np.flatnonzero(deg == 0)
    w[isolated, isolated] = 1.0  # stay put, keeping W row-stochastic
    return w


def exact_ppr_vector(g: Graph, s: np.ndarray, kappa: float) -> np.ndarray:
    """Dense solve of p = kappa*s + (1-kappa)*p*W for an arbitrary start vector."""
    if g.n > 500:
        raise SizeLimitError("dense PageRank solve is limited to n <= 500")
    w = _lazy_walk_dense(g)
    a = np.eye(g.n) - (1.0 - kappa) * w.T
    return np.linalg.solve(a, kappa * np.asarray(s, dtype=np.float64))


def exact_ppr(g: Graph, v: int, kappa: float) -> SparseVector:
    """Exact personalized PageRank from node v (test oracle, n <= 500)."""
    if not 0 <= v < g.n:
        raise InputError("start node out of range")
    if g.degree[v] == 0:
        raise InputError("start node is isolated")
    chi = np.zeros(g.n)
    chi[v] = 1.0
    p = exact_ppr_vector(g, chi, kappa)
    return {int(i): float(p[i]) for i in np.flatnonzero(p > 0)}


def approximate_ppr(g: Graph, v: int, params: PprParams) -> tuple[SparseVector, SparseVector]:
    """Push-method approximation; terminates with r(u) < eps*deg(u) everywhere.

    Returns (p, r) with supp(p) reachable from v and
    |p(u) - exact(u)| <= eps*deg(u) per entry.
    """
    if not 0 <= v < g.n:
        raise InputError("start node out of range")
    if g.degree[v] == 0:
        raise InputError("start node is isolated")
    kappa, eps = params.kappa, params.epsilon
    n = g.n
    deg = g.degree
    uptr, uidx, ucnt = g.unique_adjacency()
    p = np.zeros(n)
    r = np.zeros(n)
    r[v] = 1.0
    touched_mask = np.zeros(n, dtype=bool)
    touched_mask[v] = True
    touched = [v]
    in_queue = np.zeros(n, dtype=bool)
    queue: deque[int] = deque()
    if r[v] >= eps * deg[v]:
        queue.append(v)
        in_queue[v] = True
    while queue:
        u = queue.popleft()
        in_queue[u] = False
        ru = r[u]
        du = deg[u]
        if ru < eps * du:
            continue
        p[u] += kappa * ru
        keep = 0.5 * (1.0 - kappa) * ru
        r[u] = keep
        share = keep / du
        lo, hi = uptr[u], uptr[u + 1]
        nbrs = uidx[lo:hi]
        r[nbrs] += share * ucnt[lo:hi]  # distinct indices: fancy add is exact
        fresh = nbrs[~touched_mask[nbrs]]
        if fresh.size:
            touched_mask[fresh] = True
            touched.extend(fresh.tolist())
        for w in nbrs[(r[nbrs] >= eps * deg[nbrs]) & ~in_queue[nbrs]].tolist():
            in_queue[w] = True
            queue.append(w)
        if keep >= eps * du and not in_queue[u]:
            in_queue[u] = True
            queue.append(u)
    p_out = {int(i): float(p[i]) for i in touched if p[i] > 0.0}
    r_out = {int(i): float(r[i]) for i in touched if r[i] > 0.0}
    return p_out, r_out


# ---------------------------------------------------------------------------
# Sweep
# ---------------------------------------------------------------------------

@dataclass
class SweepResult:
    """Prefixes of the support ordered by p/deg (ties: node id ascending).

    ``order[i]`` is the node added at prefix size i+1 and ``conductance[i]``
    the prefix conductance; ``math.inf`` marks a prefix whose smaller side has
    zero volume.  ``prefix(i)`` materializes the i-th prefix as a sorted set.
    """

    order: np.ndarray
    conductance: np.ndarray

    def prefix(self, size: int) -> np.ndarray:
        return np.sort(self.order[:size])

    def __len__(self) -> int:
        return len(self.order)

    def items(self):
        for i in range(len(self.order)):
            yield i + 1, self.prefix(i + 1), float(self.conductance[i])


def sweep(g: Graph, p: SparseVector) -> SweepResult:
    """Conductance of every sweep prefix, computed in O(vol(supp)) overall."""
    if not p:
        raise InputError("sweep needs a vector with nonempty support")
    nodes = np.fromiter(p.keys(), dtype=np.int64, count=len(p))
    vals = np.fromiter(p.values(), dtype=np.float64, count=len(p))
    keep = vals > 0.0
    nodes, vals = nodes[keep], vals[keep]
    if nodes.size == 0:
        raise InputError("sweep needs a vector with nonempty support")
    if nodes.min() < 0 or nodes.max() >= g.n:
        raise InputError("support node out of range")
    key = vals / g.degree[nodes]
    order = np.lexsort((nodes, -key))
    nodes = nodes[order]
    s = nodes.size
    rank = np.full(g.n, s, dtype=np.int64)
    rank[nodes] = np.arange(s)
    # gather the support's incident edges once; each in-support edge is seen
    # from both endpoints, so count only the direction rank_src < rank_dst
    starts = g.indptr[nodes]
    lens = g.degree[nodes]
    from .graph import _concat_ranges

    dst = g.indices[_concat_ranges(starts, lens)]
    src_rank = np.repeat(np.arange(s), lens)
    dst_rank = rank[dst]
    fwd = src_rank < dst_rank
    diff = np.zeros(s + 2, dtype=np.int64)
    np.add.at(diff, src_rank[fwd] + 1, 1)
    np.add.at(diff, np.minimum(dst_rank[fwd], s) + 1, -1)
    cut = np.cumsum(diff)[1:s + 1]
    vol = np.cumsum(g.degree[nodes])
    smaller = np.minimum(vol, 2 * g.m - vol)
    phi = np.full(s, math.inf)
    ok = smaller > 0
    phi[ok] = cut[ok] / smaller[ok]
    return SweepResult(order=nodes, conductance=phi)


def find_community(
    g: Graph,
    v: int,
    ppr: PprParams | None = None,
    stop: StopParams | None = None,
) -> np.ndarray | None:
    """Seeded local community via PageRank sweep; None when no prefix qualifies.

    Accepts the first prefix satisfying both the conductance threshold and the
    local-rise condition.  The final prefix has no successor to compare
    against and is accepted only when its conductance is exactly 0, i.e. the
    support is a whole connected component.
    """
    ppr = ppr or PprParams()
    stop = stop or StopParams()
    if g.degree[v] == 0:
        raise InputError("start node is isolated")
    p, _ = approximate_ppr(g, v, ppr)
    if not p:
        return None
    sw = sweep(g, p)
    phi = sw.conductance
    s = len(sw)
    thresholds = stop.alpha / np.arange(1, s + 1, dtype=np.float64) ** stop.beta
    for i in range(s):
        if phi[i] <= thresholds[i]:
            if i + 1 < s and phi[i] < phi[i + 1]:
                return sw.prefix(i + 1)
            if i + 1 == s and phi[i] == 0.0:
                return sw.prefix(i + 1)
    return None


def ppr_detect_all(
    g: Graph,
    ppr: PprParams | None = None,
    stop: StopParams | None = None,
) -> list[np.ndarray]:
    """Cover the graph with seeded communities.

    Repeatedly seeds ``find_community`` from the highest-degree node not yet
    covered by an accepted community (ties: lowest id).  Accepted sets must
    pass the possible-community rule; a rejected attempt marks only its seed
    as tried.  Accepted communities may overlap earlier ones.
    """
    ppr = ppr or PprParams()
    stop = stop or StopParams()
    order = np.lexsort((np.arange(g.n), -g.degree))
    covered = np.zeros(g.n, dtype=bool)
    tried = np.zeros(g.n, dtype=bool)
    out: list[np.ndarray] = []
    for v in order:
        v = int(v)
        if covered[v] or tried[v] or g.degree[v] == 0:
            continue
        tried[v] = True
        comm = find_community(g, v, ppr, stop)
        if comm is None or not is_possible_community(g, comm):
            continue
        out.append(comm)
        covered[comm] = True
    return out


# ---------------------------------------------------------------------------
# Greedy agglomerative partitions
# ---------------------------------------------------------------------------

class _MergeEngine:
    """Pair store for agglomerative merging with vectorized gain evaluation.

    Rows hold (module_j, module_k, edge_count) for every connected module
    pair; dead rows are masked and compacted away periodically.  Gains are
    evaluated for all live rows each round, so objectives whose gain depends
    on global state (the entropy ratio) stay exact.
    """

    def __init__(self, g: Graph):
        n, m = g.n, g.m
        self.g = g
        self.two_m = 2.0 * m
        cap = max(16, 2 * m + 8)
        self.jj = np.zeros(cap, dtype=np.int64)
        self.kk = np.zeros(cap, dtype=np.int64)
        self.ee = np.zeros(cap, dtype=np.float64)
        self.alive = np.zeros(cap, dtype=bool)
        self.nrows = 0
        self.vol = g.degree.astype(np.float64).copy()
        self.label = np.arange(n, dtype=np.int64)  # smallest original id in module
        self.live_mod = np.ones(n, dtype=bool)
        self.members: list[list[int]] = [[i] for i in range(n)]
        self.nbrs: list[dict[int, int]] = [dict() for _ in range(n)]
        self.m_g = float(m)
        for u, v in zip(g.edges_u, g.edges_v):
            a, b = (int(u), int(v)) if u < v else (int(v), int(u))
            row = self.nbrs[a].get(b)
            if row is None:
                row = self._append(a, b, 1.0)
                self.nbrs[a][b] = row
                self.nbrs[b][a] = row
            else:
                self.ee[row] += 1.0

    def _append(self, a: int, b: int, e: float) -> int:
        if self.nrows == len(self.jj):
            self._grow()
        i = self.nrows
        self.jj[i], self.kk[i], self.ee[i], self.alive[i] = a, b, e, True
        self.nrows += 1
        return i

    def _grow(self) -> None:
        for name in ("jj", "kk", "ee", "alive"):
            arr = getattr(self, name)
            new = np.zeros(2 * len(arr), dtype=arr.dtype)
            new[:len(arr)] = arr
            setattr(self, name, new)

    def compact(self) -> None:
        live = np.flatnonzero(self.alive[:self.nrows])
        self.jj[:live.size] = self.jj[live]
        self.kk[:live.size] = self.kk[live]
        self.ee[:live.size] = self.ee[live]
        self.alive[:self.nrows] = False
        self.alive[:live.size] = True
        self.nrows = live.size
        rebuilt: list[dict[int, int]] = [dict() for _ in self.nbrs]
        for i in range(self.nrows):
            a, b = int(self.jj[i]), int(self.kk[i])
            rebuilt[a][b] = i
            rebuilt[b][a] = i
        self.nbrs = rebuilt

    def merge(self, row: int) -> tuple[int, int, float]:
        """Merge the two modules of ``row``; returns (kept, dropped, edge_count)."""
        a, b = int(self.jj[row]), int(self.kk[row])
        if len(self.nbrs[a]) < len(self.nbrs[b]):
            a, b = b, a
        e_ab = float(self.ee[row])
        self.m_g -= e_ab
        self.vol[a] += self.vol[b]
        self.live_mod[b] = False
        self.label[a] = min(self.label[a], self.label[b])
        self.members[a].extend(self.members[b])
        self.members[b] = []
        for x, r in list(self.nbrs[b].items()):
            self.alive[r] = False
            if x == a:
                del self.nbrs[a][b]
                continue
            del self.nbrs[x][b]
            r_ax = self.nbrs[a].get(x)
            if r_ax is not None:
                self.ee[r_ax] += self.ee[r]
            else:
                nr = self._append(a, x, float(self.ee[r]))
                self.nbrs[a][x] = nr
                self.nbrs[x][a] = nr
        self.nbrs[b] = {}
        return a, b, e_ab

    def partition(self) -> Partition:
        sets = [self.members[i] for i in np.flatnonzero(self.live_mod) if self.members[i]]
        sets.sort(key=min)
        return Partition.from_sets(self.g, sets)


def _greedy_merge(g: Graph, objective: str) -> Partition:
    if g.m == 0:
        raise InputError("greedy detection needs at least one edge")
    eng = _MergeEngine(g)
    n = g.n
    two_m = eng.two_m
    m = float(g.m)
    if objective == "entropy":
        deg = g.degree[g.degree > 0].astype(np.float64)
        lu = float(-np.sum(deg / two_m * np.log2(deg / two_m)))
        c_const = math.log2(two_m)
        a_state = float(np.sum(deg / two_m * np.log2(deg)))

    def gains() -> np.ndarray:
        nr = eng.nrows
        vj = eng.vol[eng.jj[:nr]]
        vk = eng.vol[eng.kk[:nr]]
        e = eng.ee[:nr]
        if objective == "modularity":
            gain = e / m - 2.0 * (vj / two_m) * (vk / two_m)
        else:
            vjk = vj + vk
            with np.errstate(divide="ignore", invalid="ignore"):
                da = (
                    vjk * np.log2(np.maximum(vjk, 1.0))
                    - vj * np.log2(np.maximum(vj, 1.0))
                    - vk * np.log2(np.maximum(vk, 1.0))
                ) / two_m
            dlp = da * (1.0 - eng.m_g / m) - (e / m) * (c_const - a_state - da)
            gain = -dlp / lu
        gain[~eng.alive[:nr]] = -np.inf
        return gain

    while True:
        if eng.nrows > 64 and eng.alive[:eng.nrows].sum() < eng.nrows // 2:
            eng.compact()
        if eng.nrows == 0:
            break
        gain = gains()
        best = int(np.argmax(gain))
        if not math.isfinite(gain[best]) or gain[best] <= 0.0:
            break
        ties = np.flatnonzero(gain == gain[best])
        if ties.size > 1:
            lab_lo = np.minimum(eng.label[eng.jj[ties]], eng.label[eng.kk[ties]])
            lab_hi = np.maximum(eng.label[eng.jj[ties]], eng.label[eng.kk[ties]])
            best = int(ties[np.lexsort((lab_hi, lab_lo))[0]])
        if objective == "entropy":
            vj, vk = eng.vol[eng.jj[best]], eng.vol[eng.kk[best]]
            vjk = vj + vk
            a_state += (
                vjk * math.log2(max(vjk, 1.0))
                - vj * math.log2(max(vj, 1.0))
                - vk * math.log2(max(vk, 1.0))
            ) / two_m
        eng.merge(best)
    return eng.partition()


def greedy_modularity_partition(g: Graph) -> Partition:
    """Agglomerative modularity maximization from singletons; stops at the peak."""
    return _greedy_merge(g, "modularity")


def greedy_entropy_partition(g: Graph) -> Partition:
    """Agglomerative entropy-ratio maximization from singletons; stops at the peak."""
    return _greedy_merge(g, "entropy")
