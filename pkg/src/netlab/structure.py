"""Structural statistics of colored (homophyly) networks.

Covers degree power laws and their consistency across scopes, per-node color
profiles (first/second degree, number of neighbor colors), community and node
widths, seed-dominance ratios, and an aggregate verification report whose
thresholds match the package's acceptance suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import zeta

from .errors import InputError, InsufficientDataError
from .generators import ColoredGraph, homochromatic_sets
from .graph import avg_distance_estimate, subgraph_diameter

_ALPHA_LO, _ALPHA_HI = 1.01, 20.0


def fit_powerlaw_exponent(degrees: np.ndarray, x_min: int) -> float:
    """Discrete maximum-likelihood power-law exponent with a fixed cutoff.

    Maximizes -N*ln(zeta(alpha, x_min)) - alpha*sum(ln x) over alpha.  Raises
    InsufficientDataError for fewer than 50 samples >= x_min, for a sample
    with zero log-spread, or when the optimum escapes to a search boundary.
    """
    if x_min < 1:
        raise InputError("x_min must be >= 1")
    x = np.asarray(degrees, dtype=np.float64)
    x = x[x >= x_min]
    if x.size < 50:
        raise InsufficientDataError(f"need >= 50 samples >= x_min, have {x.size}")
    if x.max() == x.min():
        raise InsufficientDataError("degenerate sample: zero log-spread")
    slog = float(np.log(x).sum())
    n = x.size

    def nll(alpha: float) -> float:
        return n * math.log(zeta(alpha, x_min)) + alpha * slog

    res = minimize_scalar(nll, bounds=(_ALPHA_LO, _ALPHA_HI), method="bounded")
    alpha = float(res.x)
    if alpha <= _ALPHA_LO + 1e-3 or alpha >= _ALPHA_HI - 1e-3:
        raise InsufficientDataError("exponent estimate diverged to the search boundary")
    return alpha


def sample_powerlaw(exponent: float, x_min: int, size: int, rng_seed: int,
                    x_max: int = 10**6) -> np.ndarray:
    """Inverse-CDF sampler for a discrete power law (test oracle for the fitter)."""
    ks = np.arange(x_min, x_max + 1, dtype=np.float64)
    pmf = ks ** (-exponent)
    cdf = np.cumsum(pmf / pmf.sum())
    rng = np.random.default_rng(rng_seed)
    u = rng.random(size)
    idx = np.searchsorted(cdf, u, side="right")
    return (idx + x_min).astype(np.int64)


# ---------------------------------------------------------------------------
# Per-node color profiles
# ---------------------------------------------------------------------------

@dataclass
class DegreeProfile:
    """Per-color edge counts of one node, sorted descending.

    ``length`` is the number of distinct neighbor colors; the counts sum to
    the node's degree.
    """

    node: int
    total_degree: int
    color_counts: np.ndarray  # descending
    colors: np.ndarray        # color ids aligned with color_counts

    @property
    def length(self) -> int:
        return int(self.color_counts.size)

    def jth_degree(self, j: int) -> int:
        """j-th largest per-color count (1-based); 0 beyond the profile length."""
        if j < 1:
            raise InputError("j is 1-based")
        return int(self.color_counts[j - 1]) if j <= self.length else 0


def degree_profile(cg: ColoredGraph, v: int) -> DegreeProfile:
    g = cg.graph
    if not 0 <= v < g.n:
        raise InputError("node out of range")
    nbr_colors = cg.color[g.neighbors(v)]
    if nbr_colors.size == 0:
        return DegreeProfile(node=v, total_degree=0,
                             color_counts=np.empty(0, dtype=np.int64),
                             colors=np.empty(0, dtype=np.int64))
    colors, counts = np.unique(nbr_colors, return_counts=True)
    order = np.lexsort((colors, -counts))
    return DegreeProfile(node=v, total_degree=int(g.degree[v]),
                         color_counts=counts[order], colors=colors[order])


def _per_node_color_stats(cg: ColoredGraph) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(first_degree, second_degree, profile_length) for all nodes at once."""
    g = cg.graph
    n = g.n
    nodes = np.concatenate([g.edges_u, g.edges_v])
    ncol = np.concatenate([cg.color[g.edges_v], cg.color[g.edges_u]])
    order = np.lexsort((ncol, nodes))
    nodes_s, ncol_s = nodes[order], ncol[order]
    if nodes_s.size == 0:
        z = np.zeros(n, dtype=np.int64)
        return z, z.copy(), z.copy()
    new_group = np.ones(nodes_s.size, dtype=bool)
    new_group[1:] = (nodes_s[1:] != nodes_s[:-1]) | (ncol_s[1:] != ncol_s[:-1])
    gidx = np.cumsum(new_group) - 1
    counts = np.bincount(gidx)
    gnode = nodes_s[new_group]
    length = np.bincount(gnode, minlength=n)
    order2 = np.lexsort((-counts, gnode))
    gn, cn = gnode[order2], counts[order2]
    first = np.ones(gn.size, dtype=bool)
    first[1:] = gn[1:] != gn[:-1]
    d1 = np.zeros(n, dtype=np.int64)
    d1[gn[first]] = cn[first]
    second = np.zeros(gn.size, dtype=bool)
    second[1:] = (~first[1:]) & first[:-1]
    d2 = np.zeros(n, dtype=np.int64)
    d2[gn[second]] = cn[second]
    return d1, d2, length


def community_width(cg: ColoredGraph, members: np.ndarray) -> int:
    """Number of community members whose neighbors span >= 2 colors."""
    members = np.asarray(members, dtype=np.int64)
    if members.size == 0:
        raise InputError("empty community")
    if np.unique(cg.color[members]).size != 1:
        raise InputError("set is not a single color class")
    _, _, length = _per_node_color_stats(cg)
    return int(np.count_nonzero(length[members] > 1))


def node_width(cg: ColoredGraph, x: int) -> int:
    """Number of foreign communities reached via an edge to one of their non-seed members."""
    g = cg.graph
    if not 0 <= x < g.n:
        raise InputError("node out of range")
    nbrs = g.neighbors(x)
    foreign = nbrs[(cg.color[nbrs] != cg.color[x]) & ~cg.is_seed[nbrs]]
    return int(np.unique(cg.color[foreign]).size)


def all_node_widths(cg: ColoredGraph) -> np.ndarray:
    """Vectorized node_width for every node."""
    g = cg.graph
    n = g.n
    u, v = g.edges_u, g.edges_v
    cu, cv = cg.color[u], cg.color[v]
    cross = cu != cv
    xs = np.concatenate([u[cross & ~cg.is_seed[v]], v[cross & ~cg.is_seed[u]]])
    yc = np.concatenate([cv[cross & ~cg.is_seed[v]], cu[cross & ~cg.is_seed[u]]])
    if xs.size == 0:
        return np.zeros(n, dtype=np.int64)
    ncolors = int(cg.color.max()) + 1
    key = xs * ncolors + yc
    uniq = np.unique(key)
    return np.bincount((uniq // ncolors).astype(np.int64), minlength=n)


def king_amplifier(cg: ColoredGraph, members: np.ndarray) -> float | None:
    """Seed degree over the largest non-seed degree in the class; None for singletons."""
    members = np.asarray(members, dtype=np.int64)
    if members.size == 0:
        raise InputError("empty community")
    if np.unique(cg.color[members]).size != 1:
        raise InputError("set is not a single color class")
    if members.size == 1:
        return None
    deg = cg.graph.degree[members]
    seed_mask = cg.is_seed[members]
    if not seed_mask.any():
        raise InputError("color class without a seed node")
    seed_deg = int(deg[seed_mask][0])
    rest = deg[~seed_mask]
    if rest.size == 0 or rest.max() == 0:
        return None
    return float(seed_deg / rest.max())


# ---------------------------------------------------------------------------
# Power-law consistency across scopes
# ---------------------------------------------------------------------------

@dataclass
class PowerlawConsistency:
    global_exponent: float
    community_exponents: list[float]
    induced_exponents: list[float]
    skipped_communities: int
    max_gap: float

    def to_dict(self) -> dict:
        return {
            "global_exponent": self.global_exponent,
            "community_exponents": self.community_exponents,
            "induced_exponents": self.induced_exponents,
            "skipped_communities": self.skipped_communities,
            "max_gap": self.max_gap,
        }


def powerlaw_consistency(
    cg: ColoredGraph,
    x_min: int | None = None,
    min_size: int = 50,
) -> PowerlawConsistency:
    """Fit the degree exponent globally, per large color class, and on each
    class's induced subgraph; report the largest pairwise gap.

    Classes below ``min_size`` members are skipped.  Requires at least five
    qualifying classes.
    """
    if x_min is None:
        x_min = int(cg.params.get("d", 1))
    g = cg.graph
    classes = [c for c in homochromatic_sets(cg) if c.size >= min_size]
    if len(classes) < 5:
        raise InsufficientDataError(
            f"need >= 5 color classes of size >= {min_size}, have {len(classes)}")
    global_alpha = fit_powerlaw_exponent(g.degree, x_min)
    comm_alphas: list[float] = []
    induced_alphas: list[float] = []
    skipped = 0
    member_mask = np.zeros(g.n, dtype=bool)
    for c in classes:
        try:
            comm_alphas.append(fit_powerlaw_exponent(g.degree[c], x_min))
        except InsufficientDataError:
            skipped += 1
            continue
        member_mask[c] = True
        induced_deg = np.array(
            [int(np.count_nonzero(member_mask[g.neighbors(int(v))])) for v in c])
        member_mask[c] = False
        try:
            induced_alphas.append(fit_powerlaw_exponent(induced_deg, x_min))
        except InsufficientDataError:
            skipped += 1
    exps = [global_alpha] + comm_alphas + induced_alphas
    max_gap = float(max(exps) - min(exps))
    return PowerlawConsistency(
        global_exponent=global_alpha,
        community_exponents=comm_alphas,
        induced_exponents=induced_alphas,
        skipped_communities=skipped,
        max_gap=max_gap,
    )


# ---------------------------------------------------------------------------
# Aggregate verification report
# ---------------------------------------------------------------------------

@dataclass
class StructureReport:
    n: int
    m: int
    a: float
    d: int
    seed_count: int
    seed_bounds: tuple[float, float]
    seed_bounds_ok: bool
    max_community_size: int
    size_bound: float
    size_bound_ok: bool
    powerlaw_exponent: float | None
    powerlaw_ok: bool
    powerlaw_gap: float | None
    community_diameters: dict
    diameter_bound: float
    diameter_ok: bool
    avg_distance: float | None
    second_degree_le1_fraction: float
    second_degree_ok: bool
    profile_length_max: int
    profile_length_p99: float
    profile_length_bound: float
    community_widths: dict
    late_width_median: float | None
    late_width_bound: float
    nonseed_width_max: int
    nonseed_width_ok: bool
    seed_width_max: int
    seed_width_ok: bool
    king_mean: float | None
    king_ok: bool
    informative: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {}
        for k, v in self.__dict__.items():
            if isinstance(v, tuple):
                v = list(v)
            out[k] = v
        return out


def verify_structure(
    cg: ColoredGraph,
    *,
    distance_samples: int = 400,
    rng_seed: int = 0,
    early_theta: float = 0.5,
    late_c: float = 1.0,
) -> StructureReport:
    """Run every structural check and collect pass/fail flags.

    Hard flags use the thresholds of the acceptance suite; checks whose
    constants are not pinned down (profile lengths, early/late widths,
    average distance) are recorded as informative values only.
    """
    g = cg.graph
    n = g.n
    a = float(cg.params.get("a", 1.2))
    d = int(cg.params.get("d", max(1, int(round(g.m / max(1, n - 1))))))
    ln_n = math.log(n)
    classes = homochromatic_sets(cg)
    sizes = np.array([c.size for c in classes])

    seed_count = int(cg.is_seed.sum())
    seed_lo = n / (2.0 * ln_n ** a)
    seed_hi = 2.0 * n / ln_n ** a
    seed_bounds_ok = seed_lo <= seed_count <= seed_hi

    size_bound = 8.0 * ln_n ** (a + 1.0)
    max_size = int(sizes.max())
    size_bound_ok = max_size <= size_bound

    try:
        alpha = fit_powerlaw_exponent(g.degree, d)
        powerlaw_ok = 2.5 <= alpha <= 3.5
    except InsufficientDataError:
        alpha, powerlaw_ok = None, False
    try:
        gap = powerlaw_consistency(cg, x_min=d).max_gap
    except InsufficientDataError:
        gap = None

    diam_bound = 6.0 * math.log(max(math.e, math.log(n)))
    diams = np.array([subgraph_diameter(g, c) for c in classes], dtype=np.float64)
    finite = diams[np.isfinite(diams)]
    diameter_ok = bool(np.isfinite(diams).all() and (diams <= diam_bound).all())

    try:
        avg_dist = avg_distance_estimate(g, distance_samples, rng_seed)
    except InputError:
        avg_dist = None

    d1, d2, length = _per_node_color_stats(cg)
    frac_d2 = float(np.mean(d2 <= 1))
    second_ok = frac_d2 >= 0.99

    widths = np.array([int(np.count_nonzero(length[c] > 1)) for c in classes])
    # order classes by their seed's creation time
    seed_time = np.array([int(cg.creation_time[c[cg.is_seed[c]][0]]) for c in classes])
    order = np.argsort(seed_time, kind="stable")
    n_seeds = len(classes)
    late_start = int(n_seeds / max(1.0, ln_n ** late_c))
    late_widths = widths[order][late_start:]
    late_median = float(np.median(late_widths)) if late_widths.size else None
    late_bound = 4.0 * math.log(max(math.e, math.log(n)))

    node_w = all_node_widths(cg)
    nonseed_max = int(node_w[~cg.is_seed].max()) if (~cg.is_seed).any() else 0
    seed_w_max = int(node_w[cg.is_seed].max()) if cg.is_seed.any() else 0

    min_size = math.ceil(ln_n)
    amps = [king_amplifier(cg, c) for c in classes if c.size >= min_size]
    amps = [x for x in amps if x is not None]
    king_mean = float(np.mean(amps)) if amps else None
    king_ok = king_mean is not None and king_mean >= 1.5

    early_end = max(1, int(round(n_seeds ** (1.0 - early_theta))))
    early_widths = widths[order][:early_end]

    return StructureReport(
        n=n, m=g.m, a=a, d=d,
        seed_count=seed_count,
        seed_bounds=(seed_lo, seed_hi),
        seed_bounds_ok=bool(seed_bounds_ok),
        max_community_size=max_size,
        size_bound=size_bound,
        size_bound_ok=bool(size_bound_ok),
        powerlaw_exponent=alpha,
        powerlaw_ok=bool(powerlaw_ok),
        powerlaw_gap=gap,
        community_diameters={
            "max": float(finite.max()) if finite.size else 0.0,
            "median": float(np.median(finite)) if finite.size else 0.0,
            "disconnected": int(np.count_nonzero(~np.isfinite(diams))),
        },
        diameter_bound=diam_bound,
        diameter_ok=bool(diameter_ok),
        avg_distance=avg_dist,
        second_degree_le1_fraction=frac_d2,
        second_degree_ok=bool(second_ok),
        profile_length_max=int(length.max()),
        profile_length_p99=float(np.percentile(length, 99)),
        profile_length_bound=4.0 * ln_n,
        community_widths={
            "max": int(widths.max()),
            "median": float(np.median(widths)),
        },
        late_width_median=late_median,
        late_width_bound=late_bound,
        nonseed_width_max=nonseed_max,
        nonseed_width_ok=nonseed_max == 0,
        seed_width_max=seed_w_max,
        seed_width_ok=seed_w_max <= d,
        king_mean=king_mean,
        king_ok=bool(king_ok),
        informative={
            "early_width_mean": float(np.mean(early_widths)) if early_widths.size else None,
            "early_count": int(early_end),
            "late_count": int(late_widths.size),
            "seed_count_equals_colors": seed_count == len(classes),
        },
    )
