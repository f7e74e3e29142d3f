"""Brute-force ground truth by exhaustive enumeration of edge configurations.

For small n every subset of the C(n, 2) edges of the complete graph is
visited once, classified by its component structure, and weighted by
p^open * (1-p)^closed * q^components with p = lambda/n. Everything the
closed-form modules predict asymptotically is checked against these exact
finite-n numbers.

Enumeration is capped at n=6 by default (32768 configurations); n=7
(2097152 configurations) requires an explicit opt-in, and n>=8 is refused
outright. The structure classification depends only on n, so it is computed
once and reused across parameter values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import DomainError, EnumerationLimitError
from .textio import fmt17

N_MAX_DEFAULT = 6
N_MAX_EXTENDED = 7


@dataclass(frozen=True)
class ModelParams:
    """Parameter triple (n, lambda, q) with edge probability p = lambda/n."""

    n: int
    lam: float
    q: float

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"n={self.n} must be at least 1")
        if not 0.0 < self.lam < self.n:
            raise DomainError(
                f"lambda={self.lam} must lie in (0, n) so that p < 1"
            )
        if self.q <= 0.0:
            raise DomainError(f"q={self.q} must be positive")

    @property
    def p(self):
        return self.lam / self.n

    @property
    def pair_count(self):
        return self.n * (self.n - 1) // 2


def pair_index(n, i, j):
    """Canonical index of the unordered pair (i, j), i < j:
    i*n - i*(i+1)/2 + (j - i - 1)."""
    if not 0 <= i < j < n:
        raise DomainError(f"pair ({i}, {j}) invalid for n={n}")
    return i * n - i * (i + 1) // 2 + (j - i - 1)


def index_pairs(n):
    """All pairs (i, j), i < j, listed in canonical index order."""
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


@dataclass(frozen=True)
class EdgeConfiguration:
    """A subset of the edges of the complete graph, one bit per pair."""

    n: int
    bits: int

    @classmethod
    def from_edges(cls, n, edges):
        bits = 0
        for i, j in edges:
            if i > j:
                i, j = j, i
            bits |= 1 << pair_index(n, i, j)
        return cls(n=n, bits=bits)

    def is_open(self, i, j):
        if i > j:
            i, j = j, i
        return bool(self.bits >> pair_index(self.n, i, j) & 1)

    def open_edges(self):
        return [
            pair
            for idx, pair in enumerate(index_pairs(self.n))
            if self.bits >> idx & 1
        ]

    @property
    def edge_count(self):
        return bin(self.bits).count("1")


@dataclass(frozen=True)
class ComponentSummary:
    """Component statistics of one configuration."""

    k: int
    m: tuple  # m[l] = number of components of size l, index 0 unused
    largest: int
    acyclic: bool
    connected: bool


class _DisjointSet:
    """Union-find over n elements with path halving."""

    def __init__(self, n):
        self.parent = list(range(n))
        self.count = n

    def find(self, x):
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra
            self.count -= 1


def component_sizes(n, edges):
    """Sorted component sizes of the graph on n vertices with the given edges."""
    ds = _DisjointSet(n)
    for i, j in edges:
        ds.union(i, j)
    tally = {}
    for v in range(n):
        root = ds.find(v)
        tally[root] = tally.get(root, 0) + 1
    return sorted(tally.values())


def component_summary(config):
    """Classify one configuration: component count, size histogram, flags."""
    n = config.n
    sizes = component_sizes(n, config.open_edges())
    hist = [0] * (n + 1)
    for s in sizes:
        hist[s] += 1
    k = len(sizes)
    return ComponentSummary(
        k=k,
        m=tuple(hist),
        largest=sizes[-1],
        acyclic=config.edge_count == n - k,
        connected=k == 1,
    )


def weight(config, params):
    """Configuration weight p^open * (1-p)^closed * q^components."""
    if config.n != params.n:
        raise DomainError("configuration and parameters disagree on n")
    e = config.edge_count
    k = component_summary(config).k
    p = params.p
    return p**e * (1.0 - p) ** (params.pair_count - e) * params.q**k


def _check_size(n, allow_large):
    if n > N_MAX_EXTENDED:
        raise EnumerationLimitError(
            f"exact enumeration at n={n} would visit 2^{n*(n-1)//2} "
            "configurations; n beyond 7 is excluded"
        )
    if n > N_MAX_DEFAULT and not allow_large:
        raise EnumerationLimitError(
            f"n={n} exceeds the default enumeration cap of {N_MAX_DEFAULT}; "
            "pass allow_large=True (CLI: --allow-large) to run the "
            f"{2 ** (n * (n - 1) // 2)}-configuration sweep"
        )


@lru_cache(maxsize=8)
def _structure_counts(n):
    """Map (edge_count, sorted component sizes) -> number of configurations.

    One pass over all 2^C(n,2) edge subsets; counts are exact integers and
    parameter-independent, so reports for any (lambda, q) reduce to a
    weighted fold over this table.
    """
    pairs = index_pairs(n)
    m = len(pairs)
    counts = {}
    for mask in range(1 << m):
        parent = list(range(n))
        edges = 0
        rest = mask
        while rest:
            idx = (rest & -rest).bit_length() - 1
            rest &= rest - 1
            edges += 1
            a, b = pairs[idx]
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            while parent[b] != b:
                parent[b] = parent[parent[b]]
                b = parent[b]
            if a != b:
                parent[b] = a
        tally = {}
        for v in range(n):
            root = v
            while parent[root] != root:
                parent[root] = parent[parent[root]]
                root = parent[root]
            tally[root] = tally.get(root, 0) + 1
        key = (edges, tuple(sorted(tally.values())))
        counts[key] = counts.get(key, 0) + 1
    return counts


def _structure_weights(params):
    """(edge_count, sizes, total weight) triples for every structure class."""
    counts = _structure_counts(params.n)
    p = params.p
    rows = []
    for (edges, sizes), count in sorted(counts.items()):
        w = (
            count
            * p**edges
            * (1.0 - p) ** (params.pair_count - edges)
            * params.q ** len(sizes)
        )
        rows.append((edges, sizes, w))
    return rows


def strict_threshold(eps, n):
    """Component-size threshold for 'larger than eps*n': ceil(eps*n), compared
    strictly."""
    if eps <= 0.0:
        raise DomainError(f"eps={eps} not positive")
    return math.ceil(eps * n)


@dataclass(frozen=True)
class ExactReport:
    """Exact partition-function data from one full enumeration.

    Weighted event totals use the same unnormalised convention throughout:
    the sum of configuration weights over the event. Distributions map an
    integer observable value to its total weight.
    """

    params: ModelParams
    z: float
    z_connected: float
    z_acyclic: float
    z_bounded: dict  # r -> weight of "no component larger than r"
    z_acyclic_bounded: dict  # r -> weight of the intersection with acyclic
    large_vertex_dist: dict  # r -> {count of vertices in components > r: weight}
    large_count_dist: dict  # r -> {number of components > r: weight}
    z_two_large: dict  # eps -> weight of "connected, or exactly two comps >= ceil(eps*n)"
    eps_thresholds: dict  # eps -> threshold record
    finite_free_energy: float

    def to_json_dict(self):
        def dist(d):
            return [[k, fmt17(w)] for k, w in sorted(d.items())]

        return {
            "params": {
                "n": self.params.n,
                "lambda": fmt17(self.params.lam),
                "q": fmt17(self.params.q),
            },
            "Z": fmt17(self.z),
            "Z_K": fmt17(self.z_connected),
            "Z_L": fmt17(self.z_acyclic),
            "Z_Br": {str(r): fmt17(w) for r, w in sorted(self.z_bounded.items())},
            "Z_LBr": {
                str(r): fmt17(w) for r, w in sorted(self.z_acyclic_bounded.items())
            },
            "dist_Vr": {
                str(r): dist(d) for r, d in sorted(self.large_vertex_dist.items())
            },
            "dist_Nr": {
                str(r): dist(d) for r, d in sorted(self.large_count_dist.items())
            },
            "Z_Keps2": {
                fmt17(eps): fmt17(w) for eps, w in sorted(self.z_two_large.items())
            },
            "thresholds": {
                fmt17(eps): rec for eps, rec in sorted(self.eps_thresholds.items())
            },
            "finite_free_energy": fmt17(self.finite_free_energy),
        }


def enumerate_report(params, r_list=(), eps_list=(), allow_large=False):
    """Exact totals and distributions for every tracked event.

    r_list supplies fixed size caps; eps_list supplies fractional thresholds,
    recorded with their integer ceilings. 'Larger than r' is strict
    throughout; the two-large-components event uses 'at least ceil(eps*n)'.
    """
    _check_size(params.n, allow_large)
    n = params.n
    rows = _structure_weights(params)
    r_all = sorted(set(int(r) for r in r_list))
    eps_all = sorted(set(float(e) for e in eps_list))
    eps_caps = {eps: strict_threshold(eps, n) for eps in eps_all}

    z_parts = []
    zk_parts = []
    zl_parts = []
    zb = {r: [] for r in r_all}
    zlb = {r: [] for r in r_all}
    dist_v = {r: {} for r in r_all}
    dist_n = {r: {} for r in r_all}
    z2 = {eps: [] for eps in eps_all}

    for edges, sizes, w in rows:
        k = len(sizes)
        largest = sizes[-1]
        acyclic = edges == n - k
        z_parts.append(w)
        if k == 1:
            zk_parts.append(w)
        if acyclic:
            zl_parts.append(w)
        for r in r_all:
            if largest <= r:
                zb[r].append(w)
                if acyclic:
                    zlb[r].append(w)
            v_big = sum(s for s in sizes if s > r)
            n_big = sum(1 for s in sizes if s > r)
            dist_v[r][v_big] = dist_v[r].get(v_big, 0.0) + w
            dist_n[r][n_big] = dist_n[r].get(n_big, 0.0) + w
        for eps in eps_all:
            cap = eps_caps[eps]
            if k == 1 or (k == 2 and sizes[0] >= cap):
                z2[eps].append(w)

    z = math.fsum(z_parts)
    return ExactReport(
        params=params,
        z=z,
        z_connected=math.fsum(zk_parts),
        z_acyclic=math.fsum(zl_parts),
        z_bounded={r: math.fsum(v) for r, v in zb.items()},
        z_acyclic_bounded={r: math.fsum(v) for r, v in zlb.items()},
        large_vertex_dist=dist_v,
        large_count_dist=dist_n,
        z_two_large={eps: math.fsum(v) for eps, v in z2.items()},
        eps_thresholds={
            eps: {
                "strict_greater_than": eps_caps[eps],
                "at_least": eps_caps[eps],
            }
            for eps in eps_all
        },
        finite_free_energy=math.log(z) / n,
    )


def largest_size_distribution(params, allow_large=False):
    """Probability distribution of the largest component size (normalised)."""
    _check_size(params.n, allow_large)
    rows = _structure_weights(params)
    by_size = {}
    for _, sizes, w in rows:
        by_size[sizes[-1]] = by_size.get(sizes[-1], 0.0) + w
    z = math.fsum(by_size.values())
    return {s: w / z for s, w in sorted(by_size.items())}


def finite_rate_table(params, eps, allow_large=False):
    """Per-k weights of {count of vertices in components larger than
    ceil(eps*n) equals k}, with the finite-n rate (1/n)*log(weight).

    Only attainable k (nonzero weight) appear; the weights over all k sum
    to the partition function.
    """
    _check_size(params.n, allow_large)
    cap = strict_threshold(eps, params.n)
    rows = _structure_weights(params)
    dist = {}
    for _, sizes, w in rows:
        v_big = sum(s for s in sizes if s > cap)
        dist.setdefault(v_big, []).append(w)
    table = {}
    for k in sorted(dist):
        total = math.fsum(dist[k])
        if total > 0.0:
            table[k] = (total, math.log(total) / params.n)
    return table


def uniqueness_check(params, eps, allow_large=False):
    """Conditional probability that exactly one component exceeds the
    threshold, given the number of vertices in such components.

    Returns {m: ratio} for every attainable m > 0; an empty conditioning
    event yields None. Ratios never exceed 1.
    """
    _check_size(params.n, allow_large)
    cap = strict_threshold(eps, params.n)
    rows = _structure_weights(params)
    joint = {}
    marginal = {}
    for _, sizes, w in rows:
        v_big = sum(s for s in sizes if s > cap)
        n_big = sum(1 for s in sizes if s > cap)
        if v_big > 0:
            marginal.setdefault(v_big, []).append(w)
            if n_big == 1:
                joint.setdefault(v_big, []).append(w)
    out = {}
    for m in sorted(marginal):
        denom = math.fsum(marginal[m])
        if denom <= 0.0:
            out[m] = None
            continue
        numer = math.fsum(joint.get(m, []))
        out[m] = numer / denom
    return out
