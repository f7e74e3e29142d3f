"""Single-bond heat-bath MCMC for the random cluster model on K_n.

One step picks an edge and resamples it from its conditional distribution:
open with probability p when its endpoints stay connected without it,
otherwise with probability p/(p + q*(1-p)) (closing such an edge raises the
component count by one). A sweep resamples every edge once, in a freshly
shuffled order. Chains are bit-reproducible for a fixed seed: all
randomness comes from a self-contained xoshiro256** generator (Blackman &
Vigna), seeded through SplitMix64, compiled into the kernel.

The connectivity query walks the current adjacency structure with a
bidirectional breadth-first search, expanding the smaller frontier first;
small components exhaust quickly and giant-component queries meet in the
middle, so no dynamic-connectivity structure is needed.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import DomainError
from .oracle import (
    EdgeConfiguration,
    ModelParams,
    _DisjointSet,
    index_pairs,
    pair_index,
)
from .rates import lambda_c
from .textio import fmt17

_U64_MASK = (1 << 64) - 1


def _splitmix64(z):
    z = (z + 0x9E3779B97F4A7C15) & _U64_MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _U64_MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _U64_MASK
    return z ^ (z >> 31)


def seed_state(seed):
    """Expand a 64-bit seed into the four-word xoshiro256** state."""
    state = np.empty(4, np.uint64)
    z = int(seed) & _U64_MASK
    for i in range(4):
        z = _splitmix64(z)
        state[i] = z
    return state


@njit(cache=True, inline="always")
def _rotl(x, k):
    return (x << k) | (x >> (np.uint64(64) - k))


@njit(cache=True, inline="always")
def _rng_next(state):
    result = _rotl(state[1] * np.uint64(5), np.uint64(7)) * np.uint64(9)
    t = state[1] << np.uint64(17)
    state[2] ^= state[0]
    state[3] ^= state[1]
    state[1] ^= state[2]
    state[0] ^= state[3]
    state[2] ^= t
    state[3] = _rotl(state[3], np.uint64(45))
    return result


@njit(cache=True, inline="always")
def _rng_double(state):
    return (_rng_next(state) >> np.uint64(11)) * 1.1102230246251565e-16


@njit(cache=True, inline="always")
def _rng_below(state, bound):
    # unbiased draw from {0, ..., bound-1} by masked rejection
    limit = np.uint64(bound - 1)
    mask = limit
    mask |= mask >> np.uint64(1)
    mask |= mask >> np.uint64(2)
    mask |= mask >> np.uint64(4)
    mask |= mask >> np.uint64(8)
    mask |= mask >> np.uint64(16)
    mask |= mask >> np.uint64(32)
    while True:
        x = _rng_next(state) & mask
        if x <= limit:
            return np.int64(x)


@njit(cache=True)
def _shuffle(perm, state):
    for i in range(perm.shape[0] - 1, 0, -1):
        j = _rng_below(state, i + 1)
        tmp = perm[i]
        perm[i] = perm[j]
        perm[j] = tmp


@njit(cache=True, inline="always")
def _adj_remove(nbr, deg, a, b):
    for t in range(deg[a]):
        if nbr[a, t] == b:
            nbr[a, t] = nbr[a, deg[a] - 1]
            deg[a] -= 1
            return


@njit(cache=True)
def _connected(u, v, nbr, deg, seen_a, seen_b, queue_a, queue_b, stamp):
    # bidirectional BFS; edge (u, v) must already be absent from adjacency
    queue_a[0] = u
    seen_a[u] = stamp
    head_a, tail_a = 0, 1
    queue_b[0] = v
    seen_b[v] = stamp
    head_b, tail_b = 0, 1
    while head_a < tail_a and head_b < tail_b:
        if tail_a - head_a <= tail_b - head_b:
            x = queue_a[head_a]
            head_a += 1
            for t in range(deg[x]):
                w = nbr[x, t]
                if seen_b[w] == stamp:
                    return True
                if seen_a[w] != stamp:
                    seen_a[w] = stamp
                    queue_a[tail_a] = w
                    tail_a += 1
        else:
            x = queue_b[head_b]
            head_b += 1
            for t in range(deg[x]):
                w = nbr[x, t]
                if seen_a[w] == stamp:
                    return True
                if seen_b[w] != stamp:
                    seen_b[w] = stamp
                    queue_b[tail_b] = w
                    tail_b += 1
    return False


@njit(cache=True)
def _run_sweeps(
    nsweeps,
    p,
    q,
    eu,
    ev,
    open_,
    nbr,
    deg,
    perm,
    rng_state,
    seen_a,
    seen_b,
    queue_a,
    queue_b,
    stamp_box,
):
    m = eu.shape[0]
    p_isolated = p / (p + q * (1.0 - p))
    lo = min(p, p_isolated)
    hi = max(p, p_isolated)
    for _ in range(nsweeps):
        _shuffle(perm, rng_state)
        for t in range(m):
            e = perm[t]
            u = eu[e]
            v = ev[e]
            if open_[e]:
                _adj_remove(nbr, deg, u, v)
                _adj_remove(nbr, deg, v, u)
                open_[e] = False
            # one uniform per step; the connectivity query is only needed
            # when the draw falls between the two candidate probabilities
            draw = _rng_double(rng_state)
            if draw < lo:
                set_open = True
            elif draw >= hi:
                set_open = False
            else:
                stamp_box[0] += 1
                if _connected(
                    u, v, nbr, deg, seen_a, seen_b, queue_a, queue_b, stamp_box[0]
                ):
                    set_open = draw < p
                else:
                    set_open = draw < p_isolated
            if set_open:
                nbr[u, deg[u]] = v
                deg[u] += 1
                nbr[v, deg[v]] = u
                deg[v] += 1
                open_[e] = True


@njit(cache=True)
def _component_stats(n, nbr, deg, labels, queue, sizes, inner_edges):
    # BFS labelling; returns component count, fills sizes and per-component
    # doubled internal edge counts
    for v in range(n):
        labels[v] = -1
    count = 0
    for start in range(n):
        if labels[start] >= 0:
            continue
        labels[start] = count
        queue[0] = start
        head, tail = 0, 1
        size = 0
        degsum = 0
        while head < tail:
            x = queue[head]
            head += 1
            size += 1
            degsum += deg[x]
            for t in range(deg[x]):
                w = nbr[x, t]
                if labels[w] < 0:
                    labels[w] = count
                    queue[tail] = w
                    tail += 1
        sizes[count] = size
        inner_edges[count] = degsum // 2
        count += 1
    return count


@dataclass(frozen=True)
class ChainConfig:
    """Run description for one heat-bath chain.

    init selects the starting configuration: "empty", "full", or "auto"
    (empty below the critical coupling, full above). Cluster weights below 1
    fall outside the validated regime and are flagged as experimental.
    """

    params: ModelParams
    seed: int
    burn_in_sweeps: int
    sample_sweeps: int
    thin: int = 1
    eps: tuple = ()
    init: str = "auto"

    def __post_init__(self):
        if self.burn_in_sweeps < 0 or self.sample_sweeps < 1:
            raise DomainError("sweep counts must be nonnegative / positive")
        if self.thin < 1:
            raise DomainError(f"thin={self.thin} must be at least 1")
        if self.init not in ("auto", "empty", "full"):
            raise DomainError(f"unknown init {self.init!r}")
        if self.params.q < 1.0:
            warnings.warn(
                f"q={self.params.q} < 1 is outside the validated regime; "
                "treat results as experimental",
                stacklevel=2,
            )


@dataclass(frozen=True)
class SampleRecord:
    sweep: int
    largest_fraction: float
    k_over_n: float
    acyclic: bool
    connected: bool
    v_eps_fraction: tuple = ()


def heatbath_open_probability(config, params, pair):
    """Conditional probability that the given edge is open, given the rest.

    p when the endpoints are connected without the edge, else
    p/(p + q*(1-p)).
    """
    i, j = pair
    if i > j:
        i, j = j, i
    rest = [e for e in config.open_edges() if e != (i, j)]
    ds = _DisjointSet(params.n)
    for a, b in rest:
        ds.union(a, b)
    connected = ds.find(i) == ds.find(j)
    p = params.p
    if connected:
        return p
    return p / (p + params.q * (1.0 - p))


def heatbath_step(config, params, pair, u):
    """Resample one edge with the uniform draw u in [0, 1)."""
    prob = heatbath_open_probability(config, params, pair)
    i, j = pair
    if i > j:
        i, j = j, i
    bit = 1 << pair_index(params.n, i, j)
    bits = config.bits | bit if u < prob else config.bits & ~bit
    return EdgeConfiguration(n=params.n, bits=bits)


def transition_matrix(params):
    """Edge-averaged one-step kernel over all 2^C(n,2) configurations.

    Row x holds the distribution of the next state after resampling a
    uniformly chosen edge. Intended for small n only.
    """
    n = params.n
    if n > 4:
        raise DomainError("transition matrix is exponential in n; use n <= 4")
    pairs = index_pairs(n)
    m = len(pairs)
    size = 1 << m
    mat = np.zeros((size, size))
    for bits in range(size):
        config = EdgeConfiguration(n=n, bits=bits)
        for idx, pair in enumerate(pairs):
            prob = heatbath_open_probability(config, params, pair)
            mat[bits, bits | 1 << idx] += prob / m
            mat[bits, bits & ~(1 << idx)] += (1.0 - prob) / m
    return mat


class HeatBathChain:
    """Mutable chain state plus the compiled sweep kernel."""

    def __init__(self, cfg):
        self.cfg = cfg
        n = cfg.params.n
        pairs = index_pairs(n)
        m = len(pairs)
        self.eu = np.array([a for a, _ in pairs], np.int32)
        self.ev = np.array([b for _, b in pairs], np.int32)
        self.nbr = np.zeros((n, n), np.int32)
        self.deg = np.zeros(n, np.int32)
        self.open_ = np.zeros(m, np.bool_)
        self.perm = np.arange(m, dtype=np.int64)
        self.rng_state = seed_state(cfg.seed)
        self.seen_a = np.zeros(n, np.int64)
        self.seen_b = np.zeros(n, np.int64)
        self.queue_a = np.zeros(n, np.int64)
        self.queue_b = np.zeros(n, np.int64)
        self.stamp_box = np.zeros(1, np.int64)
        self.labels = np.zeros(n, np.int64)
        self.sizes = np.zeros(n, np.int64)
        self.inner_edges = np.zeros(n, np.int64)
        self.sweeps_done = 0
        init = cfg.init
        if init == "auto":
            init = "empty" if cfg.params.lam <= lambda_c(cfg.params.q) else "full"
        if init == "full":
            self.open_[:] = True
            for v in range(n):
                row = [w for w in range(n) if w != v]
                self.nbr[v, : n - 1] = row
                self.deg[v] = n - 1

    def sweep(self, count):
        if count <= 0:
            return
        _run_sweeps(
            count,
            self.cfg.params.p,
            self.cfg.params.q,
            self.eu,
            self.ev,
            self.open_,
            self.nbr,
            self.deg,
            self.perm,
            self.rng_state,
            self.seen_a,
            self.seen_b,
            self.queue_a,
            self.queue_b,
            self.stamp_box,
        )
        self.sweeps_done += count

    def record(self):
        n = self.cfg.params.n
        count = _component_stats(
            n, self.nbr, self.deg, self.labels, self.queue_a, self.sizes,
            self.inner_edges,
        )
        sizes = self.sizes[:count]
        largest = int(sizes.max())
        edges = int(self.inner_edges[:count].sum())
        v_eps = tuple(
            float(sizes[sizes > math.ceil(eps * n)].sum()) / n
            for eps in self.cfg.eps
        )
        return SampleRecord(
            sweep=self.sweeps_done,
            largest_fraction=largest / n,
            k_over_n=count / n,
            acyclic=edges == n - count,
            connected=count == 1,
            v_eps_fraction=v_eps,
        )

    def nontree_fraction_outside_largest(self):
        """Fraction of vertices outside the largest component that sit in a
        component containing a cycle."""
        n = self.cfg.params.n
        count = _component_stats(
            n, self.nbr, self.deg, self.labels, self.queue_a, self.sizes,
            self.inner_edges,
        )
        sizes = self.sizes[:count]
        inner = self.inner_edges[:count]
        big = int(sizes.argmax())
        outside = int(n - sizes[big])
        if outside == 0:
            return 0.0
        in_cycles = int(sizes[(inner >= sizes) & (np.arange(count) != big)].sum())
        return in_cycles / outside


def iter_records(cfg):
    """Generate thinned records after burn-in; one chain, fully sequential."""
    chain = HeatBathChain(cfg)
    chain.sweep(cfg.burn_in_sweeps)
    for _ in range(cfg.sample_sweeps // cfg.thin):
        chain.sweep(cfg.thin)
        yield chain.record()


def run_chain(cfg):
    """All records of one chain as a list."""
    return list(iter_records(cfg))


def estimate_theta(cfg, batches=20):
    """Batched-means estimate of the mean largest-component fraction.

    Returns (mean, standard error) using `batches` equal batches of the
    thinned records; refuses runs too short to fill them.
    """
    records = run_chain(cfg)
    return batched_means([r.largest_fraction for r in records], batches)


def batched_means(values, batches=20):
    if batches < 2:
        raise DomainError("need at least two batches")
    size = len(values) // batches
    if size < 1:
        raise DomainError(
            f"{len(values)} samples cannot fill {batches} batches; "
            "extend the run or lower thinning"
        )
    means = [
        sum(values[b * size : (b + 1) * size]) / size for b in range(batches)
    ]
    grand = sum(means) / batches
    var = sum((m - grand) ** 2 for m in means) / (batches - 1)
    return grand, math.sqrt(var / batches)


def summarize(records, eps_list=()):
    """Mean and standard error of every recorded observable."""
    out = {}
    for name, values in (
        ("largest_fraction", [r.largest_fraction for r in records]),
        ("k_over_n", [r.k_over_n for r in records]),
        ("acyclic", [1.0 * r.acyclic for r in records]),
        ("connected", [1.0 * r.connected for r in records]),
    ):
        mean, err = batched_means(values)
        out[name] = {"mean": fmt17(mean), "stderr": fmt17(err)}
    v_eps = []
    for i, eps in enumerate(eps_list):
        mean, err = batched_means([r.v_eps_fraction[i] for r in records])
        v_eps.append({"eps": fmt17(eps), "mean": fmt17(mean), "stderr": fmt17(err)})
    if v_eps:
        out["v_eps_fraction"] = v_eps
    return out


def samples_csv_lines(records, eps_count=0):
    """CSV rows for a record stream; flags as 0/1, reals at 17 digits."""
    header = "sweep,largest_fraction,k_over_n,acyclic,connected"
    if eps_count == 1:
        header += ",v_eps_fraction"
    else:
        header += "".join(f",v_eps_fraction_{i + 1}" for i in range(eps_count))
    yield header
    for r in records:
        row = (
            f"{r.sweep},{fmt17(r.largest_fraction)},{fmt17(r.k_over_n)},"
            f"{int(r.acyclic)},{int(r.connected)}"
        )
        for v in r.v_eps_fraction:
            row += f",{fmt17(v)}"
        yield row
