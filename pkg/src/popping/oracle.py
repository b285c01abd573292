"""Brute-force ground truth on small instances.

Enumerates every assignment of a sampler's variables, classifies it as
perfect / exactly-one-bad-event / multi-event, and turns the counts into
the exact target distribution, the exact probability q_empty of a perfect
assignment, the per-event probabilities q_i, and the exact expected number
of resampled variables  sum_i q_i * |vbl(A_i)| / q_empty.

Cluster spaces are enumerated with vectorized bit arithmetic (subset index
bit a = arc a present) so that 2^20-subset graphs stay cheap; orientation
spaces likewise.  Arrow spaces for spanning trees are tiny on the tested
grids and use plain loops.
"""

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import binom

from .cycle_popping import assignment_strides, find_cycles
from .errors import InvalidGraphError

__all__ = [
    "ExactDistribution", "ExactSummary", "ClusterSpace",
    "exact_cluster_summary", "exact_cycle_summary", "exact_sink_summary",
    "exact_distribution", "tv_distance", "expected_empirical_tv",
]

_CHUNK_BITS = 18


class ExactDistribution:
    """A finite distribution over uint64 outcome keys."""

    def __init__(self, keys, probs):
        keys = np.asarray(keys, dtype=np.uint64)
        probs = np.asarray(probs, dtype=np.float64)
        order = np.argsort(keys)
        self.keys = keys[order]
        self.probs = probs[order]

    @classmethod
    def from_dict(cls, d):
        items = sorted(d.items())
        return cls(np.array([k for k, _ in items], dtype=np.uint64),
                   np.array([p for _, p in items], dtype=np.float64))

    @property
    def support_size(self):
        return int(self.keys.shape[0])

    def as_dict(self):
        return {int(k): float(p) for k, p in zip(self.keys, self.probs)}

    def prob_of(self, key):
        i = np.searchsorted(self.keys, np.uint64(key))
        if i < self.keys.shape[0] and self.keys[i] == np.uint64(key):
            return float(self.probs[i])
        return 0.0


def tv_distance(dist, sample_keys):
    """Total variation between an empirical sample and an exact distribution.

    Raises ValueError if the sample contains an outcome of probability zero:
    an exact sampler must never produce one.
    """
    sample_keys = np.asarray(sample_keys, dtype=np.uint64)
    n = sample_keys.shape[0]
    uniq, counts = np.unique(sample_keys, return_counts=True)
    pos = np.searchsorted(dist.keys, uniq)
    bad = (pos >= dist.keys.shape[0]) | (dist.keys[np.minimum(
        pos, dist.keys.shape[0] - 1)] != uniq)
    if np.any(bad):
        raise ValueError(
            f"sampled outcome(s) outside the exact support: {uniq[bad][:5]}")
    emp = np.zeros(dist.keys.shape[0], dtype=np.float64)
    emp[pos] = counts / n
    return 0.5 * float(np.abs(emp - dist.probs).sum())


def expected_empirical_tv(dist, n):
    """Exact E[TV] of an n-sample empirical distribution under the null.

    By linearity this is half the sum of per-outcome binomial mean absolute
    deviations, each given in closed form by E|X - np| =
    2 v (1-p) P(X = v) with v = floor(np) + 1.
    """
    p = dist.probs
    v = np.floor(n * p) + 1.0
    terms = 2.0 * v * (1.0 - p) * binom.pmf(v, n, p)
    return 0.5 * float(terms.sum()) / n


@dataclass
class ExactSummary:
    """Exact enumeration results for one instance."""

    kind: str
    q_empty: float
    events: dict = field(default_factory=dict)  # key -> (q_i, |vbl|)
    expected_resampled: float = 0.0
    multi_event_mass: float = 0.0  # counted but unused by the expectation
    distribution: ExactDistribution = None

    def validate(self):
        single = sum(q for q, _ in self.events.values())
        total = self.q_empty + single + self.multi_event_mass
        assert abs(total - 1.0) < 1e-9, f"classification masses sum to {total}"
        return self


# ---------------------------------------------------------------------------
# Cluster spaces (subsets of arcs)
# ---------------------------------------------------------------------------


class ClusterSpace:
    """Classification of every arc subset of a rooted digraph.

    For each subset: is it root-connected, how many minimal clusters does it
    have, and (when unique) which vertex set is the cluster.  Classification
    is probability-free; summaries for any arc-probability vector reuse it.
    """

    def __init__(self, d, r):
        if d.m > 24:
            raise InvalidGraphError("cluster enumeration guard: m <= 24")
        if not (0 <= r < d.n):
            raise InvalidGraphError(f"root {r} out of range")
        self.d = d
        self.r = r
        self.size = 1 << d.m
        self.root_connected = np.empty(self.size, dtype=bool)
        self.n_clusters = np.empty(self.size, dtype=np.uint8)
        self.cluster_id = np.zeros(self.size, dtype=np.uint32)
        self._classify()
        outdeg = np.zeros(d.n, dtype=np.int64)
        for a in range(d.m):
            outdeg[d.tail[a]] += 1
        self._outdeg = outdeg

    def _classify(self):
        d, r = self.d, self.r
        n, m = d.n, d.m
        tails = d.tail
        heads = d.head
        chunk = 1 << min(_CHUNK_BITS, m)
        for base in range(0, self.size, chunk):
            idx = np.arange(base, base + chunk, dtype=np.uint64)
            present = [((idx >> np.uint64(a)) & np.uint64(1)).astype(bool)
                       for a in range(m)]
            reach = [[None] * n for _ in range(n)]
            for u in range(n):
                for v in range(n):
                    reach[u][v] = np.zeros(chunk, dtype=bool) if u != v else \
                        np.ones(chunk, dtype=bool)
            for a in range(m):
                reach[tails[a]][heads[a]] |= present[a]
            for k in range(n):
                for i in range(n):
                    rik = reach[i][k]
                    for j in range(n):
                        if i != j:
                            reach[i][j] |= rik & reach[k][j]
            same = [[reach[u][v] & reach[v][u] for v in range(n)]
                    for u in range(n)]
            rc = np.ones(chunk, dtype=bool)
            for u in range(n):
                rc &= reach[u][r]
            sinkmem = []
            for u in range(n):
                s = np.ones(chunk, dtype=bool)
                for v in range(n):
                    if v != u:
                        s &= ~reach[u][v] | same[u][v]
                sinkmem.append(s)
            mc = [sinkmem[u] & ~same[u][r] for u in range(n)]
            count = np.zeros(chunk, dtype=np.uint8)
            cid = np.zeros(chunk, dtype=np.uint32)
            for u in range(n):
                rep = mc[u].copy()
                for v in range(u):
                    rep &= ~same[u][v]
                count += rep.astype(np.uint8)
                cid |= mc[u].astype(np.uint32) << np.uint32(u)
            sl = slice(base, base + chunk)
            self.root_connected[sl] = rc
            self.n_clusters[sl] = count
            self.cluster_id[sl] = np.where(count == 1, cid, 0)

    def _weights(self, p):
        p = np.asarray(p, dtype=np.float64)
        if p.ndim == 0:
            p = np.full(self.d.m, float(p))
        wt = np.empty(self.size, dtype=np.float64)
        chunk = 1 << min(_CHUNK_BITS, self.d.m)
        for base in range(0, self.size, chunk):
            idx = np.arange(base, base + chunk, dtype=np.uint64)
            w = np.ones(chunk, dtype=np.float64)
            for a in range(self.d.m):
                present = ((idx >> np.uint64(a)) & np.uint64(1)).astype(bool)
                w *= np.where(present, 1.0 - p[a], p[a])
            wt[base:base + chunk] = w
        return wt

    def vbl_size(self, cid):
        """|vbl(B_C)| for a cluster bitmask: all arcs leaving C."""
        return int(sum(self._outdeg[u] for u in range(self.d.n)
                       if (cid >> u) & 1))

    def summary(self, p=None):
        p = self.d.p if p is None else p
        wt = self._weights(p)
        q_empty = float(wt[self.root_connected].sum())
        if q_empty <= 0.0:
            raise InvalidGraphError("q_empty = 0: no root-connected subgraph")
        unique = self.n_clusters == 1
        events = {}
        if np.any(unique):
            sums = np.bincount(self.cluster_id[unique], weights=wt[unique])
            for cid in np.nonzero(sums)[0]:
                events[int(cid)] = (float(sums[cid]), self.vbl_size(int(cid)))
        multi = float(wt[self.n_clusters > 1].sum())
        expected = sum(q * s for q, s in events.values()) / q_empty
        keys = np.nonzero(self.root_connected)[0].astype(np.uint64)
        probs = wt[self.root_connected] / q_empty
        return ExactSummary(kind="cluster", q_empty=q_empty, events=events,
                            expected_resampled=expected,
                            multi_event_mass=multi,
                            distribution=ExactDistribution(keys, probs)
                            ).validate()


def exact_cluster_summary(d, r, p=None):
    """Exact enumeration for cluster-popping on (d, r)."""
    return ClusterSpace(d, r).summary(p)


# ---------------------------------------------------------------------------
# Arrow spaces (spanning trees)
# ---------------------------------------------------------------------------


def exact_cycle_summary(g, r):
    """Exact enumeration for cycle-popping on (g, r).

    Event keys are cycles rotated to start at their smallest vertex; outcome
    keys use the same mixed-radix packing as the batch sampler.
    """
    start, nbr, eid = g.adjacency()
    w = g.w if g.w is not None else np.ones(g.m, dtype=np.float64)
    others = [v for v in range(g.n) if v != r]
    degs = [int(start[v + 1] - start[v]) for v in others]
    space = 1
    for dg in degs:
        if dg == 0:
            raise InvalidGraphError("isolated vertex; no spanning tree")
        space *= dg
        if space > 10 ** 7:
            raise InvalidGraphError("arrow enumeration guard: <= 1e7 assignments")
    strides = assignment_strides(g, r)
    totw = {v: float(sum(w[eid[k]] for k in range(start[v], start[v + 1])))
            for v in others}
    q_empty = 0.0
    events = {}
    multi = 0.0
    dist = {}
    for positions in itertools.product(*(range(dg) for dg in degs)):
        prob = 1.0
        sigma = {}
        key = 0
        for v, pos in zip(others, positions):
            k = start[v] + pos
            prob *= float(w[eid[k]]) / totw[v]
            sigma[v] = int(nbr[k])
            key += pos * int(strides[v])
        cycles = find_cycles(sigma)
        if not cycles:
            q_empty += prob
            dist[key] = prob
        elif len(cycles) == 1:
            c = cycles[0]
            q, s = events.get(c, (0.0, len(c)))
            events[c] = (q + prob, len(c))
        else:
            multi += prob
    if q_empty <= 0.0:
        raise InvalidGraphError("q_empty = 0: no spanning tree")
    expected = sum(q * s for q, s in events.values()) / q_empty
    dist = {k: p / q_empty for k, p in dist.items()}
    return ExactSummary(kind="cycle", q_empty=q_empty, events=events,
                        expected_resampled=expected, multi_event_mass=multi,
                        distribution=ExactDistribution.from_dict(dist)
                        ).validate()


# ---------------------------------------------------------------------------
# Orientation spaces (sink-free orientations)
# ---------------------------------------------------------------------------


def exact_sink_summary(g):
    """Exact enumeration for sink-popping on g (uniform orientation draws)."""
    if g.m > 24:
        raise InvalidGraphError("orientation enumeration guard: m <= 24")
    size = 1 << g.m
    unit = 1.0 / size
    degrees = g.degrees()
    q_empty = 0.0
    multi = 0.0
    sink_counts = np.zeros(g.n, dtype=np.int64)
    key_chunks = []
    chunk = 1 << min(_CHUNK_BITS, g.m)
    for base in range(0, size, chunk):
        idx = np.arange(base, base + chunk, dtype=np.uint64)
        outdeg = np.zeros((g.n, chunk), dtype=np.int16)
        for e, (u, v) in enumerate(g.edges):
            bit = ((idx >> np.uint64(e)) & np.uint64(1)).astype(bool)
            outdeg[u] += ~bit
            outdeg[v] += bit
        is_sink = outdeg == 0
        nsinks = is_sink.sum(axis=0)
        q_empty += float((nsinks == 0).sum()) * unit
        multi += float((nsinks > 1).sum()) * unit
        unique = nsinks == 1
        sink_counts += (unique & is_sink).sum(axis=1)
        key_chunks.append(idx[nsinks == 0])
    if q_empty <= 0.0:
        raise InvalidGraphError("q_empty = 0: a component is a tree")
    events = {v: (int(sink_counts[v]) * unit, int(degrees[v]))
              for v in range(g.n) if sink_counts[v]}
    expected = sum(q * s for q, s in events.values()) / q_empty
    keys = np.concatenate(key_chunks)
    probs = np.full(keys.shape[0], unit / q_empty)
    return ExactSummary(kind="sink", q_empty=q_empty, events=events,
                        expected_resampled=expected, multi_event_mass=multi,
                        distribution=ExactDistribution(keys, probs)
                        ).validate()


def exact_distribution(kind, *args, **kwargs):
    """Exact target distribution for a sampler kind
    ("cluster", "cycle", "sink")."""
    if kind == "cluster":
        return exact_cluster_summary(*args, **kwargs).distribution
    if kind == "cycle":
        return exact_cycle_summary(*args, **kwargs).distribution
    if kind == "sink":
        return exact_sink_summary(*args, **kwargs).distribution
    raise ValueError(f"unknown sampler kind {kind!r}")
