"""Cluster-popping: exact sampling of root-connected subgraphs.

Target distribution over arc subsets S with every vertex reaching the root:
pi(S) proportional to prod_{a in S}(1-p_a) * prod_{a not in S} p_a.

Bad events are minimal clusters (vertex sets avoiding the root with no
outgoing arc and no proper sub-cluster); vbl(B_C) is all arcs leaving
vertices of C.  Two samplers are provided: the round-based one, which pops
all minimal clusters of the current subgraph each round, and a dynamic
Tarjan variant that resamples a sink component the moment the depth-first
search certifies it.  Under a shared resampling table both consume the same
draws and return the same subset.
"""

import time

import numpy as np

from . import _kernels
from .errors import (DrawBudgetExceeded, ExtremalityViolation,
                     InfeasibleInstanceError, InvalidGraphError,
                     PopVerificationError)
from .graph import is_root_connected
from .prs import DEFAULT_MAX_DRAWS, PrsInstance, RunStats
from .tables import derive_seeds

__all__ = ["find_minimal_clusters", "sample_naive", "sample_tarjan",
           "batch_sample", "cluster_prs_instance"]


def _kernel_args(d, p_override=None):
    out_start, out_arc = d.out_csr()
    p = d.p if p_override is None else np.asarray(p_override, dtype=np.float64)
    if p.shape != (d.m,):
        raise InvalidGraphError("p_override must have one value per arc")
    if not (np.all(p >= 0.0) and np.all(p < 1.0)):
        raise InvalidGraphError("arc probabilities must lie in [0, 1)")
    return (d.n, d.m, out_start, out_arc,
            np.ascontiguousarray(d.head), np.ascontiguousarray(d.tail), p)


def find_minimal_clusters(d, subset, r):
    """All minimal clusters of (V, subset), as sorted vertex tuples.

    These are exactly the sink SCCs of the subgraph that avoid r: a sink
    SCC avoiding r is a cluster with no proper sub-cluster (strong
    connectivity would let any proper sub-cluster leak an arc), and
    conversely every minimal cluster is strongly connected, hence a sink
    SCC.  Ordered by smallest member.
    """
    if not (0 <= r < d.n):
        raise InvalidGraphError(f"root {r} out of range")
    subset = np.ascontiguousarray(subset, dtype=np.bool_)
    if subset.shape != (d.m,):
        raise InvalidGraphError("subset length must equal the arc count")
    n, m, out_start, out_arc, head, tail, _ = _kernel_args(d)
    scratch = [np.empty(n, np.int64) for _ in range(6)]
    comp_sink = np.empty(n, np.bool_)
    onstack = np.empty(n, np.bool_)
    mc = np.empty(n, np.bool_)
    vindex, vlow, comp, vstack, wv, wpos = scratch
    k = _kernels.mark_minimal_clusters(
        n, m, out_start, out_arc, head, tail, subset, r,
        vindex, vlow, onstack, comp, vstack, wv, wpos, comp_sink, mc)
    if k == 0:
        return []
    groups = {}
    for v in range(n):
        if mc[v]:
            groups.setdefault(int(comp[v]), []).append(v)
    return sorted((tuple(sorted(g)) for g in groups.values()), key=lambda t: t[0])


def _check_preconditions(d, r):
    if not (0 <= r < d.n):
        raise InvalidGraphError(f"root {r} out of range")
    if not is_root_connected(d, np.ones(d.m, dtype=bool), r):
        raise InfeasibleInstanceError(
            "graph is not root-connected; no root-connected subgraph exists")


def _raise_for(status, max_draws):
    if status == _kernels.BUDGET_EXCEEDED:
        raise DrawBudgetExceeded(max_draws)
    if status == _kernels.EXTREMALITY_VIOLATION:
        raise ExtremalityViolation("simultaneous minimal clusters overlapped")
    if status == _kernels.POP_NOT_MINIMAL:
        raise PopVerificationError(
            "a popped vertex set is not a minimal cluster of the current subgraph")


def sample_naive(d, r, table, p_override=None, assert_extremal=False,
                 max_draws=DEFAULT_MAX_DRAWS):
    """Round-based cluster-popping; returns (arc subset, RunStats)."""
    _check_preconditions(d, r)
    t0 = time.perf_counter()
    n, m, out_start, out_arc, head, tail, p = _kernel_args(d, p_override)
    per_var = np.zeros(m, dtype=np.int64)
    status, S, resampled, rounds = _kernels.cluster_naive_run(
        n, m, out_start, out_arc, head, tail, p, r,
        np.uint64(table.seed), table.cursors, per_var,
        max_draws, assert_extremal)
    _raise_for(status, max_draws)
    stats = RunStats(init_draws=m, resampled_vars=int(resampled),
                     rounds=int(rounds), per_variable_resamples=per_var,
                     wall_time=time.perf_counter() - t0)
    return S, stats.validate()


def sample_tarjan(d, r, table, p_override=None, verify_pops=False,
                  max_draws=DEFAULT_MAX_DRAWS):
    """Dynamic-Tarjan cluster-popping; same output law (and, for a shared
    table, the same output) as sample_naive.

    verify_pops re-checks every popped vertex set against the independent
    minimal-cluster finder; meant for tests and debugging.
    """
    _check_preconditions(d, r)
    t0 = time.perf_counter()
    n, m, out_start, out_arc, head, tail, p = _kernel_args(d, p_override)
    per_var = np.zeros(m, dtype=np.int64)
    status, S, resampled, rounds = _kernels.cluster_tarjan_run(
        n, m, out_start, out_arc, head, tail, p, r,
        np.uint64(table.seed), table.cursors, per_var,
        max_draws, verify_pops)
    _raise_for(status, max_draws)
    stats = RunStats(init_draws=m, resampled_vars=int(resampled),
                     rounds=int(rounds), per_variable_resamples=per_var,
                     wall_time=time.perf_counter() - t0)
    return S, stats.validate()


def batch_sample(d, r, master_seed, runs, algorithm="tarjan",
                 p_override=None, collect_keys=False, check=False,
                 max_draws=DEFAULT_MAX_DRAWS):
    """Many independent runs; run i uses seed derive_seed(master_seed, i).

    Returns a dict with per-run arrays (resampled, rounds, and subset
    bitmask keys when collect_keys and m <= 63) plus per-arc resample
    totals.  check enables the extremality assertion (naive) or pop
    verification (tarjan).
    """
    _check_preconditions(d, r)
    if algorithm not in ("naive", "tarjan"):
        raise ValueError(f"unknown algorithm {algorithm!r}")
    n, m, out_start, out_arc, head, tail, p = _kernel_args(d, p_override)
    if collect_keys and m > 63:
        raise ValueError("subset keys need m <= 63 arcs")
    seeds = derive_seeds(master_seed, runs)
    status, keys, resampled, rounds, pv_sum, pv_sumsq = _kernels.cluster_batch(
        n, m, out_start, out_arc, head, tail, p, r, seeds,
        algorithm == "tarjan", max_draws, collect_keys, check)
    _raise_for(status, max_draws)
    return {
        "keys": keys if collect_keys else None,
        "resampled": resampled,
        "rounds": rounds,
        "per_var_sum": pv_sum,
        "per_var_sumsq": pv_sumsq,
        "init_draws": m,
        "runs": runs,
    }


def cluster_prs_instance(d, r, p_override=None):
    """The cluster-popping instance for the generic engine.

    Variables are arcs (value True = arc present, drawn with u >= p_a so
    presence has probability 1 - p_a); occurring events are the minimal
    clusters of the current subgraph.
    """
    p = d.p if p_override is None else np.asarray(p_override, dtype=np.float64)
    out_start, out_arc = d.out_csr()

    def draw_value(a, u):
        return bool(u >= p[a])

    def occurring_events(assignment):
        subset = np.array([assignment[a] for a in range(d.m)], dtype=bool)
        events = []
        for cluster in find_minimal_clusters(d, subset, r):
            vbl = []
            for v in cluster:
                vbl.extend(int(out_arc[k])
                           for k in range(out_start[v], out_start[v + 1]))
            events.append((cluster, tuple(sorted(vbl))))
        return events

    return PrsInstance(variables=range(d.m), draw_value=draw_value,
                       occurring_events=occurring_events,
                       describe=f"cluster-popping(n={d.n}, m={d.m}, r={r})")
