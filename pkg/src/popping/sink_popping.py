"""Sink-popping: exact uniform sampling of sink-free orientations.

Each edge carries a fair orientation bit; for a stored edge (u, v) with
u < v, bit 0 means u -> v and bit 1 means v -> u.  A vertex with no
out-edge is a sink; popping a sink re-orients all its incident edges.  A
sink-free orientation exists iff no connected component is a tree, and the
sampler requires that.
"""

import time

import numpy as np

from . import _kernels
from .errors import (DrawBudgetExceeded, ExtremalityViolation,
                     InfeasibleInstanceError)
from .graph import connected_components, has_tree_component
from .prs import DEFAULT_MAX_DRAWS, PrsInstance, RunStats
from .tables import derive_seeds

__all__ = ["find_sinks", "sample", "batch_sample", "sink_prs_instance",
           "orientation_key"]


def find_sinks(g, orientation):
    """All vertices with zero out-edges under the orientation.

    Bit 0 on edge (u, v) (u < v as stored) means u -> v.  Returned sinks are
    pairwise non-adjacent: a sink's neighbors all have an out-edge into it.
    """
    orientation = np.asarray(orientation)
    outdeg = np.zeros(g.n, dtype=np.int64)
    for e, (u, v) in enumerate(g.edges):
        if orientation[e] == 0:
            outdeg[u] += 1
        else:
            outdeg[v] += 1
    return [v for v in range(g.n) if outdeg[v] == 0]


def _component_arrays(g, comp):
    comp_set = set(comp)
    edge_ids = [e for e, (u, v) in enumerate(g.edges) if int(u) in comp_set]
    local = {v: i for i, v in enumerate(comp)}
    eu = np.array([local[int(g.edges[e, 0])] for e in edge_ids], dtype=np.int64)
    ev = np.array([local[int(g.edges[e, 1])] for e in edge_ids], dtype=np.int64)
    var_id = np.array(edge_ids, dtype=np.int64)
    nloc = len(comp)
    deg = np.zeros(nloc + 1, dtype=np.int64)
    for a, b in zip(eu, ev):
        deg[a + 1] += 1
        deg[b + 1] += 1
    start = np.cumsum(deg)
    adj = np.empty(2 * len(edge_ids), dtype=np.int64)
    fill = start[:-1].copy()
    for a, b in zip(eu, ev):
        adj[fill[a]] = b
        fill[a] += 1
        adj[fill[b]] = a
        fill[b] += 1
    return nloc, eu, ev, var_id, start, adj


def sample(g, table, assert_extremal=False, max_draws=DEFAULT_MAX_DRAWS):
    """Sink-popping; returns (orientation bits, RunStats).

    Disconnected inputs run component by component (their draws live on
    disjoint edge streams, so this matches a global run draw for draw) and
    the stats are summed.
    """
    if has_tree_component(g):
        raise InfeasibleInstanceError(
            "a connected component is a tree; no sink-free orientation exists")
    t0 = time.perf_counter()
    orientation = np.zeros(g.m, dtype=np.uint8)
    per_var = np.zeros(g.m, dtype=np.int64)
    resampled = 0
    rounds = 0
    for comp in connected_components(g):
        nloc, eu, ev, var_id, adj_start, adj_v = _component_arrays(g, comp)
        status, orient, res, rnd = _kernels.sink_run(
            nloc, len(var_id), eu, ev, var_id, np.uint64(table.seed),
            table.cursors, per_var, max_draws, assert_extremal,
            adj_start, adj_v)
        if status == _kernels.BUDGET_EXCEEDED:
            raise DrawBudgetExceeded(max_draws)
        if status == _kernels.EXTREMALITY_VIOLATION:
            raise ExtremalityViolation("adjacent sinks occurred together")
        orientation[var_id] = orient
        resampled += int(res)
        rounds += int(rnd)
    stats = RunStats(init_draws=g.m, resampled_vars=resampled, rounds=rounds,
                     per_variable_resamples=per_var,
                     wall_time=time.perf_counter() - t0)
    return orientation, stats.validate()


def batch_sample(g, master_seed, runs, collect_keys=False, check=False,
                 max_draws=DEFAULT_MAX_DRAWS):
    """Many independent runs on a connected graph."""
    if has_tree_component(g):
        raise InfeasibleInstanceError(
            "a connected component is a tree; no sink-free orientation exists")
    if len(connected_components(g)) != 1:
        raise InfeasibleInstanceError("batch_sample expects a connected graph")
    if collect_keys and g.m > 63:
        raise ValueError("orientation keys need m <= 63 edges")
    eu = np.ascontiguousarray(g.edges[:, 0])
    ev = np.ascontiguousarray(g.edges[:, 1])
    adj_start, adj_v, _ = g.adjacency()
    seeds = derive_seeds(master_seed, runs)
    status, keys, resampled, rounds, pv_sum, pv_sumsq = _kernels.sink_batch(
        g.n, g.m, eu, ev, seeds, max_draws, collect_keys, check,
        adj_start, adj_v)
    if status == _kernels.BUDGET_EXCEEDED:
        raise DrawBudgetExceeded(max_draws)
    if status == _kernels.EXTREMALITY_VIOLATION:
        raise ExtremalityViolation("adjacent sinks occurred together")
    return {
        "keys": keys if collect_keys else None,
        "resampled": resampled,
        "rounds": rounds,
        "per_var_sum": pv_sum,
        "per_var_sumsq": pv_sumsq,
        "init_draws": g.m,
        "runs": runs,
    }


def orientation_key(orientation):
    """Orientation bits -> integer bitmask."""
    key = 0
    for e, bit in enumerate(orientation):
        if bit:
            key |= 1 << e
    return key


def sink_prs_instance(g):
    """The sink-popping instance for the generic engine.

    Variables are edges (orientation bits, fair); each occurring event is a
    sink vertex with its incident edges as the variable set.
    """
    def draw_value(e, u):
        return 1 if u >= 0.5 else 0

    start, _, eid = g.adjacency()

    def occurring_events(assignment):
        orientation = [assignment[e] for e in range(g.m)]
        events = []
        for v in find_sinks(g, orientation):
            vbl = tuple(sorted(int(eid[k])
                               for k in range(start[v], start[v + 1])))
            events.append((v, vbl))
        return events

    return PrsInstance(variables=range(g.m), draw_value=draw_value,
                       occurring_events=occurring_events,
                       describe=f"sink-popping(n={g.n}, m={g.m})")
