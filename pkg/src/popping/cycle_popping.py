"""Cycle-popping: exact sampling of edge-weighted rooted spanning trees.

Every non-root vertex carries an arrow to one of its neighbors, chosen with
probability proportional to the edge weight.  Arrow configurations without
cycles are exactly the spanning trees oriented toward the root; cycles are
the bad events, and popping one resamples the arrows of its vertices.
"""

import time

import numpy as np

from . import _kernels
from .errors import (DrawBudgetExceeded, ExtremalityViolation,
                     InfeasibleInstanceError, InvalidGraphError)
from .graph import is_connected
from .prs import DEFAULT_MAX_DRAWS, PrsInstance, RunStats
from .tables import derive_seeds

__all__ = ["draw_arrow", "find_cycles", "sample", "batch_sample",
           "cycle_prs_instance", "arrows_to_neighbors", "tree_edges",
           "assignment_key"]


def _weights(g):
    return g.w if g.w is not None else np.ones(g.m, dtype=np.float64)


def _cumulative_weights(g):
    start, nbr, eid = g.adjacency()
    w = _weights(g)
    cumw = np.empty(2 * g.m, dtype=np.float64)
    for v in range(g.n):
        acc = 0.0
        for k in range(start[v], start[v + 1]):
            acc += w[eid[k]]
            cumw[k] = acc
    return start, nbr, eid, cumw


def draw_arrow(g, v, table):
    """Draw an out-neighbor of v with probability proportional to the edge
    weight; returns (neighbor vertex, adjacency position)."""
    start, nbr, _, cumw = _cumulative_weights(g)
    lo, hi = int(start[v]), int(start[v + 1])
    if hi == lo:
        raise InvalidGraphError(f"vertex {v} is isolated")
    pos = int(_kernels.pick_neighbor(table.draw(v), lo, hi, cumw))
    return int(nbr[lo + pos]), pos


def find_cycles(sigma, root=None):
    """All directed cycles of the functional graph sigma (vertex -> vertex).

    sigma maps each non-root vertex to a neighbor; entries may be -1 (no
    arrow).  Since out-degrees are at most one, cycles are vertex-disjoint;
    found by pointer-following with three-color marking in O(n).  Each cycle
    is rotated to start at its smallest vertex.
    """
    sigma = dict(sigma) if not isinstance(sigma, dict) else dict(sigma)
    color = {}
    cycles = []
    for v0 in sigma:
        if color.get(v0, 0) != 0:
            continue
        path = []
        v = v0
        while color.get(v, 0) == 0 and sigma.get(v, -1) != -1:
            color[v] = 1
            path.append(v)
            v = sigma[v]
        if color.get(v, 0) == 1:
            i = path.index(v)
            cyc = path[i:]
            k = cyc.index(min(cyc))
            cycles.append(tuple(cyc[k:] + cyc[:k]))
        for u in path:
            color[u] = 2
    return sorted(cycles)


def sample(g, r, table, assert_extremal=False, max_draws=DEFAULT_MAX_DRAWS):
    """Cycle-popping; returns (sigma_pos, RunStats).

    sigma_pos[v] is the adjacency position of v's arrow (-1 at the root);
    the induced arcs form a spanning tree oriented toward r, distributed
    with probability proportional to the product of chosen edge weights.
    """
    if not (0 <= r < g.n):
        raise InvalidGraphError(f"root {r} out of range")
    if not is_connected(g):
        raise InfeasibleInstanceError("graph is disconnected; no spanning tree")
    t0 = time.perf_counter()
    start, nbr, _, cumw = _cumulative_weights(g)
    per_var = np.zeros(g.n, dtype=np.int64)
    status, sigma, resampled, rounds = _kernels.cycle_run(
        g.n, start, nbr, cumw, r, np.uint64(table.seed), table.cursors,
        per_var, max_draws, assert_extremal)
    if status == _kernels.BUDGET_EXCEEDED:
        raise DrawBudgetExceeded(max_draws)
    if status == _kernels.EXTREMALITY_VIOLATION:
        raise ExtremalityViolation("occurring cycles were not vertex-disjoint")
    stats = RunStats(init_draws=g.n - 1, resampled_vars=int(resampled),
                     rounds=int(rounds), per_variable_resamples=per_var,
                     wall_time=time.perf_counter() - t0)
    return sigma, stats.validate()


def batch_sample(g, r, master_seed, runs, collect_keys=False, check=False,
                 max_draws=DEFAULT_MAX_DRAWS):
    """Many independent runs; keys pack sigma positions in mixed radix."""
    if not (0 <= r < g.n):
        raise InvalidGraphError(f"root {r} out of range")
    if not is_connected(g):
        raise InfeasibleInstanceError("graph is disconnected; no spanning tree")
    start, nbr, _, cumw = _cumulative_weights(g)
    stride = assignment_strides(g, r)
    if stride is None and collect_keys:
        raise ValueError("assignment keys overflow 64 bits for this graph")
    if stride is None:
        stride = np.zeros(g.n, dtype=np.uint64)
    seeds = derive_seeds(master_seed, runs)
    status, keys, resampled, rounds, pv_sum, pv_sumsq = _kernels.cycle_batch(
        g.n, start, nbr, stride, r, seeds, max_draws, collect_keys, check, cumw)
    if status == _kernels.BUDGET_EXCEEDED:
        raise DrawBudgetExceeded(max_draws)
    if status == _kernels.EXTREMALITY_VIOLATION:
        raise ExtremalityViolation("occurring cycles were not vertex-disjoint")
    return {
        "keys": keys if collect_keys else None,
        "resampled": resampled,
        "rounds": rounds,
        "per_var_sum": pv_sum,
        "per_var_sumsq": pv_sumsq,
        "init_draws": g.n - 1,
        "runs": runs,
    }


def assignment_strides(g, r):
    """Mixed-radix strides for packing an arrow assignment into a uint64.

    key = sum over non-root v of pos(v) * stride[v], vertices in id order.
    Returns None if the assignment space exceeds 2**63.
    """
    deg = g.degrees()
    stride = np.zeros(g.n, dtype=np.uint64)
    acc = 1
    for v in range(g.n):
        if v == r:
            continue
        stride[v] = acc
        acc *= max(int(deg[v]), 1)
        if acc > 2 ** 63:
            return None
    return stride


def assignment_key(g, r, sigma_pos):
    """Pack an arrow assignment (adjacency positions) into its uint64 key."""
    stride = assignment_strides(g, r)
    if stride is None:
        raise ValueError("assignment keys overflow 64 bits for this graph")
    key = 0
    for v in range(g.n):
        if v != r:
            key += int(sigma_pos[v]) * int(stride[v])
    return key


def arrows_to_neighbors(g, sigma_pos):
    """Adjacency positions -> pointed-at neighbor per vertex (-1 at root)."""
    start, nbr, _, _ = _cumulative_weights(g)
    out = np.full(g.n, -1, dtype=np.int64)
    for v in range(g.n):
        if sigma_pos[v] >= 0:
            out[v] = nbr[start[v] + sigma_pos[v]]
    return out


def tree_edges(g, sigma_pos):
    """Edge ids used by an arrow assignment (the spanning tree's edges)."""
    start, _, eid, _ = _cumulative_weights(g)
    return sorted(int(eid[start[v] + sigma_pos[v]])
                  for v in range(g.n) if sigma_pos[v] >= 0)


def cycle_prs_instance(g, r):
    """The cycle-popping instance for the generic engine.

    Variables are non-root vertices; values are adjacency positions drawn by
    cumulative weight; occurring events are the cycles of the induced
    functional graph.
    """
    start, nbr, _, cumw = _cumulative_weights(g)

    def draw_value(v, u):
        return int(_kernels.pick_neighbor(u, int(start[v]), int(start[v + 1]),
                                          cumw))

    def occurring_events(assignment):
        sigma = {v: int(nbr[start[v] + pos]) for v, pos in assignment.items()}
        return [(cyc, tuple(sorted(cyc))) for cyc in find_cycles(sigma)]

    return PrsInstance(variables=[v for v in range(g.n) if v != r],
                       draw_value=draw_value,
                       occurring_events=occurring_events,
                       describe=f"cycle-popping(n={g.n}, m={g.m}, r={r})")
