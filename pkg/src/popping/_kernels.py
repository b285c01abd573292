"""Numba kernels shared by the samplers.

Everything in here operates on flat numpy arrays (CSR adjacency, cursor
arrays, presence masks) so that batch verification runs at native speed.
The Python-facing modules wrap these kernels and own all validation.

Status codes returned by run kernels:
    0  success
    1  draw budget exceeded
    2  extremality check failed
    3  a popped vertex set failed minimal-cluster verification
"""

import numpy as np
from numba import njit, uint64

UNDEF = np.int64(-1)

OK = 0
BUDGET_EXCEEDED = 1
EXTREMALITY_VIOLATION = 2
POP_NOT_MINIMAL = 3

# Odd 64-bit mixing constants (golden ratio and the splitmix64 multipliers).
_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_CURSOR_SALT = np.uint64(0xD6E8FEB86659FD93)
_SEED_SALT = np.uint64(0xA0761D6478BD642F)

_INV_2_53 = 1.0 / 9007199254740992.0  # 2**-53


@njit(cache=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> uint64(30))) * _MIX1
    z = (z ^ (z >> uint64(27))) * _MIX2
    return z ^ (z >> uint64(31))


@njit(cache=True, inline="always")
def table_value_bits(seed, var, cursor):
    """64 hashed bits at position (seed, var, cursor); pure function."""
    h = _mix64(uint64(seed) + _GAMMA)
    h = _mix64(h ^ (uint64(var + 1) * _GAMMA))
    h = _mix64(h ^ (uint64(cursor + 1) * _CURSOR_SALT))
    return h


@njit(cache=True, inline="always")
def table_value(seed, var, cursor):
    """Uniform float in [0, 1) at position (seed, var, cursor)."""
    return float(table_value_bits(seed, var, cursor) >> uint64(11)) * _INV_2_53


@njit(cache=True, inline="always")
def fold_seed(seed, index):
    """Derive a child seed; distinct salt keeps it off the table streams."""
    return _mix64((uint64(seed) ^ _SEED_SALT) + uint64(index + 1) * _GAMMA)


# ---------------------------------------------------------------------------
# Strongly connected components / minimal clusters
# ---------------------------------------------------------------------------


@njit(cache=True)
def mark_minimal_clusters(n, m, out_start, out_arc, head, tail, present, root,
                          vindex, vlow, onstack, comp, vstack, wv, wpos,
                          comp_sink, mc):
    """Mark vertices lying in minimal clusters of the subgraph `present`.

    A minimal cluster is exactly a sink SCC (no outgoing arc in `present`)
    that avoids the root: strong connectivity rules out proper sub-clusters,
    and conversely any minimal cluster is strongly connected, hence a sink
    SCC.  Iterative Tarjan; fills mc[v] and comp[v], returns the number of
    minimal clusters.
    """
    for v in range(n):
        vindex[v] = UNDEF
        onstack[v] = False
        mc[v] = False
    idx = 0
    ncomp = 0
    vsp = 0
    for s in range(n):
        if vindex[s] != UNDEF:
            continue
        wv[0] = s
        wpos[0] = 0
        wsp = 1
        while wsp > 0:
            v = wv[wsp - 1]
            pos = wpos[wsp - 1]
            if pos == 0:
                vindex[v] = idx
                vlow[v] = idx
                idx += 1
                vstack[vsp] = v
                vsp += 1
                onstack[v] = True
            deg = out_start[v + 1] - out_start[v]
            advanced = False
            while pos < deg:
                a = out_arc[out_start[v] + pos]
                pos += 1
                if not present[a]:
                    continue
                w = head[a]
                if vindex[w] == UNDEF:
                    wpos[wsp - 1] = pos
                    wv[wsp] = w
                    wpos[wsp] = 0
                    wsp += 1
                    advanced = True
                    break
                elif onstack[w]:
                    if vindex[w] < vlow[v]:
                        vlow[v] = vindex[w]
            if advanced:
                continue
            # v finished
            if vlow[v] == vindex[v]:
                while True:
                    w = vstack[vsp - 1]
                    vsp -= 1
                    onstack[w] = False
                    comp[w] = ncomp
                    if w == v:
                        break
                ncomp += 1
            wsp -= 1
            if wsp > 0:
                pv = wv[wsp - 1]
                if vlow[v] < vlow[pv]:
                    vlow[pv] = vlow[v]
    # Sink components: no present arc leaving the component.
    for c in range(ncomp):
        comp_sink[c] = True
    for a in range(m):
        if present[a] and comp[tail[a]] != comp[head[a]]:
            comp_sink[comp[tail[a]]] = False
    rc = comp[root]
    k = 0
    for c in range(ncomp):
        if comp_sink[c] and c != rc:
            k += 1
    if k > 0:
        for v in range(n):
            c = comp[v]
            mc[v] = comp_sink[c] and c != rc
    return k


@njit(cache=True)
def cluster_naive_run(n, m, out_start, out_arc, head, tail, p, root,
                      seed, cursors, per_var, max_draws, check_extremal):
    """One round-based cluster-popping run; returns (status, S, resampled, rounds)."""
    S = np.empty(m, np.bool_)
    for a in range(m):
        S[a] = table_value(seed, a, cursors[a]) >= p[a]
        cursors[a] += 1
    draws = m
    resampled = 0
    rounds = 0
    vindex = np.empty(n, np.int64)
    vlow = np.empty(n, np.int64)
    onstack = np.empty(n, np.bool_)
    comp = np.empty(n, np.int64)
    vstack = np.empty(n, np.int64)
    wv = np.empty(n, np.int64)
    wpos = np.empty(n, np.int64)
    comp_sink = np.empty(n, np.bool_)
    mc = np.empty(n, np.bool_)
    while True:
        k = mark_minimal_clusters(n, m, out_start, out_arc, head, tail, S,
                                  root, vindex, vlow, onstack, comp, vstack,
                                  wv, wpos, comp_sink, mc)
        if k == 0:
            return OK, S, resampled, rounds
        if check_extremal:
            # A present arc out of a minimal cluster must stay inside it,
            # and the root must not be in any cluster.
            if mc[root]:
                return EXTREMALITY_VIOLATION, S, resampled, rounds
            for a in range(m):
                if S[a] and mc[tail[a]] and comp[head[a]] != comp[tail[a]]:
                    return EXTREMALITY_VIOLATION, S, resampled, rounds
        rounds += 1
        for a in range(m):
            if mc[tail[a]]:
                S[a] = table_value(seed, a, cursors[a]) >= p[a]
                cursors[a] += 1
                per_var[a] += 1
                resampled += 1
        draws = m + resampled
        if draws > max_draws:
            return BUDGET_EXCEEDED, S, resampled, rounds


@njit(cache=True)
def cluster_tarjan_run(n, m, out_start, out_arc, head, tail, p, root,
                       seed, cursors, per_var, max_draws, verify_pops):
    """One dynamic-Tarjan cluster-popping run.

    Single DFS sweep that resamples a sink component the moment the lowlink
    test exposes it (v.root == v.index), then restarts the DFS at v.  Indexed
    vertices stay on the vertex stack, so the stack order is index order and
    popping back to v removes exactly the vertices indexed after v.  The
    global index counter is decremented once per popped vertex to keep
    `index - 1` equal to the number of currently indexed vertices.

    With verify_pops set, every popped set is independently checked to be a
    minimal cluster of the current arc subset.
    """
    R = np.empty(m, np.bool_)
    for a in range(m):
        R[a] = table_value(seed, a, cursors[a]) >= p[a]
        cursors[a] += 1
    resampled = 0
    rounds = 0
    vindex = np.full(n, UNDEF, np.int64)
    vroot = np.full(n, UNDEF, np.int64)
    vstack = np.empty(n, np.int64)
    wv = np.empty(n, np.int64)
    wpos = np.empty(n, np.int64)
    in_pop = np.zeros(n, np.bool_)
    # scratch for the independent pop verification
    c_vindex = np.empty(n, np.int64)
    c_vlow = np.empty(n, np.int64)
    c_onstack = np.empty(n, np.bool_)
    c_comp = np.empty(n, np.int64)
    c_vstack = np.empty(n, np.int64)
    c_wv = np.empty(n, np.int64)
    c_wpos = np.empty(n, np.int64)
    c_comp_sink = np.empty(n, np.bool_)
    c_mc = np.empty(n, np.bool_)

    vindex[root] = 1
    vroot[root] = 1
    index = np.int64(2)
    vstack[0] = root
    vsp = 1

    for v0 in range(n):
        if vindex[v0] != UNDEF:
            continue
        vindex[v0] = index
        vroot[v0] = index
        index += 1
        vstack[vsp] = v0
        vsp += 1
        wv[0] = v0
        wpos[0] = 0
        wsp = 1
        while wsp > 0:
            v = wv[wsp - 1]
            pos = wpos[wsp - 1]
            deg = out_start[v + 1] - out_start[v]
            advanced = False
            while pos < deg:
                a = out_arc[out_start[v] + pos]
                pos += 1
                if not R[a]:
                    continue
                w = head[a]
                if vindex[w] == UNDEF:
                    wpos[wsp - 1] = pos
                    vindex[w] = index
                    vroot[w] = index
                    index += 1
                    vstack[vsp] = w
                    vsp += 1
                    wv[wsp] = w
                    wpos[wsp] = 0
                    wsp += 1
                    advanced = True
                    break
                else:
                    if vindex[w] < vroot[v]:
                        vroot[v] = vindex[w]
            if advanced:
                continue
            if vroot[v] == vindex[v]:
                # A minimal cluster is found: vertices indexed after v.
                popped = 0
                while True:
                    w = vstack[vsp - 1]
                    vsp -= 1
                    in_pop[w] = True
                    popped += 1
                    vindex[w] = UNDEF
                    vroot[w] = UNDEF
                    index -= 1
                    if w == v:
                        break
                if verify_pops:
                    k = mark_minimal_clusters(n, m, out_start, out_arc, head,
                                              tail, R, root, c_vindex, c_vlow,
                                              c_onstack, c_comp, c_vstack,
                                              c_wv, c_wpos, c_comp_sink, c_mc)
                    if k == 0:
                        return POP_NOT_MINIMAL, R, resampled, rounds
                    cid = c_comp[v]
                    csize = 0
                    for u in range(n):
                        if c_comp[u] == cid:
                            csize += 1
                    for u in range(n):
                        if in_pop[u] and (not c_mc[u] or c_comp[u] != cid):
                            return POP_NOT_MINIMAL, R, resampled, rounds
                    if csize != popped:
                        return POP_NOT_MINIMAL, R, resampled, rounds
                rounds += 1
                for a in range(m):
                    if in_pop[tail[a]]:
                        R[a] = table_value(seed, a, cursors[a]) >= p[a]
                        cursors[a] += 1
                        per_var[a] += 1
                        resampled += 1
                for u in range(n):
                    in_pop[u] = False
                if m + resampled > max_draws:
                    return BUDGET_EXCEEDED, R, resampled, rounds
                # Restart the search at v with its old index value.
                vindex[v] = index
                vroot[v] = index
                index += 1
                vstack[vsp] = v
                vsp += 1
                wpos[wsp - 1] = 0
            else:
                wsp -= 1
                if wsp > 0:
                    pv = wv[wsp - 1]
                    if vroot[v] < vroot[pv]:
                        vroot[pv] = vroot[v]
    return OK, R, resampled, rounds


@njit(cache=True)
def cluster_batch(n, m, out_start, out_arc, head, tail, p, root, seeds,
                  use_tarjan, max_draws, collect_keys, check_flag):
    """Run many independent cluster-popping chains.

    Returns (status, keys, resampled, rounds, per_var_sum, per_var_sumsq).
    keys[i] packs the final arc subset as a bitmask (only valid if m <= 63
    and collect_keys).  check_flag enables the extremality check (naive) or
    pop verification (tarjan).
    """
    runs = seeds.shape[0]
    keys = np.zeros(runs, np.uint64)
    resampled = np.empty(runs, np.int64)
    rounds = np.empty(runs, np.int64)
    per_var_sum = np.zeros(m, np.int64)
    per_var_sumsq = np.zeros(m, np.int64)
    per_var = np.empty(m, np.int64)
    cursors = np.empty(m, np.int64)
    for i in range(runs):
        for a in range(m):
            per_var[a] = 0
            cursors[a] = 0
        if use_tarjan:
            status, S, res, rnd = cluster_tarjan_run(
                n, m, out_start, out_arc, head, tail, p, root, seeds[i],
                cursors, per_var, max_draws, check_flag)
        else:
            status, S, res, rnd = cluster_naive_run(
                n, m, out_start, out_arc, head, tail, p, root, seeds[i],
                cursors, per_var, max_draws, check_flag)
        if status != OK:
            return status, keys, resampled, rounds, per_var_sum, per_var_sumsq
        resampled[i] = res
        rounds[i] = rnd
        for a in range(m):
            per_var_sum[a] += per_var[a]
            per_var_sumsq[a] += per_var[a] * per_var[a]
        if collect_keys:
            key = uint64(0)
            for a in range(m):
                if S[a]:
                    key |= uint64(1) << uint64(a)
            keys[i] = key
    return OK, keys, resampled, rounds, per_var_sum, per_var_sumsq


@njit(cache=True)
def cluster_batch_hamiltonian(n, m, out_start, out_arc, head, tail, p, root,
                              tree_arcs, seeds, max_draws):
    """Cluster-popping chains reporting |tree_arcs \\ S| per run.

    Returns (status, H, total_draws).  Used by the annealing estimator.
    """
    runs = seeds.shape[0]
    H = np.empty(runs, np.int64)
    per_var = np.empty(m, np.int64)
    cursors = np.empty(m, np.int64)
    total_draws = np.int64(0)
    for i in range(runs):
        for a in range(m):
            per_var[a] = 0
            cursors[a] = 0
        status, S, res, rnd = cluster_tarjan_run(
            n, m, out_start, out_arc, head, tail, p, root, seeds[i],
            cursors, per_var, max_draws, False)
        if status != OK:
            return status, H, total_draws
        h = 0
        for j in range(tree_arcs.shape[0]):
            if not S[tree_arcs[j]]:
                h += 1
        H[i] = h
        total_draws += m + res
    return OK, H, total_draws


# ---------------------------------------------------------------------------
# Cycle-popping
# ---------------------------------------------------------------------------


@njit(cache=True, inline="always")
def pick_neighbor(u, lo, hi, cumw):
    """Map a unit uniform to an adjacency position by cumulative weight."""
    t = u * cumw[hi - 1]
    for k in range(lo, hi):
        if t < cumw[k]:
            return k - lo
    return hi - 1 - lo


@njit(cache=True)
def cycle_run(n, adj_start, adj_v, cumw, root, seed, cursors, per_var,
              max_draws, check_extremal):
    """One cycle-popping run; returns (status, sigma_pos, resampled, rounds).

    sigma_pos[v] is the chosen position in v's adjacency slice (-1 at the
    root).  Each round pops every cycle of the functional graph at once.
    """
    sigma = np.full(n, -1, np.int64)
    for v in range(n):
        if v == root:
            continue
        lo = adj_start[v]
        hi = adj_start[v + 1]
        sigma[v] = pick_neighbor(table_value(seed, v, cursors[v]), lo, hi, cumw)
        cursors[v] += 1
    draws = n - 1
    resampled = 0
    rounds = 0
    color = np.empty(n, np.uint8)
    path = np.empty(n, np.int64)
    oncycle = np.empty(n, np.bool_)
    while True:
        for v in range(n):
            color[v] = 0
            oncycle[v] = False
        color[root] = 2
        ncycles = 0
        marked = 0
        for v0 in range(n):
            if color[v0] != 0:
                continue
            v = v0
            plen = 0
            while color[v] == 0:
                color[v] = 1
                path[plen] = v
                plen += 1
                v = adj_v[adj_start[v] + sigma[v]]
            if color[v] == 1:
                # walked into the current path: the suffix from v is a cycle
                ncycles += 1
                j = plen - 1
                while True:
                    oncycle[path[j]] = True
                    marked += 1
                    if path[j] == v:
                        break
                    j -= 1
            for j in range(plen):
                color[path[j]] = 2
        if ncycles == 0:
            return OK, sigma, resampled, rounds
        if check_extremal:
            # cycles are vertex-disjoint: following sigma from any marked
            # vertex must stay inside the marked set
            for v in range(n):
                if oncycle[v] and not oncycle[adj_v[adj_start[v] + sigma[v]]]:
                    return EXTREMALITY_VIOLATION, sigma, resampled, rounds
        rounds += 1
        for v in range(n):
            if oncycle[v]:
                lo = adj_start[v]
                hi = adj_start[v + 1]
                sigma[v] = pick_neighbor(table_value(seed, v, cursors[v]),
                                         lo, hi, cumw)
                cursors[v] += 1
                per_var[v] += 1
                resampled += 1
        draws = n - 1 + resampled
        if draws > max_draws:
            return BUDGET_EXCEEDED, sigma, resampled, rounds


@njit(cache=True)
def cycle_batch(n, adj_start, adj_v, radix_stride, root, seeds, max_draws,
                collect_keys, check_extremal, cumw):
    """Batch driver for cycle-popping; keys use per-vertex mixed radix."""
    runs = seeds.shape[0]
    keys = np.zeros(runs, np.uint64)
    resampled = np.empty(runs, np.int64)
    rounds = np.empty(runs, np.int64)
    per_var_sum = np.zeros(n, np.int64)
    per_var_sumsq = np.zeros(n, np.int64)
    per_var = np.empty(n, np.int64)
    cursors = np.empty(n, np.int64)
    for i in range(runs):
        for v in range(n):
            per_var[v] = 0
            cursors[v] = 0
        status, sigma, res, rnd = cycle_run(
            n, adj_start, adj_v, cumw, root, seeds[i], cursors, per_var,
            max_draws, check_extremal)
        if status != OK:
            return status, keys, resampled, rounds, per_var_sum, per_var_sumsq
        resampled[i] = res
        rounds[i] = rnd
        for v in range(n):
            per_var_sum[v] += per_var[v]
            per_var_sumsq[v] += per_var[v] * per_var[v]
        if collect_keys:
            key = uint64(0)
            for v in range(n):
                if v != root:
                    key += uint64(sigma[v]) * radix_stride[v]
            keys[i] = key
    return OK, keys, resampled, rounds, per_var_sum, per_var_sumsq


# ---------------------------------------------------------------------------
# Sink-popping
# ---------------------------------------------------------------------------


@njit(cache=True)
def sink_run(n, m, eu, ev, var_id, seed, cursors, per_var, max_draws,
             check_extremal, adj_start, adj_v):
    """One sink-popping run on a connected component.

    Edge endpoints eu < ev; orientation bit 0 means eu -> ev.  var_id maps
    local edge index to the global table stream; cursors and per_var are
    indexed by that global id.  Returns (status, orient, resampled, rounds).
    """
    orient = np.empty(m, np.uint8)
    outdeg = np.zeros(n, np.int64)
    sink = np.empty(n, np.bool_)
    for e in range(m):
        g = var_id[e]
        orient[e] = 1 if table_value(seed, g, cursors[g]) >= 0.5 else 0
        cursors[g] += 1
    draws = m
    resampled = 0
    rounds = 0
    while True:
        for v in range(n):
            outdeg[v] = 0
        for e in range(m):
            if orient[e] == 0:
                outdeg[eu[e]] += 1
            else:
                outdeg[ev[e]] += 1
        nsinks = 0
        for v in range(n):
            sink[v] = outdeg[v] == 0
            if sink[v]:
                nsinks += 1
        if nsinks == 0:
            return OK, orient, resampled, rounds
        if check_extremal:
            # no two sinks may be adjacent
            for v in range(n):
                if sink[v]:
                    for k in range(adj_start[v], adj_start[v + 1]):
                        if sink[adj_v[k]]:
                            return EXTREMALITY_VIOLATION, orient, resampled, rounds
        rounds += 1
        for e in range(m):
            if sink[eu[e]] or sink[ev[e]]:
                g = var_id[e]
                orient[e] = 1 if table_value(seed, g, cursors[g]) >= 0.5 else 0
                cursors[g] += 1
                per_var[g] += 1
                resampled += 1
        draws = m + resampled
        if draws > max_draws:
            return BUDGET_EXCEEDED, orient, resampled, rounds


@njit(cache=True)
def sink_batch(n, m, eu, ev, seeds, max_draws, collect_keys,
               check_extremal, adj_start, adj_v):
    """Batch driver for sink-popping on a connected graph (streams = edge ids)."""
    runs = seeds.shape[0]
    var_id = np.arange(m)
    keys = np.zeros(runs, np.uint64)
    resampled = np.empty(runs, np.int64)
    rounds = np.empty(runs, np.int64)
    per_var_sum = np.zeros(m, np.int64)
    per_var_sumsq = np.zeros(m, np.int64)
    per_var = np.empty(m, np.int64)
    cursors = np.empty(m, np.int64)
    for i in range(runs):
        for e in range(m):
            per_var[e] = 0
            cursors[e] = 0
        status, orient, res, rnd = sink_run(
            n, m, eu, ev, var_id, seeds[i], cursors, per_var, max_draws,
            check_extremal, adj_start, adj_v)
        if status != OK:
            return status, keys, resampled, rounds, per_var_sum, per_var_sumsq
        resampled[i] = res
        rounds[i] = rnd
        for e in range(m):
            per_var_sum[e] += per_var[e]
            per_var_sumsq[e] += per_var[e] * per_var[e]
        if collect_keys:
            key = uint64(0)
            for e in range(m):
                if orient[e] == 1:
                    key |= uint64(1) << uint64(e)
            keys[i] = key
    return OK, keys, resampled, rounds, per_var_sum, per_var_sumsq
