"""Small-instance test grids: every connected graph up to isomorphism.

Graphs are enumerated as canonical representatives (the lexicographically
smallest edge bitmask over all vertex relabelings), so the grids are
deterministic and contain each unlabeled graph exactly once.
"""

from functools import lru_cache
from itertools import combinations, permutations

from .graph import UndirectedGraph

__all__ = ["connected_graphs", "connected_graph_edge_lists",
           "tree_free_connected_graphs"]


@lru_cache(maxsize=None)
def connected_graph_edge_lists(n):
    """Edge lists of all non-isomorphic connected graphs on n vertices."""
    pairs = list(combinations(range(n), 2))
    pair_index = {pq: i for i, pq in enumerate(pairs)}
    perm_maps = []
    for perm in permutations(range(n)):
        perm_maps.append([pair_index[tuple(sorted((perm[u], perm[v])))]
                          for u, v in pairs])
    out = []
    for mask in range(1 << len(pairs)):
        canon = mask
        for pm in perm_maps:
            remapped = 0
            rest = mask
            while rest:
                i = (rest & -rest).bit_length() - 1
                remapped |= 1 << pm[i]
                rest &= rest - 1
            if remapped < canon:
                canon = remapped
        if canon != mask:
            continue
        edges = [pairs[i] for i in range(len(pairs)) if (mask >> i) & 1]
        if _is_connected_edges(n, edges):
            out.append(tuple(edges))
    return tuple(sorted(out, key=lambda e: (len(e), e)))


def _is_connected_edges(n, edges):
    if n == 1:
        return True
    adj = {v: [] for v in range(n)}
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == n


def connected_graphs(max_n, p=None, w=None):
    """All non-isomorphic connected graphs with 1..max_n vertices,
    as (label, UndirectedGraph) pairs."""
    out = []
    for n in range(1, max_n + 1):
        for i, edges in enumerate(connected_graph_edge_lists(n)):
            g = UndirectedGraph(n, edges, p=p, w=w)
            out.append((f"n{n}g{i}(m={len(edges)})", g))
    return out


def tree_free_connected_graphs(max_n):
    """Connected graphs in which no component is a tree (here: m >= n)."""
    return [(label, g) for label, g in connected_graphs(max_n) if g.m >= g.n]
