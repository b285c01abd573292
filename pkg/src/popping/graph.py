"""Graph types, generators, and structural predicates.

Vertices are 0-based integers.  Edge and arc indices are stable: they are
assigned in input order and every tie-break in the package uses them.
Graphs are immutable after construction (their arrays are write-protected),
so they can be shared freely across concurrent sampler runs.
"""

from collections import deque

import numpy as np

from .errors import InfeasibleInstanceError, InvalidGraphError

__all__ = [
    "UndirectedGraph", "DirectedGraph", "bidirect",
    "is_root_connected", "has_tree_component", "connected_components",
    "is_connected", "arborescence_toward_root",
    "lollipop", "barbell", "cycle", "complete", "path",
    "pack_subset", "unpack_subset",
]


def _frozen(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


def _validate_probs(p, m, what="p"):
    p = np.asarray(p, dtype=np.float64)
    if p.ndim == 0:
        p = np.full(m, float(p))
    if p.shape != (m,):
        raise InvalidGraphError(f"{what} must have one value per edge/arc")
    if not (np.all(p > 0.0) and np.all(p < 1.0)):
        raise InvalidGraphError(f"every {what} must lie strictly inside (0, 1)")
    return _frozen(p)


class UndirectedGraph:
    """Simple undirected graph with optional per-edge failure probability
    p_e in (0,1) or positive weight w_e.

    Edges are stored normalized (u < v) in input order; self-loops and
    parallel edges are rejected.
    """

    def __init__(self, n, edges, p=None, w=None, root=None):
        n = int(n)
        if n <= 0:
            raise InvalidGraphError("vertex count must be positive")
        self.n = n
        edges = [(int(u), int(v)) for u, v in edges]
        seen = set()
        norm = []
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidGraphError(f"edge ({u},{v}) out of range")
            if u == v:
                raise InvalidGraphError(f"self-loop at vertex {u}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise InvalidGraphError(f"parallel edge ({u},{v})")
            seen.add(key)
            norm.append(key)
        self.edges = _frozen(np.array(norm, dtype=np.int64).reshape(len(norm), 2))
        self.p = None if p is None else _validate_probs(p, self.m, "p")
        if w is not None:
            w = np.asarray(w, dtype=np.float64)
            if w.ndim == 0:
                w = np.full(self.m, float(w))
            if w.shape != (self.m,):
                raise InvalidGraphError("w must have one value per edge")
            if not np.all(w > 0.0):
                raise InvalidGraphError("every weight must be positive")
            self.w = _frozen(w)
        else:
            self.w = None
        if root is not None and not (0 <= int(root) < n):
            raise InvalidGraphError(f"root {root} out of range")
        self.root = None if root is None else int(root)
        self._adj = None

    @property
    def m(self):
        return self.edges.shape[0]

    def adjacency(self):
        """CSR adjacency: (start, neighbor, edge_id), neighbors in edge order."""
        if self._adj is None:
            deg = np.zeros(self.n + 1, dtype=np.int64)
            for u, v in self.edges:
                deg[u + 1] += 1
                deg[v + 1] += 1
            start = np.cumsum(deg)
            nbr = np.empty(2 * self.m, dtype=np.int64)
            eid = np.empty(2 * self.m, dtype=np.int64)
            fill = start[:-1].copy()
            for e, (u, v) in enumerate(self.edges):
                nbr[fill[u]] = v
                eid[fill[u]] = e
                fill[u] += 1
                nbr[fill[v]] = u
                eid[fill[v]] = e
                fill[v] += 1
            self._adj = (_frozen(start), _frozen(nbr), _frozen(eid))
        return self._adj

    def degrees(self):
        start, _, _ = self.adjacency()
        return np.diff(start)

    def with_values(self, p=None, w=None):
        """Copy of this graph with probabilities/weights replaced."""
        return UndirectedGraph(self.n, self.edges, p=p, w=w, root=self.root)

    # -- ingestion ---------------------------------------------------------

    @classmethod
    def from_text(cls, text, values="p", root=None):
        """Parse the plain edge-list format.

        First non-comment line is `n m`; each of the next m lines is
        `u v value`.  `values` selects which slot the value column fills:
        "p", "w", or "ignore".
        """
        lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln]
        if not lines:
            raise InvalidGraphError("empty graph file")
        head = lines[0].split()
        if len(head) != 2:
            raise InvalidGraphError("first line must be 'n m'")
        n, m = int(head[0]), int(head[1])
        if len(lines) - 1 != m:
            raise InvalidGraphError(f"expected {m} edge lines, got {len(lines) - 1}")
        edges, vals = [], []
        for ln in lines[1:]:
            parts = ln.split()
            if len(parts) not in (2, 3):
                raise InvalidGraphError(f"bad edge line: {ln!r}")
            edges.append((int(parts[0]), int(parts[1])))
            vals.append(float(parts[2]) if len(parts) == 3 else None)
        return cls._assemble(n, edges, vals, values, root)

    @classmethod
    def from_object(cls, obj, values="p"):
        """Build from the structured format: {n, edges: [[u,v,value],...], root?}."""
        try:
            n = obj["n"]
            raw = obj["edges"]
        except (KeyError, TypeError) as exc:
            raise InvalidGraphError("object format needs 'n' and 'edges'") from exc
        edges, vals = [], []
        for item in raw:
            if len(item) == 2:
                edges.append((int(item[0]), int(item[1])))
                vals.append(None)
            elif len(item) == 3:
                edges.append((int(item[0]), int(item[1])))
                vals.append(float(item[2]))
            else:
                raise InvalidGraphError(f"bad edge entry: {item!r}")
        return cls._assemble(n, edges, vals, values, obj.get("root"))

    @classmethod
    def _assemble(cls, n, edges, vals, values, root):
        if values not in ("p", "w", "ignore"):
            raise InvalidGraphError(f"unknown value mode {values!r}")
        arr = None
        if values != "ignore":
            if any(v is None for v in vals):
                raise InvalidGraphError(
                    f"value column required for mode {values!r}")
            arr = np.array(vals, dtype=np.float64)
        return cls(n, edges,
                   p=arr if values == "p" else None,
                   w=arr if values == "w" else None,
                   root=root)

    def __repr__(self):
        return f"UndirectedGraph(n={self.n}, m={self.m})"


class DirectedGraph:
    """Directed graph with per-arc failure probabilities.

    `twin`, if present, maps each arc to its anti-parallel reversal and is
    an involution; it is set by `bidirect` and marks bi-directed graphs.
    """

    def __init__(self, n, arcs, p, twin=None, root=None):
        n = int(n)
        if n <= 0:
            raise InvalidGraphError("vertex count must be positive")
        self.n = n
        arcs = np.array([(int(u), int(v)) for u, v in arcs],
                        dtype=np.int64).reshape(-1, 2)
        if arcs.size and (arcs.min() < 0 or arcs.max() >= n):
            raise InvalidGraphError("arc endpoint out of range")
        if np.any(arcs[:, 0] == arcs[:, 1]):
            raise InvalidGraphError("self-loop arc")
        self.arcs = _frozen(arcs)
        self.p = _validate_probs(p, self.m, "p")
        if twin is not None:
            twin = np.asarray(twin, dtype=np.int64)
            if twin.shape != (self.m,):
                raise InvalidGraphError("twin map must cover all arcs")
            for a in range(self.m):
                b = twin[a]
                if twin[b] != a:
                    raise InvalidGraphError("twin map is not an involution")
                if (arcs[a, 0] != arcs[b, 1]) or (arcs[a, 1] != arcs[b, 0]):
                    raise InvalidGraphError(f"twin of arc {a} is not its reversal")
            twin = _frozen(twin)
        self.twin = twin
        if root is not None and not (0 <= int(root) < n):
            raise InvalidGraphError(f"root {root} out of range")
        self.root = None if root is None else int(root)
        self._out = None
        self._in = None

    @property
    def m(self):
        return self.arcs.shape[0]

    @property
    def tail(self):
        return self.arcs[:, 0]

    @property
    def head(self):
        return self.arcs[:, 1]

    @property
    def is_bidirected(self):
        return self.twin is not None

    def _csr(self, key_col):
        deg = np.zeros(self.n + 1, dtype=np.int64)
        for a in range(self.m):
            deg[self.arcs[a, key_col] + 1] += 1
        start = np.cumsum(deg)
        order = np.empty(self.m, dtype=np.int64)
        fill = start[:-1].copy()
        for a in range(self.m):
            v = self.arcs[a, key_col]
            order[fill[v]] = a
            fill[v] += 1
        return _frozen(start), _frozen(order)

    def out_csr(self):
        """(start, arc_id) with arcs grouped by tail, arc-index order inside."""
        if self._out is None:
            self._out = self._csr(0)
        return self._out

    def in_csr(self):
        """(start, arc_id) with arcs grouped by head, arc-index order inside."""
        if self._in is None:
            self._in = self._csr(1)
        return self._in

    def __repr__(self):
        kind = "bi-directed" if self.is_bidirected else "directed"
        return f"DirectedGraph(n={self.n}, m={self.m}, {kind})"


def bidirect(g):
    """Expand an undirected graph into its bi-directed version.

    Edge i becomes arcs 2i (u -> v as stored) and 2i+1 (v -> u); both inherit
    p_i and are twins of each other.
    """
    if g.p is None:
        raise InvalidGraphError("bidirect needs per-edge failure probabilities")
    m = g.m
    arcs = np.empty((2 * m, 2), dtype=np.int64)
    arcs[0::2] = g.edges
    arcs[1::2] = g.edges[:, ::-1]
    p = np.repeat(g.p, 2)
    twin = np.empty(2 * m, dtype=np.int64)
    twin[0::2] = np.arange(1, 2 * m, 2)
    twin[1::2] = np.arange(0, 2 * m, 2)
    return DirectedGraph(g.n, arcs, p, twin=twin, root=g.root)


# ---------------------------------------------------------------------------
# Predicates
# ---------------------------------------------------------------------------


def is_root_connected(d, subset, r):
    """True iff every vertex reaches r using only arcs in `subset`.

    One reverse traversal from r.
    """
    if not (0 <= r < d.n):
        raise InvalidGraphError(f"root {r} out of range")
    subset = np.asarray(subset, dtype=bool)
    if subset.shape != (d.m,):
        raise InvalidGraphError("subset length must equal the arc count")
    in_start, in_arc = d.in_csr()
    seen = np.zeros(d.n, dtype=bool)
    seen[r] = True
    queue = deque([r])
    count = 1
    tails = d.tail
    while queue:
        v = queue.popleft()
        for k in range(in_start[v], in_start[v + 1]):
            a = in_arc[k]
            if not subset[a]:
                continue
            u = tails[a]
            if not seen[u]:
                seen[u] = True
                count += 1
                queue.append(u)
    return count == d.n


def connected_components(g):
    """Vertex sets of the connected components, each sorted, ordered by
    smallest member."""
    start, nbr, _ = g.adjacency()
    seen = np.zeros(g.n, dtype=bool)
    comps = []
    for s in range(g.n):
        if seen[s]:
            continue
        seen[s] = True
        comp = [s]
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for k in range(start[v], start[v + 1]):
                w = nbr[k]
                if not seen[w]:
                    seen[w] = True
                    comp.append(w)
                    queue.append(w)
        comps.append(sorted(comp))
    return comps


def is_connected(g):
    return len(connected_components(g)) == 1


def has_tree_component(g):
    """True iff some connected component has #edges = #vertices - 1."""
    comps = connected_components(g)
    edge_count = {}
    for i, comp in enumerate(comps):
        for v in comp:
            edge_count[v] = i
    counts = [0] * len(comps)
    for u, v in g.edges:
        counts[edge_count[int(u)]] += 1
    return any(c == len(comp) - 1 for c, comp in zip(counts, comps))


def arborescence_toward_root(d, r):
    """A spanning in-tree toward r: n-1 arcs, one out-arc per non-root vertex.

    Deterministic: BFS on the reverse graph from r, scanning in-arcs in
    arc-index order, so ties are broken by lowest arc index.
    """
    if not is_root_connected(d, np.ones(d.m, dtype=bool), r):
        raise InfeasibleInstanceError("graph is not root-connected; no arborescence")
    in_start, in_arc = d.in_csr()
    tails = d.tail
    parent_arc = np.full(d.n, -1, dtype=np.int64)
    seen = np.zeros(d.n, dtype=bool)
    seen[r] = True
    queue = deque([r])
    while queue:
        v = queue.popleft()
        for k in range(in_start[v], in_start[v + 1]):
            a = in_arc[k]
            u = tails[a]
            if not seen[u]:
                seen[u] = True
                parent_arc[u] = a
                queue.append(u)
    tree = np.zeros(d.m, dtype=bool)
    for v in range(d.n):
        if v != r:
            tree[parent_arc[v]] = True
    return tree


# ---------------------------------------------------------------------------
# Generators (deterministic vertex and edge orderings)
# ---------------------------------------------------------------------------


def path(n, p=None, w=None):
    """Path on n vertices (n-1 edges) 0 - 1 - ... - n-1."""
    if n < 1:
        raise InvalidGraphError("path needs n >= 1")
    return UndirectedGraph(n, [(i, i + 1) for i in range(n - 1)], p=p, w=w, root=0)


def cycle(n, p=None, w=None):
    """Cycle on n >= 3 vertices; edges (0,1), ..., (n-2,n-1), (0,n-1)."""
    if n < 3:
        raise InvalidGraphError("cycle needs n >= 3")
    edges = [(i, i + 1) for i in range(n - 1)] + [(0, n - 1)]
    return UndirectedGraph(n, edges, p=p, w=w, root=0)


def complete(n, p=None, w=None):
    """Complete graph on n vertices, edges in lexicographic order."""
    if n < 1:
        raise InvalidGraphError("complete needs n >= 1")
    edges = [(i, j) for i in range(n) for j in range(i + 1, n)]
    return UndirectedGraph(n, edges, p=p, w=w, root=0)


def lollipop(n1, n2, p=None, w=None):
    """Path of length n1 attached to a clique of size n2.

    Vertices 0..n1-1 are the path (0 is the default root, the far endpoint);
    vertices n1..n1+n2-1 are the clique; the junction vertex is n1.
    Path edges come first, then clique edges lexicographically.
    """
    if n1 < 1 or n2 < 3:
        raise InvalidGraphError("lollipop needs n1 >= 1 and n2 >= 3")
    edges = [(i, i + 1) for i in range(n1)]
    edges += [(i, j) for i in range(n1, n1 + n2) for j in range(i + 1, n1 + n2)]
    return UndirectedGraph(n1 + n2, edges, p=p, w=w, root=0)


def lollipop_junction(n1, n2):
    """Index of the path/clique junction vertex of lollipop(n1, n2)."""
    return n1


def barbell(n1, n2, p=None, w=None):
    """Two cliques of size n2 joined by a path of length n1.

    Clique A is 0..n2-1, the path runs from vertex n2-1 through n1-1 fresh
    vertices to vertex n2+n1-1, which starts clique B.
    """
    if n1 < 1 or n2 < 3:
        raise InvalidGraphError("barbell needs n1 >= 1 and n2 >= 3")
    edges = [(i, j) for i in range(n2) for j in range(i + 1, n2)]
    edges += [(n2 - 1 + i, n2 + i) for i in range(n1)]
    b0 = n2 + n1 - 1
    edges += [(i, j) for i in range(b0, b0 + n2) for j in range(i + 1, b0 + n2)]
    return UndirectedGraph(2 * n2 + n1 - 1, edges, p=p, w=w, root=0)


# ---------------------------------------------------------------------------
# Bitmask helpers for subsets over edge/arc indices
# ---------------------------------------------------------------------------


def pack_subset(subset):
    """Bool array -> integer bitmask (bit i = element i present)."""
    key = 0
    for i, b in enumerate(np.asarray(subset, dtype=bool)):
        if b:
            key |= 1 << i
    return key


def unpack_subset(key, m):
    """Integer bitmask -> bool array of length m."""
    return np.array([(key >> i) & 1 == 1 for i in range(m)], dtype=bool)
