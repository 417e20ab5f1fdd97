"""Finite simple connected graphs with site potentials, and their cycle structure."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    Disconnected,
    DuplicateEdge,
    GraphError,
    LoopEdge,
    VertexOutOfRange,
)

Edge = tuple[int, int]


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple connected graph on vertices ``0..n_vertices-1``.

    Edges are stored once, oriented ``u < v`` and sorted lexicographically.
    ``potential`` is a read-only float array of length ``n_vertices``.
    """

    n_vertices: int
    edges: tuple[Edge, ...]
    potential: np.ndarray

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def betti(self) -> int:
        return self.n_edges - self.n_vertices + 1

    def adjacency(self) -> list[list[int]]:
        """Sorted neighbour lists."""
        adj: list[list[int]] = [[] for _ in range(self.n_vertices)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        for nbrs in adj:
            nbrs.sort()
        return adj

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        if not self.edges:
            empty = np.zeros(0, dtype=np.int64)
            return empty, empty.copy()
        e = np.asarray(self.edges, dtype=np.int64)
        return e[:, 0].copy(), e[:, 1].copy()

    def to_dict(self) -> dict:
        return {
            "n": self.n_vertices,
            "edges": [list(e) for e in self.edges],
            "q": [float(x) for x in self.potential],
        }

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n_vertices == other.n_vertices
            and self.edges == other.edges
            and np.array_equal(self.potential, other.potential)
        )

    def __hash__(self):
        return hash((self.n_vertices, self.edges, self.potential.tobytes()))


def build_graph(n, edges, q=None) -> Graph:
    """Validate and canonicalize a graph.

    ``q`` defaults to the zero potential. Raises :class:`LoopEdge`,
    :class:`DuplicateEdge`, :class:`VertexOutOfRange`,
    :class:`DimensionMismatch` or :class:`Disconnected`.
    """
    n = int(n)
    if n < 1:
        raise DimensionMismatch(f"graph needs at least one vertex, got n={n}")
    if q is None:
        q = np.zeros(n)
    q = np.array(q, dtype=float).reshape(-1)
    if q.shape[0] != n:
        raise DimensionMismatch(f"potential has length {q.shape[0]}, expected {n}")
    if not np.all(np.isfinite(q)):
        raise DimensionMismatch("potential must be finite")

    seen: set[Edge] = set()
    for k, e in enumerate(edges):
        try:
            a, b = (int(x) for x in e)
        except (TypeError, ValueError):
            raise GraphError(f"edge {e!r} is not a vertex pair", location=f"edges[{k}]") from None
        for x in (a, b):
            if not 0 <= x < n:
                raise VertexOutOfRange(f"vertex {x} outside [0, {n})", location=f"edges[{k}]")
        if a == b:
            raise LoopEdge(f"self-loop at vertex {a}", location=f"edges[{k}]")
        key = (a, b) if a < b else (b, a)
        if key in seen:
            raise DuplicateEdge(f"edge {key} appears twice", location=f"edges[{k}]")
        seen.add(key)

    g_edges = tuple(sorted(seen))
    q.setflags(write=False)
    g = Graph(n, g_edges, q)
    _check_connected(g)
    return g


def _check_connected(g: Graph) -> None:
    adj = g.adjacency()
    seen = [False] * g.n_vertices
    seen[0] = True
    stack = [0]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                stack.append(v)
    if not all(seen):
        missing = seen.index(False)
        raise Disconnected(f"vertex {missing} is not reachable from vertex 0")


@dataclass(frozen=True)
class CycleStructure:
    """Spanning tree, surplus edges and the fundamental cycle basis.

    ``cycle_basis[j]`` is the directed cycle closed by ``surplus_edges[j] =
    (u, v)``: it enters along ``v -> u`` and returns from ``u`` to ``v``
    through the tree. With that orientation the flux through cycle ``j`` of
    the canonical magnetic operator equals ``alpha_j``.
    """

    tree_edges: tuple[Edge, ...]
    surplus_edges: tuple[Edge, ...]
    betti: int
    cycle_basis: tuple[tuple[Edge, ...], ...]

    def surplus_index(self, edge) -> int:
        """Resolve an integer index or a vertex pair to a surplus-edge index."""
        from .errors import RequestedEdgeNotSurplus

        if isinstance(edge, (int, np.integer)):
            j = int(edge)
            if not 0 <= j < self.betti:
                raise RequestedEdgeNotSurplus(
                    f"surplus edge index {j} outside [0, {self.betti})"
                )
            return j
        a, b = (int(x) for x in edge)
        key = (min(a, b), max(a, b))
        try:
            return self.surplus_edges.index(key)
        except ValueError:
            raise RequestedEdgeNotSurplus(
                f"edge {key} is not a surplus edge; surplus edges are {list(self.surplus_edges)}"
            ) from None

    def surplus_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        if not self.surplus_edges:
            empty = np.zeros(0, dtype=np.int64)
            return empty, empty.copy()
        s = np.asarray(self.surplus_edges, dtype=np.int64)
        return s[:, 0].copy(), s[:, 1].copy()


def _bfs_tree(g: Graph) -> list[Edge]:
    adj = g.adjacency()
    seen = [False] * g.n_vertices
    seen[0] = True
    queue = deque([0])
    tree = []
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                tree.append((min(u, v), max(u, v)))
                queue.append(v)
    return tree


def _random_tree(g: Graph, seed: int) -> list[Edge]:
    # Kruskal over a random edge order
    rng = np.random.default_rng(seed)
    order = rng.permutation(g.n_edges)
    parent = list(range(g.n_vertices))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    tree = []
    for k in order:
        u, v = g.edges[k]
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            tree.append((u, v))
    return tree


def _tree_path(tree_adj, parent, depth, a, b) -> list[int]:
    """Vertex sequence from ``a`` to ``b`` inside the tree."""
    up, down = [a], [b]
    x, y = a, b
    while depth[x] > depth[y]:
        x = parent[x]
        up.append(x)
    while depth[y] > depth[x]:
        y = parent[y]
        down.append(y)
    while x != y:
        x, y = parent[x], parent[y]
        up.append(x)
        down.append(y)
    # up ends at the common ancestor, as does down
    return up + down[-2::-1]


def cycle_structure(g: Graph, tree_seed=None, tree_edges=None) -> CycleStructure:
    """Choose a spanning tree and build the fundamental cycles.

    By default the tree is BFS from vertex 0 visiting neighbours in increasing
    order. ``tree_seed`` draws a random spanning tree instead; ``tree_edges``
    fixes it explicitly.
    """
    if tree_edges is not None:
        tree = sorted({(min(u, v), max(u, v)) for u, v in tree_edges})
        edge_set = set(g.edges)
        if len(tree) != g.n_vertices - 1 or not set(tree) <= edge_set:
            raise GraphError("tree_edges is not a spanning tree of the graph")
    elif tree_seed is not None:
        tree = sorted(_random_tree(g, tree_seed))
    else:
        tree = sorted(_bfs_tree(g))

    tree_set = set(tree)
    tree_adj: list[list[int]] = [[] for _ in range(g.n_vertices)]
    for u, v in tree:
        tree_adj[u].append(v)
        tree_adj[v].append(u)

    parent = [-1] * g.n_vertices
    depth = [-1] * g.n_vertices
    depth[0] = 0
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in sorted(tree_adj[u]):
            if depth[v] < 0:
                depth[v] = depth[u] + 1
                parent[v] = u
                queue.append(v)
    if min(depth) < 0:
        raise GraphError("tree_edges does not span the graph")

    surplus = tuple(e for e in g.edges if e not in tree_set)
    basis = []
    for u, v in surplus:
        path = _tree_path(tree_adj, parent, depth, u, v)
        cycle = [(v, u)] + list(zip(path[:-1], path[1:]))
        basis.append(tuple(cycle))

    return CycleStructure(
        tree_edges=tuple(tree),
        surplus_edges=surplus,
        betti=len(surplus),
        cycle_basis=tuple(basis),
    )


def is_spanning_tree(n: int, edges) -> bool:
    """Connected and acyclic on ``n`` vertices."""
    edges = list(edges)
    if len(edges) != n - 1:
        return False
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru == rv:
            return False
        parent[ru] = rv
    return True
