"""Immutable undirected graphs and the tree primitives the estimators rely on.

Nodes are dense integers ``0..n-1``.  Adjacency lists are kept sorted so that
every traversal (and therefore every tie-break downstream) is deterministic.
A CSR copy of the adjacency (``indptr``/``indices``) is what the compiled
kernels consume.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ._backend import kernels

#: distance reported for nodes that cannot be reached from the BFS origin
UNREACHABLE = -1


class GraphError(ValueError):
    """Malformed graph input or an invalid query."""


class NotATreeError(GraphError):
    pass


class UnreachableError(GraphError):
    """An infected node cannot be reached from a candidate source."""


class Graph:
    """Simple undirected graph with sorted adjacency lists.

    Build one with :meth:`from_edges`; the instance never changes afterwards.
    """

    __slots__ = ("n", "adj", "indptr", "indices", "num_edges", "is_tree")

    def __init__(self, n: int, adj: Sequence[Sequence[int]]):
        if n < 0 or len(adj) != n:
            raise GraphError(f"adjacency has {len(adj)} rows for {n} nodes")
        rows = []
        for v, nbrs in enumerate(adj):
            row = tuple(sorted(nbrs))
            for i, u in enumerate(row):
                if not 0 <= u < n:
                    raise GraphError(f"node {v} has out-of-range neighbor {u}")
                if u == v:
                    raise GraphError(f"self-loop at node {v}")
                if i and row[i - 1] == u:
                    raise GraphError(f"duplicate edge {v}-{u}")
            rows.append(row)
        for v, row in enumerate(rows):
            for u in row:
                if v not in rows[u]:
                    raise GraphError(f"edge {v}-{u} is not symmetric")
        self.n = n
        self.adj: tuple[tuple[int, ...], ...] = tuple(rows)
        degrees = np.fromiter((len(r) for r in rows), dtype=np.int64, count=n)
        self.indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(degrees, out=self.indptr[1:])
        self.indices = np.fromiter(
            (u for r in rows for u in r), dtype=np.int64, count=int(self.indptr[-1])
        )
        self.num_edges = int(self.indptr[-1]) // 2
        self.is_tree = n > 0 and self.num_edges == n - 1 and _connected(self)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for {n} nodes")
            adj[u].append(v)
            adj[v].append(u)
        return cls(n, adj)

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self.adj[u] if u < v]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self.adj == other.adj

    def __hash__(self) -> int:
        return hash(self.adj)

    def __repr__(self) -> str:
        kind = "tree" if self.is_tree else "graph"
        return f"Graph({kind}, n={self.n}, m={self.num_edges})"


def _connected(g: Graph) -> bool:
    return bool(np.all(kernels.bfs(g.indptr, g.indices, 0) >= 0))


def _check_node(g: Graph, v: int) -> None:
    if not 0 <= v < g.n:
        raise GraphError(f"node {v} is not in a graph of {g.n} nodes")


def require_tree(g: Graph) -> None:
    if not g.is_tree:
        raise NotATreeError(f"operation needs a tree, got {g!r}")


def as_infected(g: Graph, nodes: Iterable[int]) -> tuple[int, ...]:
    """Normalize an infected set to a sorted tuple and validate it."""
    members = tuple(sorted(set(int(u) for u in nodes)))
    if not members:
        raise GraphError("observation must be non-empty")
    for u in members:
        _check_node(g, u)
    return members


def bfs_distances(g: Graph, v: int) -> np.ndarray:
    """Hop distances from ``v``; unreachable nodes get :data:`UNREACHABLE`."""
    _check_node(g, v)
    return kernels.bfs(g.indptr, g.indices, v)


def bfs_parents(g: Graph, v: int) -> tuple[np.ndarray, np.ndarray]:
    """Distances and BFS parents from ``v`` (parent of ``v`` is ``v``)."""
    _check_node(g, v)
    return kernels.bfs_parents(g.indptr, g.indices, v)


def infection_eccentricity(g: Graph, v: int, vi: Iterable[int]) -> int:
    """Largest hop distance from ``v`` to any infected node."""
    members = as_infected(g, vi)
    dist = bfs_distances(g, v)[list(members)]
    if np.any(dist == UNREACHABLE):
        bad = members[int(np.argmin(dist))]
        raise UnreachableError(f"infected node {bad} is unreachable from {v}")
    return int(dist.max())


def nodes_at_distance(g: Graph, v: int, h: int) -> list[int]:
    if h < 0:
        raise GraphError(f"hop count must be non-negative, got {h}")
    return np.flatnonzero(bfs_distances(g, v) == h).tolist()


def tree_path(g: Graph, a: int, b: int) -> list[int]:
    """Node sequence of the unique ``a``-``b`` path in a tree."""
    require_tree(g)
    _, parent = bfs_parents(g, b)
    path = [a]
    while path[-1] != b:
        path.append(int(parent[path[-1]]))
    return path


def subtree_away(g: Graph, u: int, v: int) -> list[int]:
    """Nodes on ``u``'s side after cutting the first edge of the ``u``-``v`` path."""
    require_tree(g)
    _check_node(g, u)
    _check_node(g, v)
    if u == v:
        raise GraphError("subtree_away needs two distinct nodes")
    dist_v = bfs_distances(g, v)
    du = dist_v[u]
    # Nodes whose path to v passes through u are exactly those with d(x,v) = d(x,u) + d(u,v).
    dist_u = bfs_distances(g, u)
    return np.flatnonzero(dist_v == dist_u + du).tolist()


def minimal_spanning_subtree(
    g: Graph, s: Iterable[int], anchor: int | None = None
) -> tuple[Graph, list[int]]:
    """Smallest subtree of ``g`` containing every node of ``s`` (and ``anchor``).

    Returns the subtree relabelled ``0..k-1`` together with ``nodes`` where
    ``nodes[i]`` is the original id of subtree node ``i`` (ascending).
    """
    require_tree(g)
    members = list(as_infected(g, s))
    if anchor is not None:
        _check_node(g, anchor)
        members.append(anchor)
    nodes = spanning_nodes(g, members)
    index = {u: i for i, u in enumerate(nodes)}
    adj = [[index[w] for w in g.adj[u] if w in index] for u in nodes]
    return Graph(len(nodes), adj), nodes


def spanning_nodes(g: Graph, members: Sequence[int]) -> list[int]:
    """Sorted node set of the minimal subtree spanning ``members``."""
    root = members[0]
    _, parent = bfs_parents(g, root)
    keep = {root}
    for u in members:
        while u not in keep:
            keep.add(u)
            u = int(parent[u])
    return sorted(keep)


def regular_tree(degree: int, depth: int) -> tuple[Graph, int]:
    """Finite piece of the infinite ``degree``-regular tree around node 0.

    The root has ``degree`` children and every other internal node
    ``degree - 1``; nodes are numbered breadth first, so depth is monotone in id.
    """
    if degree < 2 or depth < 0:
        raise GraphError(f"need degree >= 2 and depth >= 0, got {degree}, {depth}")
    edges = []
    frontier = [0]
    n = 1
    for level in range(depth):
        nxt = []
        for p in frontier:
            for _ in range(degree if level == 0 else degree - 1):
                edges.append((p, n))
                nxt.append(n)
                n += 1
        frontier = nxt
    return Graph.from_edges(n, edges), 0


def regular_tree_size(degree: int, depth: int) -> int:
    if depth == 0:
        return 1
    if degree == 2:
        return 2 * depth + 1
    return 1 + degree * ((degree - 1) ** depth - 1) // (degree - 2)


# ---------------------------------------------------------------------------
# text formats


def parse_edge_list(text: str) -> Graph:
    tokens = text.split()
    if len(tokens) < 2:
        raise GraphError("edge list needs a header line 'n m'")
    try:
        values = [int(tok) for tok in tokens]
    except ValueError as exc:
        raise GraphError(f"edge list contains a non-integer token: {exc}") from None
    n, m = values[0], values[1]
    body = values[2:]
    if len(body) != 2 * m:
        raise GraphError(f"header announces {m} edges, found {len(body) / 2:g}")
    return Graph.from_edges(n, zip(body[0::2], body[1::2]))


def format_edge_list(g: Graph) -> str:
    edges = g.edges()
    lines = [f"{g.n} {len(edges)}"] + [f"{u} {v}" for u, v in edges]
    return "\n".join(lines) + "\n"


def read_edge_list(path: str | Path) -> Graph:
    return parse_edge_list(Path(path).read_text())


def write_edge_list(g: Graph, path: str | Path) -> None:
    Path(path).write_text(format_edge_list(g), newline="\n")


def parse_infected(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split()]
    except ValueError as exc:
        raise GraphError(f"infected set contains a non-integer token: {exc}") from None


def read_infected(path: str | Path) -> list[int]:
    return parse_infected(Path(path).read_text())

