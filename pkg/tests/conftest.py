import itertools
import random

import numpy as np
import pytest

from sis_source import _pykernels, graph, paths, sis
from sis_source.graph import Graph

try:
    from sis_source import _kernels
except ImportError:  # extension not built
    _kernels = None

BACKENDS = [_pykernels] + ([_kernels] if _kernels is not None else [])


@pytest.fixture(params=BACKENDS, ids=lambda k: k.NAME)
def backend(request, monkeypatch):
    """Run the test once per kernel implementation."""
    for mod in (graph, sis, paths):
        monkeypatch.setattr(mod, "kernels", request.param)
    paths._graph_space.cache_clear()
    paths._subtree_space.cache_clear()
    yield request.param
    paths._graph_space.cache_clear()
    paths._subtree_space.cache_clear()


def path_graph(n):
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def star(leaves):
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def random_labeled_tree(rng: random.Random, n: int) -> Graph:
    """Random recursive tree with shuffled labels."""
    perm = list(range(n))
    rng.shuffle(perm)
    return Graph.from_edges(n, [(perm[i], perm[rng.randrange(i)]) for i in range(1, n)])


def floyd_warshall(g: Graph) -> np.ndarray:
    """All-pairs hop distances, independent of BFS; unreachable is -1."""
    inf = 10**9
    d = np.full((g.n, g.n), inf, dtype=np.int64)
    np.fill_diagonal(d, 0)
    for u, v in g.edges():
        d[u, v] = d[v, u] = 1
    for k in range(g.n):
        d = np.minimum(d, d[:, k : k + 1] + d[k : k + 1, :])
    d[d >= inf] = -1
    return d


def nonempty_subsets(nodes):
    nodes = list(nodes)
    for r in range(1, len(nodes) + 1):
        yield from itertools.combinations(nodes, r)


def all_paths(g: Graph, source: int, t: int):
    """Every valid infection path of ``t`` slots from ``source`` (brute force)."""
    paths_ = [[(source,)]]
    for _ in range(t):
        nxt = []
        for p in paths_:
            last = set(p[-1])
            sus = sorted(last | {w for u in last for w in g.adj[u]})
            for r in range(len(sus) + 1):
                for b in itertools.combinations(sus, r):
                    nxt.append(p + [b])
        paths_ = nxt
    return [sis.InfectionPath(source, tuple(p)) for p in paths_]
