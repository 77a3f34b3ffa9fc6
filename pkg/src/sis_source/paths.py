"""Most likely infection paths for a candidate source.

Two routes are provided.  On trees, :func:`construct_most_likely_path` fixes
every first infection at its latest feasible slot and then only searches the
spanning subtree of the observation.  On any small graph,
:func:`viterbi_max_path` maximizes exactly over complete infected-set states
(``2**n`` of them) with no schedule imposed, and serves as the oracle for the
constructive route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import numpy as np

from ._backend import kernels
from .graph import (
    Graph,
    GraphError,
    as_infected,
    bfs_parents,
    infection_eccentricity,
    require_tree,
    spanning_nodes,
)
from .sis import InfectionPath, SisParams, log_path_probability

VITERBI_MAX_NODES = 16
VITERBI_MAX_SLOTS = 12
CONSTRUCT_MAX_NODES = 18
CONSTRUCT_MAX_CELLS = 1 << 23

# Absolute tolerance for comparing log-likelihoods.
LOG_TOL = 1e-9


class StateSpaceTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class TimeWindow:
    """Feasible observation times ``[earliest, inf)``."""

    earliest: int

    def __contains__(self, t: int) -> bool:
        return t >= self.earliest


@dataclass(frozen=True)
class MaxPathResult:
    log_prob: float
    path: InfectionPath | None  # None when no valid path exists

    @property
    def feasible(self) -> bool:
        return self.log_prob > -math.inf


def feasible_window(g: Graph, v: int, vi: Iterable[int]) -> TimeWindow:
    return TimeWindow(infection_eccentricity(g, v, vi))


def optimal_elapsed_time(g: Graph, v: int, vi: Iterable[int]) -> int:
    """Most likely elapsed time given source ``v``: its infection eccentricity."""
    return infection_eccentricity(g, v, vi)


def _subtree_heights(g: Graph, v: int, members: tuple[int, ...]) -> dict[int, int]:
    """Height of every node in the subtree spanning ``members`` and ``v``, rooted at ``v``.

    The height of ``u`` is the largest distance from ``u`` to a subtree node
    on the far side of ``u`` from ``v``.
    """
    nodes = set(spanning_nodes(g, (v,) + members))
    dist, bfs_parent = bfs_parents(g, v)
    order = sorted(nodes, key=lambda u: (dist[u], u))
    parent = {u: int(bfs_parent[u]) for u in order if u != v}
    children: dict[int, list[int]] = {u: [] for u in order}
    for u, p in parent.items():
        children[p].append(u)
    height = {}
    for u in reversed(order):
        height[u] = max((height[c] + 1 for c in children[u]), default=0)
    return height


def latest_schedule(g: Graph, v: int, t: int, vi: Iterable[int]) -> dict[int, int]:
    """First-infection slot of every node of the spanning subtree, as late as possible.

    ``schedule[u] = t - max_{x below u} d(u, x)`` for ``u != v``; the source gets 0.
    """
    require_tree(g)
    members = as_infected(g, vi)
    earliest = infection_eccentricity(g, v, members)
    if t < earliest:
        raise GraphError(f"elapsed time {t} is below the feasible window [{earliest}, inf)")
    height = _subtree_heights(g, v, members)
    schedule = {u: t - h for u, h in height.items()}
    schedule[v] = 0
    return dict(sorted(schedule.items()))


def construct_most_likely_path(
    g: Graph, v: int, t: int, vi: Iterable[int], p: SisParams
) -> InfectionPath:
    """Most likely path from ``v`` to ``vi`` whose first infections follow :func:`latest_schedule`.

    The schedule pins when each node of the spanning subtree is first
    infected.  What happens afterwards is not pinned: a node may stay
    infected, recover, or recover and be re-infected by a neighbor, and the
    cheapest choice depends on ``q`` and on the local degrees.  It is settled
    exactly by a max-product sweep restricted to the spanning subtree (nodes
    outside it are never infected), so the subtree may hold at most
    ``CONSTRUCT_MAX_NODES`` nodes.
    """
    members = as_infected(g, vi)
    schedule = latest_schedule(g, v, t, members)
    nodes = tuple(schedule)
    if len(nodes) > CONSTRUCT_MAX_NODES or (t + 1) << len(nodes) > CONSTRUCT_MAX_CELLS:
        raise StateSpaceTooLarge(
            f"spanning subtree of {len(nodes)} nodes over {t} slots is too large "
            f"(limit {CONSTRUCT_MAX_NODES} nodes, {CONSTRUCT_MAX_CELLS} table cells)"
        )
    local = {u: i for i, u in enumerate(nodes)}
    space = _subtree_space(g, nodes)
    forbid = np.zeros(t + 1, dtype=np.int64)
    require = np.zeros(t + 1, dtype=np.int64)
    for u, first in schedule.items():
        bit = 1 << local[u]
        forbid[:first] |= bit
        require[first] |= bit
    final = _mask(local[u] for u in members)
    table = _sweep(space, 1 << local[v], t, p, forbid, require)
    states = _traceback(space, table, final, p)
    return InfectionPath(v, tuple(tuple(nodes[i] for i in _unmask(s)) for s in states))


# ---------------------------------------------------------------------------
# max-product sweeps over complete state sets


@dataclass(frozen=True)
class _StateSpace:
    closure: np.ndarray  # closure[A]: bitmask of nodes susceptible in state A
    exposure: np.ndarray  # number of susceptible nodes in state A
    pc: np.ndarray  # popcount of A


def _closure(nbmask: list[int]) -> tuple[np.ndarray, np.ndarray]:
    return kernels.state_closure(np.array(nbmask, dtype=np.int64)), kernels.popcounts(len(nbmask))


@lru_cache(maxsize=64)
def _graph_space(g: Graph) -> _StateSpace:
    closure, pc = _closure([(1 << u) | _mask(g.adj[u]) for u in range(g.n)])
    return _StateSpace(closure, pc[closure], pc)


@lru_cache(maxsize=256)
def _subtree_space(g: Graph, nodes: tuple[int, ...]) -> _StateSpace:
    """State space of a connected node subset; outside neighbors only add exposure.

    In a tree two subtree nodes never share an outside neighbor, so each
    infected node contributes its outside degree independently.
    """
    local = {u: i for i, u in enumerate(nodes)}
    nbmask = [(1 << i) | _mask(local[w] for w in g.adj[u] if w in local) for i, u in enumerate(nodes)]
    closure, pc = _closure(nbmask)
    outside = np.zeros(len(closure), dtype=np.int64)
    for i, u in enumerate(nodes):
        half = 1 << i
        extra = len(g.adj[u]) - (pc[nbmask[i]] - 1)
        outside[half : 2 * half] = outside[:half] + extra
    return _StateSpace(closure, pc[closure] + outside, pc)


def _sweep(space: _StateSpace, start: int, t: int, p: SisParams, forbid=None, require=None) -> np.ndarray:
    if forbid is None:
        forbid = np.zeros(t + 1, dtype=np.int64)
    if require is None:
        require = np.zeros(t + 1, dtype=np.int64)
    return kernels.viterbi_forward(
        space.closure, space.exposure, space.pc, start, t, p.log_q, p.log_1mq, forbid, require
    )


def _traceback(space: _StateSpace, table: np.ndarray, final: int, p: SisParams) -> list[int]:
    """Recover one argmax state sequence ending in ``final``.

    Among tied predecessors the one with fewest infected nodes wins, then the
    smallest encoding.
    """
    cost = space.exposure * p.log_1mq
    gain = space.pc * (p.log_q - p.log_1mq)
    states = [final]
    b = final
    for tau in range(table.shape[0] - 2, -1, -1):
        target = table[tau + 1, b]
        scores = table[tau] + cost + gain[b]
        ok = ((space.closure & b) == b) & (scores >= target - LOG_TOL)
        cands = np.flatnonzero(ok)
        b = int(cands[np.lexsort((cands, space.pc[cands]))[0]])
        states.append(b)
    return states[::-1]


def _mask(nodes: Iterable[int]) -> int:
    m = 0
    for u in nodes:
        m |= 1 << u
    return m


def _unmask(m: int) -> tuple[int, ...]:
    out = []
    u = 0
    while m:
        if m & 1:
            out.append(u)
        m >>= 1
        u += 1
    return tuple(out)


def _check_caps(g: Graph, t: int) -> None:
    if g.n > VITERBI_MAX_NODES:
        raise StateSpaceTooLarge(
            f"exact path search is limited to {VITERBI_MAX_NODES} nodes, graph has {g.n}"
        )
    if not 0 <= t <= VITERBI_MAX_SLOTS:
        raise StateSpaceTooLarge(
            f"exact path search is limited to {VITERBI_MAX_SLOTS} slots, asked for {t}"
        )


def forward_table(g: Graph, v: int, t: int, p: SisParams) -> np.ndarray:
    """``table[tau, B]``: best log-probability of reaching infected set ``B`` at slot ``tau``.

    ``B`` is a bitmask over node ids.  One table answers every observation
    and every ``tau <= t`` for source ``v``.
    """
    _check_caps(g, t)
    if not 0 <= v < g.n:
        raise GraphError(f"source {v} is not a node")
    return _sweep(_graph_space(g), 1 << v, t, p)


def viterbi_max_path(g: Graph, v: int, t: int, vi: Iterable[int], p: SisParams) -> MaxPathResult:
    """Exact maximum over every valid path from ``{v}`` to ``vi`` in ``t`` slots."""
    members = as_infected(g, vi)
    table = forward_table(g, v, t, p)
    final = _mask(members)
    value = float(table[t, final])
    if value == -math.inf:
        return MaxPathResult(value, None)
    states = _traceback(_graph_space(g), table, final, p)
    return MaxPathResult(value, InfectionPath(v, tuple(_unmask(s) for s in states)))


def max_path_log_likelihood(
    g: Graph, v: int, vi: Iterable[int], p: SisParams, route: str = "auto"
) -> float:
    """Log-likelihood of the most likely path from ``v`` at the optimal elapsed time.

    ``route`` is ``"construct"`` (trees; spanning subtree size capped),
    ``"viterbi"`` (small graphs) or ``"auto"``, which prefers the
    construction on trees.
    """
    members = as_infected(g, vi)
    t = optimal_elapsed_time(g, v, members)
    if route == "auto":
        route = "construct" if g.is_tree else "viterbi"
    if route == "construct":
        return log_path_probability(g, construct_most_likely_path(g, v, t, members, p), p)
    if route == "viterbi":
        return viterbi_max_path(g, v, t, members, p).log_prob
    raise ValueError(f"unknown route {route!r}")
