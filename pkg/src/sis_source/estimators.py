"""Source estimators: Jordan infection center, distance centrality, and the exact oracle."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .graph import (
    UNREACHABLE,
    Graph,
    GraphError,
    as_infected,
    bfs_distances,
    bfs_parents,
    spanning_nodes,
)
from .paths import LOG_TOL, _mask, forward_table
from .sis import SisParams

JORDAN = "jordan"
DISTANCE_CENTRALITY = "distance_centrality"
ORACLE = "exhaustive_oracle"

_SCORE_LABEL = {JORDAN: "ecc", DISTANCE_CENTRALITY: "sum", ORACLE: "logp"}


@dataclass(frozen=True)
class Estimate:
    method: str
    chosen: int
    candidates: tuple[int, ...]
    scores: dict[int, float] = field(compare=False)
    tie_break: str = "unique"

    @property
    def score(self) -> float:
        return self.scores[self.chosen]

    def line(self) -> str:
        score = self.score
        text = f"{score:.6g}" if isinstance(score, float) and not score.is_integer() else f"{int(score)}"
        cands = ",".join(map(str, self.candidates))
        return f"{self.method} chosen={self.chosen} {_SCORE_LABEL[self.method]}={text} candidates=[{cands}]"


def _distance_sums(g: Graph, members: Iterable[int], nodes: Iterable[int]) -> dict[int, int]:
    idx = list(members)
    return {v: int(bfs_distances(g, v)[idx].sum()) for v in nodes}


def _pick(cands: list[int], primary: dict[int, float] | None, rule: str) -> tuple[int, str]:
    if len(cands) == 1:
        return cands[0], "unique"
    if primary is None:
        return min(cands), "smallest_id"
    best = min(primary[v] for v in cands)
    tied = [v for v in cands if primary[v] == best]
    if len(tied) == 1:
        return tied[0], rule
    return min(tied), f"{rule}+smallest_id"


def jordan_centers(g: Graph, vi: Iterable[int]) -> Estimate:
    """Nodes of minimum infection eccentricity.

    On a tree this takes two BFS passes: the farthest infected node ``a`` from
    any infected node, then the farthest infected node ``b`` from ``a``; the
    centers are the middle node(s) of the ``a``-``b`` path.  Other graphs fall
    back to scoring every node that reaches all infected nodes.

    Twin centers are resolved by the smaller distance sum to the infected
    set, then by the smaller id.
    """
    members = as_infected(g, vi)
    if g.is_tree:
        cands, ecc = _tree_jordan(g, members)
    else:
        cands, ecc = _naive_jordan(g, members)
    scores = {v: float(ecc) for v in cands}
    sums = _distance_sums(g, members, cands) if len(cands) > 1 else None
    chosen, rule = _pick(cands, sums, "distance_sum")
    return Estimate(JORDAN, chosen, tuple(cands), scores, rule)


def _farthest(dist: np.ndarray, members: tuple[int, ...]) -> int:
    d = dist[list(members)]
    return members[int(np.argmax(d))]  # first maximum: smallest id


def _tree_jordan(g: Graph, members: tuple[int, ...]) -> tuple[list[int], int]:
    a = _farthest(bfs_distances(g, members[0]), members)
    dist_a, parent = bfs_parents(g, a)
    b = _farthest(dist_a, members)
    length = int(dist_a[b])
    path = [b]
    while path[-1] != a:
        path.append(int(parent[path[-1]]))
    mid = length // 2
    if length % 2 == 0:
        return [path[mid]], mid
    return sorted((path[mid], path[mid + 1])), mid + 1


def _naive_jordan(g: Graph, members: tuple[int, ...]) -> tuple[list[int], int]:
    ecc = np.zeros(g.n, dtype=np.int64)
    reach = np.ones(g.n, dtype=bool)
    for u in members:
        d = bfs_distances(g, u)
        reach &= d != UNREACHABLE
        np.maximum(ecc, d, out=ecc)
    if not reach.any():
        raise GraphError("no node reaches every infected node")
    best = int(ecc[reach].min())
    return np.flatnonzero(reach & (ecc == best)).tolist(), best


def distance_centrality(g: Graph, vi: Iterable[int]) -> Estimate:
    """Minimum total distance to the infected nodes, over the subtree spanning them.

    Two passes over the spanning subtree: infected counts below each node,
    then re-rooting ``sum[child] = sum[parent] + K - 2 * below[child]``.
    Ties go to the smaller infection eccentricity, then the smaller id.
    """
    members = as_infected(g, vi)
    if not g.is_tree:
        raise GraphError("distance centrality is only defined here on trees")
    nodes = spanning_nodes(g, members)
    inside = set(nodes)
    root = members[0]
    dist, parent = bfs_parents(g, root)
    order = sorted(nodes, key=lambda u: (dist[u], u))
    observed = set(members)
    below = {u: int(u in observed) for u in order}
    for u in reversed(order[1:]):
        below[int(parent[u])] += below[u]
    k = len(members)
    sums = {root: int(sum(dist[u] for u in members))}
    for u in order[1:]:
        sums[u] = sums[int(parent[u])] + k - 2 * below[u]
    best = min(sums.values())
    cands = sorted(u for u in inside if sums[u] == best)
    scores = {v: float(best) for v in cands}
    ecc = None
    if len(cands) > 1:
        ecc = {v: int(bfs_distances(g, v)[list(members)].max()) for v in cands}
    chosen, rule = _pick(cands, ecc, "eccentricity")
    return Estimate(DISTANCE_CENTRALITY, chosen, tuple(cands), scores, rule)


def oracle_scores(g: Graph, vi: Iterable[int], p: SisParams, t_extra: int) -> dict[int, float]:
    """Best path log-likelihood of each node as source, over ``t`` in ``[ecc, ecc + t_extra]``."""
    members = as_infected(g, vi)
    final = _mask(members)
    scores = {}
    for v in range(g.n):
        dist = bfs_distances(g, v)[list(members)]
        if np.any(dist == UNREACHABLE):
            scores[v] = -math.inf
            continue
        ecc = int(dist.max())
        table = forward_table(g, v, ecc + t_extra, p)
        scores[v] = float(table[ecc : ecc + t_extra + 1, final].max())
    return scores


def exhaustive_oracle_estimate(g: Graph, vi: Iterable[int], p: SisParams, t_extra: int) -> Estimate:
    """Exact most-likely-path source over every node (small graphs only)."""
    members = as_infected(g, vi)
    if t_extra < 0:
        raise ValueError(f"t_extra must be non-negative, got {t_extra}")
    scores = oracle_scores(g, members, p, t_extra)
    top = max(scores.values())
    if top == -math.inf:
        raise GraphError("no node reaches every infected node")
    cands = [v for v in range(g.n) if scores[v] >= top - LOG_TOL]
    sums = _distance_sums(g, members, cands) if len(cands) > 1 else None
    chosen, rule = _pick(cands, sums, "distance_sum")
    return Estimate(ORACLE, chosen, tuple(cands), {v: scores[v] for v in cands}, rule)
