"""Executable checks of the optimality results on small random trees.

Each suite draws random trees (at most ``max_nodes`` nodes), runs the exact
state-space sweep for every candidate source, and compares against the tree
algorithms for every non-empty infected set.  Suites return a
:class:`SuiteReport`; the ``verify`` CLI subcommand prints it.

Two of the claims (the constructed path reaching the exact maximum, and the
exact per-slot likelihood ratio) describe the infinite regular tree.  A finite
tree agrees with it only while the infection cannot see a node of a different
degree, so those checks are restricted to *locally regular* cases: every
node within ``t - 1`` hops of the source (``t`` for the ratio) has the same
degree.  Outside that regime they are false, not merely untested.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np

from . import estimators
from .graph import Graph, bfs_distances, regular_tree, spanning_nodes
from .paths import LOG_TOL, VITERBI_MAX_SLOTS, construct_most_likely_path, forward_table, latest_schedule
from .sis import SisParams, log_path_probability

SUITES = ("lemma1", "lemma2", "lemma3", "prop1", "theorem1")
Q_VALUES = (0.2, 0.5, 0.8)
T_SWEEP = 3
MIN_MARGIN = 2


@dataclass
class SuiteReport:
    name: str
    seed: int
    trees: int = 0
    checks: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{self.name}: {status} ({self.trees} trees, {self.checks} checks, {len(self.failures)} failures)"

    def fail(self, g: Graph, message: str) -> None:
        self.failures.append(f"{message}; edges={g.edges()} seed={self.seed}")


# ---------------------------------------------------------------------------
# random trees


def _relabel(n: int, edges: list[tuple[int, int]], rng: random.Random) -> Graph:
    perm = list(range(n))
    rng.shuffle(perm)
    return Graph.from_edges(n, [(perm[a], perm[b]) for a, b in edges])


def random_tree(rng: random.Random, n: int) -> Graph:
    """Random labelled tree on ``n`` nodes from a mix of shapes."""
    if n <= 2:
        return Graph.from_edges(n, [(0, 1)] if n == 2 else [])
    kind = rng.choice(("prufer", "recursive", "path", "spider", "caterpillar", "ternary"))
    if kind == "ternary" and n == 10:
        return _relabel(10, regular_tree(3, 2)[0].edges(), rng)
    if kind == "path":
        return _relabel(n, [(i, i + 1) for i in range(n - 1)], rng)
    if kind == "recursive":
        return _relabel(n, [(i, rng.randrange(i)) for i in range(1, n)], rng)
    if kind == "spider":
        edges, arm_start = [], 1
        while arm_start < n:
            length = rng.randint(1, n - arm_start)
            edges.append((0, arm_start))
            edges.extend((i, i + 1) for i in range(arm_start, arm_start + length - 1))
            arm_start += length
        return _relabel(n, edges, rng)
    if kind == "caterpillar":
        spine = rng.randint(2, n)
        edges = [(i, i + 1) for i in range(spine - 1)]
        edges.extend((rng.randrange(spine), i) for i in range(spine, n))
        return _relabel(n, edges, rng)
    # uniform labelled tree from a Pruefer sequence
    seq = [rng.randrange(n) for _ in range(n - 2)]
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    edges = []
    for x in seq:
        leaf = min(i for i in range(n) if degree[i] == 1)
        edges.append((leaf, x))
        degree[leaf] -= 1
        degree[x] -= 1
    u, w = (i for i in range(n) if degree[i] == 1)
    edges.append((u, w))
    return Graph.from_edges(n, edges)


def leaf_distance(g: Graph) -> np.ndarray:
    """Hop distance from every node to its nearest leaf."""
    leaves = [u for u in range(g.n) if g.degree(u) <= 1]
    return np.min([bfs_distances(g, leaf) for leaf in leaves], axis=0)


def boundary_margin(g: Graph, vi) -> int:
    """Smallest distance from an infected node to a leaf of ``g``."""
    return int(leaf_distance(g)[list(vi)].min())


def margin_trees(seed: int, count: int, max_nodes: int = 10) -> Iterator[Graph]:
    """Random trees that contain at least one node ``MIN_MARGIN`` hops from every leaf."""
    rng = random.Random(seed)
    produced = 0
    while produced < count:
        g = random_tree(rng, rng.randint(5, max_nodes))
        if leaf_distance(g).max() >= MIN_MARGIN:
            produced += 1
            yield g


def regular_radius(g: Graph, v: int) -> int:
    """Largest radius whose ball around ``v`` has a single degree (``n`` if unbounded)."""
    d = bfs_distances(g, v)
    deg = g.degree(v)
    odd = [int(d[u]) for u in range(g.n) if d[u] >= 0 and g.degree(u) != deg]
    return min(odd) - 1 if odd else g.n


def locally_regular(g: Graph, v: int, radius: int) -> bool:
    """True if every node within ``radius`` hops of ``v`` has the same degree."""
    if radius < 0:
        return True
    d = bfs_distances(g, v)
    ball = np.flatnonzero((d >= 0) & (d <= radius))
    return len({g.degree(int(u)) for u in ball}) == 1


# ---------------------------------------------------------------------------
# batched state-space quantities for one tree


class TreeTables:
    """Everything the suites need for one (tree, q), indexed by infected-set bitmask."""

    def __init__(self, g: Graph, q: float):
        self.g = g
        self.p = SisParams(q)
        n = g.n
        self.dist = np.array([bfs_distances(g, u) for u in range(n)])
        size = 1 << n
        # ecc[v, mask] = max distance from v to a node of mask (0 for the empty mask)
        ecc = np.zeros((n, size), dtype=np.int64)
        for i in range(n):
            half = 1 << i
            ecc[:, half : 2 * half] = np.maximum(ecc[:, :half], self.dist[:, i : i + 1])
        self.ecc = ecc
        self.horizon = min(VITERBI_MAX_SLOTS, int(ecc[:, -1].max()) + T_SWEEP)
        self.tables = np.array([forward_table(g, v, self.horizon, self.p) for v in range(n)])
        self.masks = np.arange(1, size)

    def sweep_scores(self, t_extra: int = T_SWEEP) -> np.ndarray:
        """Best log-likelihood per (source, mask) over ``t`` in ``[ecc, ecc + t_extra]``."""
        n = self.g.n
        out = np.full((n, len(self.masks)), -np.inf)
        for v in range(n):
            e = self.ecc[v, self.masks]
            for k in range(t_extra + 1):
                t = np.minimum(e + k, self.horizon)
                vals = np.where(e + k <= self.horizon, self.tables[v, t, self.masks], -np.inf)
                np.maximum(out[v], vals, out=out[v])
        return out


def _members(mask: int) -> tuple[int, ...]:
    return tuple(i for i in range(mask.bit_length()) if mask >> i & 1)


# ---------------------------------------------------------------------------
# suites


def check_sources_are_centers(tt: TreeTables, report: SuiteReport, rng: random.Random) -> None:
    """Every exact most-likely-path source is a Jordan infection center."""
    scores = tt.sweep_scores()
    best = scores.max(axis=0)
    oracle = scores >= best - LOG_TOL
    for j, mask in enumerate(tt.masks):
        vi = _members(int(mask))
        jordan = set(estimators.jordan_centers(tt.g, vi).candidates)
        cands = set(np.flatnonzero(oracle[:, j]).tolist())
        report.checks += 1
        if not cands <= jordan:
            report.fail(tt.g, f"q={tt.p.q} vi={list(vi)}: oracle {sorted(cands)} not within Jordan {sorted(jordan)}")
            return


def check_constructed_path(tt: TreeTables, report: SuiteReport, rng: random.Random, limit: int = 120) -> None:
    """Constructed path reaches the exact maximum; first infections match the schedule."""
    g = tt.g
    cases = []
    for v in range(g.n):
        # locally regular to radius t - 1
        t_max = min(regular_radius(g, v) + 1, tt.horizon)
        for mask in tt.masks[tt.ecc[v, tt.masks] <= t_max]:
            e = int(tt.ecc[v, mask])
            cases.extend((int(mask), v, t) for t in range(e, min(e + T_SWEEP, t_max) + 1))
    if len(cases) > limit:
        cases = rng.sample(cases, limit)
    for mask, v, t in sorted(cases):
        vi = _members(mask)
        path = construct_most_likely_path(g, v, t, vi, tt.p)
        got = log_path_probability(g, path, tt.p)
        want = float(tt.tables[v, t, mask])
        report.checks += 1
        if abs(got - want) > LOG_TOL:
            report.fail(g, f"q={tt.p.q} v={v} t={t} vi={list(vi)}: constructed {got!r} vs exact {want!r}")
            return
        first = path.first_infection()
        schedule = latest_schedule(g, v, t, vi)
        if first != schedule:
            report.fail(g, f"q={tt.p.q} v={v} t={t} vi={list(vi)}: first infections {first} != {schedule}")
            return


def check_elapsed_time(tt: TreeTables, report: SuiteReport, rng: random.Random) -> None:
    """Feasible window, per-slot ratio, and optimal elapsed time."""
    g, p = tt.g, tt.p
    for v in range(g.n):
        e = tt.ecc[v, tt.masks]
        ratio = p.log_q + g.degree(v) * p.log_1mq
        radius = regular_radius(g, v)
        for t in range(tt.horizon + 1):
            vals = tt.tables[v, t, tt.masks]
            report.checks += len(vals)
            wrong = np.flatnonzero(np.isneginf(vals) != (t < e))
            if len(wrong):
                vi = _members(int(tt.masks[wrong[0]]))
                report.fail(g, f"q={p.q} v={v} t={t} vi={list(vi)}: feasibility does not match window [{e[wrong[0]]}, inf)")
                return
            if t < tt.horizon and t <= radius:
                sel = (t >= e) & (t <= e + T_SWEEP - 1)
                diff = tt.tables[v, t + 1, tt.masks[sel]] - vals[sel]
                report.checks += int(sel.sum())
                bad = np.flatnonzero(np.abs(diff - ratio) > LOG_TOL)
                if len(bad):
                    vi = _members(int(tt.masks[sel][bad[0]]))
                    report.fail(g, f"q={p.q} v={v} t={t} vi={list(vi)}: ratio {diff[bad[0]]!r} != {ratio!r}")
                    return
        ok = e + T_SWEEP <= tt.horizon
        at_e = tt.tables[v, e[ok], tt.masks[ok]]
        for k in range(1, T_SWEEP + 1):
            later = tt.tables[v, e[ok] + k, tt.masks[ok]]
            report.checks += int(ok.sum())
            bad = np.flatnonzero(~(at_e > later + LOG_TOL))
            if len(bad):
                vi = _members(int(tt.masks[ok][bad[0]]))
                report.fail(g, f"q={p.q} v={v} vi={list(vi)}: t=ecc+{k} is at least as likely as t=ecc")
                return


def _neighbor_pairs(tt: TreeTables):
    """(mask, u, v) for neighbors in the spanning subtree with ecc(v) < ecc(u)."""
    g = tt.g
    for mask in tt.masks:
        vi = _members(int(mask))
        inside = set(spanning_nodes(g, vi))
        for u in inside:
            for v in g.adj[u]:
                if v in inside and tt.ecc[v, mask] < tt.ecc[u, mask]:
                    yield int(mask), vi, u, v


def check_eccentricity_step(tt: TreeTables, report: SuiteReport, rng: random.Random) -> None:
    """Eccentricity drops by exactly one toward the center, and the farthest node lies ahead."""
    d = tt.dist
    for mask, vi, u, v in _neighbor_pairs(tt):
        report.checks += 1
        ecc_u, ecc_v = int(tt.ecc[u, mask]), int(tt.ecc[v, mask])
        if ecc_u - ecc_v != 1:
            report.fail(tt.g, f"vi={list(vi)} u={u} v={v}: eccentricities {ecc_u} and {ecc_v}")
            return
        # x lies in the part of the tree hanging off v away from u iff d(u,x) = d(v,x) + 1
        for far in (x for x in vi if d[u, x] == ecc_u):
            if d[u, far] != d[v, far] + 1 or d[v, far] != ecc_v:
                report.fail(tt.g, f"vi={list(vi)} u={u} v={v}: farthest node {far} is not beyond v")
                return


def check_likelihood_step(tt: TreeTables, report: SuiteReport, rng: random.Random) -> None:
    """The lower-eccentricity neighbor has the strictly more likely best path."""
    for mask, vi, u, v in _neighbor_pairs(tt):
        report.checks += 1
        better = tt.tables[v, tt.ecc[v, mask], mask]
        worse = tt.tables[u, tt.ecc[u, mask], mask]
        if not better > worse + LOG_TOL:
            report.fail(tt.g, f"q={tt.p.q} vi={list(vi)} u={u} v={v}: {better!r} is not above {worse!r}")
            return


_CHECKS: dict[str, Callable[[TreeTables, SuiteReport, random.Random], None]] = {
    "lemma1": check_constructed_path,
    "lemma2": check_elapsed_time,
    "lemma3": check_likelihood_step,
    "prop1": check_eccentricity_step,
    "theorem1": check_sources_are_centers,
}


def run_suite(name: str, seed: int = 0, cases: int = 200, max_nodes: int = 10) -> SuiteReport:
    """Run one suite on ``cases`` random trees; stops at the first counterexample."""
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    report = SuiteReport(name, seed)
    rng = random.Random(seed ^ 0x5EED)
    # eccentricities do not depend on q
    qs = (0.5,) if name == "prop1" else Q_VALUES
    for g in margin_trees(seed, cases, max_nodes):
        report.trees += 1
        for q in qs:
            _CHECKS[name](TreeTables(g, q), report, rng)
            if report.failures:
                return report
    return report


def run_all(seed: int = 0, cases: int = 200, max_nodes: int = 10) -> list[SuiteReport]:
    return [run_suite(name, seed, cases, max_nodes) for name in SUITES]


def margin_case_count(g: Graph) -> int:
    """Number of non-empty infected sets of ``g`` keeping ``MIN_MARGIN`` from every leaf."""
    safe = int((leaf_distance(g) >= MIN_MARGIN).sum())
    return (1 << safe) - 1 if safe else 0


__all__ = [
    "SUITES",
    "SuiteReport",
    "TreeTables",
    "boundary_margin",
    "leaf_distance",
    "locally_regular",
    "margin_case_count",
    "margin_trees",
    "random_tree",
    "regular_radius",
    "run_all",
    "run_suite",
]
