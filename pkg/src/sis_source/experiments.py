"""Monte-Carlo comparison of the Jordan-center (OIP) and distance-centrality estimators.

Each trial infects the root of a regular tree deep enough that the infection
never reaches the leaves, observes the infected set after ``t`` slots, and
scores both estimators by detection and error distance.

Every trial draws from its own generator, seeded by
``(master_seed, degree, trial[, attempt])``, so results do not depend on the
order or the process that runs them.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import estimators
from .graph import Graph, bfs_distances, regular_tree, spanning_nodes
from .sis import SisParams, simulate

MAX_RESAMPLES = 10_000
METHODS = ("oip", "dc")

TRIALS_HEADER = [
    "degree", "trial", "q", "t", "source", "snapshot_size", "resamples",
    "oip_chosen", "oip_err", "oip_hit", "oip_set_hit",
    "dc_chosen", "dc_err", "dc_hit", "dc_set_hit",
]


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    degrees: tuple[int, ...] = (2, 3, 4, 5, 6)
    trials: int = 1000
    t_min: int = 3
    t_max: int = 5
    seed: int = 42

    def __post_init__(self):
        object.__setattr__(self, "degrees", tuple(int(d) for d in self.degrees))
        if not self.degrees:
            raise ConfigError("at least one degree is required")
        if min(self.degrees) < 2:
            raise ConfigError(f"degrees must be at least 2, got {list(self.degrees)}")
        if self.trials < 1:
            raise ConfigError(f"trials must be at least 1, got {self.trials}")
        if not 0 <= self.t_min <= self.t_max:
            raise ConfigError(f"need 0 <= t_min <= t_max, got t_min={self.t_min} t_max={self.t_max}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must fit in 64 unsigned bits, got {self.seed}")

    @property
    def depth(self) -> int:
        return self.t_max + 1


_CONFIG_KEYS = {"degrees", "trials", "seed", "t_min", "t_max"}


def parse_config(text: str) -> dict:
    """Parse ``key=value`` lines into ExperimentConfig keyword arguments."""
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (s.strip() for s in line.partition("="))
        if not sep or key not in _CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: expected one of {sorted(_CONFIG_KEYS)} as key=value, got {raw!r}")
        try:
            if key == "degrees":
                out[key] = tuple(int(x) for x in value.split(",") if x.strip())
            else:
                out[key] = int(value)
        except ValueError:
            raise ConfigError(f"line {lineno}: bad value for {key}: {value!r}") from None
    return out


def read_config(path: str | Path) -> dict:
    try:
        return parse_config(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None


@dataclass(frozen=True)
class MethodOutcome:
    chosen: int
    candidates: int
    err: int
    hit: bool
    set_hit: bool


@dataclass(frozen=True)
class TrialRecord:
    degree: int
    trial: int
    q: float
    t: int
    source: int
    snapshot_size: int
    resamples: int
    oip: MethodOutcome
    dc: MethodOutcome

    def row(self) -> list[str]:
        cells = [self.degree, self.trial, _fmt(self.q), self.t, self.source, self.snapshot_size, self.resamples]
        for m in (self.oip, self.dc):
            cells += [m.chosen, m.err, int(m.hit), int(m.set_hit)]
        return [str(c) for c in cells]


@dataclass(frozen=True)
class MethodSummary:
    degree: int
    method: str
    trials: int
    strict_rate: float
    set_rate: float
    mean_err: float
    hist: tuple[int, ...]  # hist[k] = trials with error distance k


@dataclass
class SummaryStats:
    rows: list[MethodSummary] = field(default_factory=list)

    def get(self, degree: int, method: str) -> MethodSummary:
        for r in self.rows:
            if r.degree == degree and r.method == method:
                return r
        raise KeyError((degree, method))

    @property
    def max_err(self) -> int:
        return max((len(r.hist) - 1 for r in self.rows), default=0)


def _fmt(x: float) -> str:
    return f"{x:.6g}"


# ---------------------------------------------------------------------------
# trials


@lru_cache(maxsize=16)
def _tree(degree: int, depth: int) -> tuple[Graph, int, np.ndarray]:
    g, root = regular_tree(degree, depth)
    return g, root, bfs_distances(g, root)


def trial_rng(seed: int, degree: int, trial: int, attempt: int = 0) -> np.random.Generator:
    key = (degree, trial) if attempt == 0 else (degree, trial, attempt)
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def _relabeled(g: Graph, nodes: Sequence[int], rng: np.random.Generator) -> tuple[Graph, list[int]]:
    """Subtree induced by ``nodes`` under random labels; returns it and the label -> node map."""
    order = [int(nodes[i]) for i in rng.permutation(len(nodes))]
    label = {u: i for i, u in enumerate(order)}
    adj = [[label[w] for w in g.adj[u] if w in label] for u in order]
    return Graph(len(order), adj), order


def _outcome(est: estimators.Estimate, order: list[int], source: int, depth: np.ndarray) -> MethodOutcome:
    chosen = order[est.chosen]
    cands = {order[c] for c in est.candidates}
    # depth from the root is the distance to the source
    return MethodOutcome(chosen, len(cands), int(depth[chosen]), chosen == source, source in cands)


def run_trial(cfg: ExperimentConfig, degree: int, trial: int) -> TrialRecord:
    """One trial: draw q and t, simulate from the root, score both estimators.

    An empty snapshot redraws q, t and the path from a derived seed.  Both
    estimators only look inside the subtree spanning the snapshot, so they
    are run on that subtree with labels shuffled per trial; otherwise the
    smallest-id tie-break would systematically favor the root.
    """
    g, source, depth = _tree(degree, cfg.depth)
    for attempt in range(MAX_RESAMPLES + 1):
        rng = trial_rng(cfg.seed, degree, trial, attempt)
        q = rng.random()
        while q == 0.0:
            q = rng.random()
        t = int(rng.integers(cfg.t_min, cfg.t_max + 1))
        snapshot = simulate(g, source, SisParams(q), t, rng).final
        if snapshot:
            break
    else:
        raise RuntimeError(f"degree {degree} trial {trial}: snapshot empty after {MAX_RESAMPLES} resamples")
    if int(depth[list(snapshot)].max()) >= cfg.depth:
        raise AssertionError(f"degree {degree} trial {trial}: infection reached the tree boundary")
    h, order = _relabeled(g, spanning_nodes(g, snapshot), rng)
    label = {u: i for i, u in enumerate(order)}
    vi = [label[u] for u in snapshot]
    oip = _outcome(estimators.jordan_centers(h, vi), order, source, depth)
    dc = _outcome(estimators.distance_centrality(h, vi), order, source, depth)
    return TrialRecord(degree, trial, q, t, source, len(snapshot), attempt, oip, dc)


def _run_chunk(args: tuple[ExperimentConfig, list[tuple[int, int]]]) -> list[TrialRecord]:
    cfg, jobs = args
    return [run_trial(cfg, d, i) for d, i in jobs]


def run_experiment(cfg: ExperimentConfig, workers: int = 1) -> tuple[list[TrialRecord], SummaryStats]:
    """All trials, in (degree, trial) order, and their summary.

    ``workers > 1`` spreads trials over processes; the output is identical.
    """
    jobs = [(d, i) for d in cfg.degrees for i in range(cfg.trials)]
    if workers <= 1:
        records = _run_chunk((cfg, jobs))
    else:
        chunks = [jobs[k::workers] for k in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, [(cfg, c) for c in chunks]))
        records = sorted((r for part in parts for r in part), key=lambda r: (cfg.degrees.index(r.degree), r.trial))
    return records, summarize(records)


def summarize(records: Iterable[TrialRecord]) -> SummaryStats:
    by_degree: dict[int, list[TrialRecord]] = {}
    for r in records:
        by_degree.setdefault(r.degree, []).append(r)
    stats = SummaryStats()
    for degree, recs in by_degree.items():
        for method in METHODS:
            outs = [getattr(r, method) for r in recs]
            errs = np.array([o.err for o in outs])
            n = len(outs)
            stats.rows.append(
                MethodSummary(
                    degree,
                    method,
                    n,
                    sum(o.hit for o in outs) / n,
                    sum(o.set_hit for o in outs) / n,
                    float(errs.mean()),
                    tuple(np.bincount(errs).tolist()),
                )
            )
    return stats


# ---------------------------------------------------------------------------
# output


def trials_csv(records: Iterable[TrialRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRIALS_HEADER)
    w.writerows(r.row() for r in records)
    return buf.getvalue()


def summary_csv(stats: SummaryStats) -> str:
    k = stats.max_err
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["degree", "method", "strict_rate", "set_rate", "mean_err"] + [f"hist_{i}" for i in range(k + 1)])
    for r in stats.rows:
        hist = list(r.hist) + [0] * (k + 1 - len(r.hist))
        w.writerow([r.degree, r.method, _fmt(r.strict_rate), _fmt(r.set_rate), _fmt(r.mean_err)] + hist)
    return buf.getvalue()


def write_csv(content: str, destination: str | Path) -> Path:
    path = Path(destination)
    try:
        with open(path, "w", newline="") as fh:
            fh.write(content)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write {path}: {exc.strerror}") from None
    return path


def write_outputs(records: list[TrialRecord], stats: SummaryStats, out_dir: str | Path) -> tuple[Path, Path]:
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot create {out}: {exc.strerror}") from None
    return write_csv(trials_csv(records), out / "trials.csv"), write_csv(summary_csv(stats), out / "summary.csv")


def format_table(stats: SummaryStats) -> str:
    """Side-by-side OIP vs DC table for humans."""
    lines = [f"{'degree':>6}  {'oip_rate':>8}  {'dc_rate':>8}  {'oip_set':>8}  {'dc_set':>8}  {'oip_err':>8}  {'dc_err':>8}"]
    for d in dict.fromkeys(r.degree for r in stats.rows):
        o, c = stats.get(d, "oip"), stats.get(d, "dc")
        lines.append(
            f"{d:>6}  {o.strict_rate:>8.3f}  {c.strict_rate:>8.3f}  {o.set_rate:>8.3f}  "
            f"{c.set_rate:>8.3f}  {o.mean_err:>8.3f}  {c.mean_err:>8.3f}"
        )
    return "\n".join(lines)


__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "MAX_RESAMPLES",
    "MethodOutcome",
    "MethodSummary",
    "SummaryStats",
    "TRIALS_HEADER",
    "TrialRecord",
    "format_table",
    "parse_config",
    "read_config",
    "run_experiment",
    "run_trial",
    "summarize",
    "summary_csv",
    "trials_csv",
    "write_csv",
    "write_outputs",
]
