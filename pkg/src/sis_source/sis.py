"""Discrete-time SIS dynamics.

At every slot the susceptible set is the infected nodes plus their neighbors.
Each susceptible node is infected in the next slot independently with
probability ``q``; everything else is uninfected.  Note that an infected node
is itself susceptible, so it *stays* infected with probability ``q`` and
recovers with ``1 - q``: there is no separate recovery rate.

Random draws are taken from a numpy ``Generator``, one uniform per
susceptible node in ascending node order, so a seed fixes the path exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ._backend import kernels
from .graph import Graph, GraphError


@dataclass(frozen=True)
class SisParams:
    q: float

    def __post_init__(self):
        if not 0.0 < self.q < 1.0:
            raise ValueError(f"infection probability q must lie in the open interval (0, 1), got {self.q}")

    @property
    def log_q(self) -> float:
        return math.log(self.q)

    @property
    def log_1mq(self) -> float:
        return math.log1p(-self.q)


@dataclass(frozen=True)
class InfectionPath:
    """Infected set of every slot ``0..elapsed`` (each a sorted tuple)."""

    source: int
    slots: tuple[tuple[int, ...], ...]

    @property
    def elapsed(self) -> int:
        return len(self.slots) - 1

    @property
    def final(self) -> tuple[int, ...]:
        return self.slots[-1]

    def states(self, tau: int, n: int) -> np.ndarray:
        out = np.zeros(n, dtype=np.uint8)
        out[list(self.slots[tau])] = 1
        return out

    def first_infection(self) -> dict[int, int]:
        first: dict[int, int] = {}
        for tau, infected in enumerate(self.slots):
            for u in infected:
                first.setdefault(u, tau)
        return first

    def dump(self) -> str:
        return "".join(
            f"{tau}: {' '.join(map(str, infected))}".rstrip() + "\n"
            for tau, infected in enumerate(self.slots)
        )

    @classmethod
    def from_sets(cls, source: int, slots: Iterable[Iterable[int]]) -> "InfectionPath":
        return cls(source, tuple(tuple(sorted(set(s))) for s in slots))


def parse_path(text: str) -> InfectionPath:
    """Inverse of :meth:`InfectionPath.dump`; the source is slot 0's single node."""
    slots = []
    for lineno, line in enumerate(text.splitlines()):
        head, _, rest = line.partition(":")
        if int(head) != lineno:
            raise ValueError(f"slot line {lineno} is labelled {head!r}")
        slots.append(tuple(int(tok) for tok in rest.split()))
    if not slots or len(slots[0]) != 1:
        raise ValueError("slot 0 must hold exactly the source")
    return InfectionPath(slots[0][0], tuple(slots))


def _ids(infected) -> np.ndarray:
    return np.asarray(infected, dtype=np.int64)


def susceptible_of(g: Graph, infected: Sequence[int]) -> np.ndarray:
    """Susceptible set (sorted ids) for a set of infected node ids."""
    return kernels.susceptible(g.indptr, g.indices, _ids(infected))


def susceptible_set(g: Graph, states: Sequence[int]) -> list[int]:
    """Infected nodes together with all their neighbors."""
    states = np.asarray(states)
    if states.shape != (g.n,):
        raise GraphError(f"state vector has shape {states.shape}, expected ({g.n},)")
    return susceptible_of(g, np.flatnonzero(states)).tolist()


def _advance(g: Graph, infected: np.ndarray, q: float, rng: np.random.Generator) -> np.ndarray:
    sus = kernels.susceptible(g.indptr, g.indices, infected)
    if len(sus) == 0:
        return sus
    return sus[rng.random(len(sus)) < q]


def step(g: Graph, states: Sequence[int], p: SisParams, rng: np.random.Generator) -> np.ndarray:
    """One slot of SIS dynamics on a full state vector."""
    states = np.asarray(states)
    nxt = _advance(g, np.flatnonzero(states), p.q, rng)
    out = np.zeros(g.n, dtype=np.uint8)
    out[nxt] = 1
    return out


def simulate(g: Graph, source: int, p: SisParams, t: int, rng: np.random.Generator) -> InfectionPath:
    """Run ``t`` slots from a single infected ``source``.

    The final slot may be empty; callers decide what to do about that.
    Equivalent to ``t`` calls of :func:`step` with the same generator.
    """
    if t < 0:
        raise ValueError(f"elapsed time must be non-negative, got {t}")
    if not 0 <= source < g.n:
        raise GraphError(f"source {source} is not a node")
    infected = _ids([source])
    slots = [(int(source),)]
    for _ in range(t):
        infected = _advance(g, infected, p.q, rng)
        slots.append(tuple(infected.tolist()))
    return InfectionPath(int(source), tuple(slots))


def is_valid_path(g: Graph, path: InfectionPath) -> bool:
    """Slot 0 is exactly the source and each slot lies inside the previous susceptible set."""
    if path.slots[0] != (path.source,):
        return False
    for infected in path.slots:
        if any(not 0 <= u < g.n for u in infected):
            return False
    for before, after in zip(path.slots, path.slots[1:]):
        if not set(after) <= set(susceptible_of(g, before).tolist()):
            return False
    return True


def log_path_probability(g: Graph, path: InfectionPath, p: SisParams) -> float:
    """Natural-log probability of ``path`` given its source; ``-inf`` if impossible."""
    if not is_valid_path(g, path):
        return -math.inf
    infected_draws = 0
    clear_draws = 0
    for before, after in zip(path.slots, path.slots[1:]):
        n_sus = len(susceptible_of(g, before))
        infected_draws += len(after)
        clear_draws += n_sus - len(after)
    return infected_draws * p.log_q + clear_draws * p.log_1mq
