import itertools
import math
from collections import Counter

import numpy as np
import pytest

from sis_source.graph import Graph, GraphError, regular_tree
from sis_source.sis import (
    InfectionPath,
    SisParams,
    is_valid_path,
    log_path_probability,
    parse_path,
    simulate,
    step,
    susceptible_set,
)

from conftest import all_paths, path_graph, star


class TestParams:
    @pytest.mark.parametrize("q", [0.0, 1.0, -0.2, 1.5])
    def test_open_interval(self, q):
        with pytest.raises(ValueError, match=r"open interval \(0, 1\)"):
            SisParams(q)

    def test_logs(self):
        p = SisParams(0.25)
        assert p.log_q == pytest.approx(math.log(0.25))
        assert p.log_1mq == pytest.approx(math.log(0.75))


def test_susceptible_set(backend):
    g = path_graph(5)
    assert susceptible_set(g, [0, 0, 1, 0, 0]) == [1, 2, 3]
    assert susceptible_set(g, [1, 0, 0, 0, 1]) == [0, 1, 3, 4]
    assert susceptible_set(g, [0] * 5) == []
    with pytest.raises(GraphError, match="shape"):
        susceptible_set(g, [0, 1])


class TestSimulate:
    def test_zero_slots(self, backend):
        g, root = regular_tree(3, 2)
        path = simulate(g, root, SisParams(0.5), 0, np.random.default_rng(0))
        assert path.slots == ((root,),)

    def test_deterministic_and_matches_step(self, backend):
        g, root = regular_tree(3, 5)
        p = SisParams(0.6)
        a = simulate(g, root, p, 4, np.random.default_rng(9))
        b = simulate(g, root, p, 4, np.random.default_rng(9))
        assert a == b
        rng = np.random.default_rng(9)
        state = np.zeros(g.n, dtype=np.uint8)
        state[root] = 1
        for tau in range(1, 5):
            state = step(g, state, p, rng)
            assert tuple(np.flatnonzero(state).tolist()) == a.slots[tau]

    def test_paths_are_valid(self, backend):
        g, root = regular_tree(4, 5)
        for seed in range(20):
            path = simulate(g, root, SisParams(0.7), 4, np.random.default_rng(seed))
            assert is_valid_path(g, path)
            assert log_path_probability(g, path, SisParams(0.7)) > -math.inf

    def test_bad_arguments(self):
        g = path_graph(3)
        with pytest.raises(ValueError, match="non-negative"):
            simulate(g, 0, SisParams(0.5), -1, np.random.default_rng(0))
        with pytest.raises(GraphError):
            simulate(g, 3, SisParams(0.5), 1, np.random.default_rng(0))

    def test_empirical_frequencies_match_path_probabilities(self):
        # star with 2 leaves, 2 slots: compare Monte-Carlo frequencies against exact probabilities
        g = star(2)
        p = SisParams(0.4)
        n = 40_000
        rng = np.random.default_rng(123)
        counts = Counter(simulate(g, 0, p, 2, rng).slots for _ in range(n))
        for path in all_paths(g, 0, 2):
            prob = math.exp(log_path_probability(g, path, p))
            sd = math.sqrt(prob * (1 - prob) / n)
            assert abs(counts[path.slots] / n - prob) < 5 * sd + 1e-12


class TestPathProbability:
    def test_hand_computed(self):
        # path 0-1-2, source 1: S={0,1,2}; then {0} -> S={0,1}
        g = path_graph(3)
        p = SisParams(0.3)
        path = InfectionPath(1, ((1,), (0,), (0, 1)))
        want = 1 * math.log(0.3) + 2 * math.log(0.7) + 2 * math.log(0.3)
        assert log_path_probability(g, path, p) == pytest.approx(want, abs=1e-12)

    def test_invalid_paths(self):
        g = path_graph(4)
        p = SisParams(0.5)
        assert log_path_probability(g, InfectionPath(0, ((0,), (2,))), p) == -math.inf
        assert log_path_probability(g, InfectionPath(0, ((1,), (1,))), p) == -math.inf
        assert log_path_probability(g, InfectionPath(0, ((0,), (), (1,))), p) == -math.inf
        assert not is_valid_path(g, InfectionPath(0, ((0,), (9,))))

    @pytest.mark.parametrize("q", [0.15, 0.5, 0.85])
    def test_probabilities_sum_to_one(self, q):
        p = SisParams(q)
        for n in range(1, 5):
            for edges in _all_graphs(n):
                g = Graph.from_edges(n, edges)
                for t in range(4):
                    total = math.fsum(math.exp(log_path_probability(g, path, p)) for path in all_paths(g, 0, t))
                    assert abs(total - 1.0) <= 1e-9


def _all_graphs(n):
    pairs = list(itertools.combinations(range(n), 2))
    for r in range(len(pairs) + 1):
        yield from itertools.combinations(pairs, r)


class TestDump:
    def test_round_trip(self):
        path = InfectionPath(2, ((2,), (1, 2), (), (0,)))
        text = path.dump()
        assert text == "0: 2\n1: 1 2\n2:\n3: 0\n"
        assert parse_path(text) == path

    def test_first_infection_and_states(self):
        path = InfectionPath(0, ((0,), (1,), (0, 2)))
        assert path.first_infection() == {0: 0, 1: 1, 2: 2}
        assert path.states(2, 4).tolist() == [1, 0, 1, 0]
        assert path.elapsed == 2 and path.final == (0, 2)

    def test_parse_errors(self):
        with pytest.raises(ValueError):
            parse_path("1: 0\n")
        with pytest.raises(ValueError):
            parse_path("0: 0 1\n")
