import math
import random

import numpy as np
import pytest

from sis_source import estimators
from sis_source.estimators import distance_centrality, exhaustive_oracle_estimate, jordan_centers, oracle_scores
from sis_source.graph import Graph, GraphError, spanning_nodes
from sis_source.sis import SisParams

from conftest import floyd_warshall, path_graph, random_labeled_tree, star


def naive_jordan(g, vi):
    d = floyd_warshall(g)[:, list(vi)]
    ecc = d.max(axis=1)
    return sorted(np.flatnonzero(ecc == ecc.min()).tolist())


def naive_dc(g, vi):
    d = floyd_warshall(g)[:, list(vi)].sum(axis=1)
    h = spanning_nodes(g, list(vi))
    best = min(d[u] for u in h)
    return sorted(u for u in h if d[u] == best)


class TestJordan:
    def test_examples(self):
        assert jordan_centers(path_graph(5), [0, 4]).line() == "jordan chosen=2 ecc=2 candidates=[2]"
        est = jordan_centers(path_graph(4), [0, 3])
        assert est.candidates == (1, 2) and est.chosen == 1
        assert est.tie_break == "distance_sum+smallest_id"
        assert jordan_centers(path_graph(4), [3]).candidates == (3,)

    def test_twin_centers_resolved_by_distance_sum(self):
        # 0-1-2-3 with an extra leaf 4 on node 2: centers {1,2}; node 2 is closer in total
        g = Graph.from_edges(5, [(0, 1), (1, 2), (2, 3), (2, 4)])
        est = jordan_centers(g, [0, 3, 4])
        assert est.candidates == (1, 2) and est.chosen == 2 and est.tie_break == "distance_sum"

    def test_matches_naive_on_random_trees(self, backend):
        rng = random.Random(8)
        for _ in range(60):
            g = random_labeled_tree(rng, rng.randint(1, 25))
            vi = rng.sample(range(g.n), rng.randint(1, g.n))
            est = jordan_centers(g, vi)
            assert list(est.candidates) == naive_jordan(g, vi)
            assert len(est.candidates) <= 2
            if len(est.candidates) == 2:
                assert est.candidates[1] in g.adj[est.candidates[0]]

    def test_non_tree_fallback(self):
        g = Graph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 0), (2, 4)])
        assert list(jordan_centers(g, [0, 4]).candidates) == naive_jordan(g, [0, 4])

    def test_disconnected(self):
        g = Graph.from_edges(4, [(0, 1), (2, 3)])
        with pytest.raises(GraphError, match="reaches every"):
            jordan_centers(g, [0, 3])

    def test_empty_observation(self):
        with pytest.raises(GraphError, match="observation must be non-empty"):
            jordan_centers(path_graph(3), [])


class TestDistanceCentrality:
    def test_examples(self):
        est = distance_centrality(path_graph(5), [0, 4])
        assert est.candidates == (0, 1, 2, 3, 4) and est.chosen == 2
        assert est.tie_break == "eccentricity"
        assert est.line() == "distance_centrality chosen=2 sum=4 candidates=[0,1,2,3,4]"
        assert distance_centrality(star(4), [1, 2, 3]).candidates == (0,)

    def test_restricted_to_spanning_subtree(self):
        # a single infected node: its own position is the unique minimum
        assert distance_centrality(path_graph(6), [4]).candidates == (4,)

    def test_matches_naive_on_random_trees(self, backend):
        rng = random.Random(9)
        for _ in range(60):
            g = random_labeled_tree(rng, rng.randint(1, 25))
            vi = rng.sample(range(g.n), rng.randint(1, g.n))
            assert list(distance_centrality(g, vi).candidates) == naive_dc(g, vi)

    def test_rejects_non_tree(self):
        g = Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
        with pytest.raises(GraphError, match="trees"):
            distance_centrality(g, [0])


class TestOracle:
    def test_three_node_path(self):
        est = exhaustive_oracle_estimate(path_graph(3), [0, 2], SisParams(0.5), 3)
        assert est.chosen == 1 and est.candidates == (1,)
        assert est.line().startswith("exhaustive_oracle chosen=1 logp=")

    def test_scores_are_best_over_window(self):
        g = star(3)
        p = SisParams(0.3)
        s0 = oracle_scores(g, [1, 2], p, 0)
        s2 = oracle_scores(g, [1, 2], p, 2)
        for v in range(g.n):
            assert s2[v] >= s0[v]

    def test_unreachable_nodes_score_minus_inf(self):
        g = Graph.from_edges(4, [(0, 1), (1, 2)])
        scores = oracle_scores(g, [0, 2], SisParams(0.5), 1)
        assert scores[3] == -math.inf
        with pytest.raises(GraphError):
            exhaustive_oracle_estimate(g, [0, 3], SisParams(0.5), 1)

    def test_negative_extra(self):
        with pytest.raises(ValueError, match="non-negative"):
            exhaustive_oracle_estimate(path_graph(3), [0], SisParams(0.5), -1)

    def test_within_jordan_on_small_trees(self, backend):
        rng = random.Random(10)
        for _ in range(25):
            g = random_labeled_tree(rng, rng.randint(2, 8))
            vi = rng.sample(range(g.n), rng.randint(1, g.n))
            est = exhaustive_oracle_estimate(g, vi, SisParams(rng.choice([0.2, 0.5, 0.8])), 3)
            assert set(est.candidates) <= set(jordan_centers(g, vi).candidates)


def test_method_names():
    assert (estimators.JORDAN, estimators.DISTANCE_CENTRALITY, estimators.ORACLE) == (
        "jordan",
        "distance_centrality",
        "exhaustive_oracle",
    )
