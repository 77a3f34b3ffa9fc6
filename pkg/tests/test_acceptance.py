"""Acceptance criteria, each at its stated tolerance.

Run under pytest, or standalone with ``python3 tests/test_acceptance.py``;
either way one ``criterion N: PASS|FAIL`` line is printed per criterion.
"""

import itertools
import math
import random
import sys
import time
from functools import lru_cache
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sis_source import estimators, verify  # noqa: E402
from sis_source.experiments import ExperimentConfig, run_experiment, summary_csv, trials_csv  # noqa: E402
from sis_source.graph import Graph, spanning_nodes  # noqa: E402
from sis_source.paths import LOG_TOL  # noqa: E402
from sis_source.sis import SisParams, log_path_probability  # noqa: E402

from conftest import all_paths, floyd_warshall  # noqa: E402

SEED = 2024
TREES = 200
DEGREES = (2, 3, 4, 5, 6)


def _line(number, ok, detail):
    return f"criterion {number}: {'PASS' if ok else 'FAIL'} {detail}"


@pytest.fixture
def say(capsys):
    def emit(text):
        with capsys.disabled():
            print("\n" + text)

    return emit


# ---------------------------------------------------------------------------
# criteria


def criterion_1():
    start = time.perf_counter()
    report = verify.run_suite("theorem1", SEED, TREES)
    elapsed = time.perf_counter() - start
    # the batched oracle must agree with the public estimator
    rng = random.Random(SEED)
    agree = sampled = 0
    margin_sets = 0
    for g in verify.margin_trees(SEED, TREES):
        margin_sets += verify.margin_case_count(g)
    for g in itertools.islice(verify.margin_trees(SEED, TREES), 20):
        q = rng.choice(verify.Q_VALUES)
        tt = verify.TreeTables(g, q)
        scores = tt.sweep_scores()
        for j in rng.sample(range(len(tt.masks)), 10):
            vi = [u for u in range(g.n) if tt.masks[j] >> u & 1]
            batched = set(np.flatnonzero(scores[:, j] >= scores[:, j].max() - LOG_TOL).tolist())
            sampled += 1
            agree += batched == set(estimators.exhaustive_oracle_estimate(g, vi, SisParams(q), verify.T_SWEEP).candidates)
    ok = report.passed and report.trees >= 200 and elapsed < 120 and agree == sampled
    detail = (
        f"oracle within Jordan set in {report.checks - len(report.failures)}/{report.checks} "
        f"(tree, q, vi) cases over {report.trees} trees ({margin_sets} infected sets per q at margin >= 2); "
        f"batched oracle == estimator on {agree}/{sampled}; {elapsed:.1f}s (target < 120s)"
    )
    return ok, detail, report


def criterion_2():
    report = verify.run_suite("lemma1", SEED, TREES)
    return report.passed, f"{report.checks} locally regular cases; {report.summary()}", report


def criterion_3():
    report = verify.run_suite("lemma2", SEED, TREES)
    return report.passed, f"{report.checks} checks of window, ratio and argmax; {report.summary()}", report


def criterion_4():
    prop = verify.run_suite("prop1", SEED, TREES)
    lem = verify.run_suite("lemma3", SEED, TREES)
    ok = prop.passed and lem.passed
    return ok, f"{prop.summary()}; {lem.summary()}", (prop if not prop.passed else lem)


def criterion_5():
    worst = 0.0
    cases = 0
    for n in range(1, 5):
        pairs = list(itertools.combinations(range(n), 2))
        for r in range(len(pairs) + 1):
            for edges in itertools.combinations(pairs, r):
                g = Graph.from_edges(n, edges)
                for q in (0.1, 0.37, 0.5, 0.9):
                    p = SisParams(q)
                    for source in range(n):
                        for t in range(4):
                            total = math.fsum(math.exp(log_path_probability(g, path, p)) for path in all_paths(g, source, t))
                            worst = max(worst, abs(total - 1.0))
                            cases += 1
    return worst <= 1e-9, f"{cases} (graph, q, source, t) cases; max |sum - 1| = {worst:.2e} (tol 1e-9)", None


@lru_cache(maxsize=None)
def _default_run(workers=1):
    start = time.perf_counter()
    records, stats = run_experiment(ExperimentConfig(seed=42), workers=workers)
    return trials_csv(records), summary_csv(stats), stats, time.perf_counter() - start


def criterion_6():
    _, _, stats, elapsed = _default_run()
    ok = elapsed < 60
    parts = []
    for d in DEGREES:
        o, c = stats.get(d, "oip"), stats.get(d, "dc")
        strict = d >= 3
        rate_ok = o.strict_rate > c.strict_rate if strict else o.strict_rate >= c.strict_rate
        err_ok = o.mean_err < c.mean_err if strict else o.mean_err <= c.mean_err
        ok &= rate_ok and err_ok
        parts.append(f"d={d} rate {o.strict_rate:.3f}/{c.strict_rate:.3f} err {o.mean_err:.3f}/{c.mean_err:.3f}")
    return ok, "OIP/DC " + "; ".join(parts) + f"; {elapsed:.1f}s (target < 60s)", None


def criterion_7():
    t1, s1, _, _ = _default_run(1)
    t1b, s1b, _, _ = _default_run.__wrapped__(1)
    t4, s4, _, _ = _default_run(4)
    ok = t1 == t1b == t4 and s1 == s1b == s4
    return ok, f"trials.csv and summary.csv byte-identical across two 1-worker runs and a 4-worker run ({len(t1)} bytes)", None


def criterion_8():
    rng = random.Random(SEED)
    agree = 0
    for _ in range(TREES):
        n = rng.randint(1, 40)
        g = verify.random_tree(rng, n)
        vi = rng.sample(range(n), rng.randint(1, n))
        d = floyd_warshall(g)[:, vi]
        ecc = d.max(axis=1)
        jordan = np.flatnonzero(ecc == ecc.min()).tolist()
        h = spanning_nodes(g, vi)
        sums = d.sum(axis=1)
        best = min(sums[u] for u in h)
        dc = [u for u in h if sums[u] == best]
        agree += (
            list(estimators.jordan_centers(g, vi).candidates) == jordan
            and list(estimators.distance_centrality(g, vi).candidates) == dc
        )
    return agree == TREES, f"Jordan and DC candidate sets equal naive argmins on {agree}/{TREES} trees (n <= 40)", None


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8]


# ---------------------------------------------------------------------------
# pytest entry points


@pytest.mark.parametrize("number", range(1, len(CRITERIA) + 1))
def test_criterion(number, say):
    ok, detail, report = CRITERIA[number - 1]()
    say(_line(number, ok, detail))
    if report is not None and report.failures:
        say("  counterexample: " + report.failures[0])
    assert ok, detail


if __name__ == "__main__":
    results = []
    for number, fn in enumerate(CRITERIA, 1):
        ok, detail, _ = fn()
        print(_line(number, ok, detail), flush=True)
        results.append(ok)
    sys.exit(0 if all(results) else 1)
