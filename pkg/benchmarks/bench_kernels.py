"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat N] [--experiment]

``--experiment`` also times the default Monte-Carlo run end to end under
each backend (in subprocesses, since the backend is chosen at import).

Both backends are imported directly, so this works regardless of which one
the package selected.  Results are checked for equality before timing.
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from sis_source import _pykernels
from sis_source.graph import regular_tree
from sis_source.paths import _graph_space
from sis_source.verify import random_tree

try:
    from sis_source import _kernels
except ImportError:
    sys.exit("compiled extension not built; run `pip install -e . --no-build-isolation` first")


def cases():
    big, root = regular_tree(5, 6)
    infected = np.arange(0, big.n, 7, dtype=np.int64)
    import random

    small = random_tree(random.Random(3), 14)
    space = _graph_space(small)
    zeros = np.zeros(13, dtype=np.int64)
    lnq, ln1q = np.log(0.4), np.log(0.6)
    return {
        f"bfs (n={big.n})": lambda k: k.bfs(big.indptr, big.indices, root),
        f"susceptible (|I|={len(infected)})": lambda k: k.susceptible(big.indptr, big.indices, infected),
        "state_closure (n=14)": lambda k: k.state_closure(
            np.array([(1 << u) | sum(1 << w for w in small.adj[u]) for u in range(small.n)], dtype=np.int64)
        ),
        "viterbi_forward (n=14, t=12)": lambda k: k.viterbi_forward(
            space.closure, space.exposure, space.pc, 1, 12, lnq, ln1q, zeros, zeros
        ),
    }


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--experiment", action="store_true")
    args = parser.parse_args()
    print(f"{'kernel':<32} {'python ms':>10} {'cython ms':>10} {'speedup':>8}")
    for name, fn in cases().items():
        a, b = fn(_pykernels), fn(_kernels)
        if not np.array_equal(a, b):
            sys.exit(f"{name}: backends disagree")
        py = min(timeit.repeat(lambda: fn(_pykernels), number=1, repeat=args.repeat)) * 1e3
        cy = min(timeit.repeat(lambda: fn(_kernels), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<32} {py:>10.2f} {cy:>10.2f} {py / cy:>7.1f}x")
    if args.experiment:
        py, cy = (_experiment_seconds(flag) for flag in ("1", "0"))
        print(f"{'experiment (5 x 1000 trials)':<32} {py * 1e3:>10.0f} {cy * 1e3:>10.0f} {py / cy:>7.1f}x")


_EXPERIMENT = """
import time
from sis_source.experiments import ExperimentConfig, run_experiment
start = time.perf_counter()
run_experiment(ExperimentConfig())
print(time.perf_counter() - start)
"""


def _experiment_seconds(pure: str) -> float:
    env = dict(os.environ, SIS_SOURCE_PURE_PYTHON=pure)
    out = subprocess.run([sys.executable, "-c", _EXPERIMENT], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout)


if __name__ == "__main__":
    main()
