"""Pure-Python/numpy versions of the hot kernels.

Used when the Cython extension is not built, or when
``SIS_SOURCE_PURE_PYTHON=1`` is set.  Signatures and results match
``_kernels.pyx`` exactly; the test suite runs both.
"""

from collections import deque

import numpy as np

NAME = "python"


def bfs(indptr, indices, source):
    return bfs_parents(indptr, indices, source)[0]


def bfs_parents(indptr, indices, source):
    n = len(indptr) - 1
    dist = [-1] * n
    parent = [-1] * n
    ptr = indptr.tolist()
    nbr = indices.tolist()
    dist[source] = 0
    parent[source] = source
    queue = deque([source])
    while queue:
        x = queue.popleft()
        dx = dist[x] + 1
        for k in range(ptr[x], ptr[x + 1]):
            y = nbr[k]
            if dist[y] < 0:
                dist[y] = dx
                parent[y] = x
                queue.append(y)
    return np.array(dist, dtype=np.int64), np.array(parent, dtype=np.int64)


def susceptible(indptr, indices, infected):
    """Sorted union of the closed neighborhoods of ``infected``."""
    if len(infected) == 0:
        return np.empty(0, dtype=np.int64)
    parts = [np.asarray(infected, dtype=np.int64)]
    parts.extend(indices[indptr[x] : indptr[x + 1]] for x in infected)
    return np.unique(np.concatenate(parts))


def state_closure(nbmask):
    """``closure[A]`` = bitmask of the susceptible set of state ``A``."""
    n = len(nbmask)
    closure = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        half = 1 << i
        closure[half : 2 * half] = closure[:half] | int(nbmask[i])
    return closure


def popcounts(n):
    pc = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        half = 1 << i
        pc[half : 2 * half] = pc[:half] + 1
    return pc


def viterbi_forward(closure, exposure, pc, start, t, lnq, ln1q, forbid, require):
    """Max-product table ``V[tau, B]`` over complete infected-set states.

    ``V[0]`` is 0 at ``start`` and -inf elsewhere.  One step maps state ``A``
    to any ``B`` contained in ``closure[A]`` with log weight
    ``exposure[A] * ln1q + |B| * (lnq - ln1q)``.  At slot ``tau`` a state is
    admissible only if it avoids ``forbid[tau]`` and contains ``require[tau]``.
    """
    size = len(closure)
    n = size.bit_length() - 1
    states = np.arange(size, dtype=np.int64)
    table = np.full((t + 1, size), -np.inf)
    table[0, start] = 0.0
    cost = exposure * ln1q
    gain = pc * (lnq - ln1q)
    for tau in range(t):
        w = table[tau] + cost
        best = np.full(size, -np.inf)
        np.maximum.at(best, closure, w)
        # superset max: best[B] <- max over M containing B
        for i in range(n):
            view = best.reshape(-1, 2, 1 << i)
            np.maximum(view[:, 0, :], view[:, 1, :], out=view[:, 0, :])
        row = best + gain
        if forbid[tau + 1] or require[tau + 1]:
            bad = ((states & forbid[tau + 1]) != 0) | ((states & require[tau + 1]) != require[tau + 1])
            row[bad] = -np.inf
        table[tau + 1] = row
    return table
