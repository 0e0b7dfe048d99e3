"""Independent reference computations shared by the test modules."""

from functools import lru_cache

import numpy as np

from smoothsat.boolabs import CnfProblem


@lru_cache(maxsize=None)
def _columns(n):
    # packed truth table of every variable over all 2**n assignments
    idx = np.arange(1 << n, dtype=np.uint32)
    cols = [np.packbits(((idx >> j) & 1).astype(bool)) for j in range(n)]
    return cols, np.packbits(np.ones(1 << n, dtype=bool))


def brute_force_sat(num_vars, clauses):
    """True iff some assignment satisfies every clause (exhaustive, packed bits)."""
    if num_vars == 0:
        return all(clauses)
    cols, ones = _columns(num_vars)
    alive = ones.copy()
    for c in clauses:
        sat = np.zeros_like(ones)
        for lit in c:
            col = cols[abs(lit) - 1]
            sat |= col if lit > 0 else ~col
        alive &= sat
        if not alive.any():
            return False
    return bool(alive.any())


def satisfies(model, clauses):
    return all(any((l > 0) == bool(model.get(abs(l), 0)) for l in c) for c in clauses)


def random_3sat(rng, max_vars=20, max_clauses=90):
    n = int(rng.integers(3, max_vars + 1))
    ratio = rng.uniform(3.0, 5.5)
    m = int(min(max_clauses, max(1, round(ratio * n))))
    clauses = []
    for _ in range(m):
        vs = rng.choice(n, size=3, replace=False) + 1
        signs = rng.choice([-1, 1], size=3)
        clauses.append([int(v * s) for v, s in zip(vs, signs)])
    return CnfProblem(n, clauses, frozenset(range(1, n + 1)))


def branch_chain_grid(lo=-20.0, hi=6.0, step=1e-3):
    """Grid points of ``[lo, hi]`` where the branch chain's final assert holds."""
    x = np.round(np.arange(lo, hi + step / 2, step), 6)
    a = np.where(x <= 0, 21 + x, np.where(x <= 2, 8 - x, np.where(x <= 4, 6 - x, x - 5)))
    return x[(a <= 0) | (a > 25)]
