"""Only-smoothing baseline: random-restart descent on the fully smoothed program.

No Boolean structure is fixed; every trial starts from a fresh random point
and runs the whole smoothing schedule once. A trial is *found* when the
smoothed constraints are met and *correct* when the rounded assignment also
passes exact verification.
"""

from dataclasses import dataclass, field, replace
import time

import numpy as np

from .ir import Assignment, verify
from .optimize import OptimizerConfig, solve_phase1


@dataclass
class BaselineResult:
    trials: int
    found: int
    correct: int
    sigma: Assignment | None = None
    stats: dict = field(default_factory=dict)

    @property
    def sat(self):
        return self.correct > 0


def rounded_assignment(p, x):
    reals = {name: float(x[name]) for name in p.real_unknowns}
    bools = {y: int(x.get(y, 0.0) >= 0.5) for y in p.bool_unknowns}
    return Assignment(reals, bools)


def baseline_smoothing(p, restarts=20, cfg=None, seed=0, timeout=None, stop_on_correct=False):
    """Count found and correct trials over ``restarts`` random starts."""
    cfg = replace(cfg or OptimizerConfig(), num_restarts=1)
    rng = np.random.default_rng(seed)
    t0 = time.perf_counter()
    found = correct = done = 0
    first = None
    for _ in range(restarts):
        if timeout is not None and time.perf_counter() - t0 > timeout:
            break
        num = solve_phase1(p, {}, cfg, rng=rng)
        done += 1
        if not num.sat:
            continue
        found += 1
        sigma = rounded_assignment(p, num.x)
        if verify(p, sigma):
            correct += 1
            first = first or sigma
            if stop_on_correct:
                break
    stats = {"numeric_calls": done, "restarts": max(0, done - 1),
             "wall_ms": (time.perf_counter() - t0) * 1000.0}
    return BaselineResult(done, found, correct, first, stats)
