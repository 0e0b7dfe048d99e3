"""Gradient-based feasibility search over smoothed constraint sets.

:func:`minimize` drives the squared-hinge merit
``sum_i max(0, margin - c_i(x))**2`` to zero with limited-memory
quasi-Newton steps and a backtracking (Armijo) line search. The point is
accepted when every constraint satisfies ``c_i(x) >= -eps``; aiming at a
small positive ``margin`` keeps accepted points off the constraint
boundaries, where the exact semantics of strict comparisons would flip.

:func:`solve_phase1` runs :func:`minimize` over an increasing schedule of
smoothing parameters, warm-starting each stage from the previous one.
"""

from dataclasses import dataclass, field
import logging
import math

import numpy as np

from .autodiff import Evaluator
from .smooth import SmoothParams, abstract_num

log = logging.getLogger(__name__)


@dataclass
class OptimizerConfig:
    beta_schedule: tuple = (1.0, 5.0, 25.0, 125.0, 1000.0)
    max_iters: int = 400
    eps: float = 1e-4
    margin: float | None = None
    seed: int = 0
    num_restarts: int = 1
    memory: int = 8
    armijo: float = 1e-4
    max_backtracks: int = 50
    grad_tol: float = 1e-10
    stall_iters: int = 30
    K: float = 100.0
    trace: object = None

    def __post_init__(self):
        sched = [float(b) for b in self.beta_schedule]
        if not sched or any(b <= 0 for b in sched) or any(b2 <= b1 for b1, b2 in zip(sched, sched[1:])):
            raise ValueError("beta_schedule must be non-empty, positive and strictly increasing")
        self.beta_schedule = tuple(sched)
        if self.margin is None:
            self.margin = 10.0 * self.eps
        if self.num_restarts < 1:
            raise ValueError("num_restarts must be at least 1")


@dataclass
class NumResult:
    status: str
    x: dict
    residual: float
    merit: float = math.inf
    iterations: int = 0
    smoothed: object = field(default=None, repr=False)
    merits: list = field(default_factory=list, repr=False)

    @property
    def sat(self):
        return self.status == "SAT"


def residual_of(c):
    """Largest constraint violation ``max(0, -min c)``; inf if any value is non-finite."""
    if c.size == 0:
        return 0.0
    if not np.all(np.isfinite(c)):
        return math.inf
    return max(0.0, -float(c.min()))


def _direction(g, mem):
    """L-BFGS two-loop recursion; plain steepest descent with empty memory."""
    q = g.copy()
    alphas = []
    for s, y, rho in reversed(mem):
        a = rho * float(s @ q)
        alphas.append(a)
        q -= a * y
    if mem:
        s, y, _ = mem[-1]
        yy = float(y @ y)
        if yy > 0.0:
            q *= float(s @ y) / yy
    for (s, y, rho), a in zip(mem, reversed(alphas)):
        b = rho * float(y @ q)
        q += (a - b) * s
    return -q


def minimize(s, x0, cfg, ev=None):
    """Search for a point where every constraint of ``s`` is ``>= -eps``.

    Returns a :class:`NumResult`; ``x`` is the best point found even when
    the status is ``UNSAT``. ``merits`` records the merit after every
    accepted step.
    """
    ev = ev or Evaluator(s)
    m = cfg.margin
    x = np.array(s.vector(x0), dtype=float)
    n = x.size

    def merit_only(z):
        c = ev.values(z)
        if not np.all(np.isfinite(c)):
            return math.inf
        h = np.maximum(0.0, m - c)
        with np.errstate(over="ignore"):
            return float(h @ h)

    def merit_grad(z):
        c, J = ev.values_and_jacobian(z)
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(J))):
            return math.inf, None, c
        h = np.maximum(0.0, m - c)
        with np.errstate(over="ignore", invalid="ignore"):
            f, g = float(h @ h), -2.0 * (J.T @ h)
        if not (math.isfinite(f) and np.all(np.isfinite(g))):
            return math.inf, None, c
        return f, g, c

    f, g, c = merit_grad(x)
    if g is None:
        return NumResult("UNSAT", s.assignment(x), math.inf, math.inf, 0, s)
    merits = [f]
    mem = []
    stall = 0
    it = 0
    while it < cfg.max_iters and f > 0.0 and n > 0:
        it += 1
        gnorm = float(np.linalg.norm(g))
        if gnorm < cfg.grad_tol:
            break
        d = _direction(g, mem) if cfg.memory > 0 else -g
        slope = float(g @ d)
        if not slope < 0.0:
            mem.clear()
            d = -g
            slope = -gnorm * gnorm
        t = 1.0 if mem else min(1.0, 1.0 / gnorm)
        accepted = False
        for _ in range(cfg.max_backtracks):
            xn = x + t * d
            fn = merit_only(xn)
            if fn <= f + cfg.armijo * t * slope:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            if mem:
                mem.clear()
                continue
            break
        fn, gn, cn = merit_grad(xn)
        if gn is None:
            break
        sv = xn - x
        yv = gn - g
        sy = float(sv @ yv)
        if sy > 1e-12 * float(np.linalg.norm(sv) * np.linalg.norm(yv) + 1e-300) and cfg.memory > 0:
            mem.append((sv, yv, 1.0 / sy))
            if len(mem) > cfg.memory:
                mem.pop(0)
        stall = stall + 1 if f - fn <= 1e-12 * (1.0 + f) else 0
        x, f, g, c = xn, fn, gn, cn
        merits.append(f)
        if cfg.trace is not None:
            cfg.trace({"beta": s.params.beta, "iteration": it, "merit": f,
                       "residual": residual_of(c), "step": t})
        if stall >= cfg.stall_iters:
            break
    c = ev.values(x)
    res = residual_of(c)
    status = "SAT" if res <= cfg.eps else "UNSAT"
    return NumResult(status, s.assignment(x), res, f, it, s, merits)


def sample_start(p, names, rng, relaxed=()):
    """Uniform random start inside declared bounds; relaxed holes in [0, 1]."""
    out = {}
    for name in names:
        if name in relaxed:
            out[name] = float(rng.uniform(0.0, 1.0))
            continue
        lo, hi = p.bounds.get(name, (None, None))
        if lo is None and hi is None:
            lo, hi = -1.0, 1.0
        elif lo is None:
            lo = hi - 2.0
        elif hi is None:
            hi = lo + 2.0
        out[name] = float(rng.uniform(lo, hi))
    return out


def solve_phase1(p, imap, cfg, x0=None, rng=None):
    """Run :func:`minimize` over ``cfg.beta_schedule`` with warm starts.

    ``x0`` (dict) seeds the first attempt; missing entries and every later
    restart are drawn from ``rng`` (default: seeded from ``cfg.seed``).
    Stops at the first SAT restart; otherwise returns the attempt with the
    smallest final residual.
    """
    rng = rng if rng is not None else np.random.default_rng(cfg.seed)
    best = None
    sets = [abstract_num(p, imap, SmoothParams(beta=b, eps=cfg.eps, K=cfg.K))
            for b in cfg.beta_schedule]
    names = sets[0].var_names
    relaxed = set(sets[0].relaxed)
    for attempt in range(cfg.num_restarts):
        start = sample_start(p, names, rng, relaxed)
        if attempt == 0 and x0:
            for k, v in x0.items():
                if k in start:
                    start[k] = min(1.0, max(0.0, float(v))) if k in relaxed else float(v)
        x = start
        res = None
        for s in sets:
            res = minimize(s, x, cfg)
            x = res.x
        log.debug("phase1 attempt %d: %s residual=%.3g", attempt, res.status, res.residual)
        if best is None or res.residual < best.residual:
            best = res
        if res.sat:
            return res
    return best
