"""Alternating SAT / numerical search for a satisfying assignment.

The SAT solver owns the propositional skeleton and proposes an interface
mapping (values for Boolean nodes and unknowns); the numerical side
minimizes the smoothed abstraction under that mapping. A numerical
solution becomes a list of decision suggestions; a numerical failure with
enough of the mapping fixed becomes a revocable (soft) conflict clause.
"""

from dataclasses import dataclass, field, replace
import json
import logging
import math
import time

import numpy as np

from .autodiff import eval_nodes
from .boolabs import abstract_bool
from .ir import Assignment, verify
from .ops import CONST
from .optimize import OptimizerConfig, solve_phase1
from .sat import SatSolver, SatStatus, Suggestion
from .smooth import derived_pins

log = logging.getLogger(__name__)

SAT = "SAT"
UNSAT = "UNSAT"
EXHAUSTED = "SOFT_UNSAT_EXHAUSTED"
TIMEOUT = "TIMEOUT"


@dataclass
class CoreConfig:
    eta: int = 5
    restart_limit: int | None = None
    timeout: float = 1800.0
    # a few random restarts per numerical call; a warm start, when there is
    # one, is always the first attempt
    optimizer: OptimizerConfig = field(default_factory=lambda: OptimizerConfig(num_restarts=4))
    seed: int = 0
    batch_suggestions: bool = True
    log_path: str | None = None
    max_iterations: int | None = None

    def __post_init__(self):
        if self.eta < 1:
            raise ValueError("eta must be at least 1")
        if self.restart_limit is not None and self.restart_limit < 0:
            raise ValueError("restart_limit must be non-negative")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")


@dataclass
class SolveResult:
    status: str
    sigma: Assignment | None = None
    stats: dict = field(default_factory=dict)

    @property
    def sat(self):
        return self.status == SAT


def gen_suggestions(x, imap, p, s):
    """Decision hints ``(key, value, cost)`` from a numerical solution ``x``.

    A Boolean node left open in ``imap`` is suggested true when its smoothed
    distance is non-negative, at cost ``|d|``; an open Boolean unknown is
    suggested true when its relaxed value is at least 1/2, at cost
    ``|r - 1/2|``. The list is sorted by ascending cost, so the least
    certain choices come first.
    """
    keys = [k for k in s.bool_value if imap.get(k) is None]
    if not keys:
        return []
    vals = eval_nodes(s, [s.bool_value[k] for k in keys], x)
    out = []
    for k, d in zip(keys, vals):
        d = float(d)
        if not math.isfinite(d):
            continue
        if isinstance(k, str):
            out.append((k, int(d >= 0.5), abs(d - 0.5)))
        else:
            out.append((k, int(d >= 0.0), abs(d)))
    out.sort(key=lambda t: t[2])
    return out


def is_conflict(imap, eta, fixed=()):
    """More than ``eta`` entries of ``imap`` are set, not counting ``fixed`` keys."""
    fixed = set(fixed)
    return sum(1 for k, v in imap.items() if v is not None and k not in fixed) > eta


def gen_conflict(solver):
    """Negation of the decisions on interface variables.

    Falls back to every assigned interface literal when no decision touches
    the interface.
    """
    lits = [l for l in solver.decision_literals() if abs(l) in solver.interface]
    if not lits:
        lits = [l for l in solver.trail if abs(l) in solver.interface]
    return [-l for l in lits]


def boundary_conflict(num, solver, var_of, margin):
    """Clause blocking the pinned entries that sit on their boundary at ``num.x``.

    Used when a numerically accepted point fails exact verification: the
    pins that were only met within the tolerance are the ones that cannot
    all hold at once. Returns an empty list when no pin is tight.
    """
    s = num.smoothed
    vals = eval_nodes(s, s.constraints, num.x)
    lits = []
    for (kind, *rest), c in zip(s.provenance, vals):
        if kind != "pin" or c >= margin:
            continue
        key, v = rest
        var = var_of[key]
        lit = var if v else -var
        if solver.lit_value(lit) == 1:
            lits.append(-lit)
    return lits


def pin_explanation(p, imap, pins, n):
    """Interface keys whose values make the distance of pinned node ``n`` what it is.

    Walks the expression under ``n`` the way the abstraction folds it:
    through the selected branch of every ``ite``/``iteh`` whose condition is
    forced, collecting the set entries responsible. ``pins`` comes from
    :func:`~smoothsat.smooth.derived_pins`.
    """
    keys = {n}
    seen = set()
    work = [("raw", n)]
    while work:
        item = work.pop()
        if item in seen:
            continue
        seen.add(item)
        mode, k = item
        node = p.nodes[k]
        if mode == "pin":
            if imap.get(k) is not None:
                keys.add(k)
            elif node.kind == "not":
                work.append(("pin", node.args[0]))
            elif node.kind == "and":
                if pins[k] == 0:
                    zero = next(c for c in node.args if pins.get(c) == 0)
                    work.append(("pin", zero))
                else:
                    work += [("pin", c) for c in node.args]
        elif mode == "dist":
            work.append(("pin", k) if pins.get(k) is not None else ("raw", k))
        elif mode == "raw":
            if node.kind == "ge":
                work.append(("val", node.args[0]))
            else:
                work += [("dist", c) for c in node.args]
        elif node.kind == "ite":
            c, t, o = node.args
            if pins.get(c) is not None:
                work += [("pin", c), ("val", t if pins[c] else o)]
            else:
                work += [("dist", c), ("val", t), ("val", o)]
        elif node.kind == "iteh":
            y = node.data
            if imap.get(y) is not None:
                keys.add(y)
                work.append(("val", node.args[0] if imap[y] else node.args[1]))
            else:
                work += [("val", a) for a in node.args]
        else:
            work += [("val", a) for a in node.args]
    return keys


def constant_conflict(p, imap, s, eps):
    """Keys of a set of entries that cannot hold together whatever the reals are.

    Looks for a pinned entry whose folded distance is a constant of the
    wrong sign; returns its explanation, or ``None`` if there is none.
    """
    pins = None
    for node, tag in zip(s.constraints, s.provenance):
        if tag[0] != "pin" or s.op[node] != CONST or s.cval[node] >= -eps:
            continue
        if pins is None:
            pins = derived_pins(p, imap)
        return pin_explanation(p, imap, pins, tag[1])
    return None


class _RunLog:
    def __init__(self, path):
        self.fh = open(path, "w") if path else None

    def write(self, **rec):
        if self.fh is not None:
            self.fh.write(json.dumps(rec) + "\n")
            self.fh.flush()

    def close(self):
        if self.fh is not None:
            self.fh.close()


class _Search:
    def __init__(self, p, cfg):
        self.p = p
        self.cfg = cfg
        self.cnf, self.sk = abstract_bool(p)
        self.key_of = self.sk.key_of
        self.var_of = self.sk.var_of
        self.solver = SatSolver(self.cnf, batch_suggestions=cfg.batch_suggestions)
        self.rng = np.random.default_rng(cfg.seed)
        self.stats = {"numeric_calls": 0, "restarts": 0, "wall_ms": 0.0,
                      "iterations": 0, "soft_conflicts": 0}
        self.log = _RunLog(cfg.log_path)

    def to_keys(self, vmap):
        return {self.key_of[v]: b for v, b in vmap.items()}

    def fixed_keys(self):
        s = self.solver
        return {self.key_of[abs(l)] for l in s.trail if s.level[abs(l)] == 0}

    def phase1(self, imap, x0, opt=None):
        self.stats["numeric_calls"] += 1
        return solve_phase1(self.p, imap, opt or self.cfg.optimizer, x0=x0, rng=self.rng)

    def extract(self, num, imap):
        reals = {name: num.x[name] for name in self.p.real_unknowns}
        bools = {}
        for y in self.p.bool_unknowns:
            v = imap.get(y)
            if v is None:
                v = int(num.x.get(y, 0.0) >= 0.5)
            bools[y] = int(v)
        return Assignment(reals, bools)

    def block(self, keys, imap):
        """Clause forbidding the current values of ``keys``."""
        lits = []
        for k in keys:
            v = self.var_of[k]
            lits.append(-v if imap[k] else v)
        return lits

    def soft_conflict(self, clause=None):
        if not clause:
            clause = gen_conflict(self.solver)
        self.stats["soft_conflicts"] += 1
        self.solver.add_soft_conflict(clause)


def solve(p, cfg=None):
    """Search for an assignment satisfying every assert of ``p``.

    Returns a :class:`SolveResult`; a ``SAT`` result has passed
    :func:`~smoothsat.ir.verify`.
    """
    cfg = cfg or CoreConfig()
    t0 = time.perf_counter()
    st = _Search(p, cfg)
    try:
        return _loop(st, t0)
    finally:
        st.stats["wall_ms"] = (time.perf_counter() - t0) * 1000.0
        st.log.close()


def _loop(st, t0):
    cfg = st.cfg
    solver = st.solver
    imap = {}
    x_warm = None
    last_num = None
    limit = math.inf if cfg.restart_limit is None else cfg.restart_limit

    def done(status, sigma=None):
        st.stats["wall_ms"] = (time.perf_counter() - t0) * 1000.0
        return SolveResult(status, sigma, st.stats)

    while True:
        if time.perf_counter() - t0 > cfg.timeout:
            return done(TIMEOUT)
        if cfg.max_iterations is not None and st.stats["iterations"] >= cfg.max_iterations:
            return done(TIMEOUT)
        st.stats["iterations"] += 1

        # numerical check of the current mapping
        num = st.phase1(imap, x_warm)
        last_num = num
        complete = solver.is_complete()
        if num.sat:
            x_warm = num.x
            hints = gen_suggestions(num.x, imap, st.p, num.smoothed)
            solver.set_suggestions([Suggestion(st.var_of[k], v, c) for k, v, c in hints])
        else:
            solver.remove_suggestions()
            keys = constant_conflict(st.p, imap, num.smoothed, cfg.optimizer.eps)
            if keys:
                st.soft_conflict(st.block(keys, imap))
            elif complete or is_conflict(imap, cfg.eta, st.fixed_keys()):
                st.soft_conflict()

        status, vmap = solver.solve_incremental()
        new_imap = st.to_keys(vmap)
        st.log.write(iteration=st.stats["iterations"], set=len(imap), numeric=num.status,
                     residual=num.residual, sat=status.value, new_set=len(new_imap))

        if status == SatStatus.UNSAT:
            return done(UNSAT)
        if status == SatStatus.SOFT_UNSAT:
            if st.stats["restarts"] >= limit:
                return done(EXHAUSTED)
            st.stats["restarts"] += 1
            solver.remove_soft_learnts()
            solver.remove_suggestions()
            solver.restart()
            imap = {}
            x_warm = None
            continue
        if new_imap != imap:
            imap = new_imap
            continue

        # SAT with an unchanged mapping: the skeleton is fully assigned
        if not last_num.sat:
            st.soft_conflict()
            imap = st.to_keys(solver.interface_map())
            continue
        sigma = st.extract(last_num, imap)
        if verify(st.p, sigma):
            return done(SAT, sigma)
        opt = cfg.optimizer
        tight = replace(opt, eps=opt.eps / 10, margin=opt.margin * 10)
        retry = st.phase1(imap, last_num.x, tight)
        if retry.sat:
            sigma = st.extract(retry, imap)
            if verify(st.p, sigma):
                return done(SAT, sigma)
        log.debug("exact verification failed on a complete mapping; blocking it")
        st.soft_conflict(boundary_conflict(retry if retry.sat else last_num, st.solver, st.var_of,
                                           opt.margin))
        imap = st.to_keys(solver.interface_map())
