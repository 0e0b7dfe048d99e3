"""Incremental CDCL SAT solver with soft learnts and suggestions.

A MiniSat-style solver (two watched literals, first-UIP learning, VSIDS with phase saving,
geometric learnt-database reduction) extended for driving by a numerical
solver:

* *soft conflicts* are clauses the caller asserts temporarily; every clause
  learnt through resolution with a soft clause is itself soft, and a
  top-level conflict involving one is reported as ``SOFT_UNSAT`` instead of
  ``UNSAT``. All soft clauses can be dropped at once.
* *suggestions* are (variable, polarity, cost) decision hints consumed in
  ascending cost before the activity heuristic is consulted.

:meth:`SatSolver.solve_incremental` returns as soon as an interface
variable receives a new value, so the caller can re-check its numerical
abstraction between decisions.
"""

from enum import Enum
import heapq
import logging

log = logging.getLogger(__name__)


class SatStatus(str, Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    SOFT_UNSAT = "SOFT_UNSAT"


class Clause:
    __slots__ = ("lits", "kind", "activity")

    def __init__(self, lits, kind):
        self.lits = lits
        self.kind = kind
        self.activity = 0.0

    @property
    def soft(self):
        return self.kind == "soft_learnt"

    @property
    def learnt(self):
        return self.kind != "original"

    def __repr__(self):
        return f"Clause({self.lits}, {self.kind})"


class Suggestion:
    __slots__ = ("var", "polarity", "cost")

    def __init__(self, var, polarity, cost=0.0):
        self.var = var
        self.polarity = int(polarity)
        self.cost = float(cost)

    def __iter__(self):
        return iter((self.var, self.polarity, self.cost))

    def __repr__(self):
        return f"Suggestion({self.var}, {self.polarity}, {self.cost:.3g})"


class SatSolver:
    """CDCL solver state machine; see the module docstring.

    Parameters
    ----------
    cnf : CnfProblem
        Variables ``1..num_vars`` and clauses as lists of non-zero ints.
    batch_suggestions : bool
        When True, a call that started applying suggestions keeps applying
        them until the list is exhausted or a conflict occurs, instead of
        stopping after the first new interface assignment.
    """

    var_decay = 0.95
    clause_decay = 0.999

    def __init__(self, cnf, batch_suggestions=True):
        n = cnf.num_vars
        self.num_vars = n
        self.interface = frozenset(cnf.interface_vars)
        self.batch_suggestions = batch_suggestions
        self.value = [0] * (n + 1)
        self.level = [0] * (n + 1)
        self.reason = [None] * (n + 1)
        self.taint0 = [False] * (n + 1)
        self.trail = []
        self.trail_lim = []
        self.qhead = 0
        self.watches = [[] for _ in range(2 * n + 2)]
        self.activity = [0.0] * (n + 1)
        self.saved_phase = [-1] * (n + 1)
        self.var_inc = 1.0
        self.cla_inc = 1.0
        self.heap = [(0.0, v) for v in range(1, n + 1)]
        heapq.heapify(self.heap)
        self.clauses = []
        self.units = []
        self.hard_learnts = []
        self.soft_clauses = []
        self.max_learnts = max(1000.0, len(cnf.clauses) / 3)
        self.suggestions = []
        self._sugg_pos = 0
        self._reported = {}
        self._scan = 0
        self._unsat = False
        self._soft_unsat = False
        self.stats = {"decisions": 0, "conflicts": 0, "propagations": 0}

        for lits in cnf.clauses:
            lits = list(dict.fromkeys(lits))
            if any(-l in lits for l in lits):
                continue
            if not lits:
                self._unsat = True
                continue
            c = Clause(lits, "original")
            self.clauses.append(c)
            if len(lits) == 1:
                self.units.append(c)
            else:
                self._watch(c)
        self._propagate_top()

    # -- basic machinery -------------------------------------------------

    @staticmethod
    def _widx(lit):
        return 2 * lit if lit > 0 else -2 * lit + 1

    def lit_value(self, lit):
        v = self.value[abs(lit)]
        return v if lit > 0 else -v

    @property
    def decision_level(self):
        return len(self.trail_lim)

    def _watch(self, c):
        self.watches[self._widx(c.lits[0])].append(c)
        self.watches[self._widx(c.lits[1])].append(c)

    def _unwatch(self, c):
        for lit in c.lits[:2]:
            ws = self.watches[self._widx(lit)]
            for i, d in enumerate(ws):
                if d is c:
                    del ws[i]
                    break

    def _enqueue(self, lit, reason):
        v = abs(lit)
        self.value[v] = 1 if lit > 0 else -1
        self.level[v] = self.decision_level
        self.reason[v] = reason
        if self.decision_level == 0:
            self.taint0[v] = reason is not None and (
                reason.soft or any(self.taint0[abs(q)] for q in reason.lits if q != lit))
        self.trail.append(lit)

    def _propagate(self):
        """Unit propagation; returns a conflicting clause or None."""
        value = self.value
        watches = self.watches
        widx = self._widx
        while self.qhead < len(self.trail):
            p = self.trail[self.qhead]
            self.qhead += 1
            self.stats["propagations"] += 1
            false_lit = -p
            ws = watches[widx(false_lit)]
            keep = []
            confl = None
            i = 0
            while i < len(ws):
                c = ws[i]
                i += 1
                lits = c.lits
                if lits[0] == false_lit:
                    lits[0], lits[1] = lits[1], false_lit
                first = lits[0]
                fv = value[abs(first)] if first > 0 else -value[abs(first)]
                if fv == 1:
                    keep.append(c)
                    continue
                for k in range(2, len(lits)):
                    q = lits[k]
                    qv = value[abs(q)] if q > 0 else -value[abs(q)]
                    if qv != -1:
                        lits[1], lits[k] = q, false_lit
                        watches[widx(q)].append(c)
                        break
                else:
                    keep.append(c)
                    if fv == -1:
                        confl = c
                        keep.extend(ws[i:])
                        break
                    self._enqueue(first, c)
            ws[:] = keep
            if confl is not None:
                self.qhead = len(self.trail)
                return confl
        return None

    def _propagate_top(self):
        for c in self.units:
            lit = c.lits[0]
            val = self.lit_value(lit)
            if val == -1:
                self._level0_conflict(c)
                return
            if val == 0:
                self._enqueue(lit, c)
        confl = self._propagate()
        if confl is not None:
            self._level0_conflict(confl)

    def _level0_conflict(self, c):
        tainted = c.soft or any(self.taint0[abs(q)] for q in c.lits)
        if tainted:
            self._soft_unsat = True
        else:
            self._unsat = True
        log.debug("level-0 conflict on %s (soft=%s)", c, tainted)

    def _cancel_until(self, lvl):
        if self.decision_level <= lvl:
            return
        start = self.trail_lim[lvl]
        for lit in reversed(self.trail[start:]):
            v = abs(lit)
            self.saved_phase[v] = self.value[v]
            self.value[v] = 0
            self.reason[v] = None
            heapq.heappush(self.heap, (-self.activity[v], v))
        del self.trail[start:]
        del self.trail_lim[lvl:]
        self.qhead = len(self.trail)
        self._scan = min(self._scan, len(self.trail))
        self._sugg_pos = 0

    def _full_reset(self):
        """Unassign everything, including level 0, and redo top-level propagation."""
        self._cancel_until(0)
        for lit in self.trail:
            v = abs(lit)
            self.value[v] = 0
            self.reason[v] = None
            self.taint0[v] = False
            heapq.heappush(self.heap, (-self.activity[v], v))
        self.trail.clear()
        self.qhead = 0
        self._scan = 0
        self._propagate_top()

    # -- heuristics ------------------------------------------------------

    def _bump_var(self, v):
        self.activity[v] += self.var_inc
        if self.activity[v] > 1e100:
            self.activity = [a * 1e-100 for a in self.activity]
            self.var_inc *= 1e-100
            self.heap = [(-self.activity[u], u) for u in range(1, self.num_vars + 1) if self.value[u] == 0]
            heapq.heapify(self.heap)
        if self.value[v] == 0:
            heapq.heappush(self.heap, (-self.activity[v], v))

    def _bump_clause(self, c):
        c.activity += self.cla_inc
        if c.activity > 1e20:
            for d in self.hard_learnts:
                d.activity *= 1e-20
            self.cla_inc *= 1e-20

    def _pick_branch(self):
        heap = self.heap
        while heap:
            neg_act, v = heapq.heappop(heap)
            if self.value[v] == 0 and -neg_act == self.activity[v]:
                return v if self.saved_phase[v] > 0 else -v
        return None

    def _next_suggestion(self):
        while self._sugg_pos < len(self.suggestions):
            s = self.suggestions[self._sugg_pos]
            if self.value[s.var] == 0:
                return s.var if s.polarity else -s.var
            self._sugg_pos += 1
        return None

    # -- conflict analysis -----------------------------------------------

    def _analyze(self, confl):
        """First-UIP learning. Returns (learnt lits, backjump level, tainted)."""
        seen = set()
        learnt = [0]
        counter = 0
        tainted = False
        p = None
        idx = len(self.trail) - 1
        cur = self.decision_level
        clause = confl
        while True:
            tainted |= clause.soft
            if clause.learnt:
                self._bump_clause(clause)
            for q in clause.lits:
                if q == p:
                    continue
                v = abs(q)
                if self.level[v] == 0:
                    tainted |= self.taint0[v]
                elif v not in seen:
                    seen.add(v)
                    self._bump_var(v)
                    if self.level[v] >= cur:
                        counter += 1
                    else:
                        learnt.append(q)
            while abs(self.trail[idx]) not in seen:
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            seen.discard(abs(p))
            counter -= 1
            if counter <= 0:
                break
            clause = self.reason[abs(p)]
        learnt[0] = -p
        if len(learnt) == 1:
            return learnt, 0, tainted
        best = max(range(1, len(learnt)), key=lambda i: self.level[abs(learnt[i])])
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, self.level[abs(learnt[1])], tainted

    def _learn(self, confl):
        self.stats["conflicts"] += 1
        learnt, bt, tainted = self._analyze(confl)
        self._cancel_until(bt)
        if confl.soft and learnt[0] == confl.lits[0] and sorted(learnt) == sorted(confl.lits):
            # the asserted clause is already asserting; no copy needed
            self._enqueue(learnt[0], confl)
            self.var_inc /= self.var_decay
            return
        c = Clause(learnt, "soft_learnt" if tainted else "hard_learnt")
        log.debug("learnt %s, backjump to %d", c, bt)
        if tainted:
            self.soft_clauses.append(c)
        else:
            self.hard_learnts.append(c)
        if len(learnt) == 1:
            if not tainted:
                self.units.append(c)
        else:
            self._watch(c)
        self._enqueue(learnt[0], c)
        self.var_inc /= self.var_decay
        self.cla_inc /= self.clause_decay

    def _reduce_db(self):
        locked = {id(self.reason[abs(c.lits[0])]) for c in self.hard_learnts
                  if self.reason[abs(c.lits[0])] is c}
        cands = sorted((c for c in self.hard_learnts if len(c.lits) > 2 and id(c) not in locked),
                       key=lambda c: c.activity)
        drop = {id(c) for c in cands[: len(cands) // 2]}
        for c in self.hard_learnts:
            if id(c) in drop:
                self._unwatch(c)
        self.hard_learnts = [c for c in self.hard_learnts if id(c) not in drop]
        self.max_learnts *= 1.1

    # -- reporting -------------------------------------------------------

    def interface_map(self):
        """Current values (0/1) of all assigned interface variables."""
        return {abs(l): int(l > 0) for l in self.trail if abs(l) in self.interface}

    def model(self):
        return {abs(l): int(l > 0) for l in self.trail}

    def is_complete(self):
        return len(self.trail) == self.num_vars

    def _has_new_interface(self):
        for lit in self.trail[self._scan:]:
            v = abs(lit)
            if v in self.interface and self._reported.get(v) != int(lit > 0):
                return True
        return False

    def _report(self, status):
        imap = self.interface_map()
        self._reported = imap
        self._scan = len(self.trail)
        return status, imap

    # -- the seven operations --------------------------------------------

    def solve_incremental(self):
        """Decide and propagate until an interface variable changes.

        Returns ``(status, imap)`` where ``imap`` is the full current
        interface assignment. ``SAT`` with an unchanged map means every
        variable is assigned and all clauses hold.
        """
        if self._unsat:
            return SatStatus.UNSAT, self.interface_map()
        if self._soft_unsat:
            return SatStatus.SOFT_UNSAT, self.interface_map()
        used_suggestion = False
        conflicted = False
        while True:
            confl = self._propagate()
            if confl is not None:
                if self.decision_level == 0:
                    self._level0_conflict(confl)
                    status = SatStatus.SOFT_UNSAT if self._soft_unsat else SatStatus.UNSAT
                    return status, self.interface_map()
                self._learn(confl)
                conflicted = True
                if len(self.hard_learnts) - len(self.trail) >= self.max_learnts:
                    self._reduce_db()
                continue
            if self._has_new_interface():
                keep_going = (self.batch_suggestions and used_suggestion and not conflicted
                              and self._next_suggestion() is not None)
                if not keep_going:
                    return self._report(SatStatus.SAT)
            lit = self._next_suggestion()
            if lit is not None:
                used_suggestion = True
            else:
                lit = self._pick_branch()
                if lit is None:
                    return self._report(SatStatus.SAT)
            self.stats["decisions"] += 1
            self.trail_lim.append(len(self.trail))
            self._enqueue(lit, None)

    def add_soft_conflict(self, lits):
        """Learn from a clause the caller asserts is (temporarily) violated.

        The clause must be falsified by the current assignment.
        """
        lits = list(dict.fromkeys(lits))
        bad = [l for l in lits if self.lit_value(l) != -1]
        if bad:
            raise ValueError(f"soft conflict is not falsified: literals {bad} are not false")
        c = Clause(lits, "soft_learnt")
        self.soft_clauses.append(c)
        if not lits:
            self._soft_unsat = True
            return
        top = max(self.level[abs(l)] for l in lits)
        if top == 0:
            self._soft_unsat = True
            return
        self._cancel_until(top)
        if len(lits) > 1:
            lits.sort(key=lambda l: -self.level[abs(l)])
            self._watch(c)
        self._learn(c)

    def remove_soft_learnts(self):
        """Drop every soft clause, first unwinding assignments that depend on them."""
        soft = {id(c) for c in self.soft_clauses}
        lowest = None
        for lit in self.trail:
            v = abs(lit)
            r = self.reason[v]
            dep = (r is not None and id(r) in soft) or (self.level[v] == 0 and self.taint0[v])
            if dep:
                lowest = self.level[v] if lowest is None else min(lowest, self.level[v])
        for c in self.soft_clauses:
            if len(c.lits) > 1:
                self._unwatch(c)
        self.soft_clauses = []
        self._soft_unsat = False
        if lowest == 0:
            self._full_reset()
        elif lowest is not None:
            self._cancel_until(lowest - 1)

    def set_suggestions(self, suggestions):
        """Replace the suggestion list; entries are (var, polarity, cost)."""
        items = [s if isinstance(s, Suggestion) else Suggestion(*s) for s in suggestions]
        items.sort(key=lambda s: s.cost)
        seen = set()
        self.suggestions = [s for s in items if not (s.var in seen or seen.add(s.var))]
        self._sugg_pos = 0

    def remove_suggestions(self):
        self.suggestions = []
        self._sugg_pos = 0

    def restart(self):
        """Backtrack to level 0; hard learnts are kept."""
        self._cancel_until(0)
        self._reported = {}
        self._scan = 0

    # -- conveniences ----------------------------------------------------

    def solve(self):
        """Run to completion ignoring interface stops. Returns a SatStatus."""
        while True:
            status, _ = self.solve_incremental()
            if status != SatStatus.SAT:
                return status
            if self.is_complete() and self._propagate() is None:
                return status

    def decision_literals(self):
        """Literals assigned as decisions, in trail order."""
        return [self.trail[i] for i in self.trail_lim]
