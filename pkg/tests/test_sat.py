import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from smoothsat import SatSolver, SatStatus
from smoothsat.boolabs import CnfProblem
from oracles import brute_force_sat, random_3sat, satisfies


def cnf(n, clauses, interface=None):
    return CnfProblem(n, clauses, frozenset(interface if interface is not None else range(1, n + 1)))


def pigeonhole(pigeons, holes):
    var = {(i, h): i * holes + h + 1 for i in range(pigeons) for h in range(holes)}
    clauses = [[var[i, h] for h in range(holes)] for i in range(pigeons)]
    for h in range(holes):
        for i, j in itertools.combinations(range(pigeons), 2):
            clauses.append([-var[i, h], -var[j, h]])
    return cnf(pigeons * holes, clauses)


def test_init_empty():
    s = SatSolver(cnf(0, []))
    assert s.trail == []
    assert s.solve_incremental()[0] == SatStatus.SAT


def test_init_unit_propagates():
    s = SatSolver(cnf(1, [[1]]))
    assert s.trail == [1]


def test_init_contradiction():
    s = SatSolver(cnf(1, [[1], [-1]]))
    assert s.solve_incremental()[0] == SatStatus.UNSAT


def test_suggestions_decide_in_cost_order():
    s = SatSolver(cnf(3, [[1, 2, 3]]))
    s.set_suggestions([(2, 0, 0.5), (1, 1, 0.1)])
    s.solve_incremental()
    assert s.decision_literals()[0] == 1
    while not s.is_complete():
        s.solve_incremental()
    assert s.decision_literals()[:2] == [1, -2]


def test_suggestion_never_overrides_propagation():
    s = SatSolver(cnf(2, [[-1, -2]]))
    s.set_suggestions([(1, 1, 0.1), (2, 1, 0.2)])
    assert s.solve() == SatStatus.SAT
    assert s.model() == {1: 1, 2: 0}
    assert s.decision_literals() == [1]


def test_duplicate_suggestions_keep_cheapest():
    s = SatSolver(cnf(2, []))
    s.set_suggestions([(1, 0, 0.9), (1, 1, 0.2)])
    assert [(x.var, x.polarity) for x in s.suggestions] == [(1, 1)]


def test_complete_assignment_reports_sat_again():
    s = SatSolver(cnf(2, [[1, 2]]))
    assert s.solve() == SatStatus.SAT
    before = s.interface_map()
    status, imap = s.solve_incremental()
    assert status == SatStatus.SAT and imap == before


def test_pigeonhole_is_hard_unsat():
    s = SatSolver(pigeonhole(3, 2))
    assert s.solve() == SatStatus.UNSAT
    assert not brute_force_sat(6, pigeonhole(3, 2).clauses)


def test_soft_conflict_flips_second_decision():
    s = SatSolver(cnf(2, []))
    s.set_suggestions([(1, 1, 0.1), (2, 1, 0.2)])
    while not s.is_complete():
        s.solve_incremental()
    assert s.model() == {1: 1, 2: 1}
    s.add_soft_conflict([-1, -2])
    assert len(s.soft_clauses) == 1
    assert s.lit_value(1) == 1 and s.lit_value(2) == -1
    assert s.reason[2] is not None and s.reason[2].soft


def test_soft_conflict_must_be_falsified():
    s = SatSolver(cnf(2, []))
    with pytest.raises(ValueError):
        s.add_soft_conflict([1, 2])


def test_soft_taint_then_revoke():
    # unique model 1=1, 2=0, not found by propagation alone
    problem = cnf(2, [[1, 2], [-1, -2], [1, -2]])
    s = SatSolver(problem)
    assert s.solve() == SatStatus.SAT
    assert s.model() == {1: 1, 2: 0}
    s.add_soft_conflict([-1, 2])
    assert s.solve() == SatStatus.SOFT_UNSAT
    s.remove_soft_learnts()
    assert s.solve() == SatStatus.SAT
    assert s.model() == {1: 1, 2: 0}


def test_restart_keeps_only_level_zero():
    s = SatSolver(cnf(3, [[1], [-2, 3]]))
    s.solve()
    s.restart()
    assert s.trail == [1]
    assert s.decision_level == 0


def test_interface_stop_grows_assignment():
    s = SatSolver(cnf(6, [[1, 2], [3, 4], [5, 6]], interface=[1, 3, 5]))
    sizes = []
    while True:
        status, imap = s.solve_incremental()
        if s.is_complete():
            break
        sizes.append(len(imap))
    assert sizes == sorted(set(sizes))


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 1_000_000))
def test_random_3sat_matches_enumeration(seed):
    problem = random_3sat(np.random.default_rng(seed))
    s = SatSolver(problem)
    status = s.solve()
    assert (status == SatStatus.SAT) == brute_force_sat(problem.num_vars, problem.clauses)
    assert status != SatStatus.SOFT_UNSAT
    if status == SatStatus.SAT:
        assert satisfies(s.model(), problem.clauses)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 1_000_000))
def test_hard_unsat_ignores_soft_clauses(seed):
    rng = np.random.default_rng(seed)
    problem = random_3sat(rng, max_vars=10)
    s = SatSolver(problem)
    for _ in range(5):
        status = s.solve()
        if status != SatStatus.SAT:
            break
        # block the current model on a random subset of its decisions
        dec = s.decision_literals()
        if not dec:
            break
        k = int(rng.integers(1, len(dec) + 1))
        s.add_soft_conflict([-l for l in dec[:k]])
    status = s.solve()
    if status == SatStatus.UNSAT:
        assert not brute_force_sat(problem.num_vars, problem.clauses)
    s.remove_soft_learnts()
    assert (s.solve() == SatStatus.SAT) == brute_force_sat(problem.num_vars, problem.clauses)
