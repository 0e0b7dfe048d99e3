import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from smoothsat import (Assignment, ParseError, ProgramBuilder, collect_bool_nodes, eval_bool,
                       eval_real, evaluate, parse_program, print_program, verify)
from smoothsat.bench.toys import atom_text, branch_chain, ite_select
from smoothsat.ir import ite
from smoothsat.ops import DomainError
from smoothsat.randprog import random_assignment, random_program


def chain_value(x1):
    # plain re-implementation of the branch chain program
    a = x1 - 5
    if x1 <= 4:
        a = 6 - x1
    if x1 <= 2:
        a = 8 - x1
    if x1 <= 0:
        a = 21 + x1
    return a


def test_parse_inline_hole():
    p = parse_program("(assert (>= (hole-r x1) 0))")
    assert len(p.asserts) == 1
    assert p.real_unknowns == ("x1",)


def test_parse_ite_select():
    p = ite_select()
    assert p.real_unknowns == ("x1", "x2", "x3")
    assert sum(1 for n in p.reachable() if p.nodes[n].kind == "ite") == 1


@pytest.mark.parametrize("src, where", [
    ("(assert (>=))", "expects"),
    ("(assert (>= x 0))", "undeclared"),
    ("(real x)\n(assert (>= (frob x) 0))", "unknown operator"),
    ("(real x)\n(assert (+ x 1))", "Boolean"),
    ("(real x) (real x)", "twice"),
    ("(bool y)\n(assert (>= y 0))", "iteh condition"),
    ("(real x)\n(assert (>= x 0)", "unclosed"),
])
def test_parse_errors(src, where):
    with pytest.raises(ParseError, match=where):
        parse_program(src)


def test_parse_error_position():
    with pytest.raises(ParseError) as info:
        parse_program("(real x)\n\n  (assert (>=))")
    assert info.value.line == 3


def test_ite_branch_taken_and_inclusive():
    b = ProgramBuilder()
    x = b.term(b.real("x"))
    e = ite(x >= 0, 1.0, 2.0)
    b.assert_((e >= 0).id)
    p = b.build()
    assert eval_real(p, e.id, {"x": 3.0}) == 1.0
    assert eval_real(p, e.id, {"x": 0.0}) == 1.0
    assert eval_real(p, e.id, {"x": -1e-12}) == 2.0


def test_eval_bool_basics():
    b = ProgramBuilder()
    x = b.real("x")
    zero = b.ge(b.const(0.0))
    conj = b.and_(b.ge(b.const(-1.0)), b.ge(b.const(1.0)))
    neg = b.not_(b.ge(x))
    for n in (zero, conj, neg):
        b.assert_(n)
    p = b.build()
    assert eval_bool(p, zero, {}) == 1
    assert eval_bool(p, conj, {}) == 0
    assert eval_bool(p, neg, {"x": -2.0}) == 1


def test_branch_chain_values():
    p = branch_chain()
    # the outermost ite is the final value of a
    a_node = max(n for n in p.reachable() if p.nodes[n].kind == "ite")
    assert eval_real(p, a_node, {"x1": 4.01}) == pytest.approx(-0.99, abs=1e-12)
    assert eval_real(p, a_node, {"x1": -20.0}) == 1.0
    assert verify(p, {"x1": 4.01})
    assert not verify(p, {"x1": -20.0})
    assert chain_value(4.01) == pytest.approx(-0.99)
    assert chain_value(-20.0) == 1.0


def test_branch_chain_matches_plain_interpreter():
    p = branch_chain()
    for x1 in np.linspace(-20, 6, 521):
        a = chain_value(float(x1))
        assert verify(p, {"x1": float(x1)}) == (a <= 0 or a > 25)


def test_ite_select_verify():
    assert verify(ite_select(), {"x1": -1.0, "x2": 0.0, "x3": 5.0})


def test_collect_bool_nodes():
    p = ite_select()
    keys = collect_bool_nodes(p)
    assert [atom_text(p, n) for n in keys] == ["(>= x1 0)", "(>= (ite (>= x1 0) x2 x3) 0)"]
    b = ProgramBuilder()
    x = b.real("x")
    a1, a2 = b.ge(x), b.ge(b.sub(b.const(1.0), x))
    b.assert_(a1)
    b.assert_(a2)
    assert collect_bool_nodes(b.build()) == [a1, a2]


def test_collect_includes_bool_unknowns_last():
    p = parse_program("(bool y) (real x)\n(assert (>= (iteh y x (- x)) 0))")
    keys = collect_bool_nodes(p)
    assert keys[-1] == "y"
    assert all(isinstance(k, int) for k in keys[:-1])


def test_bounds_become_asserts():
    p = parse_program("(real x -2 3)\n(assert (>= x 0))")
    assert len(p.asserts) == 3
    assert not verify(p, {"x": 3.5})
    assert verify(p, {"x": 2.5})


def test_domain_errors():
    p = parse_program("(real x)\n(assert (>= (sqrt x) 0))")
    with pytest.raises(DomainError):
        verify(p, {"x": -1.0})
    q = parse_program("(real x)\n(assert (>= (/ 1 x) 0))")
    with pytest.raises(DomainError):
        verify(q, {"x": 0.0})


def test_untaken_branch_errors_are_ignored():
    p = parse_program("(real x)\n(assert (>= (ite (>= x 0) (sqrt x) 1) 0))")
    assert verify(p, {"x": -4.0})


def test_strict_comparison_sugar():
    p = parse_program("(real x)\n(assert (> x 1))")
    assert not verify(p, {"x": 1.0})
    assert verify(p, {"x": 1.5})
    q = parse_program("(real x)\n(assert (< x 1))")
    assert not verify(q, {"x": 1.0})
    assert verify(q, {"x": 0.5})


def test_assignment_and_dict_agree():
    p = parse_program("(bool y) (real x)\n(assert (>= (iteh y x (- x)) 0))")
    assert verify(p, Assignment({"x": -1.0}, {"y": 0}))
    assert not verify(p, Assignment({"x": -1.0}, {"y": 1}))


def test_print_parse_round_trip_examples():
    for p in (branch_chain(), ite_select()):
        q = parse_program(print_program(p))
        assert p.structurally_equal(q)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_round_trip_random(seed):
    rng = np.random.default_rng(seed)
    p = random_program(rng, num_reals=3, num_bools=2, max_depth=3)
    q = parse_program(print_program(p))
    assert p.structurally_equal(q)
    for _ in range(5):
        s = random_assignment(p, rng)
        assert verify(p, s) == verify(q, s)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_ite_semantics_and_determinism(seed):
    rng = np.random.default_rng(seed)
    p = random_program(rng, num_reals=3, num_bools=1, max_depth=4)
    s = random_assignment(p, rng)
    vals = evaluate(p, s)
    assert vals == evaluate(p, s)
    for n, node in enumerate(p.nodes):
        if n not in vals:
            continue
        if node.kind == "ite":
            c, t, o = node.args
            assert vals[n] == (vals[t] if vals[c] else vals[o])
        elif node.kind == "iteh":
            t, o = node.args
            assert vals[n] == (vals[t] if s.bools[node.data] else vals[o])


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_verify_is_conjunction_of_asserts(seed):
    rng = np.random.default_rng(seed)
    p = random_program(rng, num_asserts=3)
    s = random_assignment(p, rng)
    assert verify(p, s) == all(eval_bool(p, a, s) == 1 for a in p.asserts)


def test_builder_rejects_mixed_kinds():
    b = ProgramBuilder()
    x = b.real("x")
    with pytest.raises(TypeError):
        b.and_(x, x)
    with pytest.raises(TypeError):
        b.add(b.ge(x), x)


def test_children_precede_parents():
    p = branch_chain()
    for n, node in enumerate(p.nodes):
        assert all(a < n for a in node.args)


def test_nan_free_trig():
    p = parse_program("(real x)\n(assert (>= (+ (sin x) (cos x)) -2))")
    assert verify(p, {"x": math.pi})
