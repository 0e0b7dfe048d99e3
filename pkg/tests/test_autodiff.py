import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from smoothsat import ops
from smoothsat.autodiff import (EvaluationError, Evaluator, eval_nodes, eval_smooth,
                                eval_with_grad, node_value_and_grad)
from smoothsat.randprog import random_smoothed_set
from smoothsat.smooth import SmoothBuilder, SmoothParams, eval_smooth_reference


def build(fn, names, beta=1.0):
    sb = SmoothBuilder(beta)
    xs = [sb.var(n) for n in names]
    return sb.finish([fn(sb, *xs)], SmoothParams(beta=beta))


def fd_jacobian(ev, x, h=1e-6):
    cols = []
    for j in range(x.size):
        e = np.zeros_like(x)
        e[j] = h
        cols.append((ev.values(x + e) - ev.values(x - e)) / (2 * h))
    return np.stack(cols, axis=1)


def test_product_plus_term():
    s = build(lambda sb, a, b, c: sb.add(sb.mul(a, b), c), ["x1", "x2", "x3"])
    (gv,) = eval_with_grad(s, {"x1": 2.0, "x2": 3.0, "x3": 5.0})
    assert gv.value == 11.0
    assert gv.grad.tolist() == [3.0, 2.0, 1.0]


def test_constant_has_zero_gradient():
    sb = SmoothBuilder()
    sb.var("x")
    s = sb.finish([sb.const(4.0)], SmoothParams())
    (gv,) = eval_with_grad(s, {"x": 1.0})
    assert gv.value == 4.0
    assert gv.grad.tolist() == [0.0]


def test_transition_at_zero():
    s = build(lambda sb, x: sb.sig(x), ["x"], beta=2.0)
    (gv,) = eval_with_grad(s, {"x": 0.0})
    assert gv.value == 0.5
    assert gv.grad.tolist() == [0.5]


def test_guarded_sqrt_gradient_is_finite():
    s = build(lambda sb, x: sb.node(ops.SQRT, x), ["x"])
    for x in (0.0, -3.0, 1e-12):
        (gv,) = eval_with_grad(s, {"x": x})
        assert np.isfinite(gv.grad).all()
    (gv,) = eval_with_grad(s, {"x": 4.0})
    assert gv.value == 2.0 and gv.grad[0] == pytest.approx(0.25)


def test_guarded_div_matches_quotient_away_from_zero():
    s = build(lambda sb, a, b: sb.node(ops.DIV, a, b), ["a", "b"])
    (gv,) = eval_with_grad(s, {"a": 3.0, "b": 2.0})
    assert gv.value == pytest.approx(1.5, rel=1e-9)
    assert gv.grad == pytest.approx([0.5, -0.75], rel=1e-8)


def test_non_finite_reports_node():
    s = build(lambda sb, x: sb.node(ops.EXP, sb.node(ops.EXP, x)), ["x"])
    with pytest.raises(EvaluationError) as info:
        eval_with_grad(s, {"x": 800.0})
    assert 0 <= info.value.node < s.num_nodes
    with pytest.raises(EvaluationError):
        eval_smooth(s, s.constraints[0], {"x": 800.0})


def test_one_evaluation_per_node():
    rng = np.random.default_rng(3)
    s = random_smoothed_set(rng, num_vars=5, max_depth=8)
    ev = Evaluator(s)
    ev.values_and_jacobian(np.zeros(5))
    assert ev.evaluations == s.num_nodes
    ev.values(np.ones(5))
    assert ev.evaluations == 2 * s.num_nodes


def test_wrong_vector_length_rejected():
    s = build(lambda sb, a, b: sb.add(a, b), ["a", "b"])
    with pytest.raises(ValueError):
        Evaluator(s).values(np.zeros(3))


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 1_000_000))
def test_matches_finite_differences(seed):
    rng = np.random.default_rng(seed)
    nv = int(rng.integers(1, 11))
    s = random_smoothed_set(rng, num_vars=nv, max_depth=int(rng.integers(1, 9)))
    ev = Evaluator(s)
    x = rng.uniform(-2, 2, nv)
    _, jac = ev.values_and_jacobian(x)
    fd = fd_jacobian(ev, x)
    assert np.all(np.abs(fd - jac) <= np.maximum(1e-6, 1e-4 * np.abs(jac)))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 1_000_000))
def test_values_agree_bit_for_bit(seed):
    rng = np.random.default_rng(seed)
    s = random_smoothed_set(rng, num_vars=3, max_depth=6)
    x = rng.uniform(-2, 2, 3)
    with_grad = [gv.value for gv in eval_with_grad(s, x)]
    plain = eval_nodes(s, s.constraints, x).tolist()
    assert with_grad == plain
    assert plain == [eval_smooth_reference(s, n, s.assignment(x)) for n in s.constraints]
    for n in s.constraints:
        assert node_value_and_grad(s, n, x)[0] == eval_smooth(s, n, x)
