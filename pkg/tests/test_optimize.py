from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from smoothsat import OptimizerConfig, SmoothParams, abstract_num, minimize, parse_program, solve_phase1
from smoothsat.autodiff import Evaluator
from smoothsat.bench.toys import branch_chain, find_atom, ite_select
from smoothsat.optimize import residual_of, sample_start
from smoothsat.randprog import random_program


def constraint_set(src, imap=None, beta=1.0):
    return abstract_num(parse_program(src), imap or {}, SmoothParams(beta=beta))


def test_feasible_box():
    cfg = OptimizerConfig()
    s = constraint_set("(real x)\n(assert (>= x 0))\n(assert (>= (- 1 x) 0))")
    res = minimize(s, {"x": 5.0}, cfg)
    assert res.sat
    assert -cfg.eps <= res.x["x"] <= 1 + cfg.eps


def test_infeasible_pair():
    s = constraint_set("(real x)\n(assert (>= x 0))\n(assert (>= (- (- x) 1) 0))")
    res = minimize(s, {"x": 3.0}, OptimizerConfig())
    assert res.status == "UNSAT"
    assert res.residual > 0.4


def test_select_example_under_pin():
    cfg = OptimizerConfig()
    p = ite_select()
    s = abstract_num(p, {find_atom(p, "(>= x1 0)"): 0}, SmoothParams(beta=1.0))
    res = minimize(s, {"x1": 1.0, "x2": 1.0, "x3": -1.0}, cfg)
    assert res.sat
    assert res.x["x3"] >= -cfg.eps
    assert res.x["x1"] <= cfg.eps


def test_phase1_trivial_program_any_seed():
    p = parse_program("(real x)\n(assert (>= x 0))")
    for seed in range(10):
        assert solve_phase1(p, {}, OptimizerConfig(seed=seed)).sat


def test_chain_stalls_from_far_left_without_pin():
    p = branch_chain()
    res = solve_phase1(p, {}, OptimizerConfig(), x0={"x1": -20.0})
    assert res.status == "UNSAT"
    assert res.x["x1"] < 0


def test_chain_converges_from_far_left_with_pin():
    p = branch_chain()
    imap = {find_atom(p, "(>= (sub 0 x1) 0)"): 0}
    res = solve_phase1(p, imap, OptimizerConfig(), x0={"x1": -20.0})
    assert res.sat
    assert 4.0 < res.x["x1"] <= 5.0


def test_sat_certificate_on_fresh_pass():
    p = branch_chain()
    imap = {find_atom(p, "(>= (sub 0 x1) 0)"): 0}
    cfg = OptimizerConfig()
    res = solve_phase1(p, imap, cfg, x0={"x1": 3.0})
    s = abstract_num(p, imap, SmoothParams(beta=cfg.beta_schedule[-1], eps=cfg.eps))
    assert residual_of(Evaluator(s).values(s.vector(res.x))) <= cfg.eps


def test_warm_start_passes_point_verbatim(monkeypatch):
    import smoothsat.optimize as opt
    real_minimize = opt.minimize
    seen = []

    def spy(s, x0, c, ev=None):
        seen.append((s.params.beta, dict(x0)))
        out = real_minimize(s, x0, c, ev)
        seen.append(("out", dict(out.x)))
        return out

    monkeypatch.setattr(opt, "minimize", spy)
    solve_phase1(branch_chain(), {}, OptimizerConfig(beta_schedule=(1.0, 5.0, 25.0)), x0={"x1": 1.0})
    assert [b for b, _ in seen[0::2]] == [1.0, 5.0, 25.0]
    for (_, out), (_, nxt) in zip(seen[1::2], seen[2::2]):
        assert nxt == out


def test_start_sampling_respects_bounds():
    p = SimpleNamespace(bounds={"a": (-2.0, 3.0), "b": (5.0, None)})
    rng = np.random.default_rng(0)
    for _ in range(50):
        x = sample_start(p, ["a", "b", "c", "y"], rng, relaxed={"y"})
        assert -2 <= x["a"] <= 3 and 5 <= x["b"] <= 7 and -1 <= x["c"] <= 1 and 0 <= x["y"] <= 1


def test_schedule_must_increase():
    for bad in ((), (1.0, 1.0), (5.0, 1.0), (-1.0, 2.0)):
        with pytest.raises(ValueError):
            OptimizerConfig(beta_schedule=bad)


def test_margin_default():
    assert OptimizerConfig(eps=1e-3).margin == pytest.approx(1e-2)


def test_overflowing_start_is_unsat_not_crash():
    s = constraint_set("(real x)\n(assert (>= (- 5 (exp (exp x))) 0))")
    res = minimize(s, {"x": 800.0}, OptimizerConfig())
    assert res.status == "UNSAT"


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_merit_never_increases(seed):
    rng = np.random.default_rng(seed)
    p = random_program(rng, num_reals=3, num_bools=1, num_asserts=3)
    s = abstract_num(p, {}, SmoothParams(beta=float(rng.choice([1.0, 25.0]))))
    x0 = sample_start(p, s.var_names, rng, set(s.relaxed))
    res = minimize(s, x0, OptimizerConfig(max_iters=100))
    assert all(b <= a for a, b in zip(res.merits, res.merits[1:]))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 100_000))
def test_phase1_is_deterministic(seed):
    p = random_program(np.random.default_rng(seed), num_reals=2, num_asserts=3)
    cfg = OptimizerConfig(seed=seed, num_restarts=2)
    a, b = solve_phase1(p, {}, cfg), solve_phase1(p, {}, cfg)
    assert (a.status, a.x, a.residual) == (b.status, b.x, b.residual)
