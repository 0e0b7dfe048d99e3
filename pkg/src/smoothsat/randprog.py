"""Random small programs and assignments for property tests and stress runs."""

import numpy as np

from .ir import Assignment, ProgramBuilder
from . import ops
from .smooth import SmoothBuilder, SmoothParams

SAFE_UNARY = ("neg", "sin", "cos", "tanh")
SAFE_BINARY = ("add", "sub", "mul")


class _Gen:
    def __init__(self, rng, b, reals, bools, max_depth):
        self.rng = rng
        self.b = b
        self.reals = reals
        self.bools = bools
        self.max_depth = max_depth

    def leaf(self):
        if self.rng.random() < 0.7 and self.reals:
            return self.b.var(self.reals[self.rng.integers(len(self.reals))])
        return self.b.const(round(float(self.rng.uniform(-2.0, 2.0)), 3))

    def real(self, depth):
        if depth <= 0 or self.rng.random() < 0.25:
            return self.leaf()
        r = self.rng.random()
        if r < 0.45:
            op = SAFE_BINARY[self.rng.integers(len(SAFE_BINARY))]
            return self.b.op(op, self.real(depth - 1), self.real(depth - 1))
        if r < 0.6:
            op = SAFE_UNARY[self.rng.integers(len(SAFE_UNARY))]
            return self.b.op(op, self.real(depth - 1))
        if r < 0.85 or not self.bools:
            return self.b.ite(self.boolean(depth - 1), self.real(depth - 1), self.real(depth - 1))
        y = self.bools[self.rng.integers(len(self.bools))]
        return self.b.iteh(y, self.real(depth - 1), self.real(depth - 1))

    def boolean(self, depth):
        r = self.rng.random()
        if depth <= 0 or r < 0.5:
            return self.b.ge(self.real(depth - 1))
        if r < 0.7:
            return self.b.not_(self.boolean(depth - 1))
        return self.b.and_(self.boolean(depth - 1), self.boolean(depth - 1))


def random_program(rng, num_reals=3, num_bools=1, num_asserts=2, max_depth=4, bound=3.0):
    """Program over ``x0..`` in ``[-bound, bound]`` and Boolean unknowns ``y0..``.

    Only operators without domain restrictions are used, so every
    assignment inside the bounds evaluates without error.
    """
    b = ProgramBuilder()
    reals = [f"x{i}" for i in range(num_reals)]
    bools = [f"y{i}" for i in range(num_bools)]
    for name in reals:
        b.real(name, -bound, bound)
    for name in bools:
        b.bool(name)
    g = _Gen(rng, b, reals, bools, max_depth)
    for _ in range(num_asserts):
        b.assert_(g.boolean(max_depth))
    return b.build()


def random_assignment(p, rng, bound=3.0):
    reals = {x: float(rng.uniform(-bound, bound)) for x in p.real_unknowns}
    bools = {y: int(rng.integers(2)) for y in p.bool_unknowns}
    return Assignment(reals, bools)


def random_programs(seed, count, **kw):
    rng = np.random.default_rng(seed)
    return [random_program(rng, **kw) for _ in range(count)]


def random_smoothed_set(rng, num_vars=4, max_depth=8, num_constraints=2, beta=None):
    """Random smoothed constraint set for derivative checks.

    Division and square root only see arguments kept away from their
    guarded regions, so every node is smooth at every point.
    """
    beta = float(beta if beta is not None else rng.choice([1.0, 5.0, 25.0]))
    sb = SmoothBuilder(beta)
    xs = [sb.var(f"x{i}") for i in range(num_vars)]

    def away_from_zero(n):
        return sb.add(sb.const(1.5), sb.node(ops.TANH, n))

    def gen(depth):
        if depth <= 0 or rng.random() < 0.15:
            if rng.random() < 0.8:
                return xs[rng.integers(len(xs))]
            return sb.const(round(float(rng.uniform(-2.0, 2.0)), 3))
        r = rng.random()
        if r < 0.4:
            code = (ops.ADD, ops.SUB, ops.MUL)[rng.integers(3)]
            return sb.node(code, gen(depth - 1), gen(depth - 1))
        if r < 0.5:
            return sb.node(ops.DIV, gen(depth - 1), away_from_zero(gen(depth - 1)))
        if r < 0.55:
            return sb.node(ops.SQRT, away_from_zero(gen(depth - 1)))
        if r < 0.6:
            return sb.node(ops.EXP, sb.node(ops.TANH, gen(depth - 1)))
        if r < 0.8:
            code = (ops.NEG, ops.SIN, ops.COS, ops.TANH)[rng.integers(4)]
            return sb.node(code, gen(depth - 1))
        return sb.blend(gen(depth - 1), gen(depth - 1), sb.sig(gen(depth - 1)))

    cons = [gen(max_depth) for _ in range(num_constraints)]
    return sb.finish(cons, SmoothParams(beta=beta))
