"""Forward-mode automatic differentiation of smoothed constraint sets.

Each node carries its value and its dense gradient with respect to every
real variable of the set; one pass over the topologically ordered arena
computes both. The pass is compiled with numba.
"""

from dataclasses import dataclass
import math

import numba
import numpy as np

from .ops import (VAR, CONST, ADD, SUB, MUL, DIV, NEG, SIN, COS, SQRT, TANH, EXP, SIG, MU)


class EvaluationError(FloatingPointError):
    def __init__(self, node, what="value"):
        super().__init__(f"non-finite {what} at smoothed node {node}")
        self.node = node


@dataclass
class GradVector:
    value: float
    grad: np.ndarray


@numba.njit(cache=True)
def _forward(op, a, b, cval, x, beta, val, grad, want_grad):
    nvar = x.shape[0]
    n = op.shape[0]
    for i in range(n):
        o = op[i]
        if o == VAR:
            k = int(cval[i])
            val[i] = x[k]
            if want_grad:
                for j in range(nvar):
                    grad[i, j] = 0.0
                grad[i, k] = 1.0
            continue
        if o == CONST:
            val[i] = cval[i]
            if want_grad:
                for j in range(nvar):
                    grad[i, j] = 0.0
            continue
        ia = a[i]
        va = val[ia]
        if o == ADD or o == SUB or o == MUL or o == DIV:
            ib = b[i]
            vb = val[ib]
            if o == ADD:
                val[i] = va + vb
                da = 1.0
                db = 1.0
            elif o == SUB:
                val[i] = va - vb
                da = 1.0
                db = -1.0
            elif o == MUL:
                val[i] = va * vb
                da = vb
                db = va
            else:
                den = vb * vb + MU
                val[i] = va * vb / den
                da = vb / den
                db = va * (MU - vb * vb) / (den * den)
            if want_grad:
                for j in range(nvar):
                    grad[i, j] = da * grad[ia, j] + db * grad[ib, j]
            continue
        if o == NEG:
            val[i] = -va
            d = -1.0
        elif o == SIN:
            val[i] = math.sin(va)
            d = math.cos(va)
        elif o == COS:
            val[i] = math.cos(va)
            d = -math.sin(va)
        elif o == SQRT:
            if va > MU:
                r = math.sqrt(va)
                val[i] = r
                d = 0.5 / r
            else:
                val[i] = math.sqrt(MU)
                d = 0.0
        elif o == TANH:
            t = math.tanh(va)
            val[i] = t
            d = 1.0 - t * t
        elif o == EXP:
            e = math.exp(va) if va < 709.0 else math.inf
            val[i] = e
            d = e
        else:
            z = beta * va
            if z >= 0.0:
                s = 1.0 / (1.0 + math.exp(-z))
            else:
                ez = math.exp(z)
                s = ez / (1.0 + ez)
            val[i] = s
            d = beta * s * (1.0 - s)
        if want_grad:
            for j in range(nvar):
                grad[i, j] = d * grad[ia, j]
    return n


class Evaluator:
    """Reusable scratch buffers for evaluating one constraint set.

    ``evaluations`` counts node evaluations performed so far.
    """

    def __init__(self, s):
        self.s = s
        self.val = np.empty(s.num_nodes)
        self.grad = np.empty((s.num_nodes, max(s.num_vars, 1)))
        self.cons = np.array(s.constraints, dtype=np.int64)
        self.evaluations = 0
        self.passes = 0

    def run(self, x, want_grad):
        x = np.ascontiguousarray(x, dtype=np.float64)
        if x.shape != (self.s.num_vars,):
            raise ValueError(f"expected {self.s.num_vars} variables, got shape {x.shape}")
        if self.s.num_vars == 0:
            x = np.zeros(1)
        self.evaluations += _forward(self.s.op, self.s.a, self.s.b, self.s.cval, x,
                                     float(self.s.params.beta), self.val, self.grad, want_grad)
        self.passes += 1

    def values(self, x):
        """Constraint values at ``x`` (may contain non-finite entries)."""
        self.run(x, False)
        return self.val[self.cons].copy()

    def values_and_jacobian(self, x):
        self.run(x, True)
        return self.val[self.cons].copy(), self.grad[self.cons, : self.s.num_vars].copy()

    def check_finite(self, with_grad):
        bad = ~np.isfinite(self.val)
        if with_grad:
            bad |= ~np.isfinite(self.grad[:, : self.s.num_vars]).all(axis=1)
        if bad.any():
            node = int(np.argmax(bad))
            raise EvaluationError(node, "value or gradient" if with_grad else "value")


def _evaluator(s):
    ev = s._kernel_cache.get("ev")
    if ev is None:
        ev = s._kernel_cache["ev"] = Evaluator(s)
    return ev


def eval_smooth(s, n, sigma):
    """Value of smoothed node ``n`` at ``sigma`` (dict or vector)."""
    ev = _evaluator(s)
    ev.run(s.vector(sigma), False)
    v = float(ev.val[n])
    if not math.isfinite(v):
        raise EvaluationError(n)
    return v


def eval_nodes(s, nodes, sigma):
    ev = _evaluator(s)
    ev.run(s.vector(sigma), False)
    return ev.val[np.asarray(nodes, dtype=np.int64)].copy()


def eval_with_grad(s, sigma):
    """Value and gradient of every constraint, one :class:`GradVector` each."""
    ev = _evaluator(s)
    ev.run(s.vector(sigma), True)
    ev.check_finite(True)
    nv = s.num_vars
    return [GradVector(float(ev.val[c]), ev.grad[c, :nv].copy()) for c in s.constraints]


def node_value_and_grad(s, n, sigma):
    ev = _evaluator(s)
    ev.run(s.vector(sigma), True)
    return float(ev.val[n]), ev.grad[n, : s.num_vars].copy()
