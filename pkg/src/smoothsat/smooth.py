"""Smoothed numerical abstraction of a program under an interface mapping.

Given a program and an interface mapping ``imap`` (Boolean node id or
Boolean-unknown name -> 0, 1 or None), :func:`abstract_num` builds a
conjunction of smooth constraints ``c_i(x) >= 0`` over the real unknowns
plus one relaxed variable in ``[0, 1]`` per unfixed Boolean unknown:

* an ``e >= 0`` atom is approximated by ``e`` itself (its positive
  distance); negation negates, conjunction takes a sigmoid-blended minimum;
* ``ite(b, e1, e2)`` becomes ``e1*F(d) + e2*(1 - F(d))`` where ``d`` is the
  positive distance of ``b`` and ``F`` a sigmoid of steepness ``beta``;
* a Boolean expression fixed by ``imap`` is replaced by ``+K``/``-K`` and
  its positive distance is constrained to the fixed sign;
* an unfixed Boolean unknown becomes a real ``r`` with ``0 <= r <= 1`` and
  ``r(1 - r) <= delta``, blending the branches of its ``iteh``.

A constraint ``c >= 0`` is considered satisfied when ``c >= -eps``.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from . import ops
from .ops import VAR, CONST, ADD, SUB, MUL, DIV, NEG, SIG


@dataclass
class SmoothParams:
    beta: float = 1.0
    eps: float = 1e-4
    K: float = 100.0
    delta: float | None = None

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if self.K <= 0:
            raise ValueError("K must be positive")
        if self.eps < 0:
            raise ValueError("eps must be non-negative")
        if self.delta is None:
            self.delta = 0.1 / self.beta


def smooth_transition(x, beta):
    """Sigmoid ``1 / (1 + exp(-beta*x))`` without overflow."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    return ops.sigmoid(x, beta)


class SmoothBuilder:
    """Hash-consed arena of smoothed nodes with constant folding."""

    def __init__(self, beta=1.0):
        self.beta = beta
        self.op = []
        self.a = []
        self.b = []
        self.cval = []
        self._index = {}
        self.var_names = []

    def __len__(self):
        return len(self.op)

    def _add(self, code, a=-1, b=-1, c=0.0):
        key = (code, a, b, c)
        n = self._index.get(key)
        if n is None:
            n = len(self.op)
            self.op.append(code)
            self.a.append(a)
            self.b.append(b)
            self.cval.append(c)
            self._index[key] = n
        return n

    def var(self, name):
        k = len(self.var_names)
        self.var_names.append(name)
        return self._add(VAR, c=float(k))

    def const(self, c):
        return self._add(CONST, c=float(c) + 0.0)

    def is_const(self, n):
        return self.op[n] == CONST

    def node(self, code, a, b=-1):
        if self.op[a] == CONST and (b < 0 or self.op[b] == CONST):
            bv = self.cval[b] if b >= 0 else 0.0
            return self.const(ops.smooth_value(code, self.cval[a], bv, self.beta))
        return self._add(code, a, b)

    def add(self, a, b):
        return self.node(ADD, a, b)

    def sub(self, a, b):
        return self.node(SUB, a, b)

    def mul(self, a, b):
        return self.node(MUL, a, b)

    def neg(self, a):
        return self.node(NEG, a)

    def sig(self, a):
        return self.node(SIG, a)

    def blend(self, e1, e2, w):
        """``e1*w + e2*(1 - w)``."""
        return self.add(self.mul(e1, w), self.mul(e2, self.sub(self.const(1.0), w)))

    def finish(self, constraints, params, provenance=None, relaxed=None, bool_value=None,
               node_of=None):
        return SmoothedConstraintSet(
            op=np.array(self.op, dtype=np.int64),
            a=np.array(self.a, dtype=np.int64),
            b=np.array(self.b, dtype=np.int64),
            cval=np.array(self.cval, dtype=np.float64),
            var_names=list(self.var_names),
            constraints=list(constraints),
            provenance=provenance if provenance is not None
            else [("assert", i) for i in range(len(constraints))],
            relaxed=relaxed or {},
            bool_value=bool_value or {},
            params=params,
            node_of=node_of or {},
        )


@dataclass
class SmoothedConstraintSet:
    op: np.ndarray
    a: np.ndarray
    b: np.ndarray
    cval: np.ndarray
    var_names: list
    constraints: list
    provenance: list
    relaxed: dict
    bool_value: dict
    params: SmoothParams
    node_of: dict = field(default_factory=dict)
    _kernel_cache: dict = field(default_factory=dict, repr=False)

    @property
    def num_vars(self):
        return len(self.var_names)

    @property
    def num_nodes(self):
        return len(self.op)

    def index_of(self, name):
        return self.var_names.index(name)

    def vector(self, sigma, default=None):
        """Assignment (dict name -> value) to a vector in ``var_names`` order."""
        if isinstance(sigma, np.ndarray):
            return np.asarray(sigma, dtype=float)
        out = np.empty(self.num_vars)
        for i, name in enumerate(self.var_names):
            if name in sigma:
                out[i] = float(sigma[name])
            elif default is not None:
                out[i] = default(name)
            else:
                raise KeyError(f"no value for {name!r}")
        return out

    def assignment(self, x):
        return {name: float(v) for name, v in zip(self.var_names, x)}

    def to_sexpr(self, n):
        """Readable s-expression for node ``n`` (expands sharing)."""
        memo = {}
        names = {ops.ADD: "+", ops.SUB: "-", ops.MUL: "*", ops.DIV: "/", ops.NEG: "-",
                 ops.SIN: "sin", ops.COS: "cos", ops.SQRT: "sqrt", ops.TANH: "tanh",
                 ops.EXP: "exp", SIG: "sig"}
        for i in _cone(self, [n]):
            o = int(self.op[i])
            if o == VAR:
                memo[i] = self.var_names[int(self.cval[i])]
            elif o == CONST:
                c = float(self.cval[i])
                memo[i] = repr(int(c)) if c.is_integer() and abs(c) < 1e15 else repr(c)
            elif self.b[i] >= 0:
                memo[i] = f"({names[o]} {memo[int(self.a[i])]} {memo[int(self.b[i])]})"
            else:
                memo[i] = f"({names[o]} {memo[int(self.a[i])]})"
        return memo[n]

    def dump(self):
        """Debug listing of every constraint with its provenance."""
        lines = [f"; beta={self.params.beta} eps={self.params.eps} "
                 f"K={self.params.K} delta={self.params.delta}"]
        for n, tag in zip(self.constraints, self.provenance):
            lines.append(f"(>= {self.to_sexpr(n)} 0)  ; {' '.join(map(str, tag))}")
        return "\n".join(lines) + "\n"


def _cone(s, roots):
    seen = set()
    stack = list(roots)
    while stack:
        n = stack.pop()
        if n in seen:
            continue
        seen.add(n)
        for c in (int(s.a[n]), int(s.b[n])):
            if c >= 0:
                stack.append(c)
    return sorted(seen)


def match_n_update(sb, e, v, K):
    """Pin a positive distance ``e`` to value ``v``.

    Returns ``(replacement node, constraint node or None)``: ``v is None``
    leaves ``e`` alone, ``v == 1`` yields ``(K, e)`` and ``v == 0`` yields
    ``(-K, -e)``.
    """
    if v is None:
        return e, None
    if v:
        return sb.const(K), e
    return sb.const(-K), sb.neg(e)


def abstract_num(p, imap, params):
    """Build the smoothed constraint set for program ``p`` under ``imap``.

    Missing keys in ``imap`` count as unfixed.
    """
    sb = SmoothBuilder(params.beta)
    K = params.K
    for name in p.real_unknowns:
        sb.var(name)

    constraints = []
    provenance = []
    seen_constraint = set()

    def emit(n, tag):
        if n is None:
            return
        if sb.is_const(n):
            if sb.cval[n] >= 0.0:
                return
        if n in seen_constraint:
            return
        seen_constraint.add(n)
        constraints.append(n)
        provenance.append(tag)

    relaxed = {}
    bool_value = {}
    smoothed = {}
    pinned = {}

    def hole(y):
        v = imap.get(y)
        if v is not None:
            bool_value[y] = sb.const(float(v))
            return v
        if y not in relaxed:
            r = sb.var(y)
            relaxed[y] = r
            bool_value[y] = r
            one = sb.const(1.0)
            emit(r, ("relax", y, "lo"))
            emit(sb.sub(one, r), ("relax", y, "hi"))
            emit(sb.sub(sb.const(params.delta), sb.mul(r, sb.sub(one, r))), ("relax", y, "delta"))
        return None

    for n in p.reachable():
        node = p.nodes[n]
        k = node.kind
        args = node.args
        if k == "x":
            e = sb._index[(VAR, -1, -1, float(p.real_unknowns.index(node.data)))]
        elif k == "const":
            e = sb.const(node.data)
        elif k in ops.OPS:
            info = ops.OPS[k]
            kids = [smoothed[c] for c in args]
            e = sb.node(info.code, *kids)
        elif k == "ite":
            c, t, o = args
            if pinned.get(c) is not None:
                e = smoothed[t] if pinned[c] else smoothed[o]
            else:
                e = sb.blend(smoothed[t], smoothed[o], sb.sig(smoothed[c]))
        elif k == "iteh":
            t, o = args
            v = hole(node.data)
            if v is not None:
                e = smoothed[t] if v else smoothed[o]
            else:
                e = sb.blend(smoothed[t], smoothed[o], relaxed[node.data])
        else:
            if k == "ge":
                d = smoothed[args[0]]
                pin = None
            elif k == "not":
                d = sb.neg(smoothed[args[0]])
                pc = pinned.get(args[0])
                pin = None if pc is None else 1 - pc
            else:
                d1, d2 = (smoothed[c] for c in args)
                p1, p2 = (pinned.get(c) for c in args)
                if p1 == 0 or p2 == 0:
                    pin, d = 0, sb.const(-K)
                elif p1 == 1 and p2 == 1:
                    pin, d = 1, sb.const(K)
                elif p1 == 1:
                    pin, d = None, d2
                elif p2 == 1:
                    pin, d = None, d1
                else:
                    pin = None
                    d = sb.blend(d1, d2, sb.sig(sb.sub(d2, d1)))
            v = imap.get(n)
            e, con = match_n_update(sb, d, v, K)
            emit(con, ("pin", n, v))
            if v is not None:
                pin = v
            pinned[n] = pin
            bool_value[n] = e
        smoothed[n] = e

    for y in p.bool_unknowns:
        if y not in bool_value:
            hole(y)

    for i, a in enumerate(p.asserts):
        emit(smoothed[a], ("assert", i))

    return sb.finish(constraints, params, provenance, relaxed, bool_value, smoothed)


def derived_pins(p, imap):
    """Boolean nodes whose value is forced by ``imap`` through ``not``/``and``.

    Mirrors the folding done by :func:`abstract_num`: a node set in ``imap``
    takes that value; otherwise a negation of a forced node and a
    conjunction with a false (or two true) operands are forced.
    """
    pinned = {}
    for n in p.reachable():
        node = p.nodes[n]
        if node.kind not in ("ge", "not", "and"):
            continue
        v = None
        if node.kind == "not":
            c = pinned.get(node.args[0])
            v = None if c is None else 1 - c
        elif node.kind == "and":
            p1, p2 = (pinned.get(c) for c in node.args)
            if p1 == 0 or p2 == 0:
                v = 0
            elif p1 == 1 and p2 == 1:
                v = 1
        if imap.get(n) is not None:
            v = imap[n]
        pinned[n] = v
    return pinned


def eval_smooth_reference(s, n, sigma):
    """Plain-Python evaluation of node ``n``; used to cross-check the kernel."""
    x = s.vector(sigma)
    memo = {}
    for i in _cone(s, [n]):
        o = int(s.op[i])
        if o == VAR:
            memo[i] = float(x[int(s.cval[i])])
        elif o == CONST:
            memo[i] = float(s.cval[i])
        else:
            av = memo[int(s.a[i])]
            bv = memo[int(s.b[i])] if s.b[i] >= 0 else 0.0
            memo[i] = ops.smooth_value(o, av, bv, s.params.beta)
    v = memo[n]
    if not math.isfinite(v):
        raise FloatingPointError(f"non-finite value at node {n}")
    return v
