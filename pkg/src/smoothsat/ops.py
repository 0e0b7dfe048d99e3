"""Real-valued operator table shared by the exact and smoothed evaluators.

Every operator has an integer code (used by the compiled kernels), an arity,
an exact implementation that raises :class:`DomainError` outside its domain,
and a guarded continuous approximation with its partial derivatives.
"""

import math

#: Guard used by the continuous approximations of ``div`` and ``sqrt``.
MU = 1e-9


class DomainError(ValueError):
    """Raised by the exact semantics when an operator leaves its domain."""


# Codes for the smoothed-node kernels. VAR/CONST/SIG are not program ops.
VAR, CONST, ADD, SUB, MUL, DIV, NEG, SIN, COS, SQRT, TANH, EXP, SIG = range(13)


def _exact_div(a, b):
    if b == 0.0:
        raise DomainError("division by zero")
    return a / b


def _exact_sqrt(a):
    if a < 0.0:
        raise DomainError(f"sqrt of negative value {a!r}")
    return math.sqrt(a)


def _exact_exp(a):
    try:
        return math.exp(a)
    except OverflowError:
        return math.inf


def guarded_div(a, b):
    return a * b / (b * b + MU)


def guarded_div_partials(a, b):
    den = b * b + MU
    return b / den, a * (MU - b * b) / (den * den)


def guarded_sqrt(a):
    return math.sqrt(a if a > MU else MU)


def guarded_sqrt_partial(a):
    return 0.5 / math.sqrt(a) if a > MU else 0.0


class OpInfo:
    __slots__ = ("name", "code", "arity", "exact")

    def __init__(self, name, code, arity, exact):
        self.name = name
        self.code = code
        self.arity = arity
        self.exact = exact

    def __repr__(self):
        return f"OpInfo({self.name!r}, arity={self.arity})"


OPS = {
    "add": OpInfo("add", ADD, 2, lambda a, b: a + b),
    "sub": OpInfo("sub", SUB, 2, lambda a, b: a - b),
    "mul": OpInfo("mul", MUL, 2, lambda a, b: a * b),
    "div": OpInfo("div", DIV, 2, _exact_div),
    "neg": OpInfo("neg", NEG, 1, lambda a: -a),
    "sin": OpInfo("sin", SIN, 1, math.sin),
    "cos": OpInfo("cos", COS, 1, math.cos),
    "sqrt": OpInfo("sqrt", SQRT, 1, _exact_sqrt),
    "tanh": OpInfo("tanh", TANH, 1, math.tanh),
    "exp": OpInfo("exp", EXP, 1, _exact_exp),
}

OPS_BY_CODE = {info.code: info for info in OPS.values()}

# Surface syntax of the textual IR.
SYMBOLS = {"+": "add", "-": "sub", "*": "mul", "/": "div"}
SYMBOL_OF = {"add": "+", "sub": "-", "mul": "*", "div": "/", "neg": "-"}


def sigmoid(x, beta):
    """Numerically safe ``1 / (1 + exp(-beta * x))``."""
    z = beta * x
    if z >= 0.0:
        return 1.0 / (1.0 + math.exp(-z))
    ez = math.exp(z)
    return ez / (1.0 + ez)


def smooth_value(code, a, b=0.0, beta=1.0):
    """Pure-Python evaluation of one smoothed node (reference path)."""
    if code == ADD:
        return a + b
    if code == SUB:
        return a - b
    if code == MUL:
        return a * b
    if code == DIV:
        return guarded_div(a, b)
    if code == NEG:
        return -a
    if code == SIN:
        return math.sin(a)
    if code == COS:
        return math.cos(a)
    if code == SQRT:
        return guarded_sqrt(a)
    if code == TANH:
        return math.tanh(a)
    if code == EXP:
        return _exact_exp(a)
    if code == SIG:
        return sigmoid(a, beta)
    raise ValueError(f"not an operator code: {code}")
