"""Core language: expression arena, exact semantics and the textual format.

Programs are DAGs of real expressions (unknowns, constants, operators and
if-then-else) and Boolean expressions (``e >= 0``, conjunction, negation)
stored in a hash-consed arena whose children always precede their parents.
Boolean unknowns only appear as the condition of an ``iteh`` node.

The textual format is an s-expression language::

    (real x1 -20 6)          ; real unknown with box bounds (become asserts)
    (bool y1)                ; Boolean unknown
    (def t (+ x1 1))         ; named shared subexpression
    (hole-r x2)              ; inline declaration of an unbounded real unknown
    (assert (>= (iteh y1 t (- x1)) 0))
"""

from dataclasses import dataclass, field
from typing import NamedTuple
import math
import re

from .ops import OPS, SYMBOLS, SYMBOL_OF, DomainError

REAL_KINDS = frozenset({"x", "const", "ite", "iteh"} | set(OPS))
BOOL_KINDS = frozenset({"ge", "and", "not"})


class Node(NamedTuple):
    kind: str
    args: tuple = ()
    data: object = None


class ParseError(ValueError):
    def __init__(self, msg, line=None, col=None):
        where = f"line {line}, column {col}: " if line is not None else ""
        super().__init__(where + msg)
        self.line = line
        self.col = col


@dataclass
class Assignment:
    """Values for real unknowns (floats) and Boolean unknowns (0/1)."""

    reals: dict = field(default_factory=dict)
    bools: dict = field(default_factory=dict)

    def to_json(self):
        return {"reals": dict(self.reals), "bools": {k: int(v) for k, v in self.bools.items()}}


@dataclass(frozen=True, eq=False)
class Program:
    nodes: tuple
    asserts: tuple
    real_unknowns: tuple
    bounds: dict
    bool_unknowns: tuple
    bound_asserts: frozenset = frozenset()

    def __len__(self):
        return len(self.nodes)

    def is_bool(self, n):
        return self.nodes[n].kind in BOOL_KINDS

    def user_asserts(self):
        return [a for i, a in enumerate(self.asserts) if i not in self.bound_asserts]

    def reachable(self, roots=None):
        """Sorted ids of nodes reachable from ``roots`` (default: all asserts)."""
        roots = self.asserts if roots is None else roots
        seen = set()
        stack = list(roots)
        while stack:
            n = stack.pop()
            if n in seen:
                continue
            seen.add(n)
            stack.extend(self.nodes[n].args)
        return sorted(seen)

    def structurally_equal(self, other):
        if (self.real_unknowns != other.real_unknowns
                or self.bool_unknowns != other.bool_unknowns
                or self.bounds != other.bounds
                or len(self.asserts) != len(other.asserts)):
            return False
        table = {}
        mine = _canonical_ids(self, table)
        theirs = _canonical_ids(other, table)

        def split(p, canon):
            bound = sorted(canon[p.asserts[i]] for i in p.bound_asserts)
            return [canon[a] for a in p.user_asserts()], bound

        return split(self, mine) == split(other, theirs)


def _canonical_ids(p, table):
    canon = {}
    for n in p.reachable():
        node = p.nodes[n]
        key = (node.kind, node.data, tuple(canon[a] for a in node.args))
        canon[n] = table.setdefault(key, len(table))
    return canon


class ProgramBuilder:
    """Hash-consing constructor for :class:`Program` arenas."""

    def __init__(self):
        self.nodes = []
        self._index = {}
        self.asserts = []
        self.real_unknowns = []
        self.bounds = {}
        self.bool_unknowns = []
        self.bound_asserts = set()

    def _add(self, kind, args=(), data=None):
        key = (kind, tuple(args), data)
        n = self._index.get(key)
        if n is None:
            n = len(self.nodes)
            self.nodes.append(Node(kind, tuple(args), data))
            self._index[key] = n
        return n

    def _check(self, n, want_bool):
        if not 0 <= n < len(self.nodes):
            raise ValueError(f"unknown node id {n}")
        if (self.nodes[n].kind in BOOL_KINDS) != want_bool:
            raise TypeError(f"node {n} ({self.nodes[n].kind}) is not a "
                            f"{'Boolean' if want_bool else 'real'} expression")

    def real(self, name, lo=None, hi=None):
        if name in self.bounds or name in self.bool_unknowns:
            raise ValueError(f"unknown {name!r} declared twice")
        self.real_unknowns.append(name)
        self.bounds[name] = (lo, hi)
        x = self._add("x", (), name)
        if lo is not None:
            self.bound_asserts.add(len(self.asserts))
            self.asserts.append(self.ge(self.sub(x, self.const(lo))))
        if hi is not None:
            self.bound_asserts.add(len(self.asserts))
            self.asserts.append(self.ge(self.sub(self.const(hi), x)))
        return x

    def var(self, name):
        if name not in self.bounds:
            raise ValueError(f"undeclared real unknown {name!r}")
        return self._add("x", (), name)

    def bool(self, name):
        if name in self.bounds or name in self.bool_unknowns:
            raise ValueError(f"unknown {name!r} declared twice")
        self.bool_unknowns.append(name)
        return name

    def const(self, c):
        c = float(c)
        if not math.isfinite(c):
            raise ValueError("constants must be finite")
        return self._add("const", (), c + 0.0)

    def op(self, kind, *args):
        info = OPS[kind]
        if len(args) != info.arity:
            raise ValueError(f"{kind} expects {info.arity} argument(s), got {len(args)}")
        for a in args:
            self._check(a, False)
        return self._add(kind, args)

    def add(self, a, b):
        return self.op("add", a, b)

    def sub(self, a, b):
        return self.op("sub", a, b)

    def mul(self, a, b):
        return self.op("mul", a, b)

    def div(self, a, b):
        return self.op("div", a, b)

    def neg(self, a):
        return self.op("neg", a)

    def ite(self, cond, then, other):
        self._check(cond, True)
        self._check(then, False)
        self._check(other, False)
        return self._add("ite", (cond, then, other))

    def iteh(self, y, then, other):
        if y not in self.bool_unknowns:
            raise ValueError(f"undeclared Boolean unknown {y!r}")
        self._check(then, False)
        self._check(other, False)
        return self._add("iteh", (then, other), y)

    def ge(self, e):
        self._check(e, False)
        return self._add("ge", (e,))

    def and_(self, a, b):
        self._check(a, True)
        self._check(b, True)
        return self._add("and", (a, b))

    def not_(self, a):
        self._check(a, True)
        return self._add("not", (a,))

    def or_(self, a, b):
        return self.not_(self.and_(self.not_(a), self.not_(b)))

    def assert_(self, b):
        self._check(b, True)
        self.asserts.append(b)

    def term(self, n):
        return Term(self, n)

    def build(self):
        return Program(
            nodes=tuple(self.nodes),
            asserts=tuple(self.asserts),
            real_unknowns=tuple(self.real_unknowns),
            bounds=dict(self.bounds),
            bool_unknowns=tuple(self.bool_unknowns),
            bound_asserts=frozenset(self.bound_asserts),
        )


class Term:
    """Operator-overloading handle on a builder node, used by generators.

    Arithmetic builds real nodes; ``>=``/``<=`` build ``ge`` atoms; ``&``,
    ``|`` and ``~`` combine Boolean terms.
    """

    __slots__ = ("b", "id")

    def __init__(self, builder, n):
        self.b = builder
        self.id = n

    def _lift(self, other):
        if isinstance(other, Term):
            return other.id
        return self.b.const(other)

    def _bin(self, kind, other, swap=False):
        o = self._lift(other)
        args = (o, self.id) if swap else (self.id, o)
        return Term(self.b, self.b.op(kind, *args))

    def __add__(self, o):
        return self._bin("add", o)

    def __radd__(self, o):
        return self._bin("add", o, swap=True)

    def __sub__(self, o):
        return self._bin("sub", o)

    def __rsub__(self, o):
        return self._bin("sub", o, swap=True)

    def __mul__(self, o):
        return self._bin("mul", o)

    def __rmul__(self, o):
        return self._bin("mul", o, swap=True)

    def __truediv__(self, o):
        return self._bin("div", o)

    def __rtruediv__(self, o):
        return self._bin("div", o, swap=True)

    def __neg__(self):
        return Term(self.b, self.b.neg(self.id))

    def __ge__(self, o):
        if not isinstance(o, Term) and o == 0:
            return Term(self.b, self.b.ge(self.id))
        return Term(self.b, self.b.ge(self.b.sub(self.id, self._lift(o))))

    def __le__(self, o):
        if not isinstance(o, Term):
            o = Term(self.b, self.b.const(o))
        return o >= self

    def __and__(self, o):
        return Term(self.b, self.b.and_(self.id, o.id))

    def __or__(self, o):
        return Term(self.b, self.b.or_(self.id, o.id))

    def __invert__(self):
        return Term(self.b, self.b.not_(self.id))

    def apply(self, kind):
        return Term(self.b, self.b.op(kind, self.id))

    def __repr__(self):
        return f"Term({self.b.nodes[self.id].kind}#{self.id})"


def _node(b, v):
    return v.id if isinstance(v, Term) else b.const(v)


def ite(cond, then, other):
    """``ite`` over terms; branches may be plain numbers."""
    b = cond.b
    return Term(b, b.ite(cond.id, _node(b, then), _node(b, other)))


def iteh(y, then, other):
    b = then.b if isinstance(then, Term) else other.b
    return Term(b, b.iteh(y, _node(b, then), _node(b, other)))


# ---------------------------------------------------------------------------
# exact semantics


class _Failed:
    __slots__ = ("node", "error")

    def __init__(self, node, error):
        self.node = node
        self.error = error


def _as_maps(sigma):
    if isinstance(sigma, Assignment):
        return sigma.reals, sigma.bools
    return sigma, sigma


def evaluate(p, sigma, nodes=None):
    """Exact values of ``nodes`` (default: every node reachable from asserts).

    Returns a dict node id -> value (float for real nodes, 0/1 for Boolean
    nodes). Domain errors are raised only if they reach a requested node;
    an error inside the branch an ``ite`` does not take is ignored.
    """
    reals, bools = _as_maps(sigma)
    order = p.reachable(nodes)
    val = {}
    for n in order:
        node = p.nodes[n]
        k = node.kind
        args = [val[a] for a in node.args]
        failed = next((a for a in args if isinstance(a, _Failed)), None)
        if k == "x":
            v = float(reals[node.data])
        elif k == "const":
            v = node.data
        elif k == "ite":
            c = args[0]
            v = c if isinstance(c, _Failed) else (args[1] if c else args[2])
        elif k == "iteh":
            v = args[0] if int(bools[node.data]) else args[1]
        elif failed is not None:
            v = failed
        elif k == "ge":
            v = 1 if args[0] >= 0.0 else 0
        elif k == "and":
            v = args[0] & args[1]
        elif k == "not":
            v = 1 - args[0]
        else:
            try:
                v = OPS[k].exact(*args)
            except DomainError as exc:
                v = _Failed(n, exc)
        val[n] = v
    if nodes is not None:
        for n in nodes:
            if isinstance(val[n], _Failed):
                f = val[n]
                raise DomainError(f"node {f.node}: {f.error}")
    return val


def eval_real(p, n, sigma):
    if p.is_bool(n):
        raise TypeError(f"node {n} is Boolean")
    return evaluate(p, sigma, [n])[n]


def eval_bool(p, n, sigma):
    if not p.is_bool(n):
        raise TypeError(f"node {n} is not Boolean")
    return evaluate(p, sigma, [n])[n]


def verify(p, sigma):
    """True iff every assert holds under the exact semantics."""
    val = evaluate(p, sigma, list(p.asserts))
    return all(val[a] == 1 for a in p.asserts)


def collect_bool_nodes(p):
    """Boolean node ids reachable from the asserts (arena order), then Boolean unknowns.

    This ordering indexes interface mappings throughout the package.
    """
    return [n for n in p.reachable() if p.nodes[n].kind in BOOL_KINDS] + list(p.bool_unknowns)


# ---------------------------------------------------------------------------
# textual format

_TOKEN = re.compile(r"\s+|;[^\n]*|\(|\)|[^\s();]+")
_UNARY = ("neg", "sin", "cos", "sqrt", "tanh", "exp")


def _tokenize(text):
    tokens = []
    line, col0 = 1, 0
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        tok = m.group(0)
        if not (tok[0].isspace() or tok[0] == ";"):
            tokens.append((tok, line, pos - col0 + 1))
        nl = tok.count("\n")
        if nl:
            line += nl
            col0 = pos + tok.rindex("\n") + 1
        pos = m.end()
    return tokens


def _read(tokens):
    """Tokens -> nested lists of (atom, line, col) leaves."""
    stack = [[]]
    opened = []
    for tok, line, col in tokens:
        if tok == "(":
            stack.append([])
            opened.append((line, col))
        elif tok == ")":
            if len(stack) == 1:
                raise ParseError("unbalanced ')'", line, col)
            lst = stack.pop()
            stack[-1].append((lst, ) + opened.pop())
        else:
            stack[-1].append((tok, line, col))
    if len(stack) > 1:
        line, col = opened[-1]
        raise ParseError("unclosed '('", line, col)
    return stack[0]


def _number(tok):
    try:
        v = float(tok)
    except ValueError:
        return None
    return v if math.isfinite(v) else None


class _Parser:
    def __init__(self):
        self.b = ProgramBuilder()
        self.defs = {}

    def form(self, item):
        body, line, col = item
        if not isinstance(body, list) or not body or isinstance(body[0][0], list):
            raise ParseError("expected a top-level form", line, col)
        head = body[0][0]
        args = body[1:]
        if head == "real":
            if len(args) not in (1, 3):
                raise ParseError("real expects a name and optional bounds", line, col)
            name = self.name(args[0])
            lo = hi = None
            if len(args) == 3:
                lo, hi = (self.const_atom(a) for a in args[1:])
            self.declare(lambda: self.b.real(name, lo, hi), line, col)
        elif head == "bool":
            if len(args) != 1:
                raise ParseError("bool expects one name", line, col)
            name = self.name(args[0])
            self.declare(lambda: self.b.bool(name), line, col)
        elif head == "def":
            if len(args) != 2:
                raise ParseError("def expects a name and an expression", line, col)
            name = self.name(args[0])
            if name in self.defs or name in self.b.bounds:
                raise ParseError(f"{name!r} already defined", line, col)
            self.defs[name] = self.expr(args[1])
        elif head == "assert":
            if not args:
                raise ParseError("assert expects at least 1 argument", line, col)
            for a in args:
                n = self.expr(a)
                if not self.b.nodes[n].kind in BOOL_KINDS:
                    raise ParseError("assert expects Boolean expressions", a[1], a[2])
                self.b.assert_(n)
        else:
            raise ParseError(f"unknown top-level form {head!r}", line, col)

    def declare(self, fn, line, col):
        try:
            fn()
        except ValueError as exc:
            raise ParseError(str(exc), line, col) from None

    def name(self, item):
        tok, line, col = item
        if isinstance(tok, list) or _number(tok) is not None:
            raise ParseError("expected a name", line, col)
        return tok

    def const_atom(self, item):
        tok, line, col = item
        v = None if isinstance(tok, list) else _number(tok)
        if v is None:
            raise ParseError("expected a number", line, col)
        return v

    def expr(self, item):
        body, line, col = item
        b = self.b
        if not isinstance(body, list):
            v = _number(body)
            if v is not None:
                return b.const(v)
            if body in self.defs:
                return self.defs[body]
            if body in b.bounds:
                return b.var(body)
            if body in b.bool_unknowns:
                raise ParseError(f"Boolean unknown {body!r} may only be an iteh condition", line, col)
            raise ParseError(f"undeclared unknown {body!r}", line, col)
        if not body or isinstance(body[0][0], list):
            raise ParseError("expected an operator", line, col)
        head, args = body[0][0], body[1:]

        def arity(*ok):
            if len(args) not in ok:
                want = " or ".join(map(str, ok))
                raise ParseError(f"{head} expects {want} argument(s), got {len(args)}", line, col)

        try:
            if head == "hole-r":
                # inline declaration of an unbounded real unknown
                arity(1)
                name = self.name(args[0])
                if name in self.defs or name in b.bool_unknowns:
                    raise ParseError(f"{name!r} is not a real unknown", line, col)
                return b.var(name) if name in b.bounds else b.real(name)
            if head in ("+", "*"):
                if len(args) < 2:
                    arity(2)
                kids = [self.expr(a) for a in args]
                acc = kids[0]
                for k in kids[1:]:
                    acc = b.op(SYMBOLS[head], acc, k)
                return acc
            if head == "-":
                arity(1, 2)
                kids = [self.expr(a) for a in args]
                return b.neg(kids[0]) if len(kids) == 1 else b.sub(*kids)
            if head == "/":
                arity(2)
                return b.div(*(self.expr(a) for a in args))
            if head in _UNARY:
                arity(1)
                return b.op(head, self.expr(args[0]))
            if head == "ite":
                arity(3)
                return b.ite(*(self.expr(a) for a in args))
            if head == "iteh":
                arity(3)
                y = self.name(args[0])
                if y not in b.bool_unknowns:
                    raise ParseError(f"undeclared Boolean unknown {y!r}", args[0][1], args[0][2])
                return b.iteh(y, self.expr(args[1]), self.expr(args[2]))
            if head in (">=", "<="):
                arity(2)
                lhs, rhs = (self.expr(a) for a in args)
                if head == "<=":
                    lhs, rhs = rhs, lhs
                if b.nodes[rhs] == Node("const", (), 0.0):
                    return b.ge(lhs)
                return b.ge(b.sub(lhs, rhs))
            if head in (">", "<"):
                # a > b  is  not (b - a >= 0)
                arity(2)
                lhs, rhs = (self.expr(a) for a in args)
                if head == "<":
                    lhs, rhs = rhs, lhs
                if b.nodes[lhs] == Node("const", (), 0.0):
                    return b.not_(b.ge(rhs))
                return b.not_(b.ge(b.sub(rhs, lhs)))
            if head in ("and", "or"):
                if len(args) < 2:
                    arity(2)
                kids = [self.expr(a) for a in args]
                acc = kids[0]
                for k in kids[1:]:
                    acc = b.and_(acc, k) if head == "and" else b.or_(acc, k)
                return acc
            if head == "not":
                arity(1)
                return b.not_(self.expr(args[0]))
        except TypeError as exc:
            raise ParseError(str(exc), line, col) from None
        raise ParseError(f"unknown operator {head!r}", line, col)


def parse_program(text):
    """Parse the s-expression format into a :class:`Program`."""
    parser = _Parser()
    for item in _read(_tokenize(text)):
        parser.form(item)
    return parser.b.build()


def _fmt_num(v):
    return repr(float(v))


def print_program(p):
    """Serialize ``p``; shared non-leaf subexpressions become ``def`` forms."""
    live = p.reachable()
    refs = dict.fromkeys(live, 0)
    for n in live:
        for a in p.nodes[n].args:
            refs[a] += 1
    named = {}
    lines = []
    for name in p.real_unknowns:
        lo, hi = p.bounds[name]
        if lo is None and hi is None:
            lines.append(f"(real {name})")
        else:
            lines.append(f"(real {name} {_fmt_num(lo)} {_fmt_num(hi)})")
    for name in p.bool_unknowns:
        lines.append(f"(bool {name})")

    text = {}
    for n in live:
        node = p.nodes[n]
        k = node.kind
        a = [named.get(c, text.get(c)) for c in node.args]
        if k == "x":
            s = node.data
        elif k == "const":
            s = _fmt_num(node.data)
        elif k in SYMBOL_OF and k != "neg":
            s = f"({SYMBOL_OF[k]} {a[0]} {a[1]})"
        elif k == "neg":
            s = f"(- {a[0]})"
        elif k in OPS:
            s = f"({k} {a[0]})"
        elif k == "ite":
            s = f"(ite {a[0]} {a[1]} {a[2]})"
        elif k == "iteh":
            s = f"(iteh {node.data} {a[0]} {a[1]})"
        elif k == "ge":
            s = f"(>= {a[0]} 0)"
        elif k == "and":
            s = f"(and {a[0]} {a[1]})"
        else:
            s = f"(not {a[0]})"
        if refs[n] > 1 and k not in ("x", "const"):
            name = f"_n{n}"
            lines.append(f"(def {name} {s})")
            named[n] = name
        else:
            text[n] = s
    for a in p.user_asserts():
        lines.append(f"(assert {named.get(a, text.get(a))})")
    return "\n".join(lines) + "\n"
