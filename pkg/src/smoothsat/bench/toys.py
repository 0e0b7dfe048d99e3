"""Small hand-written programs used by tests, demos and the CLI."""

from ..ir import parse_program

# Piecewise-linear branch chain over one bounded unknown. Only x1 in (4, 5]
# satisfies the final assert, and descent started at x1 <= 0 stalls.
BRANCH_CHAIN = """\
(real x1 -20 6)
(def a0 (- x1 5))
(def a1 (ite (<= x1 4) (- 6 x1) a0))
(def a2 (ite (<= x1 2) (- 8 x1) a1))
(def a (ite (<= x1 0) (+ 21 x1) a2))
(assert (or (<= a 0) (> a 25)))
"""

# One conditional choosing between two unknowns.
ITE_SELECT = "(real x1) (real x2) (real x3)\n(assert (>= (ite (>= x1 0) x2 x3) 0))\n"


def branch_chain():
    return parse_program(BRANCH_CHAIN)


def ite_select():
    return parse_program(ITE_SELECT)


def find_atom(p, text):
    """Id of the atom node that prints as ``text`` in ``p``, e.g. ``"(>= x1 0)"``."""
    for n in p.reachable():
        if p.nodes[n].kind == "ge" and atom_text(p, n) == text:
            return n
    raise KeyError(text)


def atom_text(p, n):
    """Compact rendering of a Boolean node, atoms as ``(>= <expr> 0)``."""
    def show(k):
        node = p.nodes[k]
        if node.kind == "ge":
            return f"(>= {show(node.args[0])} 0)"
        if node.kind == "x":
            return node.data
        if node.kind == "const":
            c = float(node.data)
            return repr(int(c)) if c.is_integer() else repr(c)
        return "(" + " ".join([node.kind] + [show(a) for a in node.args]) + ")"
    return show(n)
