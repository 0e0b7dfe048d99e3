"""Propositional skeleton of a program and its CNF encoding.

Every ``e >= 0`` atom gets a fresh propositional variable, conjunctions and
negations get auxiliary variables tied to their operands by full
biconditional (Tseitin) clauses, Boolean unknowns map to their own
variables, and every assert is a unit clause.
"""

from dataclasses import dataclass, field

from .ir import collect_bool_nodes, eval_bool
from .ops import DomainError


@dataclass
class CnfProblem:
    num_vars: int
    clauses: list
    interface_vars: frozenset = frozenset()

    def to_dimacs(self):
        lines = [f"p cnf {self.num_vars} {len(self.clauses)}"]
        lines += [" ".join(map(str, c)) + " 0" for c in self.clauses]
        return "\n".join(lines) + "\n"


@dataclass
class BoolSkeleton:
    """Maps between program Boolean structure and propositional variables.

    ``keys`` lists interface keys (Boolean node ids, then Boolean unknown
    names) in :func:`collect_bool_nodes` order; ``var_of`` maps each key to
    its variable and ``key_of`` inverts it.
    """

    keys: list
    atom_map: dict = field(default_factory=dict)
    hole_map: dict = field(default_factory=dict)
    node_map: dict = field(default_factory=dict)
    assert_vars: list = field(default_factory=list)

    @property
    def var_of(self):
        return {**self.node_map, **self.hole_map}

    @property
    def key_of(self):
        return {v: k for k, v in self.var_of.items()}


def constant_atoms(p):
    """Exact truth value of every reachable atom that mentions no unknown."""
    free = {}
    out = {}
    for n in p.reachable():
        node = p.nodes[n]
        if node.kind in ("x", "iteh"):
            free[n] = False
        elif node.kind == "const":
            free[n] = True
        else:
            free[n] = all(free[a] for a in node.args)
        if node.kind == "ge" and free[n]:
            try:
                out[n] = eval_bool(p, n, {})
            except DomainError:
                pass
    return out


def abstract_bool(p, atoms_only=False, fold_constants=True):
    """Return ``(CnfProblem, BoolSkeleton)`` for program ``p``.

    With ``atoms_only`` the interface is restricted to atoms and Boolean
    unknowns; composite nodes still get variables but are not reported.
    With ``fold_constants`` atoms over constants only get a unit clause
    fixing their exact value.
    """
    keys = collect_bool_nodes(p)
    sk = BoolSkeleton(keys=keys)
    for i, key in enumerate(keys, start=1):
        if isinstance(key, str):
            sk.hole_map[key] = i
        else:
            sk.node_map[key] = i
            if p.nodes[key].kind == "ge":
                sk.atom_map[key] = i

    clauses = []
    for n, v in sk.node_map.items():
        node = p.nodes[n]
        if node.kind == "and":
            a, b = (sk.node_map[c] for c in node.args)
            clauses += [[-v, a], [-v, b], [v, -a, -b]]
        elif node.kind == "not":
            a = sk.node_map[node.args[0]]
            clauses += [[-v, -a], [v, a]]
    for n in p.asserts:
        sk.assert_vars.append(sk.node_map[n])
    for v in dict.fromkeys(sk.assert_vars):
        clauses.append([v])
    if fold_constants:
        for n, val in constant_atoms(p).items():
            v = sk.node_map[n]
            clauses.append([v if val else -v])

    if atoms_only:
        iface = set(sk.atom_map.values()) | set(sk.hole_map.values())
    else:
        iface = set(range(1, len(keys) + 1))
    return CnfProblem(len(keys), clauses, frozenset(iface)), sk


def decode_model(model, sk):
    """Split a (partial) model into interface-map entries and Boolean unknowns.

    ``model`` maps variables to 0/1; missing variables decode to ``None``
    (unassigned). Returns ``(imap, ys)`` keyed by interface key and by
    Boolean unknown name respectively.
    """
    imap = {}
    for key in sk.keys:
        v = model.get(sk.var_of[key])
        imap[key] = None if v is None else int(v)
    ys = {y: imap[y] for y in sk.hole_map}
    return imap, ys


def parse_dimacs(text):
    """Parse DIMACS CNF into a :class:`CnfProblem` (all variables interface)."""
    num_vars = 0
    clauses = []
    cur = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line[0] in "c%":
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"bad DIMACS header: {line!r}")
            num_vars = int(parts[2])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(cur)
                cur = []
            else:
                num_vars = max(num_vars, abs(lit))
                cur.append(lit)
    if cur:
        clauses.append(cur)
    return CnfProblem(num_vars, clauses, frozenset(range(1, num_vars + 1)))
