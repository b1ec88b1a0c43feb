"""Decision trees over boolean variables and their root-to-leaf paths."""
from __future__ import annotations

from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from .cnf import Clause, clause_from_assignment


class Leaf:
    __slots__ = ("label",)

    def __init__(self, label):
        self.label = label

    def __eq__(self, other):
        return isinstance(other, Leaf) and self.label == other.label

    def __hash__(self):
        return hash(("leaf", self.label))

    def __repr__(self):
        return "Leaf(%r)" % (self.label,)


class Query:
    __slots__ = ("var", "zero", "one")

    def __init__(self, var: int, zero, one):
        self.var = var
        self.zero = zero
        self.one = one

    def __eq__(self, other):
        return (isinstance(other, Query) and self.var == other.var
                and self.zero == other.zero and self.one == other.one)

    def __hash__(self):
        return hash((self.var, self.zero, self.one))

    def __repr__(self):
        return "Query(%d, %r, %r)" % (self.var, self.zero, self.one)


def evaluate(tree, x: Sequence[int]):
    node = tree
    while isinstance(node, Query):
        node = node.one if x[node.var - 1] else node.zero
    return node.label


def evaluate_path(tree, x: Sequence[int]):
    """(label, path assignment) of the walk taken on x."""
    node = tree
    rho = {}
    while isinstance(node, Query):
        b = 1 if x[node.var - 1] else 0
        rho[node.var] = b
        node = node.one if b else node.zero
    return node.label, rho


def evaluate_partial(tree, rho: Mapping[int, int]):
    """Label if the walk is determined by rho; raises KeyError otherwise."""
    node = tree
    while isinstance(node, Query):
        node = node.one if rho[node.var] else node.zero
    return node.label


def depth(tree) -> int:
    if isinstance(tree, Leaf):
        return 0
    return 1 + max(depth(tree.zero), depth(tree.one))


def size(tree) -> int:
    if isinstance(tree, Leaf):
        return 1
    return 1 + size(tree.zero) + size(tree.one)


def queried_vars(tree) -> frozenset:
    out = set()
    stack = [tree]
    while stack:
        n = stack.pop()
        if isinstance(n, Query):
            out.add(n.var)
            stack.append(n.zero)
            stack.append(n.one)
    return frozenset(out)


def paths(tree, rho: Optional[Mapping[int, int]] = None) -> List[Tuple[Dict[int, int], object]]:
    """Root-to-leaf paths as (assignment, label), zero branch first.

    If rho is given, queries to variables fixed by rho are skipped and only the
    consistent branch is followed (the returned assignments exclude rho).
    """
    out = []
    rho = rho or {}

    def walk(node, acc):
        while isinstance(node, Query):
            if node.var in rho:
                node = node.one if rho[node.var] else node.zero
                continue
            if node.var in acc:
                node = node.one if acc[node.var] else node.zero
                continue
            a0 = dict(acc)
            a0[node.var] = 0
            walk(node.zero, a0)
            acc = dict(acc)
            acc[node.var] = 1
            node = node.one
        out.append((acc, node.label))

    walk(tree, {})
    return out


def path_clause(rho: Mapping[int, int]) -> Clause:
    """C_P: falsified exactly when the walk follows the path."""
    return clause_from_assignment(rho)


def restrict(tree, rho: Mapping[int, int]):
    if isinstance(tree, Leaf):
        return tree
    if tree.var in rho:
        return restrict(tree.one if rho[tree.var] else tree.zero, rho)
    z = restrict(tree.zero, rho)
    o = restrict(tree.one, rho)
    if isinstance(z, Leaf) and z == o:
        return z
    return Query(tree.var, z, o)


def map_labels(tree, f: Callable):
    if isinstance(tree, Leaf):
        return Leaf(f(tree.label))
    return Query(tree.var, map_labels(tree.zero, f), map_labels(tree.one, f))


def graft(tree, fn: Callable, rho: Optional[Dict[int, int]] = None):
    """Replace each leaf by fn(label, path) restricted to the path so far.

    fn returns a tree; queries already answered on the path are skipped.
    """
    rho = dict(rho or {})

    def go(node, acc):
        if isinstance(node, Leaf):
            sub = fn(node.label, acc)
            return _restrict_keep(sub, acc)
        if node.var in acc:
            return go(node.one if acc[node.var] else node.zero, acc)
        a0 = dict(acc)
        a0[node.var] = 0
        a1 = dict(acc)
        a1[node.var] = 1
        return Query(node.var, go(node.zero, a0), go(node.one, a1))

    return go(tree, rho)


def _restrict_keep(tree, rho):
    # like restrict, without merging equal leaves (keeps path structure explicit)
    if isinstance(tree, Leaf):
        return tree
    if tree.var in rho:
        return _restrict_keep(tree.one if rho[tree.var] else tree.zero, rho)
    return Query(tree.var, _restrict_keep(tree.zero, rho), _restrict_keep(tree.one, rho))


def constant(label):
    return Leaf(label)


class _Need(Exception):
    def __init__(self, var):
        self.var = var


def from_procedure(proc: Callable, fixed: Optional[Mapping[int, int]] = None):
    """Build the decision tree of an adaptive procedure.

    proc(read) must be deterministic; read(v) returns the bit of variable v.
    Variables in `fixed` are answered without a query.
    """
    fixed = dict(fixed or {})

    def build(acc):
        def read(v):
            if v in acc:
                return acc[v]
            raise _Need(v)
        try:
            return Leaf(proc(read))
        except _Need as e:
            a0 = dict(acc)
            a0[e.var] = 0
            a1 = dict(acc)
            a1[e.var] = 1
            return Query(e.var, build(a0), build(a1))

    return _strip_fixed(build(fixed), fixed)


def _strip_fixed(tree, fixed):
    return tree if not fixed else _restrict_keep(tree, fixed)


def block_reader(read, bits: Sequence[int]) -> int:
    """Read a block of variables as a binary number, least significant bit first."""
    v = 0
    for k, var in enumerate(bits):
        if read(var):
            v |= 1 << k
    return v


def block_value(x: Sequence[int], bits: Sequence[int]) -> int:
    return block_reader(lambda v: x[v - 1], bits)


def block_assignment(bits: Sequence[int], value: int) -> Dict[int, int]:
    return {var: (value >> k) & 1 for k, var in enumerate(bits)}


# serialization

def _label_to_json(label):
    if isinstance(label, tuple):
        return [_label_to_json(l) for l in label]
    return label


def _label_from_json(label):
    if isinstance(label, list):
        return tuple(_label_from_json(l) for l in label)
    return label


def to_json(tree):
    if isinstance(tree, Leaf):
        return {"leaf": _label_to_json(tree.label)}
    return {"q": tree.var, "0": to_json(tree.zero), "1": to_json(tree.one)}


def from_json(obj):
    if "leaf" in obj:
        return Leaf(_label_from_json(obj["leaf"]))
    return Query(int(obj["q"]), from_json(obj["0"]), from_json(obj["1"]))
