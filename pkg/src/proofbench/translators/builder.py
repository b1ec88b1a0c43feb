"""Incremental construction of RevRes proofs with symbolic occurrence ids."""
from __future__ import annotations

from typing import Callable, Dict, List, Tuple

from ..checkers import ResolveStep, RevResProof, WeakenStep
from ..cnf import Clause, CnfFormula
from ..trees import Leaf, Query, queried_vars
from .common import TranslationError


class RevResBuilder:
    """Records axioms and steps; real ids are assigned by finish().

    Axiom occurrences may be requested at any point; the finished proof lists
    them first, ordered by clause index.
    """

    def __init__(self, F: CnfFormula):
        self.F = F
        self._clause: Dict[int, Clause] = {}
        self._axioms: List[Tuple[int, int]] = []   # (clause index, symbol)
        self._steps: List[tuple] = []
        self._live = set()
        self._next = 0
        self.max_width = 0

    def _new(self, c: Clause) -> int:
        sym = self._next
        self._next += 1
        self._clause[sym] = c
        self._live.add(sym)
        if c.width > self.max_width:
            self.max_width = c.width
        return sym

    def clause(self, sym) -> Clause:
        return self._clause[sym]

    def axiom(self, i: int) -> int:
        sym = self._new(self.F.clause(i))
        self._axioms.append((i, sym))
        return sym

    def _take(self, sym):
        if sym not in self._live:
            raise TranslationError("internal: occurrence consumed twice")
        self._live.remove(sym)

    def weaken(self, sym, var) -> Tuple[int, int]:
        C = self._clause[sym]
        if var in C.variables():
            raise TranslationError("internal: weakening on a variable of the clause")
        self._take(sym)
        a = self._new(C | var)
        b = self._new(C | -var)
        self._steps.append(("W", sym, var, (a, b)))
        return a, b

    def resolve(self, pos, neg, var) -> int:
        A, B = self._clause[pos], self._clause[neg]
        if A.without_var(var) != B.without_var(var) or var not in A or -var not in B:
            raise TranslationError("internal: resolution premises do not match")
        self._take(pos)
        self._take(neg)
        c = self._new(A.without_var(var))
        self._steps.append(("R", (pos, neg), var, (c,)))
        return c

    def weaken_to(self, sym, target: Clause) -> int:
        """Weaken one occurrence up to a superset clause; siblings stay live."""
        C = self._clause[sym]
        for l in target:
            if abs(l) in C.variables():
                continue
            z, o = self.weaken(sym, abs(l))
            sym = z if l > 0 else o
            C = self._clause[sym]
        if C != target:
            raise TranslationError("internal: %r is not a weakening target of %r" % (target, C))
        return sym

    def live(self) -> List[int]:
        return sorted(self._live)

    def finish(self, kind="plain") -> RevResProof:
        ids = {}
        mult: Dict[int, int] = {}
        nxt = 1
        for i, sym in sorted(self._axioms, key=lambda t: (t[0], t[1])):
            ids[sym] = nxt
            nxt += 1
            mult[i] = mult.get(i, 0) + 1
        steps = []
        for kind_, ins, var, outs in self._steps:
            if kind_ == "W":
                steps.append(WeakenStep(ids[ins], var))
            else:
                steps.append(ResolveStep(ids[ins[0]], ids[ins[1]], var))
            for o in outs:
                ids[o] = nxt
                nxt += 1
        return RevResProof(mult, steps, kind)


def weaken_occurrence(b: RevResBuilder, sym, tree) -> List[Tuple[Clause, object, int]]:
    """Weaken along every query of `tree`; returns (leaf clause, label, symbol) in path order."""
    out = []

    def go(sym, node):
        if isinstance(node, Leaf):
            out.append((b.clause(sym), node.label, sym))
            return
        z, o = b.weaken(sym, node.var)
        go(z, node.zero)
        go(o, node.one)

    go(sym, tree)
    return out


def resolve_along(b: RevResBuilder, C: Clause, tree, supply: Callable) -> int:
    """Reverse of weakening: obtain C from occurrences of its leaf clauses.

    supply(leaf clause, label) must return a live occurrence of that clause.
    """
    def go(C, node):
        if isinstance(node, Leaf):
            sym = supply(C, node.label)
            if b.clause(sym) != C:
                raise TranslationError("internal: supplied clause %r, expected %r" % (b.clause(sym), C))
            return sym
        z = go(C | node.var, node.zero)
        o = go(C | -node.var, node.one)
        return b.resolve(z, o, node.var)

    return go(C, tree)


def weaken_along_tree(C: Clause, tree, occ: int = 1, next_id: int = 2):
    """Steps turning occurrence `occ` of C into {C v C_P : P a path of tree}.

    New occurrences are numbered from next_id. Returns (steps, leaves) where
    leaves lists (clause, label, id) in path order.
    """
    if queried_vars(tree) & C.variables():
        raise TranslationError("tree queries a variable of the clause")
    steps = []
    leaves = []
    counter = [next_id]

    def go(C, o, node):
        if isinstance(node, Leaf):
            leaves.append((C, node.label, o))
            return
        steps.append(WeakenStep(o, node.var))
        z = counter[0]
        counter[0] += 2
        go(C | node.var, z, node.zero)
        go(C | -node.var, z + 1, node.one)

    go(C, occ, tree)
    return steps, leaves
