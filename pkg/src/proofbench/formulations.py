"""Decision-tree formulations of S(F) into zoo problems, and their verification.

A formulation stores one tree per role: ("s", v), ("p", v), ("g", v) for line
problems (v in [L]) and ("s", i, j), ("p", i, j), ("g", i, j) for grid
problems. s/p leaves are pointer values (None = null), g leaves are clause
indices of F. Missing roles default to constants: null successor and
predecessor 1 on grids, self-loops on lines, no g tree.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from .cnf import CnfFormula, assignment_from_int, clause_from_assignment, falsified_clauses
from . import trees as T
from .trees import Leaf, block_reader
from .zoo import (GRID_PROBLEMS, LINE_PROBLEMS, GridLineInstance, LineInstance, SodInstance,
                  block_neq, brute_solutions, encode_cnf, line_clause)

TARGETS = ("SoL", "EoL", "SoD", "SoPL", "EoPL")


class FormulationError(ValueError):
    pass


class Formulation:
    def __init__(self, target: str, L: int, trees: Dict[tuple, object], meta=None):
        if target not in TARGETS:
            raise FormulationError("unsupported target %r" % target)
        self.target = target
        self.L = L
        self.trees = dict(trees)
        self.meta = dict(meta or {})

    def nodes(self):
        if self.target in LINE_PROBLEMS:
            return [(v,) for v in range(1, self.L + 1)]
        return [(i, j) for i in range(1, self.L + 1) for j in range(1, self.L + 1)]

    def tree(self, role, *node):
        t = self.trees.get((role,) + tuple(node))
        if t is not None:
            return t
        if role == "g":
            return None
        if self.target in LINE_PROBLEMS:
            return Leaf(node[0])
        return Leaf(None if role == "s" else 1)

    def depth(self) -> int:
        return max((T.depth(t) for t in self.trees.values()), default=0)

    def size(self) -> int:
        return self.L if self.target in LINE_PROBLEMS else self.L * self.L

    def complexity(self) -> float:
        return math.log2(max(self.size(), 1)) + self.depth()

    def to_json(self):
        return {"target": self.target, "L": self.L,
                "trees": {":".join([k[0]] + [str(a) for a in k[1:]]): T.to_json(t)
                          for k, t in sorted(self.trees.items(), key=lambda kv: (kv[0][0], kv[0][1:]))},
                "meta": self.meta}

    @staticmethod
    def from_json(obj):
        trees = {}
        for key, t in obj["trees"].items():
            parts = key.split(":")
            trees[(parts[0],) + tuple(int(a) for a in parts[1:])] = T.from_json(t)
        return Formulation(obj["target"], int(obj["L"]), trees, obj.get("meta"))


def _pointer(label, L, nullable, role):
    if label is None:
        if nullable:
            return None
        raise FormulationError("null %s pointer in a line problem" % role)
    if not isinstance(label, int) or not 1 <= label <= L:
        raise FormulationError("%s leaf %r outside [1, %d]" % (role, label, L))
    return label


def eval_formulation(phi: Formulation, x):
    L = phi.L
    if phi.target in LINE_PROBLEMS:
        succ = {v: _pointer(T.evaluate(phi.tree("s", v), x), L, False, "s") for v in range(1, L + 1)}
        pred = {v: _pointer(T.evaluate(phi.tree("p", v), x), L, False, "p") for v in range(2, L + 1)}
        return LineInstance(L, succ, pred, phi.target)
    succ = {(i, j): _pointer(T.evaluate(phi.tree("s", i, j), x), L, True, "s")
            for i in range(1, L + 1) for j in range(1, L + 1)}
    if phi.target == "SoD":
        return SodInstance(L, succ)
    pred = {(i, j): _pointer(T.evaluate(phi.tree("p", i, j), x), L, True, "p")
            for i in range(2, L + 1) for j in range(1, L + 1)}
    return GridLineInstance(L, succ, pred, phi.target)


def solution_node(sol):
    p = sol.payload
    return (p,) if isinstance(p, int) else tuple(p)


@dataclass
class VerificationReport:
    tested: int
    certifying: bool
    failures: list = field(default_factory=list)
    converse_misses: int = 0
    seed: Optional[int] = None

    @property
    def passed(self):
        return not self.failures

    def __bool__(self):
        return self.passed


def verify_formulation(F: CnfFormula, phi: Formulation, mode: str = "exhaustive", samples: int = 1000,
                       seed: int = 0, bound: int = 20, max_failures: int = 20) -> VerificationReport:
    """Check that every solution of the reduced instance maps to a falsified clause.

    The converse (every falsified clause is hit by some solution) is only counted.
    """
    n = F.variable_count
    if mode == "exhaustive":
        if n > bound:
            raise ValueError("%d variables exceed the exhaustive bound %d" % (n, bound))
        points = range(1 << n)
        rep = VerificationReport(1 << n, True)
    elif mode == "sample":
        rng = random.Random(seed)
        points = [rng.getrandbits(n) if n else 0 for _ in range(samples)]
        rep = VerificationReport(samples, False, seed=seed)
    else:
        raise ValueError("unknown mode %r" % mode)
    for bits in points:
        x = assignment_from_int(bits, n)
        bad = falsified_clauses(F, x)
        inst = eval_formulation(phi, x)
        hit = set()
        for sol in sorted(brute_solutions(inst), key=repr):
            g = phi.tree("g", *solution_node(sol))
            i = None if g is None else T.evaluate(g, x)
            if i in bad:
                hit.add(i)
                continue
            if len(rep.failures) < max_failures:
                reason = "no g tree" if g is None else (
                    "clause index out of range" if not isinstance(i, int) or not 1 <= i <= F.m
                    else "clause %d satisfied" % i)
                rep.failures.append((x, sol, i, reason))
            else:
                return rep
        if hit != bad:
            rep.converse_misses += 1
    return rep


def encode_search_as_cnf(verifiers, variable_count: int):
    """One clause per accepting path of every verifier tree.

    Returns (CnfFormula, owners) where owners[k] is the position of the
    verifier that produced clause k + 1.
    """
    clauses, owners = [], []
    for pos, tree in enumerate(verifiers):
        for rho, ok in T.paths(tree):
            if ok:
                clauses.append(clause_from_assignment(rho))
                owners.append(pos)
    return CnfFormula(variable_count, clauses), owners


# verifier trees for the grid problems (bit level, block by block)

def grid_verifier_trees(problem: str, n: int):
    """[(Solution-shaped key, tree)] checking each candidate solution of the CNF encoding."""
    F, L, _ = encode_cnf(problem, n)
    s = lambda i, j: L.block("s", i, j)
    p = lambda i, j: L.block("p", i, j)
    a = lambda i, j: L.block("a", i, j)[0]
    out = []

    def inactive_source(read):
        if n == 1:
            return not read(a(1, 1))
        k = block_reader(read, s(1, 1))
        return k == 0 or block_reader(read, p(2, k)) != 1

    out.append(((1, (1, 1)), T.from_procedure(inactive_source)))
    for j in range(1, n + 1):
        out.append(((2, (n, j)), T.from_procedure(lambda read, j=j: bool(read(a(n, j))))))
    for i in range(2, n + 1):
        for j in range(1, n + 1):
            def sink(read, i=i, j=j):
                b = block_reader(read, p(i, j))
                if b == 0 or block_reader(read, s(i - 1, b)) != j:
                    return False
                if i == n:
                    return not read(a(n, j))
                k = block_reader(read, s(i, j))
                return k == 0 or block_reader(read, p(i + 1, k)) != j
            out.append(((3, (i, j)), T.from_procedure(sink)))
    if problem == "EoPL":
        for i in range(1, n):
            for j in range(1, n + 1):
                if (i, j) == (1, 1):
                    continue

                def source(read, i=i, j=j):
                    k = block_reader(read, s(i, j))
                    if k == 0 or block_reader(read, p(i + 1, k)) != j:
                        return False
                    if i == 1:
                        return True
                    b = block_reader(read, p(i, j))
                    return b == 0 or block_reader(read, s(i - 1, b)) != j
                out.append(((4, (i, j)), T.from_procedure(source)))
    return out


# identity formulations

def identity_formulation(problem: str, n: int) -> Formulation:
    """Formulation of S(encode_cnf(problem, n)) into the problem itself."""
    if problem not in TARGETS:
        raise FormulationError("unsupported problem %r" % problem)
    F, L, _ = encode_cnf(problem, n)
    index = {}
    for i, c in enumerate(F.clauses, 1):
        index.setdefault(c, i)

    def idx(lits):
        c = lits if not isinstance(lits, list) else _clause(lits)
        if c not in index:
            raise FormulationError("certificate clause %r is not in the encoding" % (c,))
        return index[c]

    if problem in GRID_PROBLEMS:
        trees = _grid_identity(problem, n, L, idx)
    elif problem == "SoD":
        trees = _sod_identity(n, L, idx)
    else:
        trees = _line_identity(problem, n, L, idx)
    phi = Formulation(problem, n, trees, {"lambda": L.lam, "identity": True})
    bound = 4 * L.lam
    if phi.depth() > bound:
        raise FormulationError("identity formulation depth %d exceeds %d" % (phi.depth(), bound))
    return phi


def _clause(lits):
    from .cnf import Clause
    return Clause(lits)


def _value_tree(bits, decode):
    return T.from_procedure(lambda read: decode(block_reader(read, bits)))


def _grid_identity(problem, n, L, idx):
    s = lambda i, j: L.block("s", i, j)
    p = lambda i, j: L.block("p", i, j)
    a = lambda i, j: L.block("a", i, j)[0]
    trees = {}
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i == n:
                trees[("s", i, j)] = T.from_procedure(lambda read, i=i, j=j: 1 if read(a(i, j)) else None)
            else:
                trees[("s", i, j)] = _value_tree(s(i, j), lambda v: v or None)
            if i >= 2:
                trees[("p", i, j)] = _value_tree(p(i, j), lambda v: v or None)
            trees[("g", i, j)] = T.from_procedure(lambda read, i=i, j=j: _grid_g(problem, n, i, j, read, s, p, a, idx))
    return trees


def _grid_g(problem, n, i, j, read, s, p, a, idx):
    if n == 1:
        return idx([-a(1, 1)]) if read(a(1, 1)) else idx([a(1, 1)])
    if i == 1:
        k = block_reader(read, s(1, j))
        if j == 1:
            if k == 0:
                return idx(block_neq(s(1, 1), 0))
            v = block_reader(read, p(2, k))
            if v != 1:
                return idx(block_neq(s(1, 1), k) + block_neq(p(2, k), v))
            return 1
        if problem == "EoPL" and k and block_reader(read, p(2, k)) == j:
            return idx(block_neq(s(1, j), k) + block_neq(p(2, k), j))
        return 1
    if i == n:
        if read(a(n, j)):
            return idx([-a(n, j)])
        b = block_reader(read, p(n, j))
        if b and block_reader(read, s(n - 1, b)) == j:
            return idx(block_neq(s(n - 1, b), j) + block_neq(p(n, j), b) + [a(n, j)])
        return 1
    b = block_reader(read, p(i, j))
    c = block_reader(read, s(i - 1, b)) if b else None
    pointed = bool(b) and c == j
    k = block_reader(read, s(i, j))
    v = block_reader(read, p(i + 1, k)) if k else None
    active = bool(k) and v == j
    if pointed and not active:
        head = block_neq(s(i - 1, b), j) + block_neq(p(i, j), b)
        tail = block_neq(s(i, j), 0) if k == 0 else block_neq(s(i, j), k) + block_neq(p(i + 1, k), v)
        return idx(head + tail)
    if problem == "EoPL" and active and not pointed:
        head = block_neq(s(i, j), k) + block_neq(p(i + 1, k), j)
        tail = block_neq(p(i, j), 0) if b == 0 else block_neq(p(i, j), b) + block_neq(s(i - 1, b), c)
        return idx(head + tail)
    return 1


def _sod_identity(n, L, idx):
    s = lambda i, j: L.block("s", i, j)
    trees = {}
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            trees[("s", i, j)] = _value_tree(s(i, j), lambda v: v or None)

            def g(read, i=i, j=j):
                k = block_reader(read, s(i, j))
                if k == 0:
                    return idx(block_neq(s(1, 1), 0)) if (i, j) == (1, 1) else 1
                if i == n:
                    return idx(block_neq(s(n, j), k))
                if block_reader(read, s(i + 1, k)) == 0:
                    return idx(block_neq(s(i, j), k) + block_neq(s(i + 1, k), 0))
                return 1
            trees[("g", i, j)] = T.from_procedure(g)
    return trees


def _line_identity(problem, n, L, idx):
    trees = {}
    for u in range(1, n + 1):
        trees[("s", u)] = _value_tree(L.block("s", u), lambda v: v + 1)
        if u >= 2:
            trees[("p", u)] = _value_tree(L.block("p", u), lambda v: v + 1)

        def g(read, u=u):
            rd = lambda kind, w: block_reader(read, L.block(kind, w)) + 1
            if u == 1:
                v = rd("s", 1)
                if v == 1:
                    return idx(line_clause(L, [("s", 1, 1)]))
                w = rd("p", v)
                return idx(line_clause(L, [("s", 1, v), ("p", v, w)])) if w != 1 else 1
            t = rd("p", u)
            if t != u and rd("s", t) == u:
                v = rd("s", u)
                if v == 1:
                    return idx(line_clause(L, [("p", u, t), ("s", t, u), ("s", u, 1)]))
                w = rd("p", v)
                if w != u:
                    return idx(line_clause(L, [("p", u, t), ("s", t, u), ("s", u, v), ("p", v, w)]))
                return 1
            if problem == "EoL":
                v = rd("s", u)
                if v not in (1, u) and rd("p", v) == u:
                    q = rd("s", t)
                    if q != u:
                        return idx(line_clause(L, [("s", u, v), ("p", v, u), ("p", u, t), ("s", t, q)]))
            return 1
        trees[("g", u)] = T.from_procedure(g)
    return trees
