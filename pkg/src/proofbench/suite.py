"""Seeded random contradictions, proofs and formulations.

Every generator takes a random.Random instance; nothing reads global state, so
a seed reproduces the same objects on every platform.
"""
from __future__ import annotations

import random

from .checkers import (MaxResWProof, MaxSatStep, ResolveStep, WeakenStep, apply_weaken,
                       expand_maxsat_rule)
from .cnf import EMPTY, Clause, ClauseMultiset, CnfFormula
from .formulations import Formulation
from . import trees as T
from .trees import Leaf, Query
from .translators.builder import RevResBuilder, resolve_along


def random_tree(rng: random.Random, variables, max_depth: int, stop=0.25, leaf=None, _used=()):
    """Random decision tree; leaves get leaf(rng) (default None). The root always queries."""
    free = [v for v in variables if v not in _used]
    if not free or max_depth == 0 or (_used and rng.random() < stop):
        return Leaf(leaf(rng) if leaf else None)
    v = rng.choice(free)
    used = tuple(_used) + (v,)
    return Query(v, random_tree(rng, variables, max_depth - 1, stop, leaf, used),
                 random_tree(rng, variables, max_depth - 1, stop, leaf, used))


def tree_contradiction(tree, n: int, extra=()):
    """F = path clauses of the tree (in path order) followed by `extra` clauses.

    Returns (F, tree relabelled with clause indices).
    """
    ps = T.paths(tree)
    clauses = [T.path_clause(rho) for rho, _ in ps] + list(extra)
    counter = iter(range(1, len(ps) + 1))
    labelled = T.map_labels(tree, lambda _l: next(counter))
    return CnfFormula(n, clauses), labelled


def random_clause(rng, n, width):
    vs = rng.sample(range(1, n + 1), min(width, n))
    return Clause(v if rng.random() < 0.5 else -v for v in vs)


def random_contradiction(rng, n=None, max_depth=4, extra=2):
    n = n if n is not None else rng.randint(2, 6)
    tree = random_tree(rng, range(1, n + 1), min(max_depth, n))
    ex = [random_clause(rng, n, rng.randint(1, min(3, n))) for _ in range(extra)]
    return tree_contradiction(tree, n, ex)


def random_revres_proof(rng: random.Random, n=None, max_depth=4, junk=6, terminal=False):
    """(F, proof): a tree-shaped refutation with random detours and leftover clauses.

    Terminal proofs only leave weakenings of clauses of F behind.
    """
    F, tree = random_contradiction(rng, n, max_depth, extra=0 if terminal else 2)
    n = F.variable_count
    b = RevResBuilder(F)
    spare = [b.axiom(rng.randint(1, F.m)) for _ in range(rng.randint(0, 2))]
    if not terminal:
        spare += [b.axiom(F.m - 1), b.axiom(F.m)]
    for _ in range(junk):
        if not spare:
            break
        o = rng.choice(spare)
        free = [v for v in range(1, n + 1) if v not in b.clause(o).variables()]
        pairs = [] if terminal else _resolvable_pairs({x: b.clause(x) for x in spare})
        if pairs and (rng.random() < 0.3 or not free):
            x, y, v = rng.choice(pairs)
            spare.remove(x)
            spare.remove(y)
            spare.append(b.resolve(x, y, v))
        elif free:
            spare.remove(o)
            spare.extend(b.weaken(o, rng.choice(free)))

    def supply(C, label):
        o = b.axiom(label)
        # optional detour: weaken and immediately resolve back
        free = [v for v in range(1, n + 1) if v not in C.variables()]
        if free and rng.random() < 0.3:
            v = rng.choice(free)
            z, one = b.weaken(o, v)
            o = b.resolve(z, one, v)
        return o

    resolve_along(b, EMPTY, tree, supply)
    return F, b.finish("terminal" if terminal else "plain")


def random_revres_walk(rng: random.Random, F: CnfFormula, steps: int, copies=2):
    """Random valid RevRes steps from a multiset of F clauses (not necessarily a refutation).

    Returns (multiplicities, step list).
    """
    mult = {i: rng.randint(1, copies) for i in range(1, F.m + 1)}
    ms = ClauseMultiset()
    for i in sorted(mult):
        for _ in range(mult[i]):
            ms.add(F.clause(i))
    out = []
    n = F.variable_count
    for _ in range(steps):
        pairs = _resolvable_pairs(ms.occ)
        if pairs and rng.random() < 0.45:
            a, c, v = rng.choice(pairs)
            C = ms[a].without_var(v)
            ms.remove(a)
            ms.remove(c)
            ms.add(C)
            out.append(ResolveStep(a, c, v))
            continue
        cands = [(o, v) for o, C in ms.occ.items() for v in range(1, n + 1) if v not in C.variables()]
        if not cands:
            break
        o, v = rng.choice(cands)
        apply_weaken(ms, o, v)
        out.append(WeakenStep(o, v))
    return mult, out


def _resolvable_pairs(occ):
    """Sorted (pos, neg, var) triples of occurrences that can be resolved."""
    by_rest = {}
    for o, C in occ.items():
        for l in C:
            if -l in C:
                continue
            by_rest.setdefault((C.without_var(abs(l)), abs(l), l > 0), []).append(o)
    pairs = []
    for (rest, v, positive), occs in by_rest.items():
        if positive:
            for a in occs:
                for c in by_rest.get((rest, v, False), []):
                    pairs.append((a, c, v))
    pairs.sort()
    return pairs


def random_maxresw_proof(rng: random.Random, n=None, max_depth=4, junk=4):
    """(F, proof): MaxSAT resolution along a tree, after random steps on two extra clauses."""
    F, tree = random_contradiction(rng, n, max_depth, extra=2)
    n = F.variable_count
    ms = ClauseMultiset()
    for c in F.clauses:
        ms.add(c)
    steps = []
    spare = [F.m - 1, F.m]
    for _ in range(junk):
        done = False
        for a in list(spare):
            for c in list(spare):
                if a == c:
                    continue
                A, B = ms[a], ms[c]
                cands = [l for l in A if l > 0 and -l in B]
                if len(cands) == 1 and -cands[0] not in A and cands[0] not in B:
                    v = cands[0]
                    AA = [l for l in A if l != v]
                    BB = [l for l in B if l != -v]
                    if any(-l in BB for l in AA):
                        continue
                    outs = expand_maxsat_rule(A, B, v)
                    ms.remove(a)
                    ms.remove(c)
                    spare.remove(a)
                    spare.remove(c)
                    for o in outs:
                        spare.append(ms.add(o))
                    steps.append(MaxSatStep(a, c, v))
                    done = True
                    break
            if done:
                break
        if done:
            continue
        o = rng.choice(spare)
        free = [v for v in range(1, n + 1) if v not in ms[o].variables()]
        if not free:
            continue
        v = rng.choice(free)
        spare.remove(o)
        spare.extend(apply_weaken(ms, o, v))
        steps.append(WeakenStep(o, v))

    def go(node):
        # leaf labels are clause indices, which are also the initial occurrence ids
        if isinstance(node, Leaf):
            return node.label
        z = go(node.zero)
        o = go(node.one)
        outs = expand_maxsat_rule(ms[z], ms[o], node.var)
        ms.remove(z)
        ms.remove(o)
        ids = [ms.add(c) for c in outs]
        steps.append(MaxSatStep(z, o, node.var))
        return ids[0]

    go(tree)
    return F, MaxResWProof(steps)


def random_line_formulation(rng: random.Random, target="EoL", n=None, L=None, max_depth=3, ptr_depth=2):
    """Random EoL/SoL formulation that is correct by construction.

    F is the path-clause contradiction of a random tree D, so exactly one
    clause is falsified at every point; every g tree is D itself. The pointer
    trees are independent random trees, so the reduced instances vary freely.
    """
    n = n if n is not None else rng.randint(2, 6)
    L = L if L is not None else rng.randint(2, 5)
    D = random_tree(rng, range(1, n + 1), min(max_depth, n))
    F, g = tree_contradiction(D, n)
    trees = {}
    for v in range(1, L + 1):
        trees[("s", v)] = random_tree(rng, range(1, n + 1), ptr_depth, 0.4, lambda r: r.randint(1, L))
        if v >= 2:
            trees[("p", v)] = random_tree(rng, range(1, n + 1), ptr_depth, 0.4, lambda r: r.randint(1, L))
        trees[("g", v)] = g
    return F, Formulation(target, L, trees, {"random": True})
