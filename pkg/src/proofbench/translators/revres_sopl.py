"""RevRes proofs <-> formulations into SoPL / EoPL.

revres_to_sopl lays the configurations of a proof out as grid rows (row 1 is
the final configuration, row L the initial one); an active cell is a falsified
clause and its successor is the falsified clause it was derived from.

sopl_formulation_to_revres goes the other way: for every grid cell it builds
the clause family "this cell is active" out of decision-tree paths, moves those
families row by row from the last row to the first by weakening and reversed
weakening, and finally resolves the family of cell (1, 1) to the empty clause.
"""
from __future__ import annotations

from ..checkers import ProofRejected, RevResProof, WeakenStep, check_revres, initial_multiset
from ..cnf import EMPTY, CnfFormula
from ..formulations import Formulation, verify_formulation
from .. import trees as T
from ..trees import Leaf
from .builder import RevResBuilder, resolve_along, weaken_occurrence
from .common import TranslationError

WIDTH_CONSTANT = 5   # output width <= WIDTH_CONSTANT * depth of the formulation


# proof -> formulation

def _replay(F, proof):
    """Configurations as ordered id lists, per-step (consumed, produced) ids, and id -> clause."""
    ms = initial_multiset(F, proof.multiplicities)
    clause_of = dict(ms.occ)
    confs = [list(ms.occ)]
    moves = []
    for st in proof.steps:
        if isinstance(st, WeakenStep):
            C = ms[st.occ]
            ms.remove(st.occ)
            moves.append(((st.occ,), (ms.add(C | st.var), ms.add(C | -st.var))))
        else:
            C = ms[st.pos].without_var(st.var)
            ms.remove(st.pos)
            ms.remove(st.neg)
            moves.append(((st.pos, st.neg), (ms.add(C),)))
        for o in moves[-1][1]:
            clause_of[o] = ms[o]
        confs.append(list(ms.occ))
    return confs, moves, clause_of


def _falsified(read, C):
    return all(read(abs(l)) == (0 if l > 0 else 1) for l in C)


def revres_to_sopl(F: CnfFormula, proof: RevResProof) -> Formulation:
    try:
        m = check_revres(F, proof)
    except ProofRejected as e:
        raise TranslationError("input proof rejected: %s" % e.reason, e.witness)
    confs, moves, clause_of = _replay(F, proof)
    ell = len(confs)
    t = max(len(c) for c in confs)
    L = max(ell, t)
    pad = L - ell
    # ext[k] is the configuration of row L - k
    ext = [confs[0]] * pad + confs
    step_at = [None] * (pad + 1) + [(proof.steps[q], moves[q]) for q in range(len(moves))]
    cols = []
    for k, conf in enumerate(ext):
        order = sorted(conf)
        if k == L - 1:
            bots = [o for o in order if clause_of[o].is_empty()]
            order = [bots[0]] + [o for o in order if o != bots[0]]
        cols.append({o: c for c, o in enumerate(order, 1)})
    row = lambda k: L - k
    trees = {}
    bottoms = m.detail["bottoms"]
    terminal = proof.kind == "terminal"
    if terminal and bottoms > 1 and F.index_of(EMPTY) is None:
        raise TranslationError("several final empty clauses and no empty clause in F")

    for k in range(L):
        i = row(k)
        for o, j in cols[k].items():
            C = clause_of[o]
            # successor: the falsified clause of the previous configuration this one came from
            if i == L:
                def s_proc(read, C=C):
                    return 1 if _falsified(read, C) else None
            else:
                prev = cols[k - 1]
                sm = step_at[k]
                if sm is None or o not in sm[1][1]:
                    def s_proc(read, C=C, c=prev[o]):
                        return c if _falsified(read, C) else None
                elif isinstance(sm[0], WeakenStep):
                    def s_proc(read, C=C, c=prev[sm[0].occ]):
                        return c if _falsified(read, C) else None
                else:
                    st = sm[0]

                    def s_proc(read, C=C, st=st, prev=prev):
                        if not _falsified(read, C):
                            return None
                        return prev[st.neg] if read(st.var) else prev[st.pos]
            trees[("s", i, j)] = T.from_procedure(s_proc)
            # predecessor: the falsified clause of the next configuration derived from this one
            if i > 1:
                nxt = cols[k + 1]
                sm = step_at[k + 1]
                if sm is None or o not in sm[1][0]:
                    def p_proc(read, C=C, c=nxt[o]):
                        return c if _falsified(read, C) else 1
                elif isinstance(sm[0], WeakenStep):
                    a, b2 = sm[1][1]

                    def p_proc(read, C=C, v=sm[0].var, ca=nxt[a], cb=nxt[b2]):
                        if not _falsified(read, C):
                            return 1
                        return cb if read(v) else ca
                else:
                    def p_proc(read, C=C, c=nxt[sm[1][1][0]]):
                        return c if _falsified(read, C) else 1
                trees[("p", i, j)] = T.from_procedure(p_proc)
            if i == L:
                trees[("g", i, j)] = Leaf(F.index_of(C))
            elif i == 1 and (j > 1):
                idx = F.index_of(EMPTY) if C.is_empty() else F.parent_of(C)
                if idx is not None:
                    trees[("g", i, j)] = Leaf(idx)
    target = "EoPL" if terminal else "SoPL"
    phi = Formulation(target, L, trees, {"configurations": ell, "max_configuration": t,
                                         "configuration_size": m.detail["configuration_size"]})
    assert L <= m.detail["configuration_size"]
    assert phi.depth() <= m.width_or_degree + 1, (phi.depth(), m.width_or_degree)
    return phi


# formulation -> proof

def _cell_trees(phi):
    """T_{i,j}: s_{i,j} followed (for i < L) by the predecessor tree it points at."""
    L = phi.L
    out = {}
    for i in range(1, L + 1):
        for j in range(1, L + 1):
            s = phi.tree("s", i, j)
            if i == L:
                out[(i, j)] = T.map_labels(s, lambda k: (k, None))
                continue

            def fn(k, acc, i=i):
                if k is None:
                    return Leaf((None, None))
                if not isinstance(k, int) or not 1 <= k <= L:
                    raise TranslationError("successor value %r out of range" % (k,))
                return T.map_labels(phi.tree("p", i + 1, k), lambda a, k=k: (k, a))
            out[(i, j)] = T.graft(s, fn)
    return out


def _is_active(phi, i, j, label):
    k, a = label
    if k is None:
        return False
    return i == phi.L or a == j


def sopl_formulation_to_revres(F: CnfFormula, phi: Formulation, d=None, guard=True,
                               guard_samples=512) -> RevResProof:
    if phi.target not in ("SoPL", "EoPL"):
        raise TranslationError("expected a SoPL or EoPL formulation, got %s" % phi.target)
    if guard:
        rep = verify_formulation(F, phi, mode="sample", samples=guard_samples)
        if not rep.passed:
            raise TranslationError("formulation fails verification", rep.failures[0])
    L = phi.L
    d = phi.depth() if d is None else d
    eopl = phi.target == "EoPL"
    b = RevResBuilder(F)
    cell = _cell_trees(phi)
    junk = []   # (cell, occurrence) pairs left in the final configuration

    def g_tree(i, j):
        g = phi.tree("g", i, j)
        if g is None:
            raise TranslationError("cell (%d, %d) can be a solution but has no g tree" % (i, j))
        return T.map_labels(g, lambda c: ("F", c))

    def supply_F(W, c):
        if not isinstance(c, int) or not 1 <= c <= F.m:
            raise TranslationError("g tree returned %r" % (c,), W.lits)
        if not F.clause(c) <= W:
            raise TranslationError("clause %d is not falsified on the whole path" % c, W.lits)
        return b.weaken_to(b.axiom(c), W)

    def active_paths(i, j):
        return [(rho, lab) for rho, lab in T.paths(cell[(i, j)]) if _is_active(phi, i, j, lab)]

    # last row: an active cell is a solution, so its family comes from g
    fam = {}
    for j in range(1, L + 1):
        fam[j] = {}
        for rho, _ in active_paths(L, j):
            C = T.path_clause(rho)
            tree = T.graft(Leaf(None), lambda _l, _a, i=L, j=j: g_tree(i, j), rho)
            fam[j][C] = resolve_along(b, C, tree, lambda W, lab: supply_F(W, lab[1]))

    for i in range(L, 1, -1):
        # forward: split each active-path clause of row i by the cell pointing at it
        pool = {}
        for j in range(1, L + 1):
            for C, sym in fam[j].items():
                rho = C.falsifying_assignment()

                def fn(a, acc, i=i):
                    if a is None:
                        return Leaf(None)
                    if not isinstance(a, int) or not 1 <= a <= L:
                        raise TranslationError("predecessor value %r out of range" % (a,))
                    return phi.tree("s", i - 1, a)
                tree = T.graft(phi.tree("p", i, j), fn, rho)
                for W, lab, leaf in weaken_occurrence(b, sym, tree):
                    if lab == j:
                        pool.setdefault(W, []).append(leaf)
                    else:
                        junk.append(((i, j), leaf))
        # backward: rebuild the families of row i - 1 by reversed weakening
        new = {}
        for a in range(1, L + 1):
            new[a] = {}
            for rho, (j, _) in active_paths(i - 1, a):
                C = T.path_clause(rho)

                def fn(lab, acc, i=i, j=j):
                    if _is_active(phi, i, j, lab):
                        return Leaf(("T",))
                    return g_tree(i, j)
                tree = T.graft(cell[(i, j)], fn, rho)

                def supply(W, lab):
                    if lab[0] == "T":
                        got = pool.get(W)
                        if not got:
                            raise TranslationError("no forward clause matches the backward path", W.lits)
                        return got.pop()
                    return supply_F(W, lab[1])
                new[a][C] = resolve_along(b, C, tree, supply)
        if any(pool.values()):
            raise TranslationError("forward clauses left unused in row %d" % i)
        fam = new

    # top: resolve the family of (1, 1) together with its inactive paths to the empty clause
    def top_fn(lab, acc):
        if _is_active(phi, 1, 1, lab):
            return Leaf(("I",))
        return g_tree(1, 1)

    def top_supply(W, lab):
        if lab[0] == "I":
            return fam[1].pop(W)
        return supply_F(W, lab[1])
    resolve_along(b, EMPTY, T.graft(cell[(1, 1)], top_fn), top_supply)
    for a in range(2, L + 1):
        for sym in fam[a].values():
            junk.append(((1, a), sym))

    if eopl:
        # every leftover clause belongs to an active cell nobody points at, which g certifies
        for (i, j), sym in junk:
            rho = b.clause(sym).falsifying_assignment()
            tree = T.graft(Leaf(None), lambda _l, _a, i=i, j=j: g_tree(i, j), rho)
            for W, lab, _ in weaken_occurrence(b, sym, tree):
                c = lab[1]
                if not isinstance(c, int) or not 1 <= c <= F.m or not F.clause(c) <= W:
                    raise TranslationError("leftover clause of cell (%d, %d) is not certified" % (i, j), W.lits)

    if b.max_width > WIDTH_CONSTANT * max(d, 1):
        raise TranslationError("width %d exceeds %d * depth %d" % (b.max_width, WIDTH_CONSTANT, d))
    return b.finish("terminal" if eopl else "plain")
