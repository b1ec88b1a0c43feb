"""Direct simulations between RevRes, Resolution, MaxResW, uSA and uNS."""
from __future__ import annotations

import logging

from ..checkers import (Axiom, MaxResWProof, MaxSatStep, NsProof, ProofRejected, Resolve,
                        ResolutionProof, ResolveStep, RevResProof, SaProof, Weaken, WeakenStep,
                        check_maxresw, check_revres, expand_maxsat_rule, initial_multiset)
from ..cnf import Clause, CnfFormula
from ..poly import ConicalJunta, MultilinearPoly, Term, clause_to_term
from .common import TranslationError

log = logging.getLogger(__name__)


def _checked(F, proof):
    try:
        return check_revres(F, proof)
    except ProofRejected as e:
        raise TranslationError("input proof rejected: %s" % e.reason, e.witness)


def revres_to_usa(F: CnfFormula, proof: RevResProof) -> SaProof:
    """J_i = w_i; J_0 collects the final non-empty clauses and surplus empty ones."""
    m = _checked(F, proof)
    juntas = {i: ConicalJunta({Term(): w}) for i, w in proof.multiplicities.items()}
    j0 = ConicalJunta()
    bottoms = 0
    for c in m.detail["final"].values():
        if c.is_empty():
            bottoms += 1
        elif c.is_tautology():
            # never falsified, so it contributes the zero polynomial
            log.debug("dropping tautological final clause %s", c.lits)
        else:
            j0.add(clause_to_term(c), 1)
    if bottoms > 1:
        j0.add(Term(), bottoms - 1)
    return SaProof("normal", juntas=juntas, j0=j0)


def revrest_to_uns(F: CnfFormula, proof: RevResProof) -> NsProof:
    """Final clauses of a terminal proof factor through their parent clauses of F."""
    if proof.kind != "terminal":
        raise TranslationError("expected a terminal proof")
    m = _checked(F, proof)
    coeffs = {i: MultilinearPoly.constant(w) for i, w in proof.multiplicities.items()}

    def sub(i, q):
        coeffs[i] = coeffs.get(i, MultilinearPoly({})) - q

    bottoms = 0
    for c in m.detail["final"].values():
        if c.is_empty():
            bottoms += 1
            continue
        if c.is_tautology():
            continue
        i = F.parent_of(c)
        if i is None:
            raise TranslationError("final clause has no parent in F", c.lits)
        rest = Clause(l for l in c if l not in F.clause(i))
        sub(i, clause_to_term(rest).to_poly())
    if bottoms > 1:
        i = F.index_of(Clause())
        if i is None:
            raise TranslationError("several final empty clauses and no empty clause in F")
        sub(i, MultilinearPoly.constant(bottoms - 1))
    return NsProof(coeffs, "Z")


def revres_to_res(F: CnfFormula, proof: RevResProof) -> ResolutionProof:
    """Weakening -> two Weaken lines, resolution -> one Resolve line."""
    m = _checked(F, proof)
    lines = []
    line_of = {}
    axiom_line = {}
    occ = 1
    for i in sorted(proof.multiplicities):
        if i not in axiom_line:
            lines.append(Axiom(i, F.clause(i)))
            axiom_line[i] = len(lines)
        for _ in range(proof.multiplicities[i]):
            line_of[occ] = axiom_line[i]
            occ += 1
    clause_at = lambda ln: lines[ln - 1].clause
    for st in proof.steps:
        if isinstance(st, WeakenStep):
            src = line_of[st.occ]
            C = clause_at(src)
            lines.append(Weaken(src, st.var, C | st.var))
            line_of[occ] = len(lines)
            lines.append(Weaken(src, -st.var, C | -st.var))
            line_of[occ + 1] = len(lines)
            occ += 2
        else:
            a, b = line_of[st.pos], line_of[st.neg]
            C = clause_at(a).without_var(st.var)
            lines.append(Resolve(a, b, st.var, C))
            line_of[occ] = len(lines)
            occ += 1
    # a live final empty clause is never a premise, so its line can move to the end
    bot = min(o for o, c in m.detail["final"].items() if c.is_empty())
    k = line_of[bot]
    if k != len(lines) and lines[k - 1].rule == "axiom":
        # axiom lines are shared between occurrences, so repeat instead of moving
        lines.append(lines[k - 1])
    elif k != len(lines):
        renum = {}
        order = [ln for ln in range(1, len(lines) + 1) if ln != k] + [k]
        for new, old in enumerate(order, 1):
            renum[old] = new
        lines = [lines[old - 1]._replace(refs=tuple(renum[r] for r in lines[old - 1].refs)) for old in order]
    return ResolutionProof(lines)


def maxresw_to_revres(F: CnfFormula, proof: MaxResWProof) -> RevResProof:
    """Each MaxSAT step becomes weakenings of both premises and one resolution."""
    try:
        check_maxresw(F, proof)
    except ProofRejected as e:
        raise TranslationError("input proof rejected: %s" % e.reason, e.witness)
    ms = initial_multiset(F, {i: 1 for i in range(1, F.m + 1)})
    rev = {o: o for o in ms.occ}          # MaxResW id -> RevRes id
    rclause = dict(ms.occ)                # RevRes id -> clause
    nxt_r = ms.next_id
    nxt_m = ms.next_id
    steps = []

    def weaken(o, var):
        nonlocal nxt_r
        steps.append(WeakenStep(o, var))
        C = rclause.pop(o)
        a, b = nxt_r, nxt_r + 1
        rclause[a] = C | var
        rclause[b] = C | -var
        nxt_r += 2
        return a, b

    for st in proof.steps:
        if isinstance(st, WeakenStep):
            a, b = weaken(rev.pop(st.occ), st.var)
            rev[nxt_m], rev[nxt_m + 1] = a, b
            nxt_m += 2
            continue
        x = st.var
        po, no = rev.pop(st.pos), rev.pop(st.neg)
        xa, xb = rclause[po], rclause[no]
        outs = expand_maxsat_rule(xa, xb, x)
        A = [l for l in xa if l != x]
        B = [l for l in xb if l != -x]
        side = {}

        def chain(o, lits):
            for l in lits:
                if abs(l) in rclause[o].variables():
                    continue
                z, one = weaken(o, abs(l))
                keep, other = (z, one) if l > 0 else (one, z)
                side[rclause[other]] = side.get(rclause[other], []) + [other]
                o = keep
            return o

        pa = chain(po, B)
        nb = chain(no, A)
        steps.append(ResolveStep(pa, nb, x))
        C = rclause.pop(pa)
        rclause.pop(nb)
        res = nxt_r
        rclause[res] = C.without_var(x)
        nxt_r += 1
        side.setdefault(rclause[res], []).append(res)
        for c in outs:
            rev[nxt_m] = side[c].pop(0)
            nxt_m += 1
        if any(side.values()):
            raise TranslationError("internal: simulation produced extra clauses")
    return RevResProof({i: 1 for i in range(1, F.m + 1)}, steps)
