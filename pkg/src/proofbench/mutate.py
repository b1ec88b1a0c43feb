"""Seeded single-edit mutants of accepted proofs.

Edit sites are restricted to places where the edit changes meaning: deleted
steps lie on the derivation of the final empty clause, flipped coefficients
multiply a nonzero product, swapped pivots belong to resolution steps, and
terminal corruption destroys the unique final empty clause. An unused step, by
contrast, can be deleted without harm, so it is never chosen.
"""
from __future__ import annotations

import random

from .checkers import (MaxResWProof, NsProof, ResolutionProof, ResolveStep, RevResProof,
                       SaProof, WeakenStep, clause_poly, expand_maxsat_rule, initial_multiset)
from .cnf import Clause
from .poly import ConicalJunta, MultilinearPoly, clause_to_term

KINDS = ("coefficient-flip", "step-deletion", "pivot-swap", "terminal-corruption")


# step bookkeeping for implicit-id systems

def _trace(F, proof):
    """Per step (consumed ids, produced ids); works for RevRes and MaxResW."""
    mult = proof.multiplicities if isinstance(proof, RevResProof) else {i: 1 for i in range(1, F.m + 1)}
    ms = initial_multiset(F, mult)
    out = []
    for st in proof.steps:
        if isinstance(st, WeakenStep):
            C = ms[st.occ]
            ms.remove(st.occ)
            out.append(((st.occ,), (ms.add(C | st.var), ms.add(C | -st.var))))
        elif isinstance(st, ResolveStep):
            C = ms[st.pos].without_var(st.var)
            ms.remove(st.pos)
            ms.remove(st.neg)
            out.append(((st.pos, st.neg), (ms.add(C),)))
        else:
            outs = expand_maxsat_rule(ms[st.pos], ms[st.neg], st.var)
            ms.remove(st.pos)
            ms.remove(st.neg)
            out.append(((st.pos, st.neg), tuple(ms.add(c) for c in outs)))
    return out, ms


def _ancestry(trace, target):
    producer = {}
    for k, (_, outs) in enumerate(trace):
        for o in outs:
            producer[o] = k
    need, seen = [target], set()
    while need:
        o = need.pop()
        k = producer.get(o)
        if k is None or k in seen:
            continue
        seen.add(k)
        need.extend(trace[k][0])
    return sorted(seen)


def _unique_bottom(ms):
    bots = [o for o, c in ms.occ.items() if c.is_empty()]
    return bots[0] if len(bots) == 1 else None


def _delete_step(proof, trace, k):
    outs = trace[k][1]
    lo, width = min(outs), len(outs)

    def ren(r):
        if r in outs:
            return 0   # the occurrence no longer exists
        return r - width if r >= lo + width else r

    steps = []
    for q, st in enumerate(proof.steps):
        if q == k:
            continue
        if q < k:
            steps.append(st)
        elif isinstance(st, WeakenStep):
            steps.append(WeakenStep(ren(st.occ), st.var))
        else:
            steps.append(type(st)(ren(st.pos), ren(st.neg), st.var))
    return steps


def _other_var(F, v):
    return v % F.variable_count + 1 if F.variable_count > 1 else v + 1


def _with_steps(proof, steps):
    if isinstance(proof, RevResProof):
        return RevResProof(proof.multiplicities, steps, proof.kind)
    return MaxResWProof(steps, proof.multiplicities)


def _pick(rng, kind, available):
    """The forced kind if available, else a random available kind (None if none)."""
    if kind is not None:
        return kind if available.get(kind) else None
    opts = [k for k in KINDS if available.get(k)]
    return rng.choice(opts) if opts else None


def step_mutants(F, proof, rng: random.Random, count=10, kind=None):
    trace, ms = _trace(F, proof)
    bot = _unique_bottom(ms)
    out = []
    if bot is None:
        return out
    anc = _ancestry(trace, bot)
    res_steps = [k for k, st in enumerate(proof.steps) if not isinstance(st, WeakenStep)]
    avail = {"step-deletion": anc, "pivot-swap": res_steps, "terminal-corruption": True}
    for _ in range(count):
        kd = _pick(rng, kind, avail)
        if kd is None:
            break
        if kd == "step-deletion":
            k = rng.choice(anc)
            out.append((kd, _with_steps(proof, _delete_step(proof, trace, k))))
        elif kd == "pivot-swap":
            k = rng.choice(res_steps)
            st = proof.steps[k]
            steps = list(proof.steps)
            steps[k] = type(st)(st.pos, st.neg, _other_var(F, st.var))
            out.append((kd, _with_steps(proof, steps)))
        else:
            v = rng.randint(1, F.variable_count)
            out.append((kd, _with_steps(proof, list(proof.steps) + [WeakenStep(bot, v)])))
    return out


def resolution_mutants(F, proof: ResolutionProof, rng: random.Random, count=10, kind=None):
    lines = proof.lines
    last = len(lines)
    anc, need = set(), [last]
    while need:
        k = need.pop()
        if k in anc:
            continue
        anc.add(k)
        need.extend(lines[k - 1].refs)
    deletable = sorted(k for k in anc if k != last)
    resolves = [k for k, ln in enumerate(lines, 1) if ln.rule == "resolve" and k in anc]
    out = []
    avail = {"step-deletion": deletable, "pivot-swap": resolves, "terminal-corruption": True}
    for _ in range(count):
        kd = _pick(rng, kind, avail)
        if kd is None:
            break
        if kd == "step-deletion":
            k = rng.choice(deletable)
            new = []
            for q, ln in enumerate(lines, 1):
                if q == k:
                    continue
                refs = tuple(0 if r == k else (r - 1 if r > k else r) for r in ln.refs)
                new.append(ln._replace(refs=refs))
            out.append((kd, ResolutionProof(new)))
        elif kd == "pivot-swap":
            k = rng.choice(resolves)
            new = list(lines)
            new[k - 1] = new[k - 1]._replace(arg=_other_var(F, new[k - 1].arg))
            out.append((kd, ResolutionProof(new)))
        else:
            new = list(lines)
            v = rng.randint(1, F.variable_count)
            new[-1] = new[-1]._replace(clause=Clause([v]))
            out.append((kd, ResolutionProof(new)))
    return out


def ns_mutants(F, proof: NsProof, rng: random.Random, count=10, kind=None):
    sites = []
    for i, q in sorted(proof.coeffs.items()):
        cb = clause_poly(F.clause(i), proof.ring, proof.p)
        for m, c in q.sorted_terms():
            if not (MultilinearPoly({m: 1}, proof.ring, proof.p) * cb).is_zero():
                sites.append((i, m, c))
    out = []
    if kind not in (None, "coefficient-flip"):
        return out
    for _ in range(count if sites else 0):
        i, m, c = rng.choice(sites)
        coeffs = dict(proof.coeffs)
        coeffs[i] = coeffs[i] + MultilinearPoly({m: -2 * c}, proof.ring, proof.p)
        if coeffs[i].terms.get(m) == c:   # characteristic 2: shift instead of negating
            coeffs[i] = coeffs[i] + MultilinearPoly({m: 1}, proof.ring, proof.p)
        out.append(("coefficient-flip", NsProof(coeffs, proof.ring, proof.p)))
    return out


def sa_mutants(F, proof: SaProof, rng: random.Random, count=10, kind=None):
    """NormalForm only: one junta coefficient moves by one."""
    sites = []
    for i, J in sorted(proof.juntas.items()):
        cbar = clause_to_term(F.clause(i))
        for t, c in J.sorted_entries():
            if t * cbar is not None:
                sites.append((i, t, c))
    for t, c in proof.j0.sorted_entries():
        sites.append((0, t, c))
    out = []
    if kind not in (None, "coefficient-flip"):
        return out
    for _ in range(count if sites else 0):
        i, t, c = rng.choice(sites)
        delta = 1 if c <= 1 or rng.random() < 0.5 else -1
        juntas = {k: ConicalJunta(dict(J.entries)) for k, J in proof.juntas.items()}
        j0 = ConicalJunta(dict(proof.j0.entries))
        J = j0 if i == 0 else juntas[i]
        J.entries[t] = c + delta
        out.append(("coefficient-flip", SaProof("normal", juntas=juntas, j0=j0, ring=proof.ring)))
    return out


def mutants(F, proof, rng: random.Random, count=10, kind=None):
    """[(kind, mutant)] for any supported proof object; `kind` forces one operator."""
    if kind is not None and kind not in KINDS:
        raise ValueError("unknown mutation kind %r" % kind)
    if isinstance(proof, (RevResProof, MaxResWProof)):
        return step_mutants(F, proof, rng, count, kind)
    if isinstance(proof, ResolutionProof):
        return resolution_mutants(F, proof, rng, count, kind)
    if isinstance(proof, NsProof):
        return ns_mutants(F, proof, rng, count, kind)
    if isinstance(proof, SaProof):
        return sa_mutants(F, proof, rng, count, kind)
    raise TypeError("no mutation operators for %r" % (proof,))
