"""Proof objects, validity checkers and metrics.

Every checker returns ProofMetrics on success and raises ProofRejected (with a
reason and, where useful, a witness) when the proof is wrong. Structurally
malformed input raises MalformedProof.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, NamedTuple, Optional, Sequence, Union

from .cnf import EMPTY, Clause, ClauseMultiset, CnfFormula
from .poly import ConicalJunta, MultilinearPoly, Term, clause_to_term
from . import kernels


class ProofRejected(ValueError):
    def __init__(self, reason, witness=None):
        super().__init__(reason if witness is None else "%s (witness %r)" % (reason, witness))
        self.reason = reason
        self.witness = witness


class MalformedProof(ValueError):
    pass


@dataclass
class ProofMetrics:
    system: str
    size: int
    width_or_degree: int
    unary_size: Optional[int] = None
    steps: Optional[int] = None
    max_coefficient: Optional[int] = None
    detail: dict = field(default_factory=dict)

    def row(self):
        return {"system": self.system, "size": self.size, "width_or_degree": self.width_or_degree,
                "unary_size": self.unary_size}


# Resolution

class ResLine(NamedTuple):
    rule: str          # "axiom" | "weaken" | "resolve"
    clause: Clause
    refs: tuple = ()   # earlier line numbers (1-based)
    arg: int = 0       # axiom: clause index; weaken: literal; resolve: pivot variable


def Axiom(i, clause):
    return ResLine("axiom", clause, (), i)


def Weaken(ref, lit, clause):
    return ResLine("weaken", clause, (ref,), lit)


def Resolve(ref_pos, ref_neg, pivot, clause):
    return ResLine("resolve", clause, (ref_pos, ref_neg), pivot)


class ResolutionProof:
    def __init__(self, lines: Sequence[ResLine]):
        self.lines = list(lines)


def check_resolution(F: CnfFormula, proof: ResolutionProof) -> ProofMetrics:
    lines = proof.lines
    for k, ln in enumerate(lines, 1):
        for r in ln.refs:
            if not 1 <= r < k:
                raise ProofRejected("line %d refers to line %d" % (k, r))
        if ln.rule == "axiom":
            if not 1 <= ln.arg <= F.m or F.clause(ln.arg) != ln.clause:
                raise ProofRejected("line %d is not clause %d of F" % (k, ln.arg))
        elif ln.rule == "weaken":
            if lines[ln.refs[0] - 1].clause | ln.arg != ln.clause:
                raise ProofRejected("line %d is not a weakening of line %d" % (k, ln.refs[0]))
        elif ln.rule == "resolve":
            a = lines[ln.refs[0] - 1].clause
            b = lines[ln.refs[1] - 1].clause
            x = ln.arg
            if x <= 0 or x not in a or -x not in b:
                raise ProofRejected("bad pivot %d at line %d" % (x, k))
            derived = Clause([l for l in a if l != x] + [l for l in b if l != -x])
            if derived != ln.clause:
                raise ProofRejected("line %d does not match the resolvent of its premises" % k)
        else:
            raise MalformedProof("unknown rule %r" % (ln.rule,))
    if not lines or not lines[-1].clause.is_empty():
        raise ProofRejected("⊥ absent")
    return ProofMetrics("Res", len(lines), max(ln.clause.width for ln in lines), steps=len(lines))


# Reversible resolution

class WeakenStep(NamedTuple):
    occ: int
    var: int


class ResolveStep(NamedTuple):
    pos: int   # occurrence of C v x
    neg: int   # occurrence of C v not-x
    var: int


class RevResProof:
    """kind: "plain" or "terminal"; multiplicities: clause index -> w_i.

    Initial occurrences get ids 1..W in clause-index order; every step output
    gets the next id (weakening: C v x first, then C v not-x).
    """

    def __init__(self, multiplicities: Dict[int, int], steps: Sequence, kind: str = "plain"):
        if kind not in ("plain", "terminal"):
            raise MalformedProof("unknown kind %r" % kind)
        self.kind = kind
        self.multiplicities = {int(i): int(w) for i, w in multiplicities.items()}
        self.steps = list(steps)


def initial_multiset(F: CnfFormula, mult: Dict[int, int]) -> ClauseMultiset:
    ms = ClauseMultiset()
    for i in sorted(mult):
        if not 1 <= i <= F.m:
            raise ProofRejected("multiplicity for nonexistent clause %d" % i)
        if mult[i] < 1:
            raise ProofRejected("nonpositive multiplicity for clause %d" % i)
        for _ in range(mult[i]):
            ms.add(F.clause(i))
    return ms


def apply_weaken(ms: ClauseMultiset, occ: int, var: int):
    if occ not in ms:
        raise ProofRejected("dead occurrence id %d" % occ)
    C = ms[occ]
    if var <= 0:
        raise MalformedProof("variable must be positive")
    if var in C.variables():
        raise ProofRejected("pivot occurs in clause")
    ms.remove(occ)
    return ms.add(C | var), ms.add(C | -var)


def apply_resolve(ms: ClauseMultiset, pos: int, neg: int, var: int):
    for o in (pos, neg):
        if o not in ms:
            raise ProofRejected("dead occurrence id %d" % o)
    if pos == neg:
        raise ProofRejected("occurrence %d used twice" % pos)
    A, B = ms[pos], ms[neg]
    if var not in A or -var not in B or -var in A or var in B:
        raise ProofRejected("bad pivot %d" % var)
    C = A.without_var(var)
    if C != B.without_var(var):
        raise ProofRejected("premise clauses differ outside pivot")
    ms.remove(pos)
    ms.remove(neg)
    return ms.add(C)


def _apply_step(ms, step):
    if isinstance(step, WeakenStep):
        return apply_weaken(ms, step.occ, step.var)
    if isinstance(step, ResolveStep):
        return (apply_resolve(ms, step.pos, step.neg, step.var),)
    raise MalformedProof("unknown step %r" % (step,))


def replay_revres(F: CnfFormula, proof: RevResProof):
    """Yield the configurations (as ClauseMultiset snapshots of clause lists)."""
    ms = initial_multiset(F, proof.multiplicities)
    yield ms.clauses()
    for st in proof.steps:
        _apply_step(ms, st)
        yield ms.clauses()


def check_revres(F: CnfFormula, proof: RevResProof) -> ProofMetrics:
    ms = initial_multiset(F, proof.multiplicities)
    conf_size = len(ms)
    width = max((c.width for c in ms.clauses()), default=0)
    for k, st in enumerate(proof.steps, 1):
        try:
            out = _apply_step(ms, st)
        except ProofRejected as e:
            raise ProofRejected("step %d: %s" % (k, e.reason), e.witness)
        for o in out:
            width = max(width, ms[o].width)
        conf_size += len(ms)
    final = dict(ms.occ)
    bottoms = [o for o, c in final.items() if c.is_empty()]
    if not bottoms:
        raise ProofRejected("⊥ absent from final configuration")
    if proof.kind == "terminal":
        for o, c in final.items():
            if not c.is_empty() and F.parent_of(c) is None:
                raise ProofRejected("terminal condition violated", (o, c.lits))
    m = ProofMetrics("RevResT" if proof.kind == "terminal" else "RevRes", conf_size, width,
                     steps=len(proof.steps))
    m.detail = {"configuration_size": conf_size, "steps": len(proof.steps),
                "initial_size": sum(proof.multiplicities.values()), "final": final,
                "bottoms": len(bottoms)}
    return m


def reverse_replay(F: CnfFormula, proof: RevResProof) -> List[Clause]:
    """Run the proof forward, then undo every step with the opposite rule.

    Returns the clauses recovered for the initial occurrences, in id order.
    """
    ms = initial_multiset(F, proof.multiplicities)
    n0 = ms.next_id - 1
    undo = []
    for st in proof.steps:
        out = _apply_step(ms, st)
        undo.append((st, out))
    # inverse steps: the roles of consumed and produced occurrences swap
    back = {o: o for o in ms.occ}
    for st, out in reversed(undo):
        if isinstance(st, WeakenStep):
            c = apply_resolve(ms, back.pop(out[0]), back.pop(out[1]), st.var)
            back[st.occ] = c
        else:
            a, b = apply_weaken(ms, back.pop(out[0]), st.var)
            back[st.pos] = a
            back[st.neg] = b
    return [ms[back[o]] for o in range(1, n0 + 1)]


# MaxSAT resolution with weakening

class MaxSatStep(NamedTuple):
    pos: int   # occurrence of x v A
    neg: int   # occurrence of not-x v B
    var: int


class MaxResWProof:
    """Steps are MaxSatStep or WeakenStep; the initial multiset is F itself."""

    def __init__(self, steps: Sequence, multiplicities: Optional[Dict[int, int]] = None):
        self.steps = list(steps)
        self.multiplicities = multiplicities


def expand_maxsat_rule(xa: Clause, xb: Clause, var: Optional[int] = None) -> List[Clause]:
    """Output clauses of the MaxSAT rule on x v A and not-x v B.

    Order: A v B, then x v A v b_1..b_j v not-b_{j+1} (j = 0..t-1), then
    not-x v B v a_1..a_j v not-a_{j+1} (j = 0..s-1); a_k, b_k follow canonical
    clause order. Tautological members are dropped (they are never falsified).
    """
    if var is None:
        cands = [l for l in xa if l > 0 and -l in xb]
        if len(cands) != 1:
            raise ProofRejected("premises lack a unique opposite pivot")
        var = cands[0]
    if var not in xa or -var not in xb or -var in xa or var in xb:
        raise ProofRejected("premises lack opposite pivot occurrences")
    A = [l for l in xa if l != var]
    B = [l for l in xb if l != -var]
    if any(-l in B for l in A):
        raise ProofRejected("premises clash outside the pivot")
    out = [Clause(A + B)]
    for j in range(len(B)):
        c = Clause([var] + A + B[:j] + [-B[j]])
        if not c.is_tautology():
            out.append(c)
    for j in range(len(A)):
        c = Clause([-var] + B + A[:j] + [-A[j]])
        if not c.is_tautology():
            out.append(c)
    return out


def check_maxresw(F: CnfFormula, proof: MaxResWProof) -> ProofMetrics:
    mult = proof.multiplicities
    if mult is not None:
        if set(mult) != set(range(1, F.m + 1)) or any(w != 1 for w in mult.values()):
            raise ProofRejected("initial configuration must be exactly F")
    ms = initial_multiset(F, {i: 1 for i in range(1, F.m + 1)})
    conf_size = len(ms)
    width = F.width()
    for k, st in enumerate(proof.steps, 1):
        try:
            if isinstance(st, MaxSatStep):
                for o in (st.pos, st.neg):
                    if o not in ms:
                        raise ProofRejected("dead occurrence id %d" % o)
                if st.pos == st.neg:
                    raise ProofRejected("occurrence used twice")
                outs = expand_maxsat_rule(ms[st.pos], ms[st.neg], st.var)
                ms.remove(st.pos)
                ms.remove(st.neg)
                for c in outs:
                    ms.add(c)
                    width = max(width, c.width)
            elif isinstance(st, WeakenStep):
                for o in apply_weaken(ms, st.occ, st.var):
                    width = max(width, ms[o].width)
            else:
                raise MalformedProof("unknown step %r" % (st,))
        except ProofRejected as e:
            raise ProofRejected("step %d: %s" % (k, e.reason), e.witness)
        conf_size += len(ms)
    if not any(c.is_empty() for c in ms.clauses()):
        raise ProofRejected("⊥ absent from final configuration")
    return ProofMetrics("MaxResW", conf_size, width, steps=len(proof.steps),
                        detail={"configuration_size": conf_size, "final": dict(ms.occ)})


# Nullstellensatz and Sherali-Adams

class NsProof:
    def __init__(self, coeffs: Dict[int, MultilinearPoly], ring: str = "Z", p: Optional[int] = None):
        self.ring = ring
        self.p = p
        self.coeffs = {int(i): q for i, q in coeffs.items() if not q.is_zero()}


def clause_poly(C: Clause, ring="Z", p=None) -> MultilinearPoly:
    return clause_to_term(C).to_poly(ring, p)


def _nonzero_witness(poly: MultilinearPoly, n: int):
    # at the indicator of a minimal monomial only that monomial survives
    m = min(poly.terms, key=len)
    return tuple(1 if v in m else 0 for v in range(1, n + 1))


def _check_indices(F, idx):
    for i in idx:
        if not 1 <= i <= F.m:
            raise MalformedProof("coefficient for nonexistent clause %d" % i)


def check_ns(F: CnfFormula, proof: NsProof) -> ProofMetrics:
    _check_indices(F, proof.coeffs)
    total = MultilinearPoly({}, proof.ring, proof.p)
    size = 0
    degree = 0
    unary = 1
    for i, q in sorted(proof.coeffs.items()):
        if q.ring != proof.ring or q.p != proof.p:
            raise ProofRejected("ring mismatch in coefficient %d" % i)
        C = F.clause(i)
        if C.is_tautology():
            raise ProofRejected("clause %d is tautological" % i)
        cb = clause_poly(C, proof.ring, proof.p)
        prod = q * cb
        total = total + prod
        size += len(q.terms) + len(cb.terms)
        degree = max(degree, q.degree() + C.width)
        if proof.ring == "Z":
            unary += prod.magnitude()
    residual = total - 1
    if not residual.is_zero():
        raise ProofRejected("identity fails", _nonzero_witness(residual, F.variable_count))
    mx = max((q.max_coefficient() for q in proof.coeffs.values()), default=0)
    system = "uNS" if proof.ring == "Z" else "NS"
    return ProofMetrics(system, size, degree, unary_size=unary if proof.ring == "Z" else None,
                        max_coefficient=mx,
                        detail={"coeff_magnitude": sum(q.magnitude() for q in proof.coeffs.values())
                                if proof.ring != "Fp" else None})


class SaProof:
    """GeneralForm: sum p_i C_i-bar = 1 + J. NormalForm: sum J_i C_i-bar = 1 + J_0."""

    def __init__(self, form: str, coeffs=None, junta=None, juntas=None, j0=None, ring="Z"):
        if form not in ("general", "normal"):
            raise MalformedProof("unknown SA form %r" % form)
        self.form = form
        self.ring = ring
        self.coeffs = dict(coeffs or {})
        self.junta = junta if junta is not None else ConicalJunta()
        self.juntas = {int(i): J for i, J in (juntas or {}).items() if len(J)}
        self.j0 = j0 if j0 is not None else ConicalJunta()

    @staticmethod
    def normal(juntas, j0=None):
        return SaProof("normal", juntas=juntas, j0=j0)


def _junta_ok(J: ConicalJunta, what):
    for t, c in J.entries.items():
        if c <= 0:
            raise ProofRejected("negative junta coefficient in %s" % what, (t, c))


def sa_entry_polys(F: CnfFormula, proof: SaProof):
    """(i, term, coeff, gathered expansion of coeff * term * C_i-bar); C_0-bar is -1."""
    out = []
    for i, J in sorted(proof.juntas.items()):
        cbar = clause_to_term(F.clause(i))
        for t, c in J.sorted_entries():
            prod = t * cbar
            poly = prod.to_poly(proof.ring).scale(c) if prod is not None else MultilinearPoly({}, proof.ring)
            out.append((i, t, c, poly))
    for t, c in proof.j0.sorted_entries():
        out.append((0, t, c, (-t.to_poly(proof.ring)).scale(c)))
    return out


def check_sa(F: CnfFormula, proof: SaProof) -> ProofMetrics:
    ring = proof.ring
    if proof.form == "general":
        _check_indices(F, proof.coeffs)
        _junta_ok(proof.junta, "J")
        total = MultilinearPoly({}, ring)
        degree = proof.junta.degree()
        for i, q in proof.coeffs.items():
            C = F.clause(i)
            if C.is_tautology():
                raise ProofRejected("clause %d is tautological" % i)
            total = total + q * clause_poly(C, ring)
            if not q.is_zero():
                degree = max(degree, q.degree() + C.width)
        residual = total - 1 - proof.junta.to_poly(ring)
        if not residual.is_zero():
            raise ProofRejected("identity residual nonzero", _nonzero_witness(residual, F.variable_count))
        size = sum(len(q.terms) for q in proof.coeffs.values()) + len(proof.junta)
        unary = None
        if ring == "Z" and proof.junta.is_integral():
            unary = check_sa(F, normalize_sa(F, proof)).unary_size
        return ProofMetrics("SA", size, degree, unary_size=unary)
    _check_indices(F, proof.juntas)
    for i, J in proof.juntas.items():
        _junta_ok(J, "J_%d" % i)
    _junta_ok(proof.j0, "J_0")
    total = MultilinearPoly({}, ring)
    degree = proof.j0.degree()
    unary = 1
    entries = sa_entry_polys(F, proof)
    for i, t, c, poly in entries:
        total = total + poly
        if i:
            degree = max(degree, t.degree + F.clause(i).width)
        unary += poly.magnitude()
    residual = total - 1
    if not residual.is_zero():
        raise ProofRejected("identity residual nonzero", _nonzero_witness(residual, F.variable_count))
    integral = all(J.is_integral() for J in proof.juntas.values()) and proof.j0.is_integral()
    size = sum(len(J) for J in proof.juntas.values()) + len(proof.j0)
    # unary size counts the junta coefficients; the expanded count (one per signed
    # monomial of every lambda*D*C_i-bar, plus the constant 1) is kept alongside
    coeff_sum = sum(c for _, _, c, _ in entries)
    return ProofMetrics("uSA" if integral else "SA", size, degree,
                        unary_size=int(coeff_sum) if integral else None,
                        max_coefficient=max((c for _, _, c, _ in entries), default=0),
                        detail={"expanded_unary_size": unary if integral else None})


def normalize_sa(F: CnfFormula, proof: SaProof) -> SaProof:
    """GeneralForm -> NormalForm: negative parts of p_i move into J_0."""
    if proof.form == "normal":
        return proof
    juntas = {}
    j0 = ConicalJunta(dict(proof.junta.entries))
    for i, q in sorted(proof.coeffs.items()):
        cbar = clause_to_term(F.clause(i))
        J = ConicalJunta()
        for m, c in q.sorted_terms():
            t = Term(m, ())
            if c > 0:
                J.add(t, c)
            else:
                prod = t * cbar
                if prod is not None:
                    j0.add(prod, -c)
        if len(J):
            juntas[i] = J
    return SaProof("normal", juntas=juntas, j0=j0, ring=proof.ring)


# epsilon-approximate Nullstellensatz

class EpsNsProof:
    def __init__(self, ns: NsProof, eps):
        self.ns = ns
        self.eps = Fraction(eps)
        if not 0 < self.eps < 1:
            raise MalformedProof("eps must lie in (0, 1)")


@dataclass
class EpsReport:
    ok: bool
    certifying: bool
    points: int
    min_residual: Fraction
    max_residual: Fraction
    witness: Optional[tuple] = None

    def __bool__(self):
        return self.ok


def ns_residual(F: CnfFormula, ns: NsProof) -> MultilinearPoly:
    total = MultilinearPoly({}, ns.ring, ns.p)
    for i, q in ns.coeffs.items():
        total = total + q * clause_poly(F.clause(i), ns.ring, ns.p)
    return total


def check_eps_ns(F: CnfFormula, proof: EpsNsProof, bound: int = 24, samples: Optional[int] = None,
                 seed: int = 0) -> EpsReport:
    if proof.ns.ring != "Q":
        raise MalformedProof("eps-NS proofs are over the rationals")
    _check_indices(F, proof.ns.coeffs)
    R = ns_residual(F, proof.ns)
    n = F.variable_count
    eps = proof.eps
    if samples is None:
        if n > bound:
            raise ValueError("%d variables exceed the exhaustive bound %d; request sampling" % (n, bound))
        den = math.lcm(1, *(c.denominator for c in R.terms.values()))
        monos = list(R.terms)
        ints = [int(R.terms[m] * den) for m in monos]
        vals = kernels.term_sums([(m, ()) for m in monos], ints, n)
        lo = int(min(vals))
        hi = int(max(vals))
        ok = abs(hi - den) * eps.denominator <= eps.numerator * den and \
            abs(lo - den) * eps.denominator <= eps.numerator * den
        witness = None
        if not ok:
            bad = lo if abs(lo - den) > abs(hi - den) else hi
            bits = next(b for b in range(1 << n) if int(vals[b]) == bad)
            witness = tuple((bits >> k) & 1 for k in range(n))
        return EpsReport(ok, True, 1 << n, Fraction(lo, den), Fraction(hi, den), witness)
    rng = random.Random(seed)
    lo = hi = None
    witness = None
    for _ in range(samples):
        x = tuple(rng.randint(0, 1) for _ in range(n))
        v = R.evaluate(x)
        lo = v if lo is None else min(lo, v)
        hi = v if hi is None else max(hi, v)
        if abs(v - 1) > eps and witness is None:
            witness = x
    return EpsReport(witness is None, False, samples, Fraction(lo), Fraction(hi), witness)


def compose_eps_ns(F: CnfFormula, proof: EpsNsProof) -> EpsNsProof:
    """Coefficients (2 - P) p_i where P is the residual; the error goes eps -> eps^2."""
    P = ns_residual(F, proof.ns)
    factor = MultilinearPoly.constant(2, "Q") - P
    coeffs = {i: factor * q for i, q in proof.ns.coeffs.items()}
    return EpsNsProof(NsProof(coeffs, "Q"), proof.eps * proof.eps)
