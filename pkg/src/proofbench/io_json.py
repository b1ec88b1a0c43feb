"""JSON formats for polynomials, proofs and formulations, plus atomic file writes.

Coefficients are written as decimal strings, or "num/den" for non-integral
rationals, so no precision is lost.
"""
from __future__ import annotations

import json
import os
import tempfile
from fractions import Fraction

from .checkers import (MalformedProof, MaxResWProof, MaxSatStep, NsProof, ResLine, ResolutionProof,
                       ResolveStep, RevResProof, SaProof, WeakenStep, EpsNsProof)
from .cnf import Clause
from .formulations import Formulation
from .poly import ConicalJunta, MultilinearPoly, Term


def coeff_to_str(c) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else "%d/%d" % (c.numerator, c.denominator)


def coeff_from_str(s, ring="Z"):
    f = Fraction(str(s))
    if ring == "Q":
        return f
    if f.denominator != 1:
        raise MalformedProof("non-integral coefficient %s over %s" % (s, ring))
    return int(f)


def poly_to_json(q: MultilinearPoly) -> dict:
    out = {"ring": q.ring, "terms": [{"vars": sorted(m), "coeff": coeff_to_str(c)} for m, c in q.sorted_terms()]}
    if q.p is not None:
        out["p"] = q.p
    return out


def poly_from_json(obj) -> MultilinearPoly:
    ring = obj.get("ring", "Z")
    p = obj.get("p")
    terms = {}
    for t in obj["terms"]:
        m = frozenset(int(v) for v in t["vars"])
        terms[m] = terms.get(m, 0) + coeff_from_str(t["coeff"], ring)
    return MultilinearPoly(terms, ring, p)


def term_to_json(t: Term) -> dict:
    return {"pos": sorted(t.pos), "neg": sorted(t.neg)}


def junta_to_json(J: ConicalJunta) -> list:
    return [dict(term_to_json(t), coeff=coeff_to_str(c)) for t, c in J.sorted_entries()]


def junta_from_json(entries, ring="Z") -> ConicalJunta:
    J = ConicalJunta()
    for e in entries:
        J.add(Term(e.get("pos", ()), e.get("neg", ())), coeff_from_str(e["coeff"], ring))
    return J


def _step_to_json(st):
    if isinstance(st, WeakenStep):
        return {"op": "weaken", "occ": st.occ, "var": st.var}
    if isinstance(st, ResolveStep):
        return {"op": "resolve", "pos": st.pos, "neg": st.neg, "var": st.var}
    if isinstance(st, MaxSatStep):
        return {"op": "maxsat", "pos": st.pos, "neg": st.neg, "var": st.var}
    raise MalformedProof("unknown step %r" % (st,))


def _step_from_json(o):
    op = o.get("op")
    if op == "weaken":
        return WeakenStep(int(o["occ"]), int(o["var"]))
    if op == "resolve":
        return ResolveStep(int(o["pos"]), int(o["neg"]), int(o["var"]))
    if op == "maxsat":
        return MaxSatStep(int(o["pos"]), int(o["neg"]), int(o["var"]))
    raise MalformedProof("unknown step op %r" % (op,))


def proof_to_json(proof) -> dict:
    if isinstance(proof, ResolutionProof):
        return {"system": "res", "lines": [{"rule": ln.rule, "clause": list(ln.clause.lits),
                                            "refs": list(ln.refs), "arg": ln.arg} for ln in proof.lines]}
    if isinstance(proof, RevResProof):
        return {"system": "revres", "kind": proof.kind,
                "multiplicities": {str(i): w for i, w in sorted(proof.multiplicities.items())},
                "steps": [_step_to_json(s) for s in proof.steps]}
    if isinstance(proof, MaxResWProof):
        return {"system": "maxresw", "steps": [_step_to_json(s) for s in proof.steps]}
    if isinstance(proof, NsProof):
        out = {"system": "ns", "ring": proof.ring,
               "coeffs": {str(i): poly_to_json(q) for i, q in sorted(proof.coeffs.items())}}
        if proof.p is not None:
            out["p"] = proof.p
        return out
    if isinstance(proof, SaProof):
        if proof.form == "normal":
            return {"system": "sa", "form": "normal", "ring": proof.ring,
                    "juntas": {str(i): junta_to_json(J) for i, J in sorted(proof.juntas.items())},
                    "j0": junta_to_json(proof.j0)}
        return {"system": "sa", "form": "general", "ring": proof.ring,
                "coeffs": {str(i): poly_to_json(q) for i, q in sorted(proof.coeffs.items())},
                "junta": junta_to_json(proof.junta)}
    if isinstance(proof, EpsNsProof):
        return {"system": "epsns", "ns": proof_to_json(proof.ns), "eps": coeff_to_str(proof.eps)}
    raise TypeError("cannot serialize %r" % (proof,))


def proof_from_json(obj):
    try:
        system = obj["system"]
        if system == "res":
            return ResolutionProof([ResLine(l["rule"], Clause(l["clause"]), tuple(l.get("refs", ())),
                                            int(l.get("arg", 0))) for l in obj["lines"]])
        if system == "revres":
            return RevResProof({int(i): int(w) for i, w in obj["multiplicities"].items()},
                               [_step_from_json(s) for s in obj["steps"]], obj.get("kind", "plain"))
        if system == "maxresw":
            return MaxResWProof([_step_from_json(s) for s in obj["steps"]])
        if system == "ns":
            ring = obj.get("ring", "Z")
            return NsProof({int(i): poly_from_json(q) for i, q in obj["coeffs"].items()}, ring, obj.get("p"))
        if system == "sa":
            ring = obj.get("ring", "Z")
            if obj.get("form", "normal") == "normal":
                return SaProof("normal", juntas={int(i): junta_from_json(J, ring) for i, J in obj["juntas"].items()},
                               j0=junta_from_json(obj.get("j0", []), ring), ring=ring)
            return SaProof("general", coeffs={int(i): poly_from_json(q) for i, q in obj["coeffs"].items()},
                           junta=junta_from_json(obj.get("junta", []), ring), ring=ring)
        if system == "epsns":
            return EpsNsProof(proof_from_json(obj["ns"]), Fraction(obj["eps"]))
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, MalformedProof):
            raise
        raise MalformedProof("bad proof file: %s" % e)
    raise MalformedProof("unknown proof system %r" % (obj.get("system"),))


def formulation_to_json(phi: Formulation) -> dict:
    return phi.to_json()


def formulation_from_json(obj) -> Formulation:
    return Formulation.from_json(obj)


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def write_atomic(path, text: str):
    """Write via a temporary file in the same directory, then rename."""
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path, obj):
    write_atomic(path, dumps(obj))


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
