"""Translations between line formulations (EoL, SoL) and unary algebraic proofs.

Formulation -> proof: every node v gets a status tree S_v with leaves in
{-1, 0, +1} (sink/source bookkeeping of the pointer graph); the statuses sum to
a constant on every input, and each nonzero leaf factors through the clause
returned by g_v.

Proof -> formulation: the monomials of the expanded proof become signed nodes;
equal monomials of opposite sign are joined across groups (outer matching) and
cancelling monomials inside a group are joined when its clause is satisfied
(inner matching).
"""
from __future__ import annotations

from collections import defaultdict

from ..checkers import NsProof, ProofRejected, SaProof, check_ns, check_sa, clause_poly, sa_entry_polys
from ..cnf import CnfFormula
from ..formulations import Formulation, verify_formulation
from .. import kernels
from .. import trees as T
from ..poly import ConicalJunta, MultilinearPoly, Term
from .common import TranslationError

LAW_BOUND = 20   # exhaustive status-law check up to this many variables


def run_tree(tree, read):
    node = tree
    while isinstance(node, T.Query):
        node = node.one if read(node.var) else node.zero
    return node.label


def _guard(F, phi, guard, samples=256):
    if not guard:
        return
    mode = "exhaustive" if F.variable_count <= 12 else "sample"
    rep = verify_formulation(F, phi, mode=mode, samples=samples)
    if not rep.passed:
        raise TranslationError("formulation fails verification", rep.failures[0])


def status_trees(F: CnfFormula, phi: Formulation, sol_signs=False):
    """{v: tree} with leaf labels (status, clause index or None).

    EoL signs: -1 for sources other than node 1, +1 for sinks and for node 1
    without an out-edge. sol_signs swaps the two.
    """
    if phi.target not in ("EoL", "SoL"):
        raise TranslationError("status trees need a line formulation, got %s" % phi.target)
    L = phi.L
    flip = -1 if sol_signs else 1
    out = {}
    for v in range(1, L + 1):
        def proc(read, v=v):
            u = run_tree(phi.tree("s", v), read)
            has_out = u != 1 and run_tree(phi.tree("p", u), read) == v
            has_in = False
            if v != 1:
                w = run_tree(phi.tree("p", v), read)
                has_in = run_tree(phi.tree("s", w), read) == v
            if v == 1:
                st = 0 if has_out else 1
            elif has_in and not has_out:
                st = 1
            elif has_out and not has_in:
                st = -1
            else:
                st = 0
            if st == 0:
                return (0, None)
            g = phi.tree("g", v)
            if g is None:
                raise TranslationError("node %d can be a solution but has no g tree" % v)
            return (st * flip, run_tree(g, read))
        out[v] = T.from_procedure(proc)
    return out


def _factored_leaves(F, trees):
    """[(v, status, clause index, path term, D')] over nonzero leaves."""
    rows = []
    for v, tree in trees.items():
        for rho, (st, i) in T.paths(tree):
            if st == 0:
                continue
            if not isinstance(i, int) or not 1 <= i <= F.m:
                raise TranslationError("g tree of node %d returned %r" % (v, i), rho)
            C = F.clause(i)
            for l in C:
                if rho.get(abs(l)) != (0 if l > 0 else 1):
                    raise TranslationError("clause %d not falsified along the path of node %d" % (i, v), rho)
            cv = C.variables()
            rest = {x: b for x, b in rho.items() if x not in cv}
            rows.append((v, st, i, Term.from_assignment(rho), Term.from_assignment(rest)))
    return rows


def check_status_law(F, trees, total, bound=LAW_BOUND):
    """Sum of statuses equals `total` at every point (exhaustive up to `bound` vars)."""
    n = F.variable_count
    if n > bound:
        return None
    terms, coeffs = [], []
    for tree in trees.values():
        for rho, (st, _) in T.paths(tree):
            if st:
                t = Term.from_assignment(rho)
                terms.append((t.pos, t.neg))
                coeffs.append(st)
    vals = kernels.term_sums(terms, coeffs, n)
    bad = [b for b in range(1 << n) if int(vals[b]) != total]
    if bad:
        x = tuple((bad[0] >> k) & 1 for k in range(n))
        raise TranslationError("status law fails: sum is %d instead of %d" % (int(vals[bad[0]]), total), x)
    return True


def eol_to_uns(F: CnfFormula, phi: Formulation, d=None, guard=True) -> NsProof:
    if phi.target != "EoL":
        raise TranslationError("expected an EoL formulation")
    _guard(F, phi, guard)
    d = phi.depth() if d is None else d
    trees = status_trees(F, phi)
    check_status_law(F, trees, 1)
    coeffs = defaultdict(lambda: MultilinearPoly({}))
    for v, st, i, _, rest in _factored_leaves(F, trees):
        coeffs[i] = coeffs[i] + rest.to_poly().scale(st)
    proof = NsProof(dict(coeffs), "Z")
    try:
        m = check_ns(F, proof)
    except ProofRejected as e:
        raise TranslationError("internal: produced NS proof rejected: %s" % e.reason, e.witness)
    assert m.width_or_degree <= 5 * max(d, 1), (m.width_or_degree, d)
    return proof


def sol_to_usa(F: CnfFormula, phi: Formulation, d=None, guard=True) -> SaProof:
    if phi.target != "SoL":
        raise TranslationError("expected a SoL formulation")
    _guard(F, phi, guard)
    d = phi.depth() if d is None else d
    trees = status_trees(F, phi, sol_signs=True)
    check_status_law(F, trees, -1)
    juntas = defaultdict(ConicalJunta)
    j0 = ConicalJunta()
    for v, st, i, term, rest in _factored_leaves(F, trees):
        if st < 0:
            juntas[i].add(rest, 1)
        else:
            j0.add(term, 1)
    proof = SaProof("normal", juntas=dict(juntas), j0=j0)
    try:
        m = check_sa(F, proof)
    except ProofRejected as e:
        raise TranslationError("internal: produced SA proof rejected: %s" % e.reason, e.witness)
    assert m.width_or_degree <= 5 * max(d, 1), (m.width_or_degree, d)
    return proof


# proof -> formulation

class _Group:
    """Signed monomial nodes sharing one inner matching.

    inner_vars: variables fixed before inner matching; enabled(rho) says
    whether the inner matching is switched on; surplus nodes are allowed only
    when allow_surplus is set.
    """

    def __init__(self, label, poly, inner_vars, enabled, allow_surplus):
        self.label = label
        self.poly = poly
        self.inner_vars = sorted(inner_vars)
        self.enabled = enabled
        self.allow_surplus = allow_surplus
        self.nodes = []


def _signed_line(target, groups, meta):
    # node 1 is the distinguished "+" constant node
    sign = {1: 1}
    mono = {1: frozenset()}
    owner = {1: None}
    L = 1
    for g in groups:
        for m, c in g.poly.sorted_terms():
            for _ in range(abs(c)):
                L += 1
                sign[L] = 1 if c > 0 else -1
                mono[L] = m
                owner[L] = g
                g.nodes.append(L)
    # outer matching: k-th "+" with k-th "-" of each monomial
    plus, minus = defaultdict(list), defaultdict(list)
    for v in range(1, L + 1):
        (plus if sign[v] > 0 else minus)[mono[v]].append(v)
    outer = {}
    for m in set(plus) | set(minus):
        if len(plus[m]) != len(minus[m]):
            raise TranslationError("internal: monomial %r does not cancel across groups" % (sorted(m),))
        for a, b in zip(plus[m], minus[m]):
            outer[a], outer[b] = b, a

    cache = {}

    def inner(g, rho_key):
        key = (id(g), rho_key)
        if key not in cache:
            rho = dict(zip(g.inner_vars, rho_key))
            pairs = {}
            if g.enabled(rho):
                cls = defaultdict(lambda: ([], []))
                for v in g.nodes:
                    m = mono[v]
                    if all(rho[x] for x in m if x in rho):
                        rest = frozenset(x for x in m if x not in rho)
                        cls[rest][0 if sign[v] < 0 else 1].append(v)
                for rest, (neg, pos) in cls.items():
                    if len(neg) != len(pos) and not g.allow_surplus:
                        raise TranslationError("internal: restricted monomials do not cancel", (g.label, rho))
                    for a, b in zip(neg, pos):
                        pairs[a], pairs[b] = b, a
            cache[key] = pairs
        return cache[key]

    def live(read, v):
        return all(read(x) for x in sorted(mono[v]))

    def outer_ptr(v):
        def proc(read):
            return outer[v] if live(read, v) else v
        return T.from_procedure(proc)

    def inner_ptr(v):
        g = owner[v]

        def proc(read):
            key = tuple(read(x) for x in g.inner_vars)
            u = inner(g, key).get(v)
            if u is None or not live(read, v):
                return v
            return u
        return T.from_procedure(proc)

    trees = {("s", 1): T.Leaf(outer[1])}
    for v in range(2, L + 1):
        if sign[v] > 0:
            trees[("s", v)] = outer_ptr(v)
            trees[("p", v)] = inner_ptr(v)
        else:
            trees[("p", v)] = outer_ptr(v)
            trees[("s", v)] = inner_ptr(v)
        if owner[v].label is not None:
            trees[("g", v)] = T.Leaf(owner[v].label)
    meta = dict(meta)
    meta["nodes"] = L
    return Formulation(target, L, trees, meta)


def uns_to_eol(F: CnfFormula, proof: NsProof) -> Formulation:
    if proof.ring != "Z":
        raise TranslationError("unary NS proofs are over the integers")
    try:
        m = check_ns(F, proof)
    except ProofRejected as e:
        raise TranslationError("input proof rejected: %s" % e.reason, e.witness)
    groups = []
    bound = 0
    for i, q in sorted(proof.coeffs.items()):
        C = F.clause(i)
        E = -(q * clause_poly(C))
        if E.is_zero():
            continue
        lits = dict((abs(l), l) for l in C)
        # inner matching is on when C_i is satisfied by the restriction
        enabled = lambda rho, lits=lits: any((rho[x] == 1) == (l > 0) for x, l in lits.items())
        groups.append(_Group(i, E, lits, enabled, False))
        bound = max(bound, C.width + q.degree())
    phi = _signed_line("EoL", groups, {"depth_bound": bound, "d": m.width_or_degree})
    if phi.L != m.unary_size:
        raise TranslationError("internal: node count %d differs from unary size %d" % (phi.L, m.unary_size))
    assert phi.depth() <= bound
    return phi


def usa_to_sol(F: CnfFormula, proof: SaProof) -> Formulation:
    if proof.form != "normal":
        raise TranslationError("expected a NormalForm SA proof (run normalize_sa first)")
    try:
        m = check_sa(F, proof)
    except ProofRejected as e:
        raise TranslationError("input proof rejected: %s" % e.reason, e.witness)
    if m.unary_size is None:
        raise TranslationError("unary SA proofs need integer junta coefficients")
    groups = []
    bound = 0
    for i, t, c, poly in sa_entry_polys(F, proof):
        if poly.is_zero():
            continue
        vs = set(t.variables())
        if i:
            vs |= F.clause(i).variables()
        groups.append(_Group(i or None, -poly, vs, lambda rho: True, True))
        bound = max(bound, len(vs))
    phi = _signed_line("SoL", groups, {"depth_bound": bound, "d": m.width_or_degree})
    if phi.L != m.detail["expanded_unary_size"]:
        raise TranslationError("internal: node count %d differs from expanded unary size %d"
                               % (phi.L, m.detail["expanded_unary_size"]))
    assert phi.depth() <= bound
    return phi
