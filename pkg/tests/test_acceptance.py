"""One test per acceptance criterion; each prints a PASS/FAIL line."""
import os
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from proofbench import kernels
from proofbench.checkers import (EpsNsProof, MalformedProof, NsProof, ProofRejected, check_eps_ns,
                                 check_maxresw, check_ns, check_resolution, check_revres, check_sa,
                                 compose_eps_ns, expand_maxsat_rule, replay_revres, RevResProof, SaProof)
from proofbench.cli import default_spec, n_for_lambda, run_pipeline
from proofbench.cnf import Clause, CnfFormula
from proofbench.formulations import Formulation, identity_formulation, verify_formulation
from proofbench.mutate import KINDS, mutants
from proofbench.poly import ONE, ConicalJunta, DesignFunctional, MultilinearPoly, Term, combine_designs, verify_design
from proofbench.suite import (random_contradiction, random_line_formulation, random_maxresw_proof,
                              random_revres_proof, random_revres_walk)
from proofbench.translators import (WIDTH_CONSTANT, check_status_law, eol_to_uns, maxresw_to_revres,
                                    revres_to_res, revres_to_usa, revrest_to_uns, sol_to_usa, status_trees,
                                    sopl_formulation_to_revres, uns_to_eol, usa_to_sol)
from proofbench.trees import Leaf, Query
from proofbench.zoo import Solution, brute_solutions, encode_cnf, or_to_sopl

import oracles

X = CnfFormula(1, [Clause([1]), Clause([-1])])


@pytest.fixture
def report(capsys):
    def emit(name, ok, detail=""):
        with capsys.disabled():
            print("\n[%s] %s %s" % ("PASS" if ok else "FAIL", name, detail))
        assert ok, detail
    return emit


def two_node(target):
    trees = {("s", 1): Leaf(2), ("p", 2): Leaf(1), ("s", 2): Leaf(2), ("g", 2): Query(1, Leaf(1), Leaf(2))}
    return Formulation(target, 2, trees)


def eol_suite():
    """The two-node formulation plus 24 random verified ones (at most 10 variables)."""
    out = [(X, two_node("EoL"))]
    rng = random.Random(2024)
    while len(out) < 25:
        F, phi = random_line_formulation(rng, "EoL", n=rng.randint(2, 10), L=rng.randint(2, 6))
        if verify_formulation(F, phi):
            out.append((F, phi))
    return out


def test_c1_grid_pipeline(report):
    t0 = time.perf_counter()
    rows = []
    ok = True
    for problem in ("SoPL", "EoPL"):
        for lam in (1, 2):
            n = n_for_lambda(problem, lam)
            F, _, _ = encode_cnf(problem, n)
            pf = sopl_formulation_to_revres(F, identity_formulation(problem, n))
            m = check_revres(F, pf)
            good = m.width_or_degree <= WIDTH_CONSTANT * 4 * lam and \
                (pf.kind == "terminal") == (problem == "EoPL")
            ok &= good
            rows.append("%s/n=%d:w=%d" % (problem, n, m.width_or_degree))
    secs = time.perf_counter() - t0
    report("C1 grid pipeline", ok and secs < 60, "%s c=%d %.1fs" % (" ".join(rows), WIDTH_CONSTANT, secs))


def test_c2_eol_to_uns(report):
    bad = []
    for k, (F, phi) in enumerate(eol_suite()):
        d = max(phi.depth(), 1)
        ns = eol_to_uns(F, phi)
        m = check_ns(F, ns)
        if m.width_or_degree > 5 * d:
            bad.append((k, "degree"))
        if not check_status_law(F, status_trees(F, phi), 1):
            bad.append((k, "status law"))
    report("C2 EoL to uNS", not bad, "25 formulations, failures=%s" % bad)


def test_c3_round_trips(report):
    bad = []
    cases = [(F, eol_to_uns(F, phi)) for F, phi in eol_suite()]
    # hand-written: a coefficient that only matters off the clause's support, and path clauses
    x1 = frozenset([1])
    cases.append((X, NsProof({1: MultilinearPoly({ONE: 1, x1: 1}), 2: MultilinearPoly({ONE: 1})})))
    P = CnfFormula(2, [Clause([1, 2]), Clause([1, -2]), Clause([-1])])
    cases.append((P, NsProof({i: MultilinearPoly({ONE: 1}) for i in (1, 2, 3)})))
    for k, (F, ns) in enumerate(cases):
        phi = uns_to_eol(F, ns)
        if phi.L != check_ns(F, ns).unary_size or not verify_formulation(F, phi):
            bad.append(("uns", k))
    sa_cases = [(X, SaProof.normal({1: ConicalJunta({Term(): 1}), 2: ConicalJunta({Term(): 1})}))]
    rng = random.Random(77)
    while len(sa_cases) < 25:
        F, phi = random_line_formulation(rng, "SoL", n=rng.randint(2, 10), L=rng.randint(2, 6))
        if verify_formulation(F, phi):
            sa_cases.append((F, sol_to_usa(F, phi)))
    for k, (F, sa) in enumerate(sa_cases):
        phi = usa_to_sol(F, sa)
        # nodes are counted per signed monomial of the expanded juntas
        if phi.L != check_sa(F, sa).detail["expanded_unary_size"] or not verify_formulation(F, phi):
            bad.append(("usa", k))
    report("C3 round trips", not bad, "%d uNS + %d uSA proofs, failures=%s" % (len(cases), len(sa_cases), bad))


def test_c4_conservation(report):
    rng = random.Random(404)
    transitions = 0
    bad = 0
    while transitions < 1000:
        F, _ = random_contradiction(rng, n=rng.randint(2, 16), max_depth=5, extra=3)
        mult, steps = random_revres_walk(rng, F, 100)
        confs = list(replay_revres(F, RevResProof(mult, steps)))
        base = kernels.falsified_counts(confs[0], F.variable_count)
        for c in confs[1:]:
            transitions += 1
            if not np.array_equal(kernels.falsified_counts(c, F.variable_count), base):
                bad += 1
    rules = 0
    for _ in range(300):
        n = rng.randint(2, 8)
        v = rng.randint(1, n)
        rest = [u for u in range(1, n + 1) if u != v]
        A = [u if rng.random() < 0.5 else -u for u in rng.sample(rest, rng.randint(0, len(rest)))]
        B = [u if rng.random() < 0.5 else -u for u in rng.sample(rest, rng.randint(0, len(rest)))]
        if any(-l in B for l in A):
            continue
        pos, neg = Clause(A + [v]), Clause(B + [-v])
        outs = expand_maxsat_rule(pos, neg, v)
        involved = sorted(pos.variables() | neg.variables())
        ren = {u: k for k, u in enumerate(involved, 1)}

        def sub(C):
            return Clause([ren[abs(l)] * (1 if l > 0 else -1) for l in C])
        for x in oracles.points(len(involved)):
            before = oracles.falsified_count([sub(pos).lits, sub(neg).lits], x)
            after = oracles.falsified_count([sub(c).lits for c in outs], x)
            bad += before != after
        rules += 1
    report("C4 conservation", bad == 0, "%d transitions, %d MaxSAT rule instances, violations=%d"
           % (transitions, rules, bad))


def test_c5_simulations(report):
    rng = random.Random(55)
    bad = []
    count = 0
    for k in range(60):
        F, pf = random_revres_proof(rng, n=rng.randint(2, 8), terminal=k % 2 == 1)
        m = check_revres(F, pf)
        try:
            check_resolution(F, revres_to_res(F, pf))
            sa = check_sa(F, revres_to_usa(F, pf))
            if sa.unary_size > m.detail["configuration_size"]:
                bad.append((k, "unary size"))
            if pf.kind == "terminal":
                check_ns(F, revrest_to_uns(F, pf))
            F2, mp = random_maxresw_proof(rng)
            check_maxresw(F2, mp)
            check_revres(F2, maxresw_to_revres(F2, mp))
        except (ProofRejected, MalformedProof) as e:
            bad.append((k, str(e)))
        count += 1
    report("C5 simulations", not bad, "%d proofs, failures=%s" % (count, bad))


def test_c6_or_generator(report):
    n = 8
    rng = random.Random(6)
    bad = 0
    runs = 0
    for bits in range(1 << (n - 1)):
        x = [(bits >> k) & 1 for k in range(n - 1)]
        for _ in range(50):
            perms = [rng.sample(range(1, n + 1), n) for _ in range(n - 1)]
            inst, u = or_to_sopl(x, perms)
            sols = brute_solutions(inst)
            runs += 1
            if len(sols) != 1 + sum(x) or any(s.rule != 2 or s.payload[0] != n for s in sols) \
                    or Solution("SoPL", 2, u) not in sols:
                bad += 1
    report("C6 OR generator", bad == 0, "%d instances, violations=%d" % (runs, bad))


def test_c7_eps_ns(report):
    rng = random.Random(7)
    F, _ = random_contradiction(rng, n=16, max_depth=6, extra=0)
    # path clauses: exactly one is falsified at each point, so the residual there is its coefficient
    coeffs = {}
    for i in range(1, F.m + 1):
        c = Fraction(rng.randint(1, 3), 2) if i > 2 else Fraction(1 + 2 * (i - 1), 2)
        coeffs[i] = MultilinearPoly({ONE: c}, "Q")
    pf = EpsNsProof(NsProof(coeffs, "Q"), Fraction(1, 2))
    first = check_eps_ns(F, pf)
    comp = compose_eps_ns(F, pf)
    second = check_eps_ns(F, comp)
    tight = check_eps_ns(F, EpsNsProof(pf.ns, Fraction(1, 4)))
    ok = bool(first) and not tight and bool(second) and comp.eps == Fraction(1, 4)
    report("C7 eps-NS reduction", ok, "n=16 residual [%s, %s] -> [%s, %s]"
           % (first.min_residual, first.max_residual, second.min_residual, second.max_residual))


def test_c8_designs(report):
    F = CnfFormula(2, [Clause([1]), Clause([-1, 2]), Clause([-1, -2])])
    G = CnfFormula(4, [Clause([3]), Clause([-3, 4]), Clause([-3, -4])])

    def designs(H, variables):
        cons = oracles.design_constraints([c.lits for c in H.clauses], variables, 2)
        return oracles.design_values(variables, 2, (-1, 0, 1), cons)
    ds_f, ds_g = designs(F, [1, 2]), designs(G, [3, 4])
    both = CnfFormula(4, list(F.clauses) + list(G.clauses))
    bad = 0
    for a in ds_f:
        for b in ds_g:
            Phi = combine_designs(DesignFunctional(2, a), DesignFunctional(2, b))
            bad += not verify_design(Phi, both, 2)
    ok = ds_f and ds_g and bad == 0
    report("C8 design combination", ok, "%d x %d oracle designs, failures=%d" % (len(ds_f), len(ds_g), bad))


def test_c9_mutation(report):
    rng = random.Random(9)
    total = caught = 0
    kinds = set()
    for k in range(40):
        terminal = k % 2 == 1
        F, pf = random_revres_proof(rng, terminal=terminal)
        objs = [(pf, check_revres), (revres_to_res(F, pf), check_resolution), (revres_to_usa(F, pf), check_sa)]
        if terminal:
            objs.append((revrest_to_uns(F, pf), check_ns))
        F2, mp = random_maxresw_proof(rng)
        objs = [(F, o, c) for o, c in objs] + [(F2, mp, check_maxresw)]
        for H, obj, check in objs:
            for kind, bad in mutants(H, obj, rng, count=5):
                kinds.add(kind)
                total += 1
                try:
                    check(H, bad)
                except (ProofRejected, MalformedProof):
                    caught += 1
    ok = total > 0 and caught == total and kinds == set(KINDS)
    report("C9 mutation rejection", ok, "%d/%d mutants rejected" % (caught, total))


def test_c10_determinism(report, tmp_path):
    def snapshot(d):
        out = {}
        for root, _, files in os.walk(d):
            for f in files:
                p = os.path.join(root, f)
                with open(p, "rb") as fh:
                    out[os.path.relpath(p, d)] = fh.read()
        return out
    same = True
    files = 0
    for problem in ("SoPL", "EoPL"):
        for lam in (1, 2):
            spec = default_spec(problem, n_for_lambda(problem, lam), seed=11)
            snaps = []
            for k in range(2):
                d = tmp_path / ("%s-%d-%d" % (problem, lam, k))
                run_pipeline(spec, str(d), timing=False)
                snaps.append(snapshot(d))
            same &= snaps[0] == snaps[1]
            files += len(snaps[0])
    report("C10 determinism", same, "%d artifacts compared byte for byte" % files)
