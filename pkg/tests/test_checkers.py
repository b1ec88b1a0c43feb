import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from proofbench.checkers import (Axiom, EpsNsProof, MalformedProof, MaxResWProof, MaxSatStep, NsProof,
                                 ProofRejected, Resolve, ResolutionProof, ResolveStep, RevResProof,
                                 SaProof, Weaken, WeakenStep, check_eps_ns, check_maxresw, check_ns,
                                 check_resolution, check_revres, check_sa, compose_eps_ns,
                                 expand_maxsat_rule, normalize_sa, replay_revres, reverse_replay)
from proofbench.cnf import EMPTY, Clause, CnfFormula
from proofbench.poly import ONE, ConicalJunta, MultilinearPoly, Term
from proofbench.suite import random_contradiction, random_revres_proof, random_revres_walk

import oracles

X = CnfFormula(1, [Clause([1]), Clause([-1])])


def poly(d, ring="Z"):
    return MultilinearPoly(d, ring)


# resolution

def test_resolution_trivial():
    pf = ResolutionProof([Axiom(1, Clause([1])), Axiom(2, Clause([-1])), Resolve(1, 2, 1, EMPTY)])
    m = check_resolution(X, pf)
    assert (m.size, m.width_or_degree) == (3, 1)


def test_resolution_missing_bottom():
    pf = ResolutionProof([Axiom(1, Clause([1])), Axiom(2, Clause([-1]))])
    with pytest.raises(ProofRejected, match="⊥ absent"):
        check_resolution(X, pf)


@pytest.mark.parametrize("lines", [
    [Axiom(1, Clause([-1]))],
    [Axiom(1, Clause([1])), Weaken(1, 2, Clause([1, 3]))],
    [Axiom(1, Clause([1])), Axiom(2, Clause([-1])), Resolve(2, 1, 1, EMPTY)],
    [Axiom(1, Clause([1])), Resolve(1, 3, 1, EMPTY)],
])
def test_resolution_bad_lines(lines):
    with pytest.raises(ProofRejected):
        check_resolution(CnfFormula(3, X.clauses), ResolutionProof(lines))


# reversible resolution

def test_revres_trivial():
    pf = RevResProof({1: 1, 2: 1}, [ResolveStep(1, 2, 1)])
    m = check_revres(X, pf)
    assert m.size == 3 and m.detail["configuration_size"] == 3
    confs = list(replay_revres(X, pf))
    assert confs == [[Clause([1]), Clause([-1])], [EMPTY]]


def test_revres_weaken_on_present_var():
    with pytest.raises(ProofRejected, match="pivot occurs in clause"):
        check_revres(X, RevResProof({1: 1, 2: 1}, [WeakenStep(1, 1)]))


def test_revres_resolution_consumes():
    # the premises are gone after use
    with pytest.raises(ProofRejected, match="dead occurrence"):
        check_revres(X, RevResProof({1: 1, 2: 1}, [ResolveStep(1, 2, 1), ResolveStep(1, 2, 1)]))


def test_revres_terminal():
    F = CnfFormula(2, [Clause([1]), Clause([-1])])
    # weaken (x1) to (x1 v x2), (x1 v -x2); resolve one with ... keep a weakening around
    pf = RevResProof({1: 2, 2: 1}, [ResolveStep(1, 3, 1), WeakenStep(2, 2)])
    assert check_revres(F, RevResProof(pf.multiplicities, pf.steps, "terminal")).system == "RevResT"
    bad = RevResProof({1: 1, 2: 1}, [WeakenStep(1, 2), ResolveStep(3, 2, 1)], "plain")
    with pytest.raises(ProofRejected):
        check_revres(F, bad)   # (x1 v x2) and (-x1) differ outside the pivot


def test_revres_terminal_violation():
    F = CnfFormula(3, [Clause([1]), Clause([-1]), Clause([2, 3]), Clause([2, -3])])
    steps = [ResolveStep(1, 2, 1), ResolveStep(3, 4, 3)]
    # (x2) is left over and is not a weakening of any clause of F
    assert check_revres(F, RevResProof({1: 1, 2: 1, 3: 1, 4: 1}, steps))
    with pytest.raises(ProofRejected, match="terminal"):
        check_revres(F, RevResProof({1: 1, 2: 1, 3: 1, 4: 1}, steps, "terminal"))


def _as_oracle_steps(steps):
    return [("w", s.occ, s.var) if isinstance(s, WeakenStep) else ("r", s.pos, s.neg, s.var) for s in steps]


def test_revres_agrees_with_oracle_on_random_proofs():
    rng = random.Random(11)
    for _ in range(60):
        F, pf = random_revres_proof(rng)
        cls = [c.lits for c in F.clauses]
        assert oracles.revres_accepts(cls, pf.multiplicities, _as_oracle_steps(pf.steps)) is not None
        check_revres(F, pf)
        # random single corruption: both readings must agree
        steps = list(pf.steps)
        k = rng.randrange(len(steps))
        s = steps[k]
        if isinstance(s, WeakenStep):
            steps[k] = WeakenStep(s.occ, rng.randint(1, F.variable_count))
        else:
            steps[k] = ResolveStep(s.neg, s.pos, s.var) if rng.random() < 0.5 else \
                ResolveStep(s.pos, s.neg, rng.randint(1, F.variable_count))
        want = oracles.revres_accepts(cls, pf.multiplicities, _as_oracle_steps(steps))
        try:
            check_revres(F, RevResProof(pf.multiplicities, steps))
            got = True
        except ProofRejected:
            got = False
        assert got == (want is not None)


def test_reverse_replay_restores_initial():
    rng = random.Random(5)
    for _ in range(30):
        F, pf = random_revres_proof(rng)
        init = [F.clause(i) for i in sorted(pf.multiplicities) for _ in range(pf.multiplicities[i])]
        assert reverse_replay(F, pf) == init


def test_walk_conserves_falsified_count():
    rng = random.Random(3)
    for _ in range(10):
        F, _ = random_contradiction(rng, n=5)
        mult, steps = random_revres_walk(rng, F, 20)
        confs = list(replay_revres(F, RevResProof(mult, steps)))
        for x in oracles.points(5):
            counts = {oracles.falsified_count([c.lits for c in conf], x) for conf in confs}
            assert len(counts) == 1


# MaxSAT resolution

def test_maxsat_rule_example():
    out = expand_maxsat_rule(Clause([1, 2]), Clause([-1, 3]), 1)
    assert set(out) == {Clause([2, 3]), Clause([1, 2, -3]), Clause([-1, 3, -2])}
    assert out[0] == Clause([2, 3])
    assert expand_maxsat_rule(Clause([1]), Clause([-1]), 1) == [EMPTY]


def test_maxsat_rule_rejects_clash():
    with pytest.raises(ProofRejected):
        expand_maxsat_rule(Clause([1, 2]), Clause([-1, -2]), 1)


lits5 = st.integers(2, 6).flatmap(lambda v: st.sampled_from([v, -v]))


@settings(max_examples=100, deadline=None)
@given(st.frozensets(lits5, max_size=3), st.frozensets(lits5, max_size=3))
def test_maxsat_rule_conserves(A, B):
    if any(-l in A for l in A) or any(-l in B for l in B) or any(-l in B for l in A):
        return
    xa, xb = Clause(set(A) | {1}), Clause(set(B) | {-1})
    outs = expand_maxsat_rule(xa, xb, 1)
    for x in oracles.points(6):
        assert oracles.falsified_count([xa.lits, xb.lits], x) == \
            oracles.falsified_count([c.lits for c in outs], x)


def test_maxresw_basic():
    assert check_maxresw(X, MaxResWProof([MaxSatStep(1, 2, 1)]))
    with pytest.raises(ProofRejected):
        check_maxresw(X, MaxResWProof([MaxSatStep(1, 2, 1)], {1: 2, 2: 1}))


def test_maxresw_pigeon_toy():
    # three clauses: (x1 v x2), (-x1), (-x2)
    F = CnfFormula(2, [Clause([1, 2]), Clause([-1]), Clause([-2])])
    pf = MaxResWProof([MaxSatStep(1, 2, 1), MaxSatStep(4, 3, 2)])
    assert check_maxresw(F, pf).system == "MaxResW"


# Nullstellensatz

def test_ns_trivial():
    m = check_ns(X, NsProof({1: poly({ONE: 1}), 2: poly({ONE: 1})}))
    assert m.width_or_degree == 1


def test_ns_wrong_coefficient_witness():
    with pytest.raises(ProofRejected) as e:
        check_ns(X, NsProof({1: poly({ONE: 1}), 2: poly({ONE: 2})}))
    assert e.value.witness == (1,)


def test_ns_bad_index_is_malformed():
    with pytest.raises(MalformedProof):
        check_ns(X, NsProof({3: poly({ONE: 1})}))


def tree_ns(F):
    # path clauses of a decision tree: the negations sum to 1
    return {i: poly({ONE: 1}) for i in range(1, F.m + 1)}


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.dictionaries(st.integers(1, 3), st.dictionaries(
    st.frozensets(st.integers(1, 3), max_size=2), st.integers(-2, 2), max_size=2), max_size=2))
def test_ns_accepts_iff_identity_holds(seed, delta):
    rng = random.Random(seed)
    F, _ = random_contradiction(rng, n=3, extra=0)
    coeffs = tree_ns(F)
    for i, d in delta.items():
        if i <= F.m:
            coeffs[i] = coeffs[i] + poly(d)
    cls = [c.lits for c in F.clauses]
    ok = True
    for x in oracles.points(3):
        total = 0
        for i, q in coeffs.items():
            total += oracles.poly_value(q.terms, x) * int(oracles.clause_false(cls[i - 1], x))
        ok &= total == 1
    try:
        check_ns(F, NsProof(coeffs))
        got = True
    except ProofRejected:
        got = False
    assert got == ok


# Sherali-Adams

def test_sa_general_trivial():
    pf = SaProof("general", coeffs={1: poly({ONE: 1}), 2: poly({ONE: 1})})
    assert check_sa(X, pf).system == "SA"


def test_normalize_mixed_signs():
    F = CnfFormula(2, [Clause([1]), Clause([-1]), Clause([1, -2])])
    # (1 - x2)(1 - x1) + x1 + x2(1 - x1) = 1
    pf = SaProof("general", coeffs={1: poly({ONE: 1, frozenset([2]): -1}), 2: poly({ONE: 1}),
                                    3: poly({ONE: 1})})
    assert check_sa(F, pf)
    nf = normalize_sa(F, pf)
    assert nf.juntas[1] == ConicalJunta({Term(): 1})
    assert nf.j0 == ConicalJunta({Term([2], [1]): 1})
    assert check_sa(F, nf).system == "uSA"


def test_sa_normal_metrics():
    F = CnfFormula(1, X.clauses)
    pf = SaProof.normal({1: ConicalJunta({Term(): 1}), 2: ConicalJunta({Term(): 1})})
    m = check_sa(F, pf)
    assert m.unary_size == 2 and m.detail["expanded_unary_size"] == 1 + 2 + 1


def test_sa_negative_junta_rejected():
    pf = SaProof.normal({1: ConicalJunta({Term(): 1}), 2: ConicalJunta({Term(): 1})})
    pf.j0.entries[Term()] = -1
    with pytest.raises(ProofRejected):
        check_sa(X, pf)


# epsilon-NS

def test_eps_ns_exact_and_scaled():
    exact = NsProof({1: poly({ONE: 1}, "Q"), 2: poly({ONE: 1}, "Q")}, "Q")
    assert check_eps_ns(X, EpsNsProof(exact, Fraction(1, 10)))
    scaled = NsProof({1: poly({ONE: Fraction(3, 2)}, "Q"), 2: poly({ONE: Fraction(3, 2)}, "Q")}, "Q")
    rep = check_eps_ns(X, EpsNsProof(scaled, Fraction(2, 5)))
    assert not rep and rep.min_residual == rep.max_residual == Fraction(3, 2)


def test_eps_ns_composition_halves_error():
    F = CnfFormula(2, [Clause([1, 2]), Clause([1, -2]), Clause([-1])])
    coeffs = {1: poly({ONE: Fraction(1, 2)}, "Q"), 2: poly({ONE: Fraction(3, 2)}, "Q"),
              3: poly({ONE: 1}, "Q")}
    pf = EpsNsProof(NsProof(coeffs, "Q"), Fraction(1, 2))
    assert check_eps_ns(F, pf)
    comp = compose_eps_ns(F, pf)
    assert comp.eps == Fraction(1, 4)
    rep = check_eps_ns(F, comp)
    assert rep
    # independent evaluation of the composed residual on every point
    for x in oracles.points(2):
        r = sum(oracles.poly_value(q.terms, x) * int(oracles.clause_false(F.clause(i).lits, x))
                for i, q in comp.ns.coeffs.items())
        assert abs(r - 1) <= Fraction(1, 4)


def test_eps_ns_sampling_mode():
    exact = NsProof({1: poly({ONE: 1}, "Q"), 2: poly({ONE: 1}, "Q")}, "Q")
    rep = check_eps_ns(X, EpsNsProof(exact, Fraction(1, 2)), samples=20, seed=1)
    assert rep and not rep.certifying
