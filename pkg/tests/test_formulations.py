import random

import pytest
from hypothesis import given, settings, strategies as st

from proofbench import trees as T
from proofbench.cnf import EMPTY, Clause, CnfFormula, assignment_from_int
from proofbench.formulations import (Formulation, FormulationError, encode_search_as_cnf,
                                     eval_formulation, grid_verifier_trees, identity_formulation,
                                     verify_formulation)
from proofbench.suite import random_line_formulation, random_tree
from proofbench.trees import Leaf, Query
from proofbench.zoo import LineInstance, brute_solutions, encode_cnf, instance_to_json

X = CnfFormula(1, [Clause([1]), Clause([-1])])


def two_node(g2, target="EoL"):
    # node 2 is always a proper sink: 1 -> 2 with matching predecessor
    trees = {("s", 1): Leaf(2), ("p", 2): Leaf(1), ("s", 2): Leaf(2), ("g", 2): g2}
    return Formulation(target, 2, trees)


# trees

def test_tree_evaluate_and_paths():
    t = Query(1, Leaf("a"), Query(2, Leaf("b"), Leaf("c")))
    assert T.evaluate(t, (0, 1)) == "a"
    assert T.evaluate(t, (1, 1)) == "c"
    assert T.depth(t) == 2 and T.size(t) == 5
    assert [lab for _, lab in T.paths(t)] == ["a", "b", "c"]
    assert T.path_clause({1: 1, 2: 0}) == Clause([-1, 2])


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_tree_paths_partition_cube(seed):
    rng = random.Random(seed)
    t = random_tree(rng, range(1, 6), 4, leaf=lambda r: r.randint(0, 9))
    ps = T.paths(t)
    for b in range(32):
        x = assignment_from_int(b, 5)
        hits = [lab for rho, lab in ps if all(x[v - 1] == bit for v, bit in rho.items())]
        assert hits == [T.evaluate(t, x)]
        # the path clause of the taken path is exactly the one falsified
        lab, rho = T.evaluate_path(t, x)
        assert T.path_clause(rho).evaluate(x) == 0


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_tree_json_round_trip(seed):
    rng = random.Random(seed)
    t = random_tree(rng, range(1, 6), 4, leaf=lambda r: (r.randint(0, 3), r.randint(0, 3)))
    assert T.from_json(T.to_json(t)) == t


def test_from_procedure_block_reader():
    t = T.from_procedure(lambda read: T.block_reader(read, [3, 4]))
    for v in range(4):
        rho = T.block_assignment([3, 4], v)
        x = [0, 0, rho[3], rho[4]]
        assert T.evaluate(t, x) == v


def test_graft_respects_answered_queries():
    t = Query(1, Leaf(0), Leaf(1))
    g = T.graft(t, lambda lab, acc: Query(1, Leaf((lab, 0)), Leaf((lab, 1))))
    assert g == Query(1, Leaf((0, 0)), Leaf((1, 1)))


# search-as-CNF

def test_search_as_cnf_trivial():
    F, owners = encode_search_as_cnf([Leaf(True)], 1)
    assert F.clauses == (EMPTY,)
    F, _ = encode_search_as_cnf([Query(1, Leaf(False), Leaf(True)), Query(1, Leaf(True), Leaf(False))], 1)
    assert F.clauses == (Clause([-1]), Clause([1]))


@pytest.mark.parametrize("problem,n", [("SoPL", 1), ("SoPL", 3), ("EoPL", 1), ("EoPL", 3)])
def test_verifier_trees_reproduce_encoding(problem, n):
    F, _, _ = encode_cnf(problem, n)
    G, _ = encode_search_as_cnf([t for _, t in grid_verifier_trees(problem, n)], F.variable_count)
    assert set(G.clauses) == set(F.clauses)


# evaluation and verification

def test_eval_constant_trees():
    phi = Formulation("EoL", 2, {("s", 1): Leaf(2), ("p", 2): Leaf(1), ("s", 2): Leaf(2)})
    for x in [(0,), (1,)]:
        inst = eval_formulation(phi, x)
        assert inst.edges() == [(1, 2)]


def test_two_node_verifies():
    rep = verify_formulation(X, two_node(Query(1, Leaf(1), Leaf(2))))
    assert rep and rep.tested == 2 and rep.certifying


def test_two_node_bug_caught():
    rep = verify_formulation(X, two_node(Leaf(1)))
    assert not rep
    x, sol, i, reason = rep.failures[0]
    assert x == (1,) and i == 1 and "satisfied" in reason
    rep = verify_formulation(X, two_node(Leaf(2)))
    x, sol, i, reason = rep.failures[0]
    assert x == (0,) and i == 2


def test_missing_g_tree_reported():
    phi = Formulation("EoL", 2, {("s", 1): Leaf(2), ("p", 2): Leaf(1), ("s", 2): Leaf(2)})
    rep = verify_formulation(X, phi)
    assert not rep and rep.failures[0][3] == "no g tree"


def test_bad_pointer_leaf():
    phi = Formulation("EoL", 2, {("s", 1): Leaf(3)})
    with pytest.raises(FormulationError):
        eval_formulation(phi, (0,))


def test_json_round_trip():
    phi = two_node(Query(1, Leaf(1), Leaf(2)))
    back = Formulation.from_json(phi.to_json())
    assert back.to_json() == phi.to_json()


@pytest.mark.parametrize("problem,n", [("SoPL", 1), ("EoPL", 1), ("SoL", 2), ("EoL", 2), ("SoD", 1)])
def test_identity_exhaustive(problem, n):
    F, _, _ = encode_cnf(problem, n)
    phi = identity_formulation(problem, n)
    assert verify_formulation(F, phi)


@pytest.mark.parametrize("problem,n", [("SoPL", 3), ("EoPL", 3), ("SoD", 3), ("SoL", 4), ("EoL", 4)])
def test_identity_sampled(problem, n):
    F, layout, dec = encode_cnf(problem, n)
    phi = identity_formulation(problem, n)
    samples = 10000 if problem == "SoPL" else 1500
    rep = verify_formulation(F, phi, mode="sample", samples=samples, seed=2)
    assert rep and not rep.certifying
    assert phi.depth() <= 4 * layout.lam


def test_identity_decodes():
    F, layout, dec = encode_cnf("SoPL", 3)
    phi = identity_formulation("SoPL", 3)
    rng = random.Random(0)
    for _ in range(200):
        x = assignment_from_int(rng.getrandbits(F.variable_count), F.variable_count)
        assert instance_to_json(eval_formulation(phi, x)) == instance_to_json(dec.decode(x))


def test_identity_unsupported():
    with pytest.raises(FormulationError):
        identity_formulation("PIGEON", 3)


def test_random_line_formulations_verify():
    rng = random.Random(21)
    for target in ("EoL", "SoL"):
        for _ in range(10):
            F, phi = random_line_formulation(rng, target)
            rep = verify_formulation(F, phi)
            assert rep and rep.certifying
