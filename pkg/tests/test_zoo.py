import random
from collections import Counter

import pytest

from proofbench.cnf import Clause, assignment_from_int, falsified_clauses, is_unsatisfiable
from proofbench.zoo import (GridLineInstance, LineInstance, PigeonInstance, Solution, SodInstance,
                            block_neq, brute_solutions, embed_sopl_in_sod, encode_cnf, instance_from_json,
                            instance_to_json, or_to_sopl, random_instance)

import oracles


def as_pairs(sols):
    return {(s.rule, s.payload) for s in sols}


def test_sod_all_null():
    inst = SodInstance(2, {})
    assert brute_solutions(inst) == {Solution("SoD", 1, (1, 1))}


def test_sopl_left_column_path():
    n = 3
    succ = {(1, 1): 1, (2, 1): 1, (3, 1): 1}
    pred = {(2, 1): 1, (3, 1): 1}
    assert brute_solutions(GridLineInstance(n, succ, pred)) == {Solution("SoPL", 2, (3, 1))}


def test_pigeon_collision():
    assert brute_solutions(PigeonInstance(3, {1: 1, 2: 1, 3: 2})) == {Solution("PIGEON", 1, (1, 2))}


@pytest.mark.parametrize("problem,n", [("SoL", 4), ("EoL", 4), ("SoPL", 3), ("EoPL", 3), ("PIGEON", 5)])
def test_brute_solutions_match_oracle(problem, n):
    rng = random.Random(hash(problem) % 1000 + n)
    for _ in range(300):
        inst = random_instance(problem, n, rng)
        got = as_pairs(brute_solutions(inst))
        if problem in ("SoL", "EoL"):
            want = oracles.line_solutions(n, inst.successor, inst.predecessor, problem == "EoL")
        elif problem == "PIGEON":
            want = oracles.pigeon_solutions(n, inst.hole)
        else:
            want = oracles.grid_solutions(n, inst.successor, inst.predecessor, problem == "EoPL")
        assert got == want
        assert got, "every instance of a total problem has a solution"


def test_line_self_loop_is_no_edge():
    inst = LineInstance(2, {1: 1, 2: 2}, {2: 1})
    assert inst.edges() == []
    # a self-loop whose predecessor agrees is an edge (2, 2)
    assert LineInstance(2, {1: 1, 2: 2}, {2: 2}).edges() == [(2, 2)]


@pytest.mark.parametrize("problem,n", [("SoPL", 1), ("EoPL", 1), ("SoD", 1), ("SoL", 2), ("EoL", 2),
                                       ("PIGEON", 3), ("SoL", 4), ("EoL", 4), ("PIGEON", 5)])
def test_encodings_unsat_exhaustive(problem, n):
    F, _, _ = encode_cnf(problem, n)
    assert is_unsatisfiable(F)
    assert oracles.is_unsat([c.lits for c in F.clauses], F.variable_count) if F.variable_count <= 10 else True


@pytest.mark.parametrize("problem,n", [("SoPL", 3), ("EoPL", 3), ("SoD", 3), ("SoL", 4), ("EoL", 4),
                                       ("PIGEON", 5), ("SoPL", 1), ("SoL", 2)])
def test_falsified_clauses_are_exactly_the_solutions(problem, n):
    F, layout, dec = encode_cnf(problem, n)
    N = F.variable_count
    rng = random.Random(N)
    pts = range(1 << N) if N <= 14 else [rng.getrandbits(N) for _ in range(1500)]
    for b in pts:
        x = assignment_from_int(b, N)
        inst = dec.decode(x)
        assert {dec.solution_for_clause(i) for i in falsified_clauses(F, x)} == brute_solutions(inst)


def grid_family_sizes(n, eopl):
    # block clauses expanded bit-wise, with the null pointer value included
    sizes = {1: n * n + 1 if n > 1 else 1, 2: n, 3: (n - 2) * n * n * (1 + n * n) + (n * n if n > 1 else 0)}
    if eopl:
        sizes[4] = (n - 2) * n * n * (1 + n * n) + (n - 1) * n
    return sizes


@pytest.mark.parametrize("problem", ["SoPL", "EoPL"])
def test_grid_family_sizes(problem):
    F, _, dec = encode_cnf(problem, 3)
    counts = Counter(dec.solution_for_clause(i).rule for i in range(1, F.m + 1))
    assert dict(counts) == grid_family_sizes(3, problem == "EoPL")


def test_eopl_extends_sopl():
    F, _, _ = encode_cnf("SoPL", 3)
    G, _, _ = encode_cnf("EoPL", 3)
    assert G.clauses[:F.m] == F.clauses


def test_sopl3_contains_stated_families():
    # the non-null clauses of the grid definition, written out literally; the
    # inactive-successor condition is p(i+2, b) != x (the node pointed to)
    n = 3
    F, L, _ = encode_cnf("SoPL", n)
    have = set(F.clauses)
    s = lambda i, j: L.block("s", i, j)
    p = lambda i, j: L.block("p", i, j)
    a = lambda i, j: L.block("a", i, j)[0]
    want = [Clause(block_neq(s(1, 1), 0))]
    for j in range(1, n + 1):
        for v in range(0, n + 1):
            if v != 1:
                want.append(Clause(block_neq(s(1, 1), j) + block_neq(p(2, j), v)))
        want.append(Clause([-a(n, j)]))
    for i in range(1, n - 1):
        for j in range(1, n + 1):
            for x in range(1, n + 1):
                for b in range(1, n + 1):
                    for c in range(1, n + 1):
                        if c != x:
                            want.append(Clause(block_neq(s(i, j), x) + block_neq(p(i + 1, x), j)
                                               + block_neq(s(i + 1, x), b) + block_neq(p(i + 2, b), c)))
    for x in range(1, n + 1):
        for b in range(1, n + 1):
            want.append(Clause(block_neq(s(n - 1, x), b) + block_neq(p(n, b), x) + [a(n, b)]))
    assert set(want) <= have


def test_or_to_sopl_zero_input():
    inst, u = or_to_sopl([0] * 7, [list(range(1, 9))] * 7)
    assert brute_solutions(inst) == {Solution("SoPL", 2, (8, 1))}
    assert u == (8, 1)


def test_or_to_sopl_weight_two():
    x = [0, 1, 0, 0, 1, 0, 0]
    inst, u = or_to_sopl(x, [list(range(1, 9))] * 7)
    sols = brute_solutions(inst)
    assert len(sols) == 3 and all(s.rule == 2 for s in sols)


def test_or_to_sopl_planted_random():
    rng = random.Random(4)
    for _ in range(20):
        x = [rng.randint(0, 1) for _ in range(5)]
        perms = [rng.sample(range(1, 7), 6) for _ in range(5)]
        inst, u = or_to_sopl(x, perms)
        assert Solution("SoPL", 2, u) in brute_solutions(inst)


def test_or_to_sopl_bad_permutation():
    with pytest.raises(ValueError):
        or_to_sopl([0, 0], [[1, 1, 3], [1, 2, 3]])


def test_embed_single_path():
    n = 3
    y = GridLineInstance(n, {(1, 1): 1, (2, 1): 1, (3, 1): 1}, {(2, 1): 1, (3, 1): 1})
    sod = embed_sopl_in_sod(y)
    # the active sink (3, 1) points at (4, 1), which is null in the big grid
    assert brute_solutions(sod) == {Solution("SoD", 3, (3, 1))}


def test_embed_inactive_source():
    y = GridLineInstance(3, {}, {})
    assert brute_solutions(embed_sopl_in_sod(y)) == {Solution("SoD", 1, (1, 1))}


def consistent_grid(rng, n):
    # every non-null successor below the last row is answered by its target
    succ, pred = {}, {}
    for i in range(1, n + 1):
        targets = list(range(1, n + 1))
        rng.shuffle(targets)
        for j in range(1, n + 1):
            if rng.random() < 0.3:
                succ[(i, j)] = None
            elif i == n:
                succ[(i, j)] = 1
            else:
                succ[(i, j)] = targets[j - 1]
                pred[(i + 1, targets[j - 1])] = j
    return GridLineInstance(n, succ, pred)


def test_embed_preserves_count_for_sink_only_instances():
    rng = random.Random(9)
    checked = 0
    for _ in range(400):
        y = consistent_grid(rng, 3)
        sols = brute_solutions(y)
        if not sols or any(s.rule != 2 for s in sols):
            continue
        checked += 1
        assert len(brute_solutions(embed_sopl_in_sod(y))) == len(sols)
    assert checked > 0


@pytest.mark.parametrize("problem,n", [("SoPL", 3), ("EoPL", 3), ("SoL", 4), ("EoL", 4), ("SoD", 3),
                                       ("PIGEON", 5)])
def test_instance_json_round_trip(problem, n):
    rng = random.Random(1)
    inst = random_instance(problem, n, rng)
    back = instance_from_json(instance_to_json(inst))
    assert brute_solutions(back) == brute_solutions(inst)
    assert instance_to_json(back) == instance_to_json(inst)


@pytest.mark.parametrize("problem,n", [("SoPL", 2), ("SoL", 3), ("PIGEON", 4), ("UEoPL", 3)])
def test_encoding_size_errors(problem, n):
    with pytest.raises(ValueError):
        encode_cnf(problem, n)
