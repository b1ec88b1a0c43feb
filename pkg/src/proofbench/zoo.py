"""Search-problem instances, brute-force solution oracles and CNF encodings.

Problems: PIGEON, SoL, EoL, SoD, SoPL, EoPL, UEoPL. Nodes of grid problems are
(row, column) pairs with 1-based indices; `None` stands for the null pointer.
"""
from __future__ import annotations

from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

from .cnf import Clause, CnfFormula
from .trees import block_value

GRID_PROBLEMS = ("SoPL", "EoPL", "UEoPL")
LINE_PROBLEMS = ("SoL", "EoL")
PROBLEMS = ("PIGEON", "SoL", "EoL", "SoD", "SoPL", "EoPL", "UEoPL")

RULE_NAMES = {
    "PIGEON": {1: "pigeon collision"},
    "SoL": {1: "no distinguished source", 2: "proper sink"},
    "EoL": {1: "no distinguished source", 2: "proper sink", 3: "proper source"},
    "SoD": {1: "inactive distinguished source", 2: "active sink", 3: "proper sink"},
    "SoPL": {1: "inactive distinguished source", 2: "active sink", 3: "proper sink"},
    "EoPL": {1: "inactive distinguished source", 2: "active sink", 3: "proper sink",
             4: "proper source"},
    "UEoPL": {1: "inactive distinguished source", 2: "active sink", 3: "proper sink",
              4: "proper source", 5: "two parallel lines"},
}


class Solution(NamedTuple):
    problem: str
    rule: int
    payload: object

    @property
    def rule_name(self):
        return RULE_NAMES[self.problem][self.rule]


class SodInstance:
    problem = "SoD"

    def __init__(self, n: int, successor: Dict[Tuple[int, int], Optional[int]]):
        self.n = n
        self.successor = {(i, j): successor.get((i, j)) for i in range(1, n + 1) for j in range(1, n + 1)}

    def __eq__(self, other):
        return isinstance(other, SodInstance) and self.n == other.n and self.successor == other.successor


class LineInstance:
    """SoL / EoL input. A self-loop successor with a non-matching predecessor means no edge."""

    def __init__(self, n: int, successor: Dict[int, int], predecessor: Dict[int, int], problem="SoL"):
        if problem not in LINE_PROBLEMS:
            raise ValueError("not a line problem: %s" % problem)
        self.problem = problem
        self.n = n
        self.successor = dict(successor)
        self.predecessor = {u: predecessor[u] for u in range(2, n + 1)}
        for u in range(1, n + 1):
            if not 1 <= self.successor[u] <= n:
                raise ValueError("successor out of range at %d" % u)

    def edges(self):
        out = []
        for u in range(1, self.n + 1):
            v = self.successor[u]
            if v != 1 and self.predecessor.get(v) == u:
                out.append((u, v))
        return out

    def degrees(self):
        indeg = {u: 0 for u in range(1, self.n + 1)}
        outdeg = dict(indeg)
        for u, v in self.edges():
            outdeg[u] += 1
            indeg[v] += 1
        return indeg, outdeg

    def __eq__(self, other):
        return (isinstance(other, LineInstance) and self.n == other.n
                and self.successor == other.successor and self.predecessor == other.predecessor)


class GridLineInstance:
    """SoPL / EoPL / UEoPL input on the n x n grid."""

    def __init__(self, n: int, successor, predecessor, problem="SoPL"):
        if problem not in GRID_PROBLEMS:
            raise ValueError("not a grid problem: %s" % problem)
        self.problem = problem
        self.n = n
        self.successor = {(i, j): successor.get((i, j)) for i in range(1, n + 1) for j in range(1, n + 1)}
        self.predecessor = {(i, j): predecessor.get((i, j))
                            for i in range(2, n + 1) for j in range(1, n + 1)}

    def active(self, i, j) -> bool:
        k = self.successor[(i, j)]
        if k is None:
            return False
        if i == self.n:
            return True
        return self.predecessor[(i + 1, k)] == j

    def active_nodes(self):
        return {(i, j) for i in range(1, self.n + 1) for j in range(1, self.n + 1) if self.active(i, j)}

    def pointed_by_active(self, act=None):
        act = self.active_nodes() if act is None else act
        out = set()
        for (i, j) in act:
            if i < self.n:
                out.add((i + 1, self.successor[(i, j)]))
        return out

    def with_problem(self, problem):
        return GridLineInstance(self.n, self.successor, self.predecessor, problem)

    def __eq__(self, other):
        return (isinstance(other, GridLineInstance) and self.n == other.n
                and self.successor == other.successor and self.predecessor == other.predecessor)


class PigeonInstance:
    problem = "PIGEON"

    def __init__(self, n: int, hole: Dict[int, int]):
        self.n = n
        self.hole = dict(hole)
        for u in range(1, n + 1):
            if not 1 <= self.hole[u] <= n - 1:
                raise ValueError("hole out of range at %d" % u)


# brute-force oracles

def brute_solutions(inst, problem: Optional[str] = None) -> set:
    problem = problem or inst.problem
    if problem == "PIGEON":
        return _pigeon_solutions(inst)
    if problem in LINE_PROBLEMS:
        return _line_solutions(inst, problem)
    if problem == "SoD":
        return _sod_solutions(inst)
    if problem in GRID_PROBLEMS:
        return _grid_solutions(inst, problem)
    raise ValueError("unknown problem %s" % problem)


def _pigeon_solutions(inst):
    out = set()
    for u in range(1, inst.n + 1):
        for v in range(u + 1, inst.n + 1):
            if inst.hole[u] == inst.hole[v]:
                out.add(Solution("PIGEON", 1, (u, v)))
    return out


def _line_solutions(inst, problem):
    indeg, outdeg = inst.degrees()
    out = set()
    if not (indeg[1] == 0 and outdeg[1] == 1):
        out.add(Solution(problem, 1, 1))
    for u in range(2, inst.n + 1):
        if indeg[u] == 1 and outdeg[u] == 0:
            out.add(Solution(problem, 2, u))
        if problem == "EoL" and indeg[u] == 0 and outdeg[u] == 1:
            out.add(Solution(problem, 3, u))
    return out


def _sod_solutions(inst):
    n = inst.n
    s = inst.successor
    out = set()
    if s[(1, 1)] is None:
        out.add(Solution("SoD", 1, (1, 1)))
    for j in range(1, n + 1):
        if s[(n, j)] is not None:
            out.add(Solution("SoD", 2, (n, j)))
    for i in range(1, n):
        for j in range(1, n + 1):
            k = s[(i, j)]
            if k is not None and s[(i + 1, k)] is None:
                out.add(Solution("SoD", 3, (i, j)))
    return out


def _grid_solutions(inst, problem):
    n = inst.n
    act = inst.active_nodes()
    pointed = inst.pointed_by_active(act)
    out = set()
    if (1, 1) not in act:
        out.add(Solution(problem, 1, (1, 1)))
    for j in range(1, n + 1):
        if (n, j) in act:
            out.add(Solution(problem, 2, (n, j)))
    for u in pointed:
        if u not in act:
            out.add(Solution(problem, 3, u))
    if problem in ("EoPL", "UEoPL"):
        for (i, j) in act:
            if (i, j) == (1, 1):
                continue
            if i == 1 or (1 < i < n and (i, j) not in pointed):
                out.add(Solution(problem, 4, (i, j)))
    if problem == "UEoPL":
        for i in range(1, n + 1):
            row = sorted(j for (r, j) in act if r == i)
            for a in range(len(row)):
                for b in range(a + 1, len(row)):
                    out.add(Solution(problem, 5, ((i, row[a]), (i, row[b]))))
    return out


# constructions

def or_to_sopl(x: Sequence[int], permutations: Sequence[Sequence[int]]):
    """Planted-path instance: column 1 always a line, column i+1 a line iff x_i = 1.

    permutations[r-2] permutes row r (r = 2..n): node (r, j) moves to column
    permutations[r-2][j-1]. Returns (instance, image of the sink (n, 1)).
    """
    n = len(x) + 1
    if len(permutations) != n - 1:
        raise ValueError("need one permutation per row 2..n")
    perm = {1: list(range(1, n + 1))}
    for r in range(2, n + 1):
        p = [int(v) for v in permutations[r - 2]]
        if sorted(p) != list(range(1, n + 1)):
            raise ValueError("malformed permutation for row %d" % r)
        perm[r] = p
    cols = [1] + [i + 1 for i in range(1, n) if x[i - 1]]
    succ = {}
    pred = {}
    for c in cols:
        for r in range(1, n + 1):
            here = perm[r][c - 1]
            if r < n:
                succ[(r, here)] = perm[r + 1][c - 1]
            else:
                succ[(r, here)] = 1
            if r > 1:
                pred[(r, here)] = perm[r - 1][c - 1]
    return GridLineInstance(n, succ, pred, "SoPL"), (n, perm[n][0])


def embed_sopl_in_sod(y: GridLineInstance) -> SodInstance:
    """All-null SoD input on the n^2 grid with y's successors in the top-left block."""
    n = y.n
    N = n * n
    succ = {(i, j): None for i in range(1, N + 1) for j in range(1, N + 1)}
    for (i, j), k in y.successor.items():
        succ[(i, j)] = k
    return SodInstance(N, succ)


def random_instance(problem: str, n: int, rng):
    """Uniformly random input (pointer values include null where allowed)."""
    if problem == "PIGEON":
        return PigeonInstance(n, {u: rng.randint(1, n - 1) for u in range(1, n + 1)})
    if problem in LINE_PROBLEMS:
        return LineInstance(n, {u: rng.randint(1, n) for u in range(1, n + 1)},
                            {u: rng.randint(1, n) for u in range(2, n + 1)}, problem)
    val = lambda: (None if rng.random() < 0.3 else rng.randint(1, n))
    if problem == "SoD":
        return SodInstance(n, {(i, j): val() for i in range(1, n + 1) for j in range(1, n + 1)})
    if problem in GRID_PROBLEMS:
        return GridLineInstance(n, {(i, j): val() for i in range(1, n + 1) for j in range(1, n + 1)},
                                {(i, j): val() for i in range(2, n + 1) for j in range(1, n + 1)},
                                problem)
    raise ValueError("unknown problem %s" % problem)


# encodings

class EncodingLayout:
    """Variable indices of every pointer block (and row-n activity bits)."""

    def __init__(self, problem: str, n: int, lam: int, blocks: Dict[tuple, List[int]]):
        self.problem = problem
        self.n = n
        self.lam = lam
        self.blocks = blocks
        self.variable_count = max((max(b) for b in blocks.values()), default=0)

    def block(self, *key) -> List[int]:
        return self.blocks[tuple(key)]

    def to_json(self):
        return {"problem": self.problem, "n": self.n, "lambda": self.lam,
                "null": "0" * self.lam,
                "blocks": [{"name": k[0], "node": list(k[1:]), "vars": v} for k, v in self.blocks.items()]}


def _lambda_for(problem: str, n: int) -> int:
    if problem in ("SoD", "SoPL", "EoPL", "UEoPL"):
        lam = (n + 1).bit_length() - 1
        if n < 1 or (1 << lam) - 1 != n:
            raise ValueError("%s encoding needs n = 2^lambda - 1, got %d" % (problem, n))
        return lam
    if problem in LINE_PROBLEMS:
        lam = n.bit_length() - 1
        if n < 2 or (1 << lam) != n:
            raise ValueError("%s encoding needs n = 2^lambda >= 2, got %d" % (problem, n))
        return lam
    if problem == "PIGEON":
        lam = (n - 1).bit_length() - 1
        if n < 3 or (1 << lam) != n - 1:
            raise ValueError("PIGEON encoding needs n = 2^lambda + 1 >= 3, got %d" % n)
        return lam
    raise ValueError("unsupported problem %s" % problem)


class _Vars:
    def __init__(self):
        self.count = 0
        self.blocks = {}

    def block(self, key, width):
        vs = list(range(self.count + 1, self.count + width + 1))
        self.count += width
        self.blocks[key] = vs
        return vs


def block_neq(bits, value) -> List[int]:
    """Literals of the clause [block != value] (value >= 0)."""
    return [(-v if (value >> k) & 1 else v) for k, v in enumerate(bits)]


class Decoder:
    """Maps assignments to instances and falsified clauses to solutions."""

    def __init__(self, problem, n, layout, witnesses):
        self.problem = problem
        self.n = n
        self.layout = layout
        self.witnesses = witnesses

    def solution_for_clause(self, i: int) -> Solution:
        return self.witnesses[i - 1]

    def decode(self, x: Sequence[int]):
        L = self.layout
        n = self.n
        if self.problem in GRID_PROBLEMS:
            succ, pred = {}, {}
            for i in range(1, n + 1):
                for j in range(1, n + 1):
                    if i == n:
                        succ[(i, j)] = 1 if x[L.block("a", i, j)[0] - 1] else None
                    else:
                        succ[(i, j)] = block_value(x, L.block("s", i, j)) or None
                    if i >= 2:
                        pred[(i, j)] = block_value(x, L.block("p", i, j)) or None
            return GridLineInstance(n, succ, pred, self.problem)
        if self.problem == "SoD":
            return SodInstance(n, {(i, j): block_value(x, L.block("s", i, j)) or None
                                   for i in range(1, n + 1) for j in range(1, n + 1)})
        if self.problem in LINE_PROBLEMS:
            return LineInstance(n, {u: block_value(x, L.block("s", u)) + 1 for u in range(1, n + 1)},
                                {u: block_value(x, L.block("p", u)) + 1 for u in range(2, n + 1)},
                                self.problem)
        if self.problem == "PIGEON":
            return PigeonInstance(n, {u: block_value(x, L.block("h", u)) + 1 for u in range(1, n + 1)})
        raise ValueError(self.problem)


def encode_cnf(problem: str, n: int):
    """(CnfFormula, EncodingLayout, Decoder) for the problem at size n."""
    lam = _lambda_for(problem, n)
    if problem in GRID_PROBLEMS:
        return _encode_grid(problem, n, lam)
    if problem == "SoD":
        return _encode_sod(n, lam)
    if problem in LINE_PROBLEMS:
        return _encode_line(problem, n, lam)
    return _encode_pigeon(n, lam)


def grid_layout(n: int, lam: int, problem="SoPL") -> EncodingLayout:
    V = _Vars()
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i < n:
                V.block(("s", i, j), lam)
            if i >= 2:
                V.block(("p", i, j), lam)
            if i == n:
                if n == 1:
                    # the single node's lambda = 1 successor block doubles as its activity bit
                    V.block(("a", i, j), 1)
                    V.blocks[("s", i, j)] = V.blocks[("a", i, j)]
                else:
                    V.block(("a", i, j), 1)
    return EncodingLayout(problem, n, lam, V.blocks)


def _encode_grid(problem, n, lam):
    if problem == "UEoPL":
        raise ValueError("UEoPL has no CNF encoding here")
    L = grid_layout(n, lam, problem)
    s = lambda i, j: L.block("s", i, j)
    p = lambda i, j: L.block("p", i, j)
    a = lambda i, j: L.block("a", i, j)[0]
    vals = range(0, n + 1)
    clauses, wit = [], []

    def add(lits, sol):
        clauses.append(Clause(lits))
        wit.append(sol)

    src = Solution(problem, 1, (1, 1))
    # active distinguished source
    if n > 1:
        for j in range(1, n + 1):
            for v in vals:
                if v != 1:
                    add(block_neq(s(1, 1), j) + block_neq(p(2, j), v), src)
    add(block_neq(s(1, 1), 0) if n > 1 else [a(1, 1)], src)
    # inactive sink
    for j in range(1, n + 1):
        add([-a(n, j)], Solution(problem, 2, (n, j)))
    # no proper sinks: (i, j) -> (i+1, c) active, (i+1, c) inactive
    for i in range(1, n - 1):
        for j in range(1, n + 1):
            for c in range(1, n + 1):
                head = block_neq(s(i, j), c) + block_neq(p(i + 1, c), j)
                sol = Solution(problem, 3, (i + 1, c))
                add(head + block_neq(s(i + 1, c), 0), sol)
                for k in range(1, n + 1):
                    for b in vals:
                        if b != c:
                            add(head + block_neq(s(i + 1, c), k) + block_neq(p(i + 2, k), b), sol)
    if n > 1:
        for c in range(1, n + 1):
            for b in range(1, n + 1):
                add(block_neq(s(n - 1, c), b) + block_neq(p(n, b), c) + [a(n, b)], Solution(problem, 3, (n, b)))
    if problem == "EoPL":
        # no proper sources: (i, j) active and its predecessor does not point back
        for i in range(2, n):
            for j in range(1, n + 1):
                for k in range(1, n + 1):
                    head = block_neq(s(i, j), k) + block_neq(p(i + 1, k), j)
                    sol = Solution(problem, 4, (i, j))
                    add(head + block_neq(p(i, j), 0), sol)
                    for b in range(1, n + 1):
                        for c in vals:
                            if c != j:
                                add(head + block_neq(p(i, j), b) + block_neq(s(i - 1, b), c), sol)
        for j in range(2, n + 1):
            for k in range(1, n + 1):
                add(block_neq(s(1, j), k) + block_neq(p(2, k), j), Solution(problem, 4, (1, j)))
    F = CnfFormula(L.variable_count, clauses)
    return F, L, Decoder(problem, n, L, wit)


def _encode_sod(n, lam):
    V = _Vars()
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            V.block(("s", i, j), lam)
    L = EncodingLayout("SoD", n, lam, V.blocks)
    s = lambda i, j: L.block("s", i, j)
    clauses, wit = [], []
    clauses.append(Clause(block_neq(s(1, 1), 0)))
    wit.append(Solution("SoD", 1, (1, 1)))
    for j in range(1, n + 1):
        for v in range(1, n + 1):
            clauses.append(Clause(block_neq(s(n, j), v)))
            wit.append(Solution("SoD", 2, (n, j)))
    for i in range(1, n):
        for j in range(1, n + 1):
            for k in range(1, n + 1):
                clauses.append(Clause(block_neq(s(i, j), k) + block_neq(s(i + 1, k), 0)))
                wit.append(Solution("SoD", 3, (i, j)))
    return CnfFormula(L.variable_count, clauses), L, Decoder("SoD", n, L, wit)


def _encode_line(problem, n, lam):
    V = _Vars()
    for u in range(1, n + 1):
        V.block(("s", u), lam)
        if u >= 2:
            V.block(("p", u), lam)
    L = EncodingLayout(problem, n, lam, V.blocks)
    nodes = range(1, n + 1)
    out = {}

    def add(parts, sol):
        c = line_clause(L, parts)
        if c is not None and c not in out:
            out[c] = sol

    for v in nodes:
        if v == 1:
            add([("s", 1, 1)], Solution(problem, 1, 1))
        else:
            for w in nodes:
                if w != 1:
                    add([("s", 1, v), ("p", v, w)], Solution(problem, 1, 1))
    for i in range(2, n + 1):
        # proper sink: p_i = u, s_u = i, and no edge out of i
        for u in nodes:
            if u == i:
                continue
            for v in nodes:
                if v == 1:
                    add([("p", i, u), ("s", u, i), ("s", i, 1)], Solution(problem, 2, i))
                    continue
                for w in nodes:
                    if w != i:
                        add([("p", i, u), ("s", u, i), ("s", i, v), ("p", v, w)], Solution(problem, 2, i))
        if problem == "EoL":
            # proper source: edge out of i, and p_i = u with s_u != i
            for v in nodes:
                if v == 1 or v == i:
                    continue
                for u in nodes:
                    for t in nodes:
                        if t != i:
                            add([("s", i, v), ("p", v, i), ("p", i, u), ("s", u, t)], Solution(problem, 3, i))
    clauses = list(out)
    F = CnfFormula(L.variable_count, clauses)
    return F, L, Decoder(problem, n, L, list(out.values()))


def line_clause(L, parts):
    """Clause [not (all parts hold)] for parts (kind, node, value); None if parts conflict."""
    seen = {}
    for kind, u, v in parts:
        if seen.setdefault((kind, u), v) != v:
            return None
    lits = []
    for (kind, u), v in seen.items():
        lits += block_neq(L.block(kind, u), v - 1)
    return Clause(lits)


def _encode_pigeon(n, lam):
    V = _Vars()
    for u in range(1, n + 1):
        V.block(("h", u), lam)
    L = EncodingLayout("PIGEON", n, lam, V.blocks)
    clauses, wit = [], []
    for u in range(1, n + 1):
        for v in range(u + 1, n + 1):
            for k in range(1, n):
                clauses.append(Clause(block_neq(L.block("h", u), k - 1) + block_neq(L.block("h", v), k - 1)))
                wit.append(Solution("PIGEON", 1, (u, v)))
    return CnfFormula(L.variable_count, clauses), L, Decoder("PIGEON", n, L, wit)


# instance JSON

def instance_to_json(inst) -> dict:
    n = inst.n
    if isinstance(inst, PigeonInstance):
        return {"problem": "PIGEON", "n": n, "hole": [inst.hole[u] for u in range(1, n + 1)]}
    if isinstance(inst, LineInstance):
        return {"problem": inst.problem, "n": n,
                "successor": [inst.successor[u] for u in range(1, n + 1)],
                "predecessor": [None] + [inst.predecessor[u] for u in range(2, n + 1)]}
    if isinstance(inst, SodInstance):
        return {"problem": "SoD", "n": n,
                "successor": [[inst.successor[(i, j)] for j in range(1, n + 1)] for i in range(1, n + 1)]}
    if isinstance(inst, GridLineInstance):
        return {"problem": inst.problem, "n": n,
                "successor": [[inst.successor[(i, j)] for j in range(1, n + 1)] for i in range(1, n + 1)],
                "predecessor": [[None] * n] + [[inst.predecessor[(i, j)] for j in range(1, n + 1)]
                                               for i in range(2, n + 1)],
                "activity": sorted([list(u) for u in inst.active_nodes()])}
    raise TypeError(type(inst))


def instance_from_json(obj):
    problem = obj["problem"]
    n = int(obj["n"])
    if problem == "PIGEON":
        return PigeonInstance(n, {u: obj["hole"][u - 1] for u in range(1, n + 1)})
    if problem in LINE_PROBLEMS:
        return LineInstance(n, {u: obj["successor"][u - 1] for u in range(1, n + 1)},
                            {u: obj["predecessor"][u - 1] for u in range(2, n + 1)}, problem)
    succ = {(i, j): obj["successor"][i - 1][j - 1] for i in range(1, n + 1) for j in range(1, n + 1)}
    if problem == "SoD":
        return SodInstance(n, succ)
    pred = {(i, j): obj["predecessor"][i - 1][j - 1] for i in range(2, n + 1) for j in range(1, n + 1)}
    return GridLineInstance(n, succ, pred, problem)


def solution_to_json(sol: Solution):
    def conv(p):
        if isinstance(p, tuple):
            return [conv(q) for q in p]
        return p
    return {"problem": sol.problem, "rule": sol.rule, "name": sol.rule_name, "payload": conv(sol.payload)}
