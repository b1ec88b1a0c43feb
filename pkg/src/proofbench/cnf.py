"""Clauses, CNF formulas, assignments and DIMACS I/O.

Literals are stored as signed ints (DIMACS style): +v is x_v, -v is not x_v.
Total assignments are sequences indexed by variable - 1.
"""
from __future__ import annotations

from typing import Dict, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple


class Literal(NamedTuple):
    variable: int
    polarity: bool

    def to_int(self) -> int:
        return self.variable if self.polarity else -self.variable

    @staticmethod
    def from_int(lit: int) -> "Literal":
        return Literal(abs(lit), lit > 0)


def _lit_key(lit: int):
    return (abs(lit), lit > 0)


class Clause:
    """Immutable set of literals in canonical order (variable, then polarity)."""

    __slots__ = ("lits", "_set", "_hash")

    def __init__(self, lits: Iterable[int] = ()):
        s = frozenset(int(l) for l in lits)
        if 0 in s:
            raise ValueError("literal 0 is not allowed")
        self._set = s
        self.lits = tuple(sorted(s, key=_lit_key))
        self._hash = hash(s)

    @property
    def width(self) -> int:
        return len(self.lits)

    def literals(self) -> List[Literal]:
        return [Literal.from_int(l) for l in self.lits]

    def variables(self) -> frozenset:
        return frozenset(abs(l) for l in self.lits)

    def is_tautology(self) -> bool:
        return any(-l in self._set for l in self.lits)

    def is_empty(self) -> bool:
        return not self.lits

    def __contains__(self, lit) -> bool:
        return lit in self._set

    def __iter__(self):
        return iter(self.lits)

    def __len__(self):
        return len(self.lits)

    def __eq__(self, other):
        return isinstance(other, Clause) and self._set == other._set

    def __hash__(self):
        return self._hash

    def __le__(self, other: "Clause") -> bool:
        return self._set <= other._set

    def __or__(self, other) -> "Clause":
        if isinstance(other, Clause):
            return Clause(self._set | other._set)
        return Clause(self._set | {int(other)})

    def without_var(self, var: int) -> "Clause":
        return Clause(l for l in self.lits if abs(l) != var)

    def evaluate(self, x: Sequence[int]) -> int:
        for l in self.lits:
            v = x[abs(l) - 1]
            if (l > 0 and v) or (l < 0 and not v):
                return 1
        return 0

    def falsifying_assignment(self) -> Dict[int, int]:
        """The partial assignment setting every literal false (non-tautological clauses)."""
        if self.is_tautology():
            raise ValueError("tautological clause has no falsifying assignment")
        return {abs(l): (0 if l > 0 else 1) for l in self.lits}

    def sort_key(self):
        return (len(self.lits), [_lit_key(l) for l in self.lits])

    def __repr__(self):
        if not self.lits:
            return "Clause(⊥)"
        return "Clause(%s)" % " ".join(str(l) for l in self.lits)


EMPTY = Clause()


def clause_from_assignment(rho: Mapping[int, int]) -> Clause:
    """Clause falsified exactly on the subcube of rho (negation of the literals of rho)."""
    return Clause(-v if b else v for v, b in rho.items())


class CnfFormula:
    """Ordered list of clauses; clause i (1-based) is clauses[i-1]."""

    __slots__ = ("variable_count", "clauses")

    def __init__(self, variable_count: int, clauses: Iterable):
        cl = tuple(c if isinstance(c, Clause) else Clause(c) for c in clauses)
        for c in cl:
            for l in c.lits:
                if abs(l) > variable_count:
                    raise ValueError("literal %d out of range for %d variables" % (l, variable_count))
        self.variable_count = int(variable_count)
        self.clauses = cl

    @property
    def m(self) -> int:
        return len(self.clauses)

    def clause(self, i: int) -> Clause:
        if not 1 <= i <= len(self.clauses):
            raise IndexError("clause index %d out of range" % i)
        return self.clauses[i - 1]

    def width(self) -> int:
        return max((c.width for c in self.clauses), default=0)

    def index_of(self, c: Clause) -> Optional[int]:
        for i, d in enumerate(self.clauses, 1):
            if d == c:
                return i
        return None

    def parent_of(self, c: Clause) -> Optional[int]:
        """Smallest index i with clause i a subset of c."""
        for i, d in enumerate(self.clauses, 1):
            if d <= c and not d.is_tautology():
                return i
        return None

    def __eq__(self, other):
        return (isinstance(other, CnfFormula) and self.variable_count == other.variable_count
                and self.clauses == other.clauses)

    def __hash__(self):
        return hash((self.variable_count, self.clauses))

    def __repr__(self):
        return "CnfFormula(n=%d, m=%d)" % (self.variable_count, len(self.clauses))


def _check_total(F: CnfFormula, x: Sequence[int]):
    if len(x) < F.variable_count:
        raise ValueError("assignment incomplete: %d of %d variables" % (len(x), F.variable_count))


def falsified_clauses(F: CnfFormula, x: Sequence[int]) -> set:
    _check_total(F, x)
    return {i for i, c in enumerate(F.clauses, 1) if not c.evaluate(x)}


def is_satisfied(F: CnfFormula, x: Sequence[int]) -> bool:
    return not falsified_clauses(F, x)


def assignment_from_int(bits: int, n: int) -> Tuple[int, ...]:
    """Variable v gets bit v-1 of `bits`."""
    return tuple((bits >> k) & 1 for k in range(n))


def all_assignments(n: int):
    for bits in range(1 << n):
        yield assignment_from_int(bits, n)


def restrict(F: CnfFormula, rho: Mapping[int, int]):
    """Apply a partial assignment.

    Returns (F', index_map) where index_map[i'] = i maps new clause indices to old.
    Variables keep their numbering.
    """
    out = []
    index_map = {}
    for i, c in enumerate(F.clauses, 1):
        satisfied = False
        kept = []
        for l in c.lits:
            v = abs(l)
            if v in rho:
                if (l > 0) == bool(rho[v]):
                    satisfied = True
                    break
            else:
                kept.append(l)
        if satisfied:
            continue
        out.append(Clause(kept))
        index_map[len(out)] = i
    return CnfFormula(F.variable_count, out), index_map


def is_unsatisfiable(F: CnfFormula) -> bool:
    from . import kernels
    return kernels.min_falsified_count(F.clauses, F.variable_count) > 0


class ClauseMultiset:
    """Live clause occurrences keyed by never-reused ids, in insertion order."""

    def __init__(self):
        self.occ: Dict[int, Clause] = {}
        self.next_id = 1

    def add(self, c: Clause) -> int:
        i = self.next_id
        self.next_id += 1
        self.occ[i] = c
        return i

    def remove(self, i: int) -> Clause:
        if i not in self.occ:
            raise KeyError("dead occurrence id %d" % i)
        return self.occ.pop(i)

    def __contains__(self, i):
        return i in self.occ

    def __getitem__(self, i):
        return self.occ[i]

    def __len__(self):
        return len(self.occ)

    def clauses(self) -> List[Clause]:
        return list(self.occ.values())

    def ids(self) -> List[int]:
        return list(self.occ)


class DimacsError(ValueError):
    pass


def parse_dimacs(text: str) -> CnfFormula:
    header = None
    clauses = []
    cur: List[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if header is not None or len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError("malformed header: %r" % raw)
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise DimacsError("malformed header: %r" % raw)
            if header[0] < 0 or header[1] < 0:
                raise DimacsError("malformed header: %r" % raw)
            continue
        if header is None:
            raise DimacsError("clause before header")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError("bad token %r" % tok)
            if lit == 0:
                clauses.append(cur)
                cur = []
            else:
                if abs(lit) > header[0]:
                    raise DimacsError("literal %d out of range" % lit)
                cur.append(lit)
    if header is None:
        raise DimacsError("missing header")
    if cur:
        raise DimacsError("unterminated clause")
    if len(clauses) != header[1]:
        raise DimacsError("header declares %d clauses, found %d" % (header[1], len(clauses)))
    return CnfFormula(header[0], [Clause(c) for c in clauses])


def emit_dimacs(F: CnfFormula, comments: Sequence[str] = ()) -> str:
    lines = ["c " + c for c in comments]
    lines.append("p cnf %d %d" % (F.variable_count, len(F.clauses)))
    for c in F.clauses:
        lines.append(" ".join(str(l) for l in c.lits) + (" 0" if c.lits else "0"))
    return "\n".join(lines) + "\n"
