"""Exact multilinear polynomials, terms, conical juntas and designs.

A monomial is a frozenset of variable indices (x_v^2 = x_v is built in).
Coefficient rings: "Z" (int), "Q" (Fraction) and "Fp" (ints reduced mod p).
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterable, Mapping, Optional, Sequence

from .cnf import Clause, CnfFormula

ONE = frozenset()


class RingError(ValueError):
    pass


def _norm(ring, p, c):
    if ring == "Z":
        if isinstance(c, Fraction):
            if c.denominator != 1:
                raise RingError("non-integer coefficient %s over Z" % c)
            return int(c)
        if not isinstance(c, int):
            raise RingError("non-integer coefficient %r over Z" % (c,))
        return c
    if ring == "Q":
        return Fraction(c)
    if ring == "Fp":
        c = Fraction(c)
        return (c.numerator * pow(c.denominator, -1, p)) % p
    raise RingError("unknown ring %r" % ring)


class MultilinearPoly:
    __slots__ = ("ring", "p", "terms")

    def __init__(self, terms: Optional[Mapping] = None, ring: str = "Z", p: Optional[int] = None):
        if ring == "Fp" and not p:
            raise RingError("Fp needs a modulus")
        self.ring = ring
        self.p = p if ring == "Fp" else None
        t = {}
        for mono, c in (terms or {}).items():
            c = _norm(ring, self.p, c)
            if c:
                t[frozenset(mono)] = c
        self.terms: Dict[frozenset, object] = t

    @classmethod
    def constant(cls, c, ring="Z", p=None):
        return cls({ONE: c}, ring, p)

    @classmethod
    def var(cls, v, ring="Z", p=None):
        return cls({frozenset([v]): 1}, ring, p)

    def _new(self, terms):
        out = MultilinearPoly.__new__(MultilinearPoly)
        out.ring = self.ring
        out.p = self.p
        out.terms = terms
        return out

    def _check(self, other):
        if self.ring != other.ring:
            raise RingError("ring mismatch: %s vs %s" % (self.ring, other.ring))
        if self.p != other.p:
            raise RingError("modulus mismatch: %s vs %s" % (self.p, other.p))

    def _coerce(self, other):
        if isinstance(other, MultilinearPoly):
            self._check(other)
            return other
        return MultilinearPoly.constant(other, self.ring, self.p)

    def _reduce(self, c):
        if self.ring == "Fp":
            return c % self.p
        return c

    def __add__(self, other):
        other = self._coerce(other)
        t = dict(self.terms)
        for m, c in other.terms.items():
            v = self._reduce(t.get(m, 0) + c)
            if v:
                t[m] = v
            else:
                t.pop(m, None)
        return self._new(t)

    __radd__ = __add__

    def __neg__(self):
        return self._new({m: self._reduce(-c) for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, MultilinearPoly):
            return self.scale(other)
        self._check(other)
        t: Dict[frozenset, object] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = m1 | m2
                t[m] = t.get(m, 0) + c1 * c2
        return self._new({m: self._reduce(c) for m, c in t.items() if self._reduce(c)})

    __rmul__ = __mul__

    def scale(self, k):
        k = _norm(self.ring, self.p, k)
        if not k:
            return self._new({})
        return self._new({m: self._reduce(c * k) for m, c in self.terms.items()})

    def degree(self) -> int:
        return max((len(m) for m in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def variables(self) -> frozenset:
        s = set()
        for m in self.terms:
            s |= m
        return frozenset(s)

    def evaluate(self, x: Sequence[int]):
        total = 0
        for m, c in self.terms.items():
            if all(x[v - 1] for v in m):
                total += c
        return self._reduce(total)

    def evaluate_partial(self, x: Mapping[int, int]):
        total = 0
        for m, c in self.terms.items():
            if all(x[v] for v in m):
                total += c
        return self._reduce(total)

    def restrict(self, rho: Mapping[int, int]) -> "MultilinearPoly":
        t: Dict[frozenset, object] = {}
        for m, c in self.terms.items():
            keep = []
            dead = False
            for v in m:
                if v in rho:
                    if not rho[v]:
                        dead = True
                        break
                else:
                    keep.append(v)
            if dead:
                continue
            k = frozenset(keep)
            t[k] = t.get(k, 0) + c
        return self._new({m: self._reduce(c) for m, c in t.items() if self._reduce(c)})

    def magnitude(self):
        return sum(abs(c) for c in self.terms.values())

    def max_coefficient(self):
        return max((abs(c) for c in self.terms.values()), default=0)

    def __eq__(self, other):
        if isinstance(other, MultilinearPoly):
            return self.ring == other.ring and self.p == other.p and self.terms == other.terms
        try:
            return self == self._coerce(other)
        except (RingError, TypeError, ValueError):
            return False

    def __hash__(self):
        return hash((self.ring, self.p, frozenset(self.terms.items())))

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda mc: (len(mc[0]), sorted(mc[0])))

    def to_ring(self, ring, p=None):
        return MultilinearPoly(self.terms, ring, p)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            mono = "*".join("x%d" % v for v in sorted(m))
            parts.append("%s%s" % (c, ("*" + mono) if mono else ""))
        return " + ".join(parts)


class Term:
    """prod_{v in pos} x_v * prod_{v in neg} (1 - x_v)."""

    __slots__ = ("pos", "neg", "_hash")

    def __init__(self, pos: Iterable[int] = (), neg: Iterable[int] = ()):
        self.pos = frozenset(pos)
        self.neg = frozenset(neg)
        if self.pos & self.neg:
            raise ValueError("term literals must be on disjoint variables")
        self._hash = hash((self.pos, self.neg))

    @property
    def degree(self) -> int:
        return len(self.pos) + len(self.neg)

    def variables(self) -> frozenset:
        return self.pos | self.neg

    def evaluate(self, x: Sequence[int]) -> int:
        return int(all(x[v - 1] for v in self.pos) and not any(x[v - 1] for v in self.neg))

    def to_poly(self, ring="Z", p=None) -> MultilinearPoly:
        t = {}
        neg = sorted(self.neg)
        for r in range(len(neg) + 1):
            for S in combinations(neg, r):
                t[self.pos | frozenset(S)] = (-1) ** r
        return MultilinearPoly(t, ring, p)

    def __mul__(self, other: "Term") -> Optional["Term"]:
        """Product of two terms, or None when they conflict (product is zero)."""
        pos = self.pos | other.pos
        neg = self.neg | other.neg
        if pos & neg:
            return None
        return Term(pos, neg)

    def as_assignment(self) -> Dict[int, int]:
        d = {v: 1 for v in self.pos}
        d.update({v: 0 for v in self.neg})
        return d

    @staticmethod
    def from_assignment(rho: Mapping[int, int]) -> "Term":
        return Term([v for v, b in rho.items() if b], [v for v, b in rho.items() if not b])

    def sort_key(self):
        return (self.degree, sorted(self.pos), sorted(self.neg))

    def __eq__(self, other):
        return isinstance(other, Term) and self.pos == other.pos and self.neg == other.neg

    def __hash__(self):
        return self._hash

    def __repr__(self):
        parts = ["x%d" % v for v in sorted(self.pos)] + ["(1-x%d)" % v for v in sorted(self.neg)]
        return "*".join(parts) if parts else "1"


def clause_to_term(C: Clause) -> Term:
    """The negation of C as a term: equals 1 exactly where C is falsified."""
    if C.is_tautology():
        raise ValueError("tautological clause has no falsifying assignment")
    return Term([-l for l in C.lits if l < 0], [l for l in C.lits if l > 0])


class ConicalJunta:
    """Positive combination of terms."""

    __slots__ = ("entries",)

    def __init__(self, entries: Optional[Mapping[Term, object]] = None):
        e = {}
        for t, c in (entries or {}).items():
            if c == 0:
                continue
            if c < 0:
                raise ValueError("negative junta coefficient %s" % c)
            e[t] = e.get(t, 0) + c
        self.entries: Dict[Term, object] = e

    def add(self, t: Term, c=1):
        if c < 0:
            raise ValueError("negative junta coefficient %s" % c)
        if c:
            self.entries[t] = self.entries.get(t, 0) + c

    def to_poly(self, ring="Z", p=None) -> MultilinearPoly:
        out = MultilinearPoly({}, ring, p)
        for t, c in self.entries.items():
            out = out + t.to_poly(ring, p).scale(c)
        return out

    def evaluate(self, x: Sequence[int]):
        return sum(c * t.evaluate(x) for t, c in self.entries.items())

    def degree(self) -> int:
        return max((t.degree for t in self.entries), default=0)

    def is_integral(self) -> bool:
        return all(isinstance(c, int) or (isinstance(c, Fraction) and c.denominator == 1)
                   for c in self.entries.values())

    def sorted_entries(self):
        return sorted(self.entries.items(), key=lambda tc: tc[0].sort_key())

    def __eq__(self, other):
        return isinstance(other, ConicalJunta) and self.entries == other.entries

    def __len__(self):
        return len(self.entries)

    def __repr__(self):
        return "ConicalJunta(%s)" % " + ".join("%s*%s" % (c, t) for t, c in self.sorted_entries())


def compose_error_reduction(P: MultilinearPoly) -> MultilinearPoly:
    """2P - P^2, i.e. q(P) for q(z) = z(2 - z)."""
    return P.scale(2) - P * P


def poly_from_terms(pairs, ring="Z", p=None) -> MultilinearPoly:
    """Sum of coeff * term over (Term, coeff) pairs."""
    out = MultilinearPoly({}, ring, p)
    for t, c in pairs:
        out = out + t.to_poly(ring, p).scale(c)
    return out


# designs

class DesignError(ValueError):
    pass


class DesignFunctional:
    """Linear functional on multilinear monomials of degree <= d."""

    def __init__(self, d: int, values: Mapping, ring: str = "Q", p: Optional[int] = None):
        self.d = d
        self.ring = ring
        self.p = p if ring == "Fp" else None
        self.values = {frozenset(m): _norm(ring, self.p, c) for m, c in values.items()}

    def __call__(self, poly_or_mono):
        if isinstance(poly_or_mono, MultilinearPoly):
            total = 0
            for m, c in poly_or_mono.terms.items():
                total += c * self.value(m)
            return _norm(self.ring, self.p, total) if self.ring == "Fp" else total
        return self.value(frozenset(poly_or_mono))

    def value(self, m: frozenset):
        if m not in self.values:
            if len(m) > self.d:
                raise DesignError("monomial %s exceeds degree bound %d" % (sorted(m), self.d))
            raise DesignError("missing value for monomial %s" % sorted(m))
        return self.values[m]

    def variables(self) -> frozenset:
        s = set()
        for m in self.values:
            s |= m
        return frozenset(s)


class DesignReport:
    def __init__(self, ok, witness=None, reason=""):
        self.ok = ok
        self.witness = witness
        self.reason = reason

    def __bool__(self):
        return self.ok

    def __repr__(self):
        return "DesignReport(ok=%s, witness=%s, %s)" % (self.ok, self.witness, self.reason)


def _monomials_up_to(variables, k):
    vs = sorted(variables)
    for r in range(k + 1):
        for S in combinations(vs, r):
            yield frozenset(S)


def verify_design(phi: DesignFunctional, F: CnfFormula, d: int, variables=None) -> DesignReport:
    """Check phi(1) = 1 and phi(q * C_i-bar) = 0 when deg q + width C_i < d."""
    if variables is None:
        variables = range(1, F.variable_count + 1)
    try:
        if phi.value(ONE) != 1:
            return DesignReport(False, None, "phi(1) != 1")
        for i, C in enumerate(F.clauses, 1):
            if C.is_tautology():
                continue
            a = clause_to_term(C).to_poly(phi.ring, phi.p)
            budget = d - 1 - C.width
            if budget < 0:
                continue
            for q in _monomials_up_to(variables, budget):
                prod = MultilinearPoly({q: 1}, phi.ring, phi.p) * a
                val = phi(prod)
                if phi.ring == "Fp":
                    val %= phi.p
                if val != 0:
                    return DesignReport(False, (i, tuple(sorted(q))), "phi(q*C%d) != 0" % i)
    except DesignError as e:
        return DesignReport(False, None, str(e))
    return DesignReport(True)


def combine_designs(phi: DesignFunctional, psi: DesignFunctional) -> DesignFunctional:
    """Product functional on the union of two disjoint variable sets."""
    if phi.ring != psi.ring or phi.p != psi.p:
        raise DesignError("field mismatch")
    if phi.d != psi.d:
        raise DesignError("degree bound mismatch")
    if phi.variables() & psi.variables():
        raise DesignError("overlapping variables")
    vals = {}
    for m1, c1 in phi.values.items():
        for m2, c2 in psi.values.items():
            if len(m1) + len(m2) <= phi.d:
                vals[m1 | m2] = c1 * c2
    return DesignFunctional(phi.d, vals, phi.ring, phi.p)
