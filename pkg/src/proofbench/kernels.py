"""Exhaustive boolean-cube kernels.

Clauses and terms are packed as (pos_mask, neg_mask) pairs of uint64 with bit v-1
standing for variable v. Point `bits` of the cube is the assignment with
x_v = (bits >> (v-1)) & 1.

The numba kernels are used by default. Set PROOFBENCH_NO_NUMBA=1 to run the
pure-numpy versions instead (same results, used by the benchmark and tests).
"""
from __future__ import annotations

import os

import numpy as np

MAX_VARS = 30
_CHUNK = 1 << 16

USE_NUMBA = os.environ.get("PROOFBENCH_NO_NUMBA", "") not in ("1", "true", "yes")

if USE_NUMBA:
    try:
        import numba as nb
    except ImportError:  # pragma: no cover
        USE_NUMBA = False


def pack_clauses(clauses):
    pos = np.zeros(len(clauses), dtype=np.uint64)
    neg = np.zeros(len(clauses), dtype=np.uint64)
    for k, c in enumerate(clauses):
        p = 0
        q = 0
        for l in c.lits:
            if l > 0:
                p |= 1 << (l - 1)
            else:
                q |= 1 << (-l - 1)
        pos[k] = p
        neg[k] = q
    return pos, neg


def pack_terms(terms):
    """terms: iterable of (positive vars, negative vars)."""
    terms = list(terms)
    pos = np.zeros(len(terms), dtype=np.uint64)
    neg = np.zeros(len(terms), dtype=np.uint64)
    for k, (P, N) in enumerate(terms):
        pos[k] = sum(1 << (v - 1) for v in P)
        neg[k] = sum(1 << (v - 1) for v in N)
    return pos, neg


def _check_n(n):
    if n > MAX_VARS:
        raise ValueError("exhaustive evaluation limited to %d variables (got %d)" % (MAX_VARS, n))


# numpy versions

def _np_falsified_counts(pos, neg, n):
    total = 1 << n
    out = np.zeros(total, dtype=np.int64)
    for start in range(0, total, _CHUNK):
        xs = np.arange(start, min(total, start + _CHUNK), dtype=np.uint64)
        acc = np.zeros(len(xs), dtype=np.int64)
        for k in range(len(pos)):
            acc += ((xs & pos[k]) == 0) & ((xs & neg[k]) == neg[k])
        out[start:start + len(xs)] = acc
    return out


def _np_term_sums(pos, neg, coeff, n):
    total = 1 << n
    out = np.zeros(total, dtype=np.int64)
    for start in range(0, total, _CHUNK):
        xs = np.arange(start, min(total, start + _CHUNK), dtype=np.uint64)
        acc = np.zeros(len(xs), dtype=np.int64)
        for k in range(len(pos)):
            acc += coeff[k] * (((xs & pos[k]) == pos[k]) & ((xs & neg[k]) == 0))
        out[start:start + len(xs)] = acc
    return out


if USE_NUMBA:
    @nb.njit(cache=True)
    def _nb_falsified_counts(pos, neg, n):
        total = 1 << n
        out = np.zeros(total, dtype=np.int64)
        for x in range(total):
            ux = np.uint64(x)
            c = 0
            for k in range(pos.shape[0]):
                if (ux & pos[k]) == 0 and (ux & neg[k]) == neg[k]:
                    c += 1
            out[x] = c
        return out

    @nb.njit(cache=True)
    def _nb_term_sums(pos, neg, coeff, n):
        total = 1 << n
        out = np.zeros(total, dtype=np.int64)
        for x in range(total):
            ux = np.uint64(x)
            s = 0
            for k in range(pos.shape[0]):
                if (ux & pos[k]) == pos[k] and (ux & neg[k]) == 0:
                    s += coeff[k]
            out[x] = s
        return out


def falsified_counts(clauses, n, use_numba=None):
    """Number of falsified clauses (with multiplicity) at every point of {0,1}^n."""
    _check_n(n)
    pos, neg = pack_clauses(clauses)
    if use_numba is None:
        use_numba = USE_NUMBA
    if use_numba and len(pos):
        return _nb_falsified_counts(pos, neg, n)
    return _np_falsified_counts(pos, neg, n)


def min_falsified_count(clauses, n):
    return int(falsified_counts(clauses, n).min())


def term_sums(terms, coeffs, n, use_numba=None):
    """Sum of integer-weighted terms at every point of {0,1}^n.

    Falls back to exact Python integers when int64 could overflow.
    """
    _check_n(n)
    pos, neg = pack_terms(terms)
    coeffs = list(coeffs)
    if sum(abs(int(c)) for c in coeffs) >= (1 << 62):
        return _py_term_sums(pos, neg, coeffs, n)
    c = np.array([int(v) for v in coeffs], dtype=np.int64)
    if use_numba is None:
        use_numba = USE_NUMBA
    if use_numba and len(pos):
        return _nb_term_sums(pos, neg, c, n)
    return _np_term_sums(pos, neg, c, n)


def _py_term_sums(pos, neg, coeffs, n):
    out = []
    P = [int(p) for p in pos]
    N = [int(q) for q in neg]
    for x in range(1 << n):
        s = 0
        for k in range(len(P)):
            if (x & P[k]) == P[k] and (x & N[k]) == 0:
                s += coeffs[k]
        out.append(s)
    return out
