import json
import os
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from proofbench import io_json as J
from proofbench.checkers import EpsNsProof, MalformedProof, NsProof
from proofbench.poly import MultilinearPoly
from proofbench.suite import random_line_formulation, random_maxresw_proof, random_revres_proof
from proofbench.translators import revres_to_res, revres_to_sopl, revres_to_usa, revrest_to_uns


def roundtrip(obj):
    text = J.dumps(J.proof_to_json(obj))
    back = J.proof_from_json(json.loads(text))
    assert J.dumps(J.proof_to_json(back)) == text
    return back


@given(st.fractions(), st.sampled_from(["Q"]))
def test_coefficient_strings(c, ring):
    assert J.coeff_from_str(J.coeff_to_str(c), ring) == c


def test_non_integral_over_z():
    with pytest.raises(MalformedProof):
        J.coeff_from_str("1/2", "Z")


def test_proof_roundtrips():
    rng = random.Random(0)
    for k in range(12):
        F, pf = random_revres_proof(rng, terminal=k % 2 == 1)
        for obj in (pf, revres_to_res(F, pf), revres_to_usa(F, pf)):
            roundtrip(obj)
        if pf.kind == "terminal":
            ns = revrest_to_uns(F, pf)
            roundtrip(ns)
            roundtrip(EpsNsProof(ns, Fraction(1, 3)))
        roundtrip(random_maxresw_proof(rng)[1])


def test_rational_ns_roundtrip():
    q = MultilinearPoly({frozenset([1]): Fraction(-3, 4), frozenset(): 2}, "Q")
    back = roundtrip(NsProof({1: q}, "Q"))
    assert back.coeffs[1] == q


def test_formulation_roundtrip():
    rng = random.Random(1)
    for _ in range(5):
        _, phi = random_line_formulation(rng)
        obj = J.formulation_to_json(phi)
        assert J.dumps(J.formulation_to_json(J.formulation_from_json(obj))) == J.dumps(obj)
    F, pf = random_revres_proof(rng)
    obj = J.formulation_to_json(revres_to_sopl(F, pf))
    assert J.dumps(J.formulation_to_json(J.formulation_from_json(obj))) == J.dumps(obj)


@pytest.mark.parametrize("obj", [{}, {"system": "nope"}, {"system": "revres"},
                                 {"system": "revres", "multiplicities": {}, "steps": [{"op": "jump"}]},
                                 {"system": "ns", "coeffs": {"1": {"terms": [{"vars": [1], "coeff": "x"}]}}}])
def test_malformed(obj):
    with pytest.raises(MalformedProof):
        J.proof_from_json(obj)


def test_write_atomic(tmp_path):
    p = tmp_path / "sub" / "a.json"
    J.write_json(p, {"b": 1, "a": [1, 2]})
    assert p.read_text() == '{"a":[1,2],"b":1}\n'
    assert J.read_json(p) == {"a": [1, 2], "b": 1}
    assert os.listdir(p.parent) == ["a.json"]
