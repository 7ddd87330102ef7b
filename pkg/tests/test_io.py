import json
from fractions import Fraction

import numpy as np
import pytest

from iif import io
from iif.canonical import AdjReal, CanonicalForm
from iif.errors import DimensionMismatch, ParseError
from iif.linalg import Mat
from iif.numfield import CC, QQ, QQI, GaussianRational, TolerancePolicy

G = GaussianRational


def test_minimal_document():
    a, f, field, pol = io.parse('{"version": "iif/1", "field": "rational", "matrix_a": [["1"]], "matrix_f": [["1"]]}')
    assert a == Mat([[1]], QQ) and f == Mat([[1]], QQ) and field == QQ


def test_gaussian_entry():
    doc = {"field": "gaussian_rational", "matrix_a": [[["1/2", "0/1"]]], "matrix_f": [[["1", "0"]]]}
    a, _, field, _ = io.parse(json.dumps(doc))
    assert a.data[0, 0] == G(Fraction(1, 2)) and field == QQI


def test_exact_entries_refuse_floats():
    with pytest.raises(ParseError):
        io.parse('{"field": "rational", "matrix_a": [[0.5]], "matrix_f": [[1]]}')


def test_errors():
    with pytest.raises(ParseError) as err:
        io.parse('{"field": "rational",\n "matrix_a": [["1"]] "matrix_f": []}')
    assert err.value.line == 2
    with pytest.raises(DimensionMismatch):
        io.parse('{"field": "rational", "matrix_a": [["1", "2"]], "matrix_f": [["1"]]}')
    with pytest.raises(ParseError):
        io.parse('{"version": "iif/9", "field": "rational", "matrix_a": [], "matrix_f": []}')


def test_pair_round_trip():
    a = Mat(np.array([[1 + 2j, 0.1], [3, -4e-17]]), CC)
    f = Mat(np.eye(2), CC)
    text = io.serialize(a, f, TolerancePolicy(1e-9, 1e-7), seed=4)
    a2, f2, _, pol = io.parse(text)
    assert a2 == a and f2 == f and pol == TolerancePolicy(1e-9, 1e-7)
    assert io.serialize(a2, f2, pol, 4) == text


def test_canonical_document():
    cf = CanonicalForm((AdjReal(1, Fraction(3), Fraction(-1)),), None, "exact", "selfadjoint")
    text = io.serialize_canonical(cf)
    doc = json.loads(text)
    assert len(doc["summands"]) == 1 and "witness" not in doc
    assert doc["summands"][0]["params"] == {"lam": "3/1", "mu": "-1/1"}
    back = io.parse_canonical(text)
    assert back.summands == cf.summands
    assert io.serialize_canonical(back) == text
