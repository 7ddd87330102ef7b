from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from iif.errors import BadFunctionalParameter, HypothesisViolation, NotConstructible, NotFrobeniusBlock
from iif.frobenius import CharPoly, companion, make_pair, make_phi, phi_exists
from iif.jordan import charpoly
from iif.linalg import Mat
from iif.numfield import QQ


def test_companion_examples():
    assert companion(CharPoly((-5,))) == Mat([[5]], QQ)
    assert companion(CharPoly((1, 0))) == Mat([[0, -1], [1, 0]], QQ)


@given(st.lists(st.fractions(min_value=-9, max_value=9, max_denominator=5), min_size=1, max_size=6))
@settings(max_examples=40, deadline=None)
def test_companion_charpoly(coeffs):
    chi = CharPoly(tuple(coeffs))
    assert charpoly(companion(chi)) == list(chi.monic)


def test_phi_exists_examples():
    assert phi_exists(CharPoly((1, 0)), 1, 1)
    assert not phi_exists(CharPoly((-5,)), 1, -1)
    assert not phi_exists(CharPoly((0, 0)), 1, -1)
    with pytest.raises(HypothesisViolation):
        phi_exists(CharPoly((1, 0)), -1, -1, "conjugation")
    with pytest.raises(NotFrobeniusBlock):
        phi_exists(CharPoly((0, 1)), 1, 1)


def test_make_phi_examples():
    b = make_phi(CharPoly((1, 0)), 1, 1)
    assert b.a_seq[:3] == (1, 0, -1)
    assert b.m == Mat([[1, 0], [0, -1]], QQ)
    assert b.m @ b.phi == Mat([[0, -1], [-1, 0]], QQ)
    assert make_phi(CharPoly((0, 0)), -1, -1).m == Mat([[0, -1], [1, 0]], QQ)
    assert make_phi(CharPoly((-5,)), 1, 1).m == Mat([[1]], QQ)
    with pytest.raises(NotConstructible):
        make_phi(CharPoly((-5,)), 1, -1)


def test_make_pair_examples():
    assert make_pair(CharPoly((-5,)), 1, 1, [1]) == (Mat([[5]], QQ), Mat([[1]], QQ))
    a, f = make_pair(CharPoly((-5,)), 1, -1)
    assert a == Mat([[5, 0], [0, -5]], QQ) and f == Mat([[0, 1], [1, 0]], QQ)
    a, f = make_pair(CharPoly((1, 0)), 1, 1, [2, 0])
    assert f == Mat([[2, 0], [0, -2]], QQ)


def test_make_pair_bad_f():
    with pytest.raises(BadFunctionalParameter):
        make_pair(CharPoly((1, 0)), 1, 1, [0, 0, 1])
    with pytest.raises(BadFunctionalParameter):
        make_pair(CharPoly((1, 0)), 1, -1, [1, 1])
    with pytest.raises(BadFunctionalParameter):
        make_pair(CharPoly((-5,)), 1, -1, [1])


def test_skew_case_forces_even_polynomial():
    chi = CharPoly.from_factor([Fraction(3), 0, 1], 2)
    b = make_phi(chi, -1, -1)
    assert chi.coeffs[1] == 0
    assert b.m == -b.m.T and b.m @ b.phi == (b.m @ b.phi).T
