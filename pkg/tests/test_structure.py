import warnings

import numpy as np
import pytest

from iif.errors import NotApplicable, NotDiagonalizable
from iif.linalg import Mat
from iif.numfield import CC, QQ, QQI, RR, GaussianRational
from iif.structure import FormKind, OpKind, classify, diagonalize_form, hermitize, split_cosets

G = GaussianRational


def test_classify_examples():
    assert classify(Mat.identity(2, QQ), Mat([[2, 1], [1, 3]], QQ)).has(OpKind.Isometric)
    r = classify(Mat([[2, 0], [0, 0.5]], RR), Mat([[0, 1], [1, 0]], RR))
    assert r.has(OpKind.Isometric) and r.form_kind is FormKind.Hermitian
    r = classify(Mat([[0, 1], [-1, 0]], QQ), Mat.identity(2, QQ))
    assert r.has(OpKind.Skewadjoint) and r.has(OpKind.Isometric)


def test_hermitize_skew_form():
    a, f, note = hermitize(Mat.identity(2, QQI), Mat([[0, 1], [-1, 0]], QQI))
    assert f == Mat([[0, G(0, 1)], [G(0, -1), 0]], QQI)
    assert f == f.star() and note == ("form_times_i",)


def test_hermitize_noop_and_operator():
    a0, f0 = Mat([[1, 2], [2, 1]], QQI), Mat.identity(2, QQI)
    a, f, note = hermitize(a0, f0)
    assert a == a0 and f == f0 and note == ()
    a, f, note = hermitize(Mat([[0, 1], [-1, 0]], QQI), Mat.identity(2, QQI))
    assert a == Mat([[0, G(0, 1)], [G(0, -1), 0]], QQI) and a == a.star()
    assert note == ("operator_times_i",)


def test_hermitize_needs_conjugation():
    with pytest.raises(NotApplicable):
        hermitize(Mat([[0, 1], [-1, 0]], QQ), Mat.identity(2, QQ))


def test_diagonalize_examples():
    s, d = diagonalize_form(Mat([[2, 0], [0, G(0, -3)]], QQI))
    assert s == Mat.identity(2, QQI) and d == Mat([[2, 0], [0, G(0, -3)]], QQI)
    s, d = diagonalize_form(Mat([[0, 1], [1, 0]], CC))
    sn = s.to_numpy()
    dn = sn.conj().T @ np.array([[0, 1], [1, 0]]) @ sn
    assert np.allclose(dn, np.diag(np.diag(dn)))
    assert sorted(np.sign(np.diag(dn).real)) == [-1, 1]


def test_not_diagonalizable():
    with pytest.raises(NotDiagonalizable), warnings.catch_warnings():
        warnings.simplefilter("ignore")
        diagonalize_form(Mat([[0, 2], [1, 0]], QQI))


def test_pencil_diagonalization():
    rng = np.random.default_rng(2)
    d = np.diag(np.exp(1j * np.array([0.1, 0.1, 1.2, 2.0])) * [1, -2, 3, 1])
    s = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    f = s.conj().T @ d @ s
    w, dd = diagonalize_form(Mat(f, CC))
    out = w.to_numpy().conj().T @ f @ w.to_numpy()
    assert np.linalg.norm(out - np.diag(np.diag(out))) < 1e-8 * np.linalg.norm(f)


def test_split_positive_definite():
    f = np.array([[2, 1], [1, 2]])
    # F^-1 is selfadjoint for F
    sp = split_cosets(Mat(np.linalg.inv(f), CC), Mat(f, CC))
    assert [(b.e, b.p, b.q) for b in sp.blocks] == [(1, 2, 0)]


def test_split_mixed_cosets():
    u = np.exp(1j * np.array([0.3, 1.1, 2.0]))
    sp = split_cosets(Mat(np.diag(u), CC), Mat(np.diag([2j, -3, 5]), CC))
    assert sorted((complex(e).imag > 0.5, p, q) for e, p, q in sp.signature_data) == [(False, 1, 1), (True, 1, 0)]


def test_split_exact_diagonal():
    sp = split_cosets(Mat([[G(0, 1), 0], [0, 1]], QQI), Mat([[G(0, 1), 0], [0, 1]], QQI))
    assert [b.size for b in sp.blocks] == [1, 1]
    assert sp.leakage == 0
