import numpy as np
import pytest

from iif.canonical import (AdjPaired, AdjReal, GenC2, IsoHyperbolic, IsoUnimodular, canonicalize,
                           group_factors, isomorphic, make_summand, normalize, sign_characteristic)
from iif.errors import NotEigenvalue, ParameterOutOfDomain
from iif.linalg import Mat
from iif.numfield import CC, QQ, QQI, GaussianRational

G = GaussianRational


def test_make_summand_examples():
    a, f = make_summand(IsoUnimodular(2, G(1), G(1)))
    assert a == Mat([[1, 2], [0, 1]], QQI)
    assert f == Mat([[0, G(0, -1)], [G(0, 1), 0]], QQI)
    assert a.star() @ f @ a == f
    a, f = make_summand(AdjReal(1, G(3), G(-1)))
    assert a == Mat([[3]], QQI) and f == Mat([[-1]], QQI)
    a, f = make_summand(GenC2(1, 0, 1, 1, 1, -1))
    assert a == Mat([[0, -1], [1, 0]], QQ) and f == Mat.identity(2, QQ)
    assert a.T == -a


def test_parameter_domain():
    with pytest.raises(ParameterOutOfDomain):
        make_summand(AdjReal(1, G(1, 1), G(1)))
    with pytest.raises(ParameterOutOfDomain):
        make_summand(IsoHyperbolic(1, G(0, 1), G(1)))


def test_normalize_examples():
    assert normalize(IsoHyperbolic(1, G(1, 0) / 2, G(-1))) == IsoHyperbolic(1, G(2), G(1))
    assert normalize(AdjPaired(1, G(2, -1), G(0, 1))) == AdjPaired(1, G(2, 1), G(0, 1))
    assert normalize(AdjReal(1, G(3), G(-1))) == AdjReal(1, G(3), G(-1))


def test_canonicalize_examples():
    cf = canonicalize(Mat([[2, 0], [0, 0.5]], CC), Mat([[0, 1], [1, 0]], CC), "isometric")
    (s,) = cf.summands
    assert s.family == "IsoHyperbolic" and abs(s.lam - 2) < 1e-9 and abs(s.mu - 1) < 1e-9
    cf = canonicalize(Mat([[3]], CC), Mat([[-1]], CC), "selfadjoint")
    (s,) = cf.summands
    assert s.family == "AdjReal" and abs(s.lam - 3) < 1e-12 and abs(s.mu + 1) < 1e-12
    cf = canonicalize(Mat(np.diag([1j, -1j]), CC), Mat([[0, 1], [1, 0]], CC), "selfadjoint")
    (s,) = cf.summands
    assert s.family == "AdjPaired" and abs(s.lam - 1j) < 1e-9 and abs(s.mu - 1) < 1e-9


def test_canonical_pair_is_fixed():
    summands = (AdjReal(2, 1.0, 1j), AdjPaired(1, 2 + 1j, -1 + 0j))
    from iif.canonical import materialize
    a, f = materialize(summands)
    cf = canonicalize(a, f, "selfadjoint")
    a2, f2 = cf.materialize()
    assert sorted(s.family for s in cf.summands) == ["AdjPaired", "AdjReal"]
    assert np.allclose(np.sort_complex(np.linalg.eigvals(a2.to_numpy())), np.sort_complex(np.linalg.eigvals(a.to_numpy())))


def test_skewadjoint_note():
    a = Mat([[0, 1], [-1, 0]], CC)
    cf = canonicalize(a, Mat.identity(2, CC), "skewadjoint")
    assert "operator_times_i" in cf.notes
    a2, f2 = cf.materialize()
    w = cf.witness.to_numpy()
    assert np.allclose(np.linalg.solve(w, a.to_numpy() @ w), a2.to_numpy())


def test_sign_characteristic_examples():
    assert sign_characteristic(Mat([[3]], CC), Mat([[-1]], CC), 3) == [(1, -1)]
    assert sign_characteristic(Mat([[0, 1], [0, 0]], CC), Mat([[0, 1], [1, 0]], CC), 0) == [(2, 1)]
    assert sorted(sign_characteristic(Mat(np.diag([5.0, 5.0]), CC), Mat(np.diag([1.0, -1.0]), CC), 5)) == [(1, -1), (1, 1)]
    with pytest.raises(NotEigenvalue):
        sign_characteristic(Mat([[3]], CC), Mat([[1]], CC), 2)


def test_isomorphic_examples():
    a = Mat(np.diag([2.0, 0.5]), CC)
    f = Mat([[0, 1], [1, 0]], CC)
    assert isomorphic(a, f, Mat(np.diag([0.5, 2.0]), CC), f, "isometric")
    eye = Mat(np.eye(2), CC)
    assert not isomorphic(eye, eye, eye, Mat(np.diag([1.0, -1.0]), CC), "selfadjoint")


def test_group_factors_examples():
    assert group_factors(Mat(np.eye(3), CC)).factors == ((1, 3, 0),)
    g = group_factors(Mat(np.diag([2j, -3, 5]), CC))
    assert sorted(((complex(e).real, complex(e).imag), p, q) for e, p, q in g.factors) == [((0, 1), 1, 0), ((1, 0), 1, 1)]
    g = group_factors(Mat(np.diag([1, -1, 1j, -1j]), CC))
    assert [(p, q) for _, p, q in g.factors] == [(1, 1), (1, 1)]
    assert g.render() == "U(D) ≅ U(1,1) × U(1,1)"
