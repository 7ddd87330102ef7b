"""Canonical summand families, their matrices, normalization and witnesses.

Four families describe isometric and selfadjoint operators for a
diagonalizable form over C with conjugation.  The ``Gen*`` families are the
zeta-adjoint canonical pairs for an epsilon-Hermitian form over C with the
identity involution (``GenA``), over C with conjugation (``GenB``) and over R
(``GenC1`` for real eigenvalues, ``GenC2`` for conjugate pairs a +- ib).

Matrices come out exact (Q, Q(i)) when every parameter is an exact scalar,
and floating otherwise.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from ..errors import ParameterOutOfDomain
from ..linalg import Mat, direct_sum
from ..numfield import (CC, CC_ID, DEFAULT_POLICY, QQ, QQI, QQI_ID, RR, GaussianRational,
                        TolerancePolicy, is_exact_scalar, phase)

_I = GaussianRational(0, 1)


# ---------------------------------------------------------------------------
# scalar helpers

def _exact(*xs) -> bool:
    return all(is_exact_scalar(x) for x in xs)


def _re(x):
    return x.re if isinstance(x, GaussianRational) else (x.real if isinstance(x, complex) else x)


def _im(x):
    if isinstance(x, GaussianRational):
        return x.im
    return x.imag if isinstance(x, complex) else 0


def _cj(x):
    return x.conjugate() if isinstance(x, (GaussianRational, complex)) else x


def _abs2(x):
    return _re(x) * _re(x) + _im(x) * _im(x)


def _is_unit(x, tol=1e-8) -> bool:
    if is_exact_scalar(x):
        return _abs2(x) == 1
    return abs(abs(complex(x)) - 1) <= tol


def _neg_half(x, tol=0.0) -> bool:
    """True when ``phase(x)`` lies in ``[pi, 2 pi)``; floats fold near 2 pi back to 0."""
    if is_exact_scalar(x):
        return _im(x) < 0 or (_im(x) == 0 and _re(x) < 0)
    p = phase(x)
    return math.pi - tol <= p < 2 * math.pi - tol


def _inv_conj(x):
    """``1 / conj(x)``."""
    if isinstance(x, GaussianRational):
        return GaussianRational(1) / x.conjugate()
    if is_exact_scalar(x):
        return Fraction(1) / Fraction(x)
    return 1 / complex(x).conjugate()


def _check_sign(name, v):
    if v not in (1, -1):
        raise ParameterOutOfDomain(f"{name} must be +1 or -1, got {v!r}")


# ---------------------------------------------------------------------------
# building-block matrices (numpy arrays; object dtype when exact)

def _zeros(n, m, exact):
    return np.zeros((n, m), dtype=object if exact else complex)


def _eye(n, exact):
    out = _zeros(n, n, exact)
    for k in range(n):
        out[k, k] = 1
    return out


def jordan(n, lam, exact):
    out = _zeros(n, n, exact)
    for k in range(n):
        out[k, k] = lam
        if k + 1 < n:
            out[k, k + 1] = 1
    return out


def jordan_inv_star(n, lam, exact):
    """``J_n(lam)^{-*}``: the inverse has entry (i, j) = (-1)^(j-i) lam^-(j-i+1) for j >= i."""
    inv = _zeros(n, n, exact)
    li = (GaussianRational(1) / lam if isinstance(lam, GaussianRational) else Fraction(1) / Fraction(lam)) \
        if exact else 1 / complex(lam)
    for i in range(n):
        for j in range(i, n):
            inv[i, j] = (-1) ** (j - i) * li ** (j - i + 1)
    return _star(inv)


def _star(m):
    if m.dtype == object:
        return np.vectorize(_cj, otypes=[object])(m.T) if m.size else m.T.copy()
    return m.conj().T


def cayley_u(n, exact):
    """U_n: ones on the diagonal, twos above it."""
    out = _eye(n, exact)
    for i in range(n):
        for j in range(i + 1, n):
            out[i, j] = 2
    return out


def alt_w(n, exact):
    """W_n: entry (n-1-k, k) = (-1)^k, zero elsewhere."""
    out = _zeros(n, n, exact)
    for k in range(n):
        out[n - 1 - k, k] = (-1) ** k
    return out


def z_matrix(n, zeta=1, exact=True):
    """Z_n(zeta): entry (n-1-k, k) = zeta^k; Z_n(1) is the reversal matrix Z_n."""
    out = _zeros(n, n, exact)
    for k in range(n):
        out[n - 1 - k, k] = zeta ** k
    return out


def k_matrix(n, eps, exact=True):
    """K_n(eps): 2x2 blocks (-1)^k K(eps) on the block anti-diagonal."""
    if eps == (-1) ** (n + 1):
        kk = np.array([[1, 0], [0, 1]], dtype=object)
    else:
        kk = np.array([[0, -1], [1, 0]], dtype=object)
    out = _zeros(2 * n, 2 * n, exact)
    for k in range(n):
        r = n - 1 - k
        out[2 * r:2 * r + 2, 2 * k:2 * k + 2] = (-1) ** k * kk
    return out


def realified_jordan(n, a, b, exact):
    """J_n(a+ib)^P = I_n (x) M + N_n (x) I_2 with M = [[a, -b], [b, a]]."""
    out = _zeros(2 * n, 2 * n, exact)
    for k in range(n):
        out[2 * k:2 * k + 2, 2 * k:2 * k + 2] = np.array([[a, -b], [b, a]], dtype=object)
        if k + 1 < n:
            out[2 * k, 2 * k + 2] = 1
            out[2 * k + 1, 2 * k + 3] = 1
    return out


def _block_diag(x, y):
    n, m = x.shape[0], y.shape[0]
    out = _zeros(n + m, n + m, x.dtype == object)
    out[:n, :n] = x
    out[n:, n:] = y
    return out


def _hyperbolic(n, c, exact):
    """[[0, c I], [I, 0]]."""
    out = _zeros(2 * n, 2 * n, exact)
    for k in range(n):
        out[k, n + k] = c
        out[n + k, k] = 1
    return out


# ---------------------------------------------------------------------------
# summand types

@dataclass(frozen=True)
class IsoUnimodular:
    """Isometric block (lam U_n, mu i^(n-1) W_n) with |lam| = |mu| = 1."""

    n: int
    lam: object
    mu: object
    family = "IsoUnimodular"

    def validate(self):
        _check_n(self.n)
        if not (_is_unit(self.lam) and _is_unit(self.mu)):
            raise ParameterOutOfDomain("IsoUnimodular needs |lam| = |mu| = 1")

    @property
    def size(self):
        return self.n


@dataclass(frozen=True)
class IsoHyperbolic:
    """Isometric block (J_n(lam) + J_n(lam)^-*, mu [[0, I], [I, 0]]) with |lam| != 1."""

    n: int
    lam: object
    mu: object
    family = "IsoHyperbolic"

    def validate(self):
        _check_n(self.n)
        if self.lam == 0 or _is_unit(self.lam, 0.0 if _exact(self.lam) else 1e-12):
            raise ParameterOutOfDomain("IsoHyperbolic needs lam != 0 and |lam| != 1")
        if not _is_unit(self.mu):
            raise ParameterOutOfDomain("IsoHyperbolic needs |mu| = 1")

    @property
    def size(self):
        return 2 * self.n


@dataclass(frozen=True)
class AdjReal:
    """Selfadjoint block (J_n(lam), mu Z_n) with real lam, |mu| = 1."""

    n: int
    lam: object
    mu: object
    family = "AdjReal"

    def validate(self):
        _check_n(self.n)
        if _im(self.lam) != 0:
            raise ParameterOutOfDomain("AdjReal needs a real eigenvalue")
        if not _is_unit(self.mu):
            raise ParameterOutOfDomain("AdjReal needs |mu| = 1")

    @property
    def size(self):
        return self.n


@dataclass(frozen=True)
class AdjPaired:
    """Selfadjoint block (J_n(lam) + J_n(lam)^*, mu [[0, I], [I, 0]]) with lam not real."""

    n: int
    lam: object
    mu: object
    family = "AdjPaired"

    def validate(self):
        _check_n(self.n)
        if _im(self.lam) == 0:
            raise ParameterOutOfDomain("AdjPaired needs a non-real eigenvalue")
        if not _is_unit(self.mu):
            raise ParameterOutOfDomain("AdjPaired needs |mu| = 1")

    @property
    def size(self):
        return 2 * self.n


def _eqk(n, eps, zeta) -> bool:
    """Existence of the single nilpotent block: eps = 1 for odd n, eps = zeta for even n."""
    return eps == 1 if n % 2 else eps == zeta


@dataclass(frozen=True)
class GenA:
    """zeta-adjoint block for an eps-Hermitian form, complex scalars, identity involution."""

    n: int
    lam: object
    eps: int
    zeta: int
    family = "GenA"

    def validate(self):
        _check_n(self.n)
        _check_sign("eps", self.eps)
        _check_sign("zeta", self.zeta)

    @property
    def variant(self):
        if self.lam != 0:
            return "jordan" if (self.eps, self.zeta) == (1, 1) else "paired"
        return "nilpotent" if _eqk(self.n, self.eps, self.zeta) else "paired"

    @property
    def size(self):
        return 2 * self.n if self.variant == "paired" else self.n


@dataclass(frozen=True)
class GenB:
    """Selfadjoint block for a Hermitian form over C with conjugation."""

    n: int
    lam: object
    delta: int = 1
    family = "GenB"

    def validate(self):
        _check_n(self.n)
        _check_sign("delta", self.delta)

    @property
    def variant(self):
        return "jordan" if _im(self.lam) == 0 else "paired"

    @property
    def size(self):
        return self.n if self.variant == "jordan" else 2 * self.n


@dataclass(frozen=True)
class GenC1:
    """zeta-adjoint block over R with real eigenvalue a."""

    n: int
    a: object
    delta: int
    eps: int
    zeta: int
    family = "GenC1"

    def validate(self):
        _check_n(self.n)
        for name in ("delta", "eps", "zeta"):
            _check_sign(name, getattr(self, name))
        if _im(self.a) != 0:
            raise ParameterOutOfDomain("GenC1 needs a real a")

    @property
    def variant(self):
        if self.a != 0:
            return "jordan" if (self.eps, self.zeta) == (1, 1) else "paired"
        return "nilpotent" if _eqk(self.n, self.eps, self.zeta) else "paired"

    @property
    def size(self):
        return 2 * self.n if self.variant == "paired" else self.n


@dataclass(frozen=True)
class GenC2:
    """zeta-adjoint block over R for the eigenvalue pair a +- ib, b != 0."""

    n: int
    a: object
    b: object
    delta: int
    eps: int
    zeta: int
    family = "GenC2"

    def validate(self):
        _check_n(self.n)
        for name in ("delta", "eps", "zeta"):
            _check_sign(name, getattr(self, name))
        if _im(self.a) != 0 or _im(self.b) != 0:
            raise ParameterOutOfDomain("GenC2 needs real a and b")
        if self.b == 0:
            raise ParameterOutOfDomain("GenC2 needs b != 0")

    @property
    def variant(self):
        if self.zeta == 1:
            return "realified" if self.eps == 1 else "paired"
        return "skew" if self.a == 0 else "paired"

    @property
    def size(self):
        return 4 * self.n if self.variant == "paired" else 2 * self.n


FAMILIES = {c.family: c for c in (IsoUnimodular, IsoHyperbolic, AdjReal, AdjPaired,
                                   GenA, GenB, GenC1, GenC2)}
_ORDER = {name: k for k, name in enumerate(FAMILIES)}


def _check_n(n):
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 1:
        raise ParameterOutOfDomain(f"block size must be a positive integer, got {n!r}")


def _scalars(s):
    return [getattr(s, k) for k in ("lam", "mu", "a", "b") if hasattr(s, k)]


def summand_field(s):
    ex = _exact(*_scalars(s))
    if s.family in ("GenC1", "GenC2"):
        return QQ if ex else RR
    if s.family == "GenA":
        return QQI_ID if ex else CC_ID
    return QQI if ex else CC


def declared_kind(s):
    """``("isometric",)`` or ``("adjoint", eps, zeta)`` for the summand's structure.

    ``eps`` is None when the form is only a unit multiple of a Hermitian one.
    """
    if s.family.startswith("Iso"):
        return ("isometric",)
    if s.family in ("AdjReal", "AdjPaired"):
        return ("adjoint", None, 1)
    if s.family == "GenB":
        return ("adjoint", 1, 1)
    return ("adjoint", s.eps, s.zeta)


# ---------------------------------------------------------------------------
# materialization

def _coerce_param(x, field):
    if field.exact:
        return field.coerce(x)
    return complex(x)


def make_summand(s):
    """The literal canonical pair ``(a, f)`` of a summand."""
    s.validate()
    fl = summand_field(s)
    ex = fl.exact
    n = s.n
    fam = s.family
    if fam == "IsoUnimodular":
        lam, mu = _coerce_param(s.lam, fl), _coerce_param(s.mu, fl)
        ipow = _I ** (n - 1) if ex else 1j ** (n - 1)
        a, f = lam * cayley_u(n, ex), (mu * ipow) * alt_w(n, ex)
    elif fam == "IsoHyperbolic":
        lam, mu = _coerce_param(s.lam, fl), _coerce_param(s.mu, fl)
        a = _block_diag(jordan(n, lam, ex), jordan_inv_star(n, lam, ex))
        f = mu * _hyperbolic(n, 1, ex)
    elif fam == "AdjReal":
        lam, mu = _coerce_param(s.lam, fl), _coerce_param(s.mu, fl)
        a, f = jordan(n, lam, ex), mu * z_matrix(n, 1, ex)
    elif fam == "AdjPaired":
        lam, mu = _coerce_param(s.lam, fl), _coerce_param(s.mu, fl)
        j = jordan(n, lam, ex)
        a, f = _block_diag(j, _star(j)), mu * _hyperbolic(n, 1, ex)
    elif fam == "GenA":
        lam = _coerce_param(s.lam, fl)
        v = s.variant
        if v == "jordan":
            a, f = jordan(n, lam, ex), z_matrix(n, 1, ex)
        elif v == "nilpotent":
            a, f = jordan(n, 0, ex), z_matrix(n, s.zeta, ex)
        else:
            j = jordan(n, lam, ex)
            a, f = _block_diag(j, s.zeta * j.T), _hyperbolic(n, s.eps, ex)
    elif fam == "GenB":
        lam = _coerce_param(s.lam, fl)
        j = jordan(n, lam, ex)
        if s.variant == "jordan":
            a, f = j, s.delta * z_matrix(n, 1, ex)
        else:
            a, f = _block_diag(j, _star(j)), _hyperbolic(n, 1, ex)
    elif fam == "GenC1":
        av = _coerce_param(s.a, fl) if ex else float(_re(s.a))
        v = s.variant
        if v == "jordan":
            a, f = jordan(n, av, ex), s.delta * z_matrix(n, 1, ex)
        elif v == "nilpotent":
            a, f = jordan(n, 0, ex), s.delta * z_matrix(n, s.zeta, ex)
        else:
            j = jordan(n, av, ex)
            a, f = _block_diag(j, s.zeta * j.T), _hyperbolic(n, s.eps, ex)
    elif fam == "GenC2":
        av = _coerce_param(s.a, fl) if ex else float(_re(s.a))
        bv = _coerce_param(s.b, fl) if ex else float(_re(s.b))
        jp = realified_jordan(n, av, bv, ex)
        v = s.variant
        if v == "realified":
            a, f = jp, z_matrix(2 * n, 1, ex)
        elif v == "skew":
            a, f = jp, s.delta * k_matrix(n, s.eps, ex)
        else:
            a, f = _block_diag(jp, s.zeta * jp.T), _hyperbolic(2 * n, s.eps, ex)
    else:  # pragma: no cover - guarded by the dataclass set
        raise ParameterOutOfDomain(f"unknown family {fam}")
    if not ex and fl in (RR,):
        a, f = a.real, f.real
    return Mat(a, fl), Mat(f, fl)


def materialize(summands, field=None):
    """Direct sum of the materialized summands, as ``(a, f)``."""
    pairs = [make_summand(s) for s in summands]
    if not pairs:
        return Mat.zeros(0, 0, field or CC), Mat.zeros(0, 0, field or CC)
    fl = field or _common_field([p[0].field for p in pairs])
    pairs = [(_lift(a, fl), _lift(f, fl)) for a, f in pairs]
    return (direct_sum(*(a for a, _ in pairs), field=fl),
            direct_sum(*(f for _, f in pairs), field=fl))


def _common_field(fields):
    fields = set(fields)
    if len(fields) == 1:
        return fields.pop()
    if fields <= {QQ, QQI}:
        return QQI
    if fields <= {QQ, RR}:
        return RR
    if fields <= {QQI, CC, QQ, RR}:
        return CC
    if fields <= {QQI_ID, CC_ID}:
        return CC_ID
    raise ParameterOutOfDomain("summands live over incompatible fields")


def _lift(m: Mat, fl):
    if m.field == fl:
        return m
    if fl.exact:
        return Mat(m.data, fl)
    return Mat(m.to_numpy(), fl)


# ---------------------------------------------------------------------------
# normalization

def _lex_neg(x, tol) -> bool:
    """True when -x is lexicographically larger than x in (Re, Im)."""
    re, im = _re(x), _im(x)
    if is_exact_scalar(x):
        return re < 0 or (re == 0 and im < 0)
    if abs(re) > tol:
        return re < 0
    return im < -tol


def _neg_unit(x):
    return -x


def normalize(s, policy: TolerancePolicy = DEFAULT_POLICY):
    """Canonical representative of the summand's equivalence class (idempotent)."""
    return normalization_witness(s, policy)[0]


def normalization_witness(s, policy: TolerancePolicy = DEFAULT_POLICY):
    """``(t, w)``: the normalized summand ``t`` and ``w`` with
    ``transport(make_summand(s), w) == make_summand(t)``.
    """
    s.validate()
    fl = summand_field(s)
    ex = fl.exact
    n = s.n
    tol = 0.0 if ex else policy.cluster_tol
    w = _eye(s.size, ex)
    fam = s.family
    if fam == "IsoHyperbolic":
        lam, mu = s.lam, s.mu
        if (_abs2(lam) < 1) if ex else abs(complex(lam)) < 1:
            jis = jordan_inv_star(n, _coerce_param(lam, fl), ex)
            new = _inv_conj(lam) if ex else 1 / complex(lam).conjugate()
            x = _single_chain_basis(jis, _coerce_param(new, fl), ex)
            w = w @ _swap(n, ex) @ _block_diag(x, _star(_inv(x)))
            lam = new
        if _neg_half(mu, tol):
            w = w @ _block_diag(_eye(n, ex), -_eye(n, ex))
            mu = _neg_unit(mu)
        return replace(s, lam=lam, mu=mu), Mat(w, fl)
    if fam == "AdjPaired" or (fam == "GenB" and s.variant == "paired"):
        lam = s.lam
        if _im(lam) < 0:
            w = w @ _swap(n, ex) @ _block_diag(z_matrix(n, 1, ex), z_matrix(n, 1, ex))
            lam = _cj(lam)
        if fam == "GenB":
            return replace(s, lam=lam, delta=1), Mat(w, fl)
        mu = s.mu
        if _neg_half(mu, tol):
            w = w @ _block_diag(_eye(n, ex), -_eye(n, ex))
            mu = _neg_unit(mu)
        return replace(s, lam=lam, mu=mu), Mat(w, fl)
    if fam == "GenA" and s.variant == "paired" and s.zeta == -1 and _lex_neg(s.lam, tol):
        x = z_matrix(n, 1, ex) @ _alt_d(n, ex)
        w = _swap(n, ex) @ _block_diag(x, s.eps * _inv(x).T)
        return replace(s, lam=-s.lam), Mat(w, fl)
    if fam == "GenC1":
        if s.variant == "paired":
            t = replace(s, delta=1)
            if s.zeta == -1 and _re(s.a) < 0:
                x = z_matrix(n, 1, ex) @ _alt_d(n, ex)
                w = _swap(n, ex) @ _block_diag(x, s.eps * _inv(x).T)
                t = replace(t, a=-s.a)
            return t, Mat(_real(w, ex), fl)
        return s, Mat(_real(w, ex), fl)
    if fam == "GenC2":
        t = s
        v = s.variant
        if v == "realified":
            t = replace(t, delta=1)
        if v == "paired":
            t = replace(t, delta=1)
            if s.zeta == -1 and _re(s.a) < 0:
                x = np.kron(z_matrix(n, 1, ex) @ _alt_d(n, ex), _eye(2, ex))
                w = w @ _swap(2 * n, ex) @ _block_diag(x, s.eps * _inv(x).T)
                t = replace(t, a=-s.a)
        if _re(s.b) < 0:
            s0 = np.kron(_eye(n, ex), z_matrix(2, 1, ex))
            if v == "paired":
                w = w @ _block_diag(s0, s0)
            elif v == "realified":
                w = w @ s0
            else:
                w = w @ np.kron(_eye(n, ex), np.array([[1, 0], [0, -1]], dtype=object))
                if s.eps == (-1) ** n:
                    t = replace(t, delta=-t.delta)
            t = replace(t, b=-s.b)
        return t, Mat(_real(w, ex), fl)
    if fam == "GenB":
        return s, Mat(w, fl)
    return s, Mat(w, fl)


def _real(w, exact):
    return w if exact else w.real


def _swap(n, exact):
    """[[0, I], [I, 0]] of size 2n."""
    return _hyperbolic(n, 1, exact)


def _alt_d(n, exact):
    out = _zeros(n, n, exact)
    for k in range(n):
        out[k, k] = (-1) ** k
    return out


def _inv(x):
    if x.dtype == object:
        from ..linalg import inv as _minv
        fl = QQI if any(isinstance(v, GaussianRational) for v in x.flat) else QQ
        return _minv(Mat(x, fl)).data.copy()
    return np.linalg.inv(x)


def _single_chain_basis(b, nu, exact):
    """X with X^-1 b X = J_n(nu), for b with the single eigenvalue nu and one Jordan block."""
    n = b.shape[0]
    nmat = b - nu * _eye(n, exact)
    powers = [_eye(n, exact)]
    for _ in range(n - 1):
        powers.append(nmat @ powers[-1])
    top = powers[-1]
    if exact:
        j = next(j for j in range(n) if any(v != 0 for v in top[:, j]))
    else:
        j = int(np.argmax(np.linalg.norm(top, axis=0)))
    x = _zeros(n, 1, exact)
    x[j, 0] = 1
    cols = [powers[n - 1 - k] @ x for k in range(n)]
    return np.hstack(cols)


# ---------------------------------------------------------------------------
# ordering

def _num(x) -> float:
    return float(x) if is_exact_scalar(x) and not isinstance(x, GaussianRational) else float(_re(x))


def sort_key(s):
    """(family, n, Re lam, Im lam, phase of mu, remaining discrete data)."""
    lam = getattr(s, "lam", getattr(s, "a", 0))
    im = _im(lam) if hasattr(s, "lam") else getattr(s, "b", 0)
    mu = getattr(s, "mu", None)
    ph = 0.0 if mu is None else phase(mu)
    if ph >= 2 * math.pi - 1e-12:
        ph = 0.0
    extra = tuple(getattr(s, k, 0) for k in ("eps", "zeta", "delta"))
    # rounding keeps float noise from reordering summands that share an eigenvalue
    return (_ORDER[s.family], s.n, round(float(_re(lam)), _SORT_DIGITS) + 0.0,
            round(float(im), _SORT_DIGITS) + 0.0, round(ph, _SORT_DIGITS)) + extra


_SORT_DIGITS = 6


def params(s) -> dict:
    """Parameter dictionary in a fixed key order."""
    keys = {"IsoUnimodular": ("n", "lam", "mu"), "IsoHyperbolic": ("n", "lam", "mu"),
            "AdjReal": ("n", "lam", "mu"), "AdjPaired": ("n", "lam", "mu"),
            "GenA": ("n", "lam", "eps", "zeta"), "GenB": ("n", "lam", "delta"),
            "GenC1": ("n", "a", "delta", "eps", "zeta"),
            "GenC2": ("n", "a", "b", "delta", "eps", "zeta")}[s.family]
    return {k: getattr(s, k) for k in keys}


def summands_close(s, t, tol: float) -> bool:
    """Same family and discrete data, scalar parameters within ``tol``."""
    if s.family != t.family:
        return False
    for k, v in params(s).items():
        u = getattr(t, k)
        if k in ("n", "eps", "zeta", "delta"):
            if v != u:
                return False
        elif is_exact_scalar(v) and is_exact_scalar(u):
            if v != u:
                return False
        elif abs(complex(v) - complex(u)) > tol * max(1.0, abs(complex(v)), abs(complex(u))):
            return False
    return True
