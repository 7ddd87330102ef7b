"""Frobenius blocks over Q and Q(i) and the forms that make them zeta-adjoint.

A Frobenius block is the companion matrix of a power of an irreducible
polynomial.  For such a block ``phi`` and signs (eps, zeta) we look for a
nonsingular ``m`` with ``m = eps m*`` and ``m phi = eps zeta (m phi)*``.
When it exists, (phi, m f(phi)) is an indecomposable pair; when it does not,
phi is paired with ``zeta phi*``.

Everything here is exact.  Irreducibility of the factor is the caller's
responsibility: there is no factorization engine.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .errors import (BadFunctionalParameter, HypothesisViolation, NotConstructible,
                     NotFrobeniusBlock, ParameterOutOfDomain)
from .linalg import Mat, _zeros, direct_sum, is_nonsingular
from .numfield import (QQ, QQI, QQI_ID, Base, FieldSpec, GaussianRational, Involution, conj, is_exact_scalar,
                       parse_exact)


def _poly_mul(p, q):
    out = [0] * (len(p) + len(q) - 1)
    for i, x in enumerate(p):
        for j, y in enumerate(q):
            out[i + j] = out[i + j] + x * y
    return out


def _exact(x):
    if isinstance(x, str):
        return parse_exact(x)
    if not is_exact_scalar(x):
        raise ParameterOutOfDomain(f"coefficient {x!r} is not an exact rational or Gaussian rational")
    return x if isinstance(x, GaussianRational) else Fraction(x)


@dataclass(frozen=True)
class CharPoly:
    """Monic ``c_0 + c_1 x + ... + c_{n-1} x^{n-1} + x^n``; ``coeffs`` holds c_0..c_{n-1}.

    ``factor`` optionally gives the irreducible ``p`` (monic, low to high,
    leading 1 included) with ``chi = p^power``.
    """

    coeffs: tuple
    factor: tuple | None = None
    power: int = 1

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(_exact(c) for c in self.coeffs))
        if not self.coeffs:
            raise ParameterOutOfDomain("characteristic polynomial needs degree >= 1")
        if self.factor is not None:
            p = tuple(_exact(c) for c in self.factor)
            object.__setattr__(self, "factor", p)
            if len(p) < 2 or p[-1] != 1:
                raise ParameterOutOfDomain("factor must be monic of degree >= 1")
            acc = [Fraction(1)]
            for _ in range(self.power):
                acc = _poly_mul(acc, list(p))
            if tuple(acc) != self.coeffs + (1,):
                raise ParameterOutOfDomain("factor^power does not expand to the characteristic polynomial")

    @classmethod
    def from_factor(cls, p, k: int = 1) -> "CharPoly":
        """``p^k`` for a monic ``p`` given low to high (leading 1 included)."""
        p = [_exact(c) for c in p]
        acc = [Fraction(1)]
        for _ in range(k):
            acc = _poly_mul(acc, p)
        return cls(tuple(acc[:-1]), tuple(p), k)

    @property
    def degree(self) -> int:
        return len(self.coeffs)

    @property
    def monic(self) -> tuple:
        return self.coeffs + (Fraction(1),)

    @property
    def is_gaussian(self) -> bool:
        coeffs = self.coeffs + (self.factor or ())
        return any(isinstance(c, GaussianRational) and c.im != 0 for c in coeffs)


def field_for(chi: CharPoly, involution="identity") -> FieldSpec:
    """Smallest exact field holding the coefficients with the requested involution."""
    inv_ = involution.involution if isinstance(involution, FieldSpec) else Involution(involution) \
        if isinstance(involution, str) else involution
    if inv_ is Involution.Conjugation:
        return QQI
    return QQI_ID if chi.is_gaussian else QQ


def companion(chi: CharPoly, field: FieldSpec | None = None) -> Mat:
    """Sub-diagonal ones and last column ``-c_0, ..., -c_{n-1}``."""
    field = field or field_for(chi)
    n = chi.degree
    out = _zeros(n, n, field)
    for i in range(n):
        if i + 1 < n:
            out[i + 1, i] = field.one()
        out[i, n - 1] = -field.coerce(chi.coeffs[i])
    return Mat(out, field)


class Existence(NamedTuple):
    """Truthy when the form exists; ``reason`` says which condition decided it."""

    exists: bool
    reason: str

    def __bool__(self):
        return self.exists


def _check_signs(eps, zeta, field):
    if eps not in (1, -1) or zeta not in (1, -1):
        raise ParameterOutOfDomain("eps and zeta must be +1 or -1")
    if eps == -1 and field.conjugating:
        raise HypothesisViolation("eps = -1 requires the identity involution")


def _symmetric_under(p, zeta, field) -> bool:
    """``p(x) = zeta^deg(p) conj(p)(zeta x)`` coefficient by coefficient."""
    d = len(p) - 1
    return all(field.coerce(c) == zeta ** (d + k) * conj(field.coerce(c), field) for k, c in enumerate(p))


def phi_exists(chi: CharPoly, eps: int, zeta: int, involution="identity") -> Existence:
    field = field_for(chi, involution)
    _check_signs(eps, zeta, field)
    n = chi.degree
    if chi.coeffs[0] == 0:
        if any(c != 0 for c in chi.coeffs):
            raise NotFrobeniusBlock("a singular Frobenius block must have characteristic polynomial x^n")
        ok = eps == 1 if n % 2 else eps == zeta
        rule = "eps = 1 (odd n)" if n % 2 else "eps = zeta (even n)"
        return Existence(ok, f"singular block: {rule} {'holds' if ok else 'fails'}")
    if (eps, zeta) == (-1, 1):
        return Existence(False, "(eps, zeta) = (-1, 1) never admits the form")
    p = chi.factor if chi.factor is not None else chi.monic
    if not _symmetric_under(p, zeta, field):
        return Existence(False, "p(x) differs from zeta^deg p conj(p)(zeta x)")
    return Existence(True, "nonsingular block: symmetry condition holds")


@dataclass(frozen=True)
class PhiBlock:
    """Companion block ``phi`` with its form ``m``; ``a_seq`` is a_2..a_{2n+1} (empty when singular)."""

    phi: Mat
    m: Mat
    eps: int
    zeta: int
    a_seq: tuple = ()


def _sequence(chi: CharPoly, eps: int, field) -> list:
    """a_2..a_{2n+1}: seed vector then the linear recurrence of the characteristic polynomial."""
    n = chi.degree
    zero, one = field.zero(), field.one()
    seq = [zero] * n
    seq[0 if eps == 1 else 1 % n] = one
    c = [field.coerce(x) for x in chi.coeffs]
    # seq[k] holds a_{k+2}; a_{l+n} = -sum_j c_j a_{l+j}
    while len(seq) < 2 * n:
        l = len(seq) - n
        seq.append(-sum((c[j] * seq[l + j] for j in range(n)), zero))
    return seq


def _relations_hold(m: Mat, phi: Mat, eps: int, zeta: int) -> bool:
    mp = m @ phi
    return m == m.star() * eps and mp == mp.star() * (eps * zeta)


def make_phi(chi: CharPoly, eps: int, zeta: int, involution="identity") -> PhiBlock:
    ex = phi_exists(chi, eps, zeta, involution)
    if not ex:
        raise NotConstructible(ex.reason)
    field = field_for(chi, involution)
    n = chi.degree
    phi = companion(chi, field)
    if chi.coeffs[0] == 0:
        from .canonical.families import z_matrix
        m = Mat(z_matrix(n, zeta, exact=True), field)
        seq = ()
    else:
        if eps == -1 and n > 1:
            assert chi.coeffs[1] == 0, "eps = zeta = -1 forces c_1 = 0"
        seq = _sequence(chi, eps, field)
        out = _zeros(n, n, field)
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                out[i - 1, j - 1] = zeta ** i * seq[i + j - 2]
        m = Mat(out, field)
        seq = tuple(seq)
    if not (_relations_hold(m, phi, eps, zeta) and is_nonsingular(m)):
        raise NotConstructible("constructed form failed its defining identities")
    return PhiBlock(phi, m, eps, zeta, seq)


def _poly_at(coeffs, x: Mat) -> Mat:
    f = x.field
    acc = Mat.zeros(x.rows, x.cols, f)
    eye = Mat.identity(x.rows, f)
    for c in reversed(coeffs):
        acc = acc @ x + eye * f.coerce(c)
    return acc


def _adjoint_pair_ok(a: Mat, f: Mat, eps: int, zeta: int) -> bool:
    return f == f.star() * eps and f @ a == (a.star() @ f) * zeta and is_nonsingular(f)


def make_pair(chi: CharPoly, eps: int, zeta: int, f_coeffs=None, involution="identity"):
    """Indecomposable zeta-adjoint pair built on the companion block of ``chi``.

    When the form exists the result is ``(phi, m f(phi))`` and ``f_coeffs``
    (low to high) is required; otherwise it is the paired block
    ``(phi + zeta phi*, [[0, eps I], [I, 0]])`` and ``f_coeffs`` must be omitted.
    """
    field = field_for(chi, involution)
    if f_coeffs is not None and any(isinstance(_exact(c), GaussianRational) and _exact(c).im != 0
                                    for c in f_coeffs) and field.base is Base.Rational:
        field = QQI_ID
    ex = phi_exists(chi, eps, zeta, involution)
    n = chi.degree
    if not ex:
        if f_coeffs is not None:
            raise BadFunctionalParameter("the paired block takes no functional parameter")
        phi = companion(chi, field)
        a = direct_sum(phi, phi.star() * zeta, field=field)
        out = _zeros(2 * n, 2 * n, field)
        for k in range(n):
            out[k, n + k] = field.coerce(eps)
            out[n + k, k] = field.one()
        f = Mat(out, field)
    else:
        if f_coeffs is None:
            raise BadFunctionalParameter("a functional parameter f(x) is required")
        coeffs = [field.coerce(_exact(c)) for c in f_coeffs]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        if not coeffs:
            raise BadFunctionalParameter("f must be nonzero")
        deg_p = len(chi.factor) - 1 if chi.factor is not None else n
        if len(coeffs) - 1 >= deg_p:
            raise BadFunctionalParameter(f"deg f must be below {deg_p}")
        if any(c != conj(c, field) * zeta ** k for k, c in enumerate(coeffs)):
            raise BadFunctionalParameter("f(x) must equal conj(f)(zeta x)")
        blk = make_phi(chi, eps, zeta, involution)
        phi = Mat(blk.phi.data, field)
        a = phi
        f = Mat(blk.m.data, field) @ _poly_at(coeffs, phi)
    if not _adjoint_pair_ok(a, f, eps, zeta):
        raise BadFunctionalParameter("f(phi) is singular (is the factor really irreducible?)")
    return a, f

