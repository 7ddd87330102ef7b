"""Scalar fields with involution, and the tolerance policy.

Exact scalars are :class:`fractions.Fraction` (field Q) and
:class:`GaussianRational` (field Q(i)); floating scalars are Python
``float``/``complex``.  Every exact value is kept in lowest terms with a
positive denominator, which ``Fraction`` already guarantees.
"""

from __future__ import annotations

import cmath
import enum
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import NamedTuple

import numpy as np

from .errors import ParseError, ZeroScalar


class Base(enum.Enum):
    Rational = "rational"
    GaussianRational = "gaussian_rational"
    ComplexFloat = "complex_float"
    RealFloat = "real_float"


class Involution(enum.Enum):
    Identity = "identity"
    Conjugation = "conjugation"


class GaussianRational:
    """An element ``re + im*i`` of Q(i) with Fraction components."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @classmethod
    def _lift(cls, x):
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, (int, Fraction, _RationalABC)):
            return cls(x, 0)
        return NotImplemented

    @property
    def real(self):
        return self.re

    @property
    def imag(self):
        return self.im

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def norm(self) -> Fraction:
        """Squared modulus ``re**2 + im**2``."""
        return self.re * self.re + self.im * self.im

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        num = self * o.conjugate()
        return GaussianRational(num.re / n, num.im / n)

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return o / self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return (GaussianRational(1) / self) ** (-k)
        out, base = GaussianRational(1), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __abs__(self):
        return math.hypot(self.re, self.im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            if isinstance(other, complex):
                return complex(self) == other
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({str(self.re)!r}, {str(self.im)!r})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


_RAT = re.compile(r"^[+-]?\d+(?:/\d+)?$")


def _rat(text: str, whole: str) -> Fraction:
    if text in ("", "+"):
        return Fraction(1)
    if text == "-":
        return Fraction(-1)
    if not _RAT.match(text):
        raise ParseError(f"not an exact scalar: {whole!r}")
    return Fraction(text)


def parse_exact(text: str):
    """Parse ``"p/q"``, ``"3"``, ``"2i"``, ``"1/2-3/4i"`` into an exact scalar.

    Returns a Fraction when there is no imaginary part.
    """
    s = text.replace(" ", "")
    if not s:
        raise ParseError("empty scalar")
    if s[-1] not in "ij":
        if not _RAT.match(s):
            raise ParseError(f"not an exact scalar: {text!r}")
        return Fraction(s)
    body = s[:-1]
    k = max(body.rfind("+"), body.rfind("-"))
    if k > 0:
        if not _RAT.match(body[:k]):
            raise ParseError(f"not an exact scalar: {text!r}")
        return GaussianRational(Fraction(body[:k]), _rat(body[k:], text))
    return GaussianRational(0, _rat(body, text))


@dataclass(frozen=True)
class FieldSpec:
    base: Base
    involution: Involution = Involution.Identity

    def __post_init__(self):
        if (self.involution is Involution.Conjugation
                and self.base not in (Base.GaussianRational, Base.ComplexFloat)):
            raise ValueError(f"conjugation is not defined over {self.base.value}")

    @property
    def exact(self) -> bool:
        return self.base in (Base.Rational, Base.GaussianRational)

    @property
    def complex(self) -> bool:
        return self.base in (Base.GaussianRational, Base.ComplexFloat)

    @property
    def conjugating(self) -> bool:
        return self.involution is Involution.Conjugation

    @property
    def dtype(self):
        return {Base.Rational: object, Base.GaussianRational: object,
                Base.ComplexFloat: np.complex128, Base.RealFloat: np.float64}[self.base]

    def as_float(self) -> "FieldSpec":
        """The floating field this one embeds into."""
        if self.base is Base.Rational:
            return FieldSpec(Base.RealFloat, self.involution)
        if self.base is Base.GaussianRational:
            return FieldSpec(Base.ComplexFloat, self.involution)
        return self

    def coerce(self, x):
        """Convert ``x`` to a scalar of this field, refusing lossy conversions."""
        b = self.base
        if isinstance(x, str):
            x = parse_exact(x) if self.exact else complex(x.replace("i", "j"))
        if b is Base.Rational:
            if isinstance(x, GaussianRational):
                if x.im != 0:
                    raise ValueError(f"{x} is not rational")
                return x.re
            if isinstance(x, (int, Fraction, _RationalABC)) and not isinstance(x, bool):
                return Fraction(x)
            raise ValueError(f"{x!r} is not an exact rational")
        if b is Base.GaussianRational:
            if isinstance(x, GaussianRational):
                return x
            if isinstance(x, (int, Fraction, _RationalABC)) and not isinstance(x, bool):
                return GaussianRational(x)
            raise ValueError(f"{x!r} is not an exact Gaussian rational")
        if b is Base.RealFloat:
            z = complex(x)
            if z.imag != 0:
                raise ValueError(f"{x!r} is not real")
            return float(z.real)
        return complex(x)

    def conj(self, x):
        return conj(x, self)

    def zero(self):
        return self.coerce(0)

    def one(self):
        return self.coerce(1)

    def __str__(self):
        return f"{self.base.value}/{self.involution.value}"


QQ = FieldSpec(Base.Rational, Involution.Identity)
QQI = FieldSpec(Base.GaussianRational, Involution.Conjugation)
QQI_ID = FieldSpec(Base.GaussianRational, Involution.Identity)
RR = FieldSpec(Base.RealFloat, Involution.Identity)
CC = FieldSpec(Base.ComplexFloat, Involution.Conjugation)
CC_ID = FieldSpec(Base.ComplexFloat, Involution.Identity)


@dataclass(frozen=True)
class TolerancePolicy:
    """Floating tolerances; exact fields ignore both and compare literally.

    ``structural_tol`` bounds matrix identities relative to the larger operand;
    ``cluster_tol`` is the absolute radius used when grouping eigenvalues or
    phases.
    """

    structural_tol: float = 1e-8
    cluster_tol: float = 1e-6

    def close(self, x, y, field: FieldSpec | None = None) -> bool:
        if field is not None and field.exact:
            return x == y
        return abs(x - y) <= self.structural_tol * max(abs(x), abs(y), 1.0)


DEFAULT_POLICY = TolerancePolicy()


def conj(x, f: FieldSpec):
    """The involution of ``f`` applied to ``x``; identity involution is a no-op."""
    if f.involution is Involution.Identity:
        return x
    return x.conjugate()


def is_exact_scalar(x) -> bool:
    return isinstance(x, (GaussianRational, Fraction, int)) and not isinstance(x, bool)


def to_complex(x) -> complex:
    return complex(x)


def rational_sqrt(q: Fraction) -> Fraction | None:
    """Exact square root of a nonnegative rational, or None when irrational."""
    if q < 0:
        return None
    q = Fraction(q)
    rn, rd = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if rn * rn == q.numerator and rd * rd == q.denominator:
        return Fraction(rn, rd)
    return None


def exact_modulus(x) -> Fraction | None:
    """``|x|`` as a rational when it is one (Pythagorean entries), else None."""
    if isinstance(x, GaussianRational):
        return rational_sqrt(x.norm())
    return abs(Fraction(x))


class CosetRep(NamedTuple):
    e: object
    r: float
    sign: int


def phase(x) -> float:
    """Argument of ``x`` folded into ``[0, 2*pi)``."""
    p = cmath.phase(complex(x))
    return p + 2 * math.pi if p < 0 else p


def unit_from_phase(phi: float) -> complex:
    """``exp(i*phi)`` with components below rounding level snapped to zero."""
    c, s = math.cos(phi), math.sin(phi)
    return complex(0.0 if abs(c) < 1e-15 else c, 0.0 if abs(s) < 1e-15 else s)


def coset_representative(d, f: FieldSpec, policy: TolerancePolicy = DEFAULT_POLICY) -> CosetRep:
    """Split ``d = sign * e * r**2`` with ``|e| = 1``, ``arg(e)`` in ``[0, pi)``, ``r > 0``.

    ``e`` picks one representative of the coset ``d * R^x``.  Phases within
    ``cluster_tol`` of ``pi`` fold down to ``e = 1`` with the sign flipped.
    In exact mode ``e`` stays exact whenever ``|d|`` is rational; ``r`` is
    always a float.
    """
    if not (f.complex and f.conjugating):
        raise ValueError("coset representatives need a complex field with conjugation")
    if d == 0:
        raise ZeroScalar("coset representative of zero")
    r = math.sqrt(abs(complex(d)))
    if f.exact:
        d = f.coerce(d)
        m = exact_modulus(d)
        if m is not None:
            u = d / m
            if u.im < 0 or (u.im == 0 and u.re < 0):
                return CosetRep(-u, r, -1)
            return CosetRep(u, r, 1)
    phi = phase(d)
    tol = policy.cluster_tol
    sign = 1
    if phi >= 2 * math.pi - tol:
        phi = 0.0
    elif phi >= math.pi - tol:
        phi = max(phi - math.pi, 0.0)
        sign = -1
    if phi == 0.0:
        return CosetRep(1 + 0j, r, sign)
    return CosetRep(unit_from_phase(phi), r, sign)
