"""Canonical forms of isometric and selfadjoint operators on spaces with a diagonalizable form.

The main entry points are :func:`canonicalize`, :func:`isomorphic` and
:func:`split_cosets` for complex pairs, the ``Gen*`` summand families for
other fields, and :mod:`iif.frobenius` for companion blocks over Q and Q(i).
"""

from .canonical import (FAMILIES, AdjPaired, AdjReal, CanonicalForm, GenA, GenB, GenC1, GenC2,
                        GroupFactors, IsoHyperbolic, IsoUnimodular, IsoVerdict, canonicalize,
                        group_factors, isomorphic, isomorphic_summands, make_summand, materialize,
                        normalize, sign_characteristic)
from .errors import DomainError, IIFError, UsageError
from .frobenius import CharPoly, PhiBlock, companion, make_pair, make_phi, phi_exists
from .jordan import jordan_form
from .linalg import Mat, PairTransport, transport
from .numfield import CC, CC_ID, QQ, QQI, QQI_ID, RR, DEFAULT_POLICY, GaussianRational, TolerancePolicy
from .structure import classify, diagonalize_form, hermitize, split_cosets

__version__ = "0.1.0"
