"""Seeded instance generators and an independent verifier for canonical forms.

Instances are built backwards: materialize a known list of canonical
summands, then move it to a random basis.  The verifier re-derives every
identity with plain numpy (or Fraction) arithmetic and never calls the
canonicalization code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .canonical import (AdjPaired, AdjReal, CanonicalForm, IsoHyperbolic, IsoUnimodular,
                        canonical_summands, declared_kind, make_summand, materialize)
from .linalg import Mat, PairTransport, inv, transport
from .numfield import DEFAULT_POLICY, GaussianRational, TolerancePolicy


@dataclass(frozen=True)
class InstanceRecipe:
    """Summands to materialize and how to scramble the basis.

    ``seed=None`` keeps the canonical basis (S = I).  Exact recipes need
    exact summand parameters and use unimodular integer elementary matrices.
    """

    summands: tuple
    seed: int | None = 0
    cond_cap: float = 100.0
    exact: bool = False
    ops: int | None = None


@dataclass(frozen=True)
class Instance:
    """Unpacks as ``(a, f, ground_truth)``; ``s`` is the basis change applied."""

    a: Mat
    f: Mat
    ground_truth: CanonicalForm
    s: Mat

    def __iter__(self):
        return iter((self.a, self.f, self.ground_truth))


@dataclass(frozen=True)
class Verdict:
    ok: bool
    report: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok


def _kind_name(summands) -> str:
    kinds = {declared_kind(s) for s in summands}
    if kinds == {("isometric",)}:
        return "isometric"
    if len(kinds) == 1:
        k = kinds.pop()
        return "selfadjoint" if k[2] == 1 else "skewadjoint"
    return "mixed"


def random_basis(n: int, rng: np.random.Generator, cond_cap: float = 100.0, complex_: bool = True,
                 ops: int | None = None) -> np.ndarray:
    """Product of random elementary column operations with bounded multipliers, cond <= cond_cap."""
    ops = 3 * n if ops is None else ops
    for _ in range(200):
        s = np.eye(n, dtype=complex if complex_ else float)
        for _ in range(ops):
            i, j = rng.choice(n, size=2, replace=False) if n > 1 else (0, 0)
            if i == j:
                break
            c = rng.uniform(-1, 1) + (1j * rng.uniform(-1, 1) if complex_ else 0)
            s[:, j] += c * s[:, i]
        if complex_:
            s = s @ np.diag(np.exp(1j * rng.uniform(0, 2 * math.pi, n)))
        s = s @ np.diag(rng.uniform(0.5, 2.0, n))
        if np.linalg.cond(s) <= cond_cap:
            return s
    raise RuntimeError("could not draw a basis change under the condition cap")


def random_unimodular(n: int, rng: np.random.Generator, gaussian: bool, ops: int | None = None):
    """Exact unimodular matrix from elementary operations with small (Gaussian) integer multipliers."""
    ops = 2 * n if ops is None else ops
    units = [1, -1] + ([GaussianRational(0, 1), GaussianRational(0, -1)] if gaussian else [])
    s = np.empty((n, n), dtype=object)
    for idx in np.ndindex(n, n):
        s[idx] = 1 if idx[0] == idx[1] else 0
    for _ in range(ops if n > 1 else 0):
        i, j = rng.choice(n, size=2, replace=False)
        c = units[int(rng.integers(len(units)))]
        s[:, j] = s[:, j] + c * s[:, i]
    return s


def make_instance(r: InstanceRecipe, policy: TolerancePolicy = DEFAULT_POLICY) -> Instance:
    """Transported canonical sum with its ground-truth canonical form (witness included)."""
    a_c, f_c = materialize(r.summands)
    fl = a_c.field
    n = a_c.rows
    if r.seed is None or n == 0:
        s = Mat.identity(n, fl)
    else:
        rng = np.random.default_rng(r.seed)
        if r.exact and fl.exact:
            s = Mat(random_unimodular(n, rng, fl.complex, r.ops), fl)
        else:
            if fl.exact:
                fl = fl.as_float()
                a_c, f_c = a_c.to_float(), f_c.to_float()
            s = Mat(random_basis(n, rng, r.cond_cap, fl.complex, r.ops), fl)
    p = transport(PairTransport(a_c, f_c), s, policy)
    norm, w = canonical_summands(r.summands, policy)
    sinv = inv(s, policy)
    if w is not None:
        w = Mat(w.data, fl) if fl.exact else Mat(w.to_numpy(), fl)
        witness = sinv @ w
    else:
        witness = sinv
    gt = CanonicalForm(norm, witness, "exact" if fl.exact else "float", _kind_name(r.summands))
    return Instance(p.a, p.f, gt, s)


# ---------------------------------------------------------------------------
# random recipes

def _unit(rng) -> complex:
    return complex(np.exp(1j * rng.uniform(0, 2 * math.pi)))


def _spread(rng, count, lo, hi, sep=0.5):
    """``count`` reals in [lo, hi] pairwise at least ``sep`` apart."""
    for _ in range(1000):
        xs = np.sort(rng.uniform(lo, hi, count))
        if count < 2 or np.min(np.diff(xs)) >= sep:
            return [float(x) for x in xs]
    raise RuntimeError("could not spread eigenvalues")


def random_summands(rng: np.random.Generator, kind: str, max_dim: int = 12, max_block: int = 3):
    """Random mix of canonical summands of the given kind, total dimension <= max_dim.

    Distinct eigenvalues are kept at least 0.5 apart; eigenvalues repeat across
    summands on purpose so that multiple blocks share an eigenvalue.
    """
    out, dim = [], 0
    target = int(rng.integers(2, max_dim + 1))
    if kind == "selfadjoint":
        reals = _spread(rng, 3, -3, 3, 0.8)
        cplx = [complex(x, y) for x, y in zip(_spread(rng, 2, -2, 2, 1.0), rng.uniform(0.6, 2.0, 2))]
        while dim < target:
            n = int(rng.integers(1, max_block + 1))
            if rng.random() < 0.6:
                if dim + n > max_dim:
                    break
                out.append(AdjReal(n, reals[int(rng.integers(3))], _unit(rng)))
                dim += n
            else:
                if dim + 2 * n > max_dim:
                    break
                out.append(AdjPaired(n, cplx[int(rng.integers(2))], _unit(rng)))
                dim += 2 * n
    elif kind == "isometric":
        angles = _spread(rng, 3, 0, 2 * math.pi - 0.6, 0.7)
        units = [complex(np.exp(1j * t)) for t in angles]
        hyper = [r * np.exp(1j * t) for r, t in zip(rng.uniform(1.6, 2.5, 2), _spread(rng, 2, 0, 2 * math.pi - 0.6, 1.0))]
        while dim < target:
            n = int(rng.integers(1, max_block + 1))
            if rng.random() < 0.6:
                if dim + n > max_dim:
                    break
                out.append(IsoUnimodular(n, units[int(rng.integers(3))], _unit(rng)))
                dim += n
            else:
                if dim + 2 * n > max_dim:
                    break
                out.append(IsoHyperbolic(n, complex(hyper[int(rng.integers(2))]), _unit(rng)))
                dim += 2 * n
    else:
        raise ValueError(f"unknown kind {kind!r}")
    if not out:
        out.append(AdjReal(1, 0.0, 1 + 0j) if kind == "selfadjoint" else IsoUnimodular(1, 1 + 0j, 1 + 0j))
    return tuple(out)


# ---------------------------------------------------------------------------
# independent verification

def _exact_all(*ms) -> bool:
    return all(m.field.exact for m in ms)


def _np(m: Mat) -> np.ndarray:
    return np.array([[complex(x) for x in row] for row in m.data.tolist()], dtype=complex) \
        if m.data.size else np.zeros(m.shape, dtype=complex)


def _rel(x: np.ndarray, scale: float) -> float:
    return float(np.sqrt(np.sum(np.abs(x) ** 2))) / max(scale, 1e-300)


def brute_verify(a: Mat, f: Mat, cf: CanonicalForm, policy: TolerancePolicy = DEFAULT_POLICY) -> Verdict:
    """Check ``A S = S A_c`` and ``S* F S = F_c`` directly, plus every summand's defining identity."""
    report = {}
    if cf.witness is None:
        return Verdict(False, {"error": "no witness"})
    s = cf.witness
    a_c, f_c = cf.materialize()
    ok = True
    if _exact_all(a, f, s) and all(m.field.exact for m in (a_c, f_c)) and "operator_times_i" not in cf.notes:
        sd, ad, fd = s.data, a.data, f.data
        conj = np.vectorize(lambda x: x.conjugate(), otypes=[object])
        lhs_a = ad @ sd
        rhs_a = sd @ Mat(a_c.data, s.field).data
        lhs_f = conj(sd.T) @ fd @ sd
        eq_a = bool(np.all(lhs_a == rhs_a))
        eq_f = bool(np.all(lhs_f == Mat(f_c.data, s.field).data))
        report["operator_residual"] = 0.0 if eq_a else float("inf")
        report["form_residual"] = 0.0 if eq_f else float("inf")
        ok = eq_a and eq_f
    else:
        sn, an, fn = _np(s), _np(a), _np(f)
        acn, fcn = _np(a_c), _np(f_c)
        ra = _rel(an @ sn - sn @ acn, np.linalg.norm(an) * np.linalg.norm(sn))
        rf = _rel(sn.conj().T @ fn @ sn - fcn, max(np.linalg.norm(fcn), 1e-300))
        report["operator_residual"] = ra
        report["form_residual"] = rf
        ok = bool(ra <= policy.structural_tol and rf <= policy.structural_tol)
    bad = []
    for k, t in enumerate(cf.summands):
        if not _summand_identity(t):
            bad.append(k)
    report["bad_summands"] = bad
    return Verdict(ok and not bad, report)


def _summand_identity(t, tol: float = 1e-12) -> bool:
    a, f = make_summand(t)
    kind = declared_kind(t)
    fld = a.field
    if fld.exact:
        an, fn = a.data, f.data
        star = (lambda m: np.vectorize(lambda x: x.conjugate(), otypes=[object])(m.T)) if fld.conjugating \
            else (lambda m: m.T)
        if kind[0] == "isometric":
            return bool(np.all(star(an) @ fn @ an == fn))
        _, eps, zeta = kind
        sym = eps is None or bool(np.all(fn == eps * star(fn)))
        return sym and bool(np.all(fn @ an == zeta * (star(an) @ fn)))
    an, fn = _np(a), _np(f)
    star = (lambda m: m.conj().T) if fld.conjugating else (lambda m: m.T)
    sc = max(np.linalg.norm(an), 1.0) ** 2 * max(np.linalg.norm(fn), 1.0)
    if kind[0] == "isometric":
        return _rel(star(an) @ fn @ an - fn, sc) <= tol
    _, eps, zeta = kind
    sym = eps is None or _rel(fn - eps * star(fn), sc) <= tol
    return sym and _rel(fn @ an - zeta * star(an) @ fn, sc) <= tol
