"""Eigenvalues, Jordan chains and the similarity to Jordan form.

Floating inputs go through a complex Schur decomposition: eigenvalues are
clustered, each cluster gets an orthonormal invariant subspace (LAPACK
``ztrsen``), and chains are built inside it from nested kernels.  Exact inputs
over Q or Q(i) locate eigenvalues by rounding floating roots to nearby
rationals and confirming them on the exact characteristic polynomial.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _dense
from .errors import DimensionMismatch, IllConditioned, SpectrumOutsideField
from .linalg import Mat, _exact_nullspace, _rref, _zeros, direct_sum
from .numfield import DEFAULT_POLICY, Base, GaussianRational, TolerancePolicy


@dataclass(frozen=True)
class JordanData:
    """``t^-1 a t`` is the direct sum of J_n(lam) over ``eigenvalues``.

    Blocks appear in the order listed: eigenvalue by eigenvalue, sizes
    descending within each eigenvalue.
    """

    eigenvalues: tuple
    t: Mat

    @property
    def blocks(self):
        return [(lam, n) for lam, sizes in self.eigenvalues for n in sizes]

    def jordan_matrix(self) -> Mat:
        f = self.t.field
        return direct_sum(*(jordan_block(n, lam, f) for lam, n in self.blocks), field=f)


def jordan_block(n: int, lam, field) -> Mat:
    """Upper Jordan block J_n(lam): lam on the diagonal, ones just above it."""
    out = _zeros(n, n, field) if field.exact else np.zeros((n, n), dtype=field.dtype)
    for i in range(n):
        out[i, i] = field.coerce(lam) if field.exact else lam
        if i + 1 < n:
            out[i, i + 1] = field.one()
    return Mat(out, field)


def jordan_form(a: Mat, policy: TolerancePolicy = DEFAULT_POLICY) -> JordanData:
    if not a.is_square:
        raise DimensionMismatch("Jordan form of a non-square matrix")
    if a.field.exact:
        return _exact_jordan(a)
    return _float_jordan(a, policy)


def _float_jordan(a: Mat, policy: TolerancePolicy) -> JordanData:
    arr = a.to_numpy()
    n = arr.shape[0]
    split = _dense.SpectralSplit(arr, policy.cluster_tol, policy.structural_tol)
    atol = policy.structural_tol * max(split.scale, 1e-300)
    eigs, cols = [], []
    for mean, _, basis in split.clusters:
        local = basis.conj().T @ arr @ basis - mean * np.eye(basis.shape[1])
        t_loc, sizes = _dense.jordan_chains(local, atol)
        lam = complex(mean)
        if a.field.base is Base.RealFloat:
            if abs(lam.imag) > policy.cluster_tol:
                raise SpectrumOutsideField(f"eigenvalue {lam} is not real")
            lam = lam.real
        eigs.append((lam, tuple(sizes)))
        cols.append(basis @ t_loc)
    t = np.hstack(cols) if cols else np.zeros((0, 0), dtype=complex)
    if a.field.base is Base.RealFloat:
        t = t.real if np.allclose(t.imag, 0) else t
    jd = JordanData(tuple(eigs), Mat(t, a.field if a.field.base is not Base.RealFloat or np.isrealobj(t)
                                     else a.field.__class__(Base.ComplexFloat)))
    if n:
        j = jd.jordan_matrix().to_numpy()
        resid = np.linalg.norm(arr @ t - t @ j) / max(np.linalg.norm(arr) * np.linalg.norm(t), 1e-300)
        if resid > policy.structural_tol * 10 * n:
            raise IllConditioned(f"Jordan reconstruction residual {resid:.2e}")
    return jd


# ---------------------------------------------------------------------------
# exact path

def charpoly(a: Mat) -> list:
    """Coefficients c_0..c_n (low to high) of det(xI - a), by Faddeev-LeVerrier."""
    n = a.rows
    f = a.field
    one, zero = f.one(), f.zero()
    coeffs = [zero] * n + [one]
    m = _zeros(n, n, f)
    for k in range(1, n + 1):
        m = a.data @ m if k > 1 else m
        for i in range(n):
            m[i, i] = m[i, i] + coeffs[n - k + 1]
        am = a.data @ m
        tr = sum((am[i, i] for i in range(n)), zero)
        coeffs[n - k] = -tr / k
    return coeffs


def _poly_eval(coeffs, x):
    acc = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = acc * x + c
    return acc


def _deflate(coeffs, root):
    """Divide by (x - root); caller guarantees root is a root."""
    n = len(coeffs) - 1
    out = [None] * n
    acc = coeffs[-1]
    for k in range(n - 1, -1, -1):
        out[k] = acc
        acc = coeffs[k] + acc * root
    return out


_DENOMS = (1, 2, 3, 4, 5, 6, 8, 10, 12, 16, 20, 25, 100, 1000, 10_000, 1_000_000)


def _rationalize(z: complex, gaussian: bool):
    seen = []
    for d in _DENOMS:
        re = Fraction(z.real).limit_denominator(d)
        im = Fraction(z.imag).limit_denominator(d) if gaussian else Fraction(0)
        cand = GaussianRational(re, im) if gaussian else re
        if cand not in seen:
            seen.append(cand)
    return seen


def exact_eigenvalues(a: Mat) -> list:
    """Exact (eigenvalue, algebraic multiplicity) pairs, or SpectrumOutsideField."""
    gaussian = a.field.base is Base.GaussianRational
    coeffs = charpoly(a)
    found = []
    while len(coeffs) > 1:
        approx = np.roots([complex(c) for c in reversed(coeffs)])
        root = None
        for z in sorted(approx, key=lambda z: (abs(z.imag), z.real)):
            for cand in _rationalize(complex(z), gaussian):
                if _poly_eval(coeffs, cand) == 0:
                    root = cand
                    break
            if root is not None:
                break
        if root is None:
            raise SpectrumOutsideField(
                f"characteristic polynomial has roots outside {a.field.base.value}")
        mult = 0
        while len(coeffs) > 1 and _poly_eval(coeffs, root) == 0:
            coeffs = _deflate(coeffs, root)
            mult += 1
        found.append((root, mult))
    found.sort(key=lambda rm: (complex(rm[0]).real, complex(rm[0]).imag))
    return found


def _exact_rank(cols: np.ndarray) -> int:
    if cols.size == 0:
        return 0
    return len(_rref(cols)[1])


def _exact_chains(n_op: np.ndarray, field, mult: int):
    """Exact Jordan chains of the nilpotent part on its generalized eigenspace."""
    n = n_op.shape[0]
    kers = []
    power = _zeros(n, n, field)
    for i in range(n):
        power[i, i] = field.one()
    while True:
        power = n_op @ power
        k = _exact_nullspace(power, field)
        kers.append(k)
        if k.shape[1] == mult or (len(kers) > 1 and k.shape[1] == kers[-2].shape[1]):
            break
    dims = [k.shape[1] for k in kers]
    if dims[-1] != mult:
        raise IllConditioned("generalized eigenspace dimension does not match multiplicity")
    sizes = _dense.block_sizes_from_dims(dims)
    tops = []
    for level in range(len(kers), 0, -1):
        count = sizes.count(level)
        if count == 0:
            continue
        spans = [kers[level - 2]] if level >= 2 else []
        for x, lvl in tops:
            v = x
            for _ in range(lvl - level):
                v = n_op @ v
            spans.append(v.reshape(-1, 1))
        base = np.concatenate(spans, axis=1) if spans else np.zeros((n, 0), dtype=object)
        r0 = _exact_rank(base)
        picked = 0
        for c in range(kers[level - 1].shape[1]):
            cand = kers[level - 1][:, c]
            trial = np.concatenate([base, cand.reshape(-1, 1)], axis=1)
            if _exact_rank(trial) > r0:
                base, r0 = trial, r0 + 1
                tops.append((cand, level))
                picked += 1
                if picked == count:
                    break
    cols = []
    for x, lvl in tops:
        chain = [x]
        for _ in range(lvl - 1):
            chain.append(n_op @ chain[-1])
        cols += chain[::-1]
    return np.column_stack(cols), [lvl for _, lvl in tops]


def _exact_jordan(a: Mat) -> JordanData:
    f = a.field
    n = a.rows
    eigs, cols = [], []
    for lam, mult in exact_eigenvalues(a):
        n_op = a.data.copy()
        for i in range(n):
            n_op[i, i] = n_op[i, i] - lam
        t_loc, sizes = _exact_chains(n_op, f, mult)
        eigs.append((lam, tuple(sizes)))
        cols.append(t_loc)
    t = np.concatenate(cols, axis=1) if cols else _zeros(0, 0, f)
    return JordanData(tuple(eigs), Mat(t, f))
