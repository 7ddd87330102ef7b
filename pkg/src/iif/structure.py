"""Structure checks for pairs (A, F) and the coset splitting of a diagonalizable form.

The splitting brings F to a direct sum of blocks ``e_l * diag(I_p, -I_q)``
with pairwise distinct unit scalars ``e_l`` (phases in ``[0, pi)``).  An
operator that is isometric or (skew)adjoint for F is then block diagonal in
the same basis.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _dense
from .errors import (BlockLeakage, DimensionMismatch, KindMismatch, NotApplicable,
                     NotDiagonalizable, SingularForm)
from .linalg import Mat, _zeros, close, is_nonsingular, solve, star
from .numfield import (DEFAULT_POLICY, FieldSpec, GaussianRational,
                       TolerancePolicy, coset_representative, exact_modulus, phase,
                       rational_sqrt, unit_from_phase)


class FormKind(enum.Enum):
    Hermitian = 1
    SkewHermitian = -1
    Neither = 0

    @property
    def eps(self):
        return None if self is FormKind.Neither else self.value


class OpKind(enum.Enum):
    Isometric = "isometric"
    Selfadjoint = "selfadjoint"
    Skewadjoint = "skewadjoint"

    @property
    def zeta(self):
        return {OpKind.Selfadjoint: 1, OpKind.Skewadjoint: -1}.get(self)

    @classmethod
    def adjoint(cls, zeta: int) -> "OpKind":
        return cls.Selfadjoint if zeta == 1 else cls.Skewadjoint


@dataclass(frozen=True)
class StructureReport:
    form_kind: FormKind
    op_kinds: frozenset
    nondegenerate: bool

    def has(self, kind: OpKind) -> bool:
        return kind in self.op_kinds


def _check_pair(a: Mat, f: Mat):
    if not (a.is_square and f.is_square):
        raise DimensionMismatch(f"operator {a.shape} and form {f.shape} must be square")
    if a.rows != f.rows:
        raise DimensionMismatch(f"operator is {a.shape} but form is {f.shape}")
    if a.field != f.field:
        raise DimensionMismatch("operator and form live over different fields")


def classify(a: Mat, f: Mat, policy: TolerancePolicy = DEFAULT_POLICY) -> StructureReport:
    _check_pair(a, f)
    fs = star(f)
    if close(f, fs, policy):
        fk = FormKind.Hermitian
    elif close(f, -fs, policy):
        fk = FormKind.SkewHermitian
    else:
        fk = FormKind.Neither
    kinds = set()
    if close(star(a) @ f @ a, f, policy):
        kinds.add(OpKind.Isometric)
    fa, asf = f @ a, star(a) @ f
    if close(fa, asf, policy):
        kinds.add(OpKind.Selfadjoint)
    if close(fa, -asf, policy):
        kinds.add(OpKind.Skewadjoint)
    return StructureReport(fk, frozenset(kinds), is_nonsingular(f, policy))


# ---------------------------------------------------------------------------
# reduction to Hermitian form and selfadjoint operator

def _unit_i(field: FieldSpec):
    return GaussianRational(0, 1) if field.exact else 1j


def hermitize(a: Mat, f: Mat, policy: TolerancePolicy = DEFAULT_POLICY):
    """Replace a skew-Hermitian form by ``i*F`` and a skewadjoint operator by ``i*A``.

    Returns ``(a', f', note)`` where ``note`` is a tuple naming the
    substitutions applied (empty when the pair was already Hermitian and
    selfadjoint).
    """
    if not (f.field.complex and f.field.conjugating):
        raise NotApplicable("the reduction needs complex scalars with conjugation")
    rep = classify(a, f, policy)
    i = _unit_i(f.field)
    note = []
    if rep.form_kind is FormKind.SkewHermitian:
        f = f * i
        note.append("form_times_i")
    if OpKind.Skewadjoint in rep.op_kinds and OpKind.Selfadjoint not in rep.op_kinds:
        a = a * i
        note.append("operator_times_i")
    if not note and not (rep.form_kind is FormKind.Hermitian and OpKind.Selfadjoint in rep.op_kinds):
        raise NotApplicable("form is not skew-Hermitian and operator is not skewadjoint")
    return a, f, tuple(note)


# ---------------------------------------------------------------------------
# congruence diagonalization

@dataclass(frozen=True)
class FormDiagonalization:
    """``star(s) @ f @ s == d`` with ``d`` diagonal.

    Unpacks as ``s, d``.  ``downgraded`` is set when an exact input had to be
    handled in floating point.
    """

    s: Mat
    d: Mat
    downgraded: bool = False

    def __iter__(self):
        return iter((self.s, self.d))


def _is_diagonal(m: Mat) -> bool:
    off = m.data.copy()
    for k in range(min(m.shape)):
        off[k, k] = 0
    return bool(np.all(off == 0))


def _exact_hermitian_diag(h: np.ndarray, field: FieldSpec):
    """Symmetric elimination for an exact Hermitian matrix; returns S with S* H S diagonal."""
    n = h.shape[0]
    s = _zeros(n, n, field)
    for k in range(n):
        s[k, k] = field.one()
    g = h.copy()

    def congr(t):
        nonlocal g, s
        ts = np.vectorize(lambda x: x.conjugate(), otypes=[object])(t.T)
        g = ts @ g @ t
        s = s @ t

    for k in range(n):
        if g[k, k] == 0:
            piv = next((j for j in range(k + 1, n) if g[j, j] != 0), None)
            if piv is not None:
                t = _zeros(n, n, field)
                for i in range(n):
                    t[i, i] = field.one()
                t[k, k] = t[piv, piv] = field.zero()
                t[k, piv] = t[piv, k] = field.one()
                congr(t)
            else:
                j = next((j for j in range(k + 1, n) if g[k, j] != 0), None)
                if j is None:
                    raise SingularForm("form is degenerate")
                # v_k + c v_j with c = conj(g_kj) has value 2|g_kj|^2
                t = _zeros(n, n, field)
                for i in range(n):
                    t[i, i] = field.one()
                t[j, k] = g[k, j].conjugate()
                congr(t)
        piv = g[k, k]
        t = _zeros(n, n, field)
        for i in range(n):
            t[i, i] = field.one()
        for j in range(k + 1, n):
            t[k, j] = -g[k, j] / piv
        congr(t)
    return s, g


def _exact_diagonalize(f: Mat):
    """Exact congruence diagonalization, or None when it is out of reach."""
    if _is_diagonal(f):
        return Mat.identity(f.rows, f.field), f
    fs = star(f)
    scale = None
    if f == fs:
        scale = f.field.one()
    elif f == -fs:
        scale = GaussianRational(0, 1)
    else:
        # a Q(i) multiple of a Hermitian matrix: try c = conj(first nonzero diagonal entry)
        for k in range(f.rows):
            if f.data[k, k] != 0:
                c = f.data[k, k].conjugate()
                if f * c == star(f * c):
                    scale = c
                break
    if scale is None:
        return None
    s, _ = _exact_hermitian_diag((f * scale).data, f.field)
    s = Mat(s, f.field)
    return s, star(s) @ f @ s


def _eigh_diag(h: np.ndarray):
    w, v = np.linalg.eigh((h + h.conj().T) / 2)
    return v


def _pencil_diagonalize(fa: np.ndarray, policy: TolerancePolicy, seed: int) -> np.ndarray:
    """S with S* F S diagonal, via the Hermitian pencil H1 + i H2."""
    n = fa.shape[0]
    h1 = (fa + fa.conj().T) / 2
    h2 = (fa - fa.conj().T) / 2j
    rng = np.random.default_rng(seed)
    probes = np.concatenate([[0.0, math.pi / 2], rng.uniform(0, 2 * math.pi, 14)])
    best = None
    for t in probes:
        ht = math.cos(t) * h1 + math.sin(t) * h2
        c = np.linalg.cond(ht)
        if best is None or c < best[0]:
            best = (c, t, ht)
    c, t, ht = best
    if not np.isfinite(c) or c > 1 / policy.structural_tol:
        raise NotDiagonalizable("no well-conditioned Hermitian member in the form pencil")
    hp = -math.sin(t) * h1 + math.cos(t) * h2
    w = np.linalg.solve(ht, hp)
    split = _dense.SpectralSplit(w, policy.cluster_tol, policy.structural_tol)
    scale = max(split.scale, 1.0)
    cols = []
    for mean, group, basis in split.clusters:
        if abs(mean.imag) > policy.cluster_tol * scale:
            raise NotDiagonalizable(f"form cosquare has a non-unimodular eigenvalue ({mean:.4g} off the real axis)")
        local = basis.conj().T @ w @ basis - mean * np.eye(len(group))
        if np.linalg.norm(local) > math.sqrt(policy.structural_tol) * scale:
            raise NotDiagonalizable("the form pencil is not diagonalizable")
        g = basis.conj().T @ ht @ basis
        cols.append(basis @ _eigh_diag(g))
    return np.hstack(cols)


def diagonalize_form(f: Mat, policy: TolerancePolicy = DEFAULT_POLICY, seed: int = 0) -> FormDiagonalization:
    """Congruence ``star(s) @ f @ s = d`` with ``d`` diagonal."""
    if not f.is_square:
        raise DimensionMismatch("form must be square")
    if not (f.field.complex and f.field.conjugating):
        raise NotApplicable("form diagonalization needs complex scalars with conjugation")
    if not is_nonsingular(f, policy):
        raise SingularForm("form is degenerate")
    downgraded = False
    if f.field.exact:
        out = _exact_diagonalize(f)
        if out is not None:
            return FormDiagonalization(*out)
        warnings.warn("exact congruence diagonalization unavailable; continuing in floating point",
                      RuntimeWarning, stacklevel=2)
        f = f.to_float()
        downgraded = True
    fa = f.to_numpy()
    n = fa.shape[0]
    if _is_diagonal(f):
        s = np.eye(n, dtype=complex)
    elif np.allclose(fa, fa.conj().T, rtol=0, atol=policy.structural_tol * np.linalg.norm(fa)):
        s = _eigh_diag(fa)
    elif np.allclose(fa, -fa.conj().T, rtol=0, atol=policy.structural_tol * np.linalg.norm(fa)):
        s = _eigh_diag(1j * fa)
    else:
        s = _pencil_diagonalize(fa, policy, seed)
    d = s.conj().T @ fa @ s
    off = d - np.diag(np.diag(d))
    if np.linalg.norm(off) > policy.structural_tol * 10 * n * np.linalg.norm(fa) * np.linalg.norm(s) ** 2:
        raise NotDiagonalizable("congruence did not reach a diagonal form")
    fl = f.field
    return FormDiagonalization(Mat(s, fl), Mat(np.diag(np.diag(d)), fl), downgraded)


# ---------------------------------------------------------------------------
# coset splitting

@dataclass(frozen=True)
class CosetBlock:
    e: object
    p: int
    q: int
    a_block: Mat
    basis_cols: Mat

    @property
    def size(self) -> int:
        return self.p + self.q


@dataclass(frozen=True)
class CosetSplit:
    """Blocks in order of the phase of ``e``; ``s`` collects every ``basis_cols``."""

    blocks: tuple
    s: Mat
    downgraded: bool = False
    leakage: float = 0.0

    @property
    def signature_data(self):
        return [(b.e, b.p, b.q) for b in self.blocks]

    def form_matrix(self) -> Mat:
        """The normalized form ``sum_l e_l * diag(I_p, -I_q)``."""
        f = self.s.field
        n = self.s.rows
        out = _zeros(n, n, f)
        k = 0
        for b in self.blocks:
            for j in range(b.size):
                out[k, k] = f.coerce(b.e) * (1 if j < b.p else -1)
                k += 1
        return Mat(out, f)


def _circular_groups(phis, tol):
    """Single-linkage clusters of phases on the circle R / pi Z."""
    n = len(phis)
    order = sorted(range(n), key=lambda j: phis[j])
    groups = []
    for j in order:
        if groups and phis[j] - phis[groups[-1][-1]] <= tol:
            groups[-1].append(j)
        else:
            groups.append([j])
    if len(groups) > 1 and phis[groups[0][0]] + math.pi - phis[groups[-1][-1]] <= tol:
        groups[0] = groups.pop() + groups[0]
    return groups


def split_cosets(a: Mat, f: Mat, policy: TolerancePolicy = DEFAULT_POLICY, seed: int = 0) -> CosetSplit:
    rep = classify(a, f, policy)
    if not rep.nondegenerate:
        raise SingularForm("form is degenerate")
    if not rep.op_kinds:
        raise KindMismatch("operator is neither isometric nor selfadjoint/skewadjoint for the form")
    diag = diagonalize_form(f, policy, seed)
    s0, d = diag.s, diag.d
    fl = s0.field
    n = f.rows
    dvals = [d.data[k, k] for k in range(n)]
    exact = fl.exact and all(_exact_root_modulus(x) is not None for x in dvals)
    if fl.exact and not exact:
        s0, fl = s0.to_float(), fl.as_float()
        dvals = [complex(x) for x in dvals]

    if exact:
        reps = [coset_representative(x, fl, policy) for x in dvals]
        keys = {}
        for j, r in enumerate(reps):
            keys.setdefault(r.e, []).append(j)
        groups = sorted(keys.values(), key=lambda g: phase(reps[g[0]].e))
        gdata = []
        for g in groups:
            e = reps[g[0]].e
            gdata.append((e, [(j, reps[j].sign, _exact_root_modulus(dvals[j])) for j in g]))
    else:
        phis = [phase(complex(x)) % math.pi for x in dvals]
        gdata = []
        for g in _circular_groups(phis, policy.cluster_tol):
            z = sum(complex(dvals[j]) ** 2 / abs(complex(dvals[j])) ** 2 for j in g)
            phi = phase(z) / 2 % math.pi
            if phi >= math.pi - policy.cluster_tol:
                phi = 0.0
            e = unit_from_phase(phi)
            members = []
            for j in g:
                dj = complex(dvals[j])
                sign = 1 if (dj * e.conjugate()).real > 0 else -1
                members.append((j, sign, math.sqrt(abs(dj))))
            gdata.append((phi, e, members))
        gdata.sort(key=lambda t: t[0])
        gdata = [(e, m) for _, e, m in gdata]

    cols, block_meta = [], []
    for e, members in gdata:
        members = sorted(members, key=lambda t: (-t[1], t[0]))
        p = sum(1 for _, sg, _ in members if sg > 0)
        block_meta.append((e, p, len(members) - p))
        for j, _, r in members:
            col = s0.data[:, j]
            if exact:
                cols.append([x / r for x in col])
            else:
                cols.append(np.asarray(col, dtype=complex) / r)
    if exact:
        s = Mat(np.array(cols, dtype=object).T, fl)
    else:
        s = Mat(np.array(cols).T, fl)

    a_w = a if a.field == fl else a.to_float()
    a2 = solve(s, a_w @ s, policy)
    arr = a2.to_numpy()
    blocks, leak, k = [], 0.0, 0
    mask = np.ones((n, n), dtype=bool)
    for e, p, q in block_meta:
        m = p + q
        mask[k:k + m, k:k + m] = False
        blocks.append(CosetBlock(e, p, q, a2[k:k + m, k:k + m], s[:, k:k + m]))
        k += m
    leak = float(np.linalg.norm(arr[mask])) if n else 0.0
    bound = policy.structural_tol * max(np.linalg.norm(arr), 1e-300)
    if exact and leak != 0:
        raise BlockLeakage("operator is not block diagonal along the coset split")
    if not exact and leak > bound:
        raise BlockLeakage(f"off-diagonal coset blocks have norm {leak:.3e} (bound {bound:.3e})")
    return CosetSplit(tuple(blocks), s, diag.downgraded or (f.field.exact and not exact),
                      leak / max(np.linalg.norm(arr), 1e-300) if n else 0.0)


def _exact_root_modulus(d):
    """``sqrt(|d|)`` as a rational, or None when it leaves Q."""
    m = exact_modulus(d)
    return None if m is None else rational_sqrt(m)
