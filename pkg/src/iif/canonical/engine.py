"""Canonicalization of isometric and (skew)adjoint operators over C with conjugation.

Pipeline: split the space into form cosets, then inside each coset block
(with form ``e * H``, ``H = diag(I_p, -I_q)``) build structured Jordan chains
for every eigenvalue cluster:

* real eigenvalue of a selfadjoint block: chains normalized so the form is
  ``delta * Z_k`` on each chain;
* non-real eigenvalue pairs (lam, conj lam) and, for isometries, pairs
  (lam, 1/conj lam): a Jordan basis on one side and its H-dual on the other;
* unimodular eigenvalue of an isometry: the Cayley transform turns it into a
  nilpotent selfadjoint problem, solved as above and mapped back.

Every result carries the witness ``S`` and is checked against it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import _dense
from ..errors import (DimensionMismatch, IllConditioned, KindMismatch, NotApplicable, NotEigenvalue,
                      NotSelfadjoint, PairingMismatch)
from ..linalg import Mat, PairTransport, direct_sum, inv, relative_residual, transport
from ..numfield import CC, DEFAULT_POLICY, Base, TolerancePolicy
from ..structure import OpKind, classify, split_cosets
from .families import (AdjPaired, AdjReal, IsoHyperbolic, IsoUnimodular, _common_field, materialize,
                       normalization_witness, normalize, sort_key, summands_close)


# ---------------------------------------------------------------------------
# result types

@dataclass(frozen=True)
class CanonicalForm:
    """Normalized summands, sorted; ``witness`` maps the input pair onto their direct sum.

    For skewadjoint input the summands describe ``i*A`` (selfadjoint picture)
    and ``notes`` contains ``"operator_times_i"``; :meth:`materialize`
    undoes the factor so it matches ``transport((A, F), witness)``.
    """

    summands: tuple
    witness: Mat | None
    mode: str
    kind: str
    notes: tuple = ()
    residual: float | None = None

    def materialize(self):
        a, f = materialize(self.summands, CC)
        if "operator_times_i" in self.notes:
            a = a * (-1j)
        return a, f

    @property
    def dim(self) -> int:
        return sum(s.size for s in self.summands)


@dataclass(frozen=True)
class IsoVerdict:
    """Unpacks as ``(isomorphic, witness)``."""

    isomorphic: bool
    witness: Mat | None = None
    residual: float | None = None

    def __iter__(self):
        return iter((self.isomorphic, self.witness))

    def __bool__(self):
        return self.isomorphic


@dataclass(frozen=True)
class GroupFactors:
    factors: tuple
    target: str

    def render(self) -> str:
        if self.target == "group":
            parts = [f"U({p},{q})" for _, p, q in self.factors]
            return "U(D) ≅ " + " × ".join(parts) if parts else "U(D) = {1}"
        parts = [f"S(I_{{{p},{q}}})" for _, p, q in self.factors]
        return "S(D) ≅ " + " × ".join(parts) if parts else "S(D) = {0}"


# ---------------------------------------------------------------------------
# input handling

def _kind(kind) -> OpKind:
    if isinstance(kind, OpKind):
        return kind
    try:
        return OpKind(str(kind).lower())
    except ValueError:
        raise NotApplicable(f"unknown operator kind {kind!r}") from None


def _to_complex(m: Mat) -> Mat:
    f = m.field
    if f.base in (Base.Rational, Base.RealFloat):
        return Mat(m.to_numpy(), CC)
    if not f.conjugating:
        raise NotApplicable("canonicalization needs complex scalars with conjugation")
    return m if f == CC else Mat(m.to_numpy(), CC)


# ---------------------------------------------------------------------------
# structured chains

def _kernel(m: np.ndarray, dim: int) -> np.ndarray:
    """Orthonormal basis of the ``dim`` weakest right-singular directions."""
    _, _, vh = np.linalg.svd(m)
    return vh[vh.shape[0] - dim:].conj().T


def _sqrt_series(g):
    p = [math.sqrt(g[0])]
    for j in range(1, len(g)):
        acc = g[j] - sum(p[s] * p[j - s] for s in range(1, j))
        p.append(acc / (2 * p[0]))
    return p


def structured_chains(nop: np.ndarray, g: np.ndarray, atol: float):
    """Jordan chains of a nilpotent ``nop`` that is selfadjoint for Hermitian ``g``.

    Returns ``[(k, delta, V)]`` with ``V^-1 nop V = J_k(0)`` on each chain,
    ``V* g V = delta Z_k``, distinct chains g-orthogonal.  Longest chains come
    first.
    """
    m = nop.shape[0]
    out = []
    basis = np.eye(m, dtype=complex)
    nn, gg = nop, g
    while basis.shape[1]:
        size = nn.shape[0]
        kers = _dense.staircase(nn, atol)
        if not kers or kers[-1].shape[1] != size:
            raise IllConditioned("restricted operator is not nilpotent at the requested tolerance")
        k = len(kers)
        prev = kers[k - 2] if k >= 2 else np.zeros((size, 0), dtype=complex)
        x_c = _dense.complement(prev, size)
        powers = [np.eye(size, dtype=complex)]
        for _ in range(k - 1):
            powers.append(nn @ powers[-1])
        gk = x_c.conj().T @ gg @ powers[k - 1] @ x_c
        w, v = np.linalg.eigh((gk + gk.conj().T) / 2)
        x = x_c @ v[:, int(np.argmax(np.abs(w)))]
        c = [float(np.real(x.conj() @ gg @ powers[t] @ x)) for t in range(k)]
        top = c[k - 1]
        if top == 0:
            raise IllConditioned("degenerate chain pairing")
        delta = 1 if top > 0 else -1
        coef = [1 / abs(top)]
        for j in range(1, k):
            coef.append(-sum(coef[s] * c[s + k - 1 - j] for s in range(j)) / top)
        p = _sqrt_series(coef)
        xp = sum(p[s] * (powers[s] @ x) for s in range(k))
        chain = np.column_stack([powers[k - 1 - j] @ xp for j in range(k)])
        out.append((k, delta, basis @ chain))
        if size == k:
            break
        comp = _kernel(chain.conj().T @ gg, size - k)
        nn = comp.conj().T @ nn @ comp
        gg = comp.conj().T @ gg @ comp
        basis = basis @ comp
    return out


def _pair_clusters(side, other, target, tol, what):
    """Greedy nearest matching of each cluster in ``side`` to ``target(mean)`` in ``other``."""
    free = list(range(len(other)))
    pairs = []
    for c in side:
        want = target(c[0])
        if not free:
            raise PairingMismatch(f"no partner for {what} eigenvalue {c[0]:.6g}")
        j = min(free, key=lambda j: abs(other[j][0] - want))
        if abs(other[j][0] - want) > tol * max(1.0, abs(want)):
            raise PairingMismatch(f"no partner for {what} eigenvalue {c[0]:.6g}")
        if len(other[j][1]) != len(c[1]):
            raise PairingMismatch(f"partner multiplicities differ at eigenvalue {c[0]:.6g}")
        free.remove(j)
        pairs.append((c, other[j]))
    if free:
        raise PairingMismatch("unpaired eigenvalues remain")
    return pairs


def _dual_side(b, h, c, partner, atol):
    """Jordan basis U on cluster ``c`` and its H-dual W on ``partner``."""
    mean, group, basis = c
    t_loc, sizes = _dense.jordan_chains(basis.conj().T @ b @ basis - mean * np.eye(len(group)), atol)
    u = basis @ t_loc
    y = partner[2]
    m = u.conj().T @ h @ y
    if np.linalg.cond(m) > 1e12:
        raise PairingMismatch(f"eigenspaces at {mean:.6g} are not paired by the form")
    w = y @ np.linalg.inv(m)
    out, off = [], 0
    for k in sizes:
        out.append((k, np.hstack([u[:, off:off + k], w[:, off:off + k]])))
        off += k
    return out


def _selfadjoint_block(b, h, e, policy):
    split = _dense.SpectralSplit(b, policy.cluster_tol, policy.structural_tol)
    atol = policy.structural_tol * max(split.scale, 1e-300)
    tol = policy.cluster_tol
    real, upper, lower = [], [], []
    for c in split.clusters:
        im = c[0].imag
        if abs(im) <= tol * max(1.0, abs(c[0])):
            real.append(c)
        else:
            (upper if im > 0 else lower).append(c)
    out = []
    for mean, group, basis in real:
        lam = mean.real
        g = basis.conj().T @ h @ basis
        nop = basis.conj().T @ b @ basis - lam * np.eye(len(group))
        for k, delta, v in structured_chains(nop, g, atol):
            out.append((AdjReal(k, lam, e * delta), basis @ v))
    for c, partner in _pair_clusters(upper, lower, np.conj, tol, "non-real"):
        for k, cols in _dual_side(b, h, c, partner, atol):
            out.append((AdjPaired(k, c[0], e), cols))
    return out


def _isometric_block(b, h, e, policy):
    split = _dense.SpectralSplit(b, policy.cluster_tol, policy.structural_tol)
    atol = policy.structural_tol * max(split.scale, 1e-300)
    tol = policy.cluster_tol
    unit, outer, inner = [], [], []
    for c in split.clusters:
        r = abs(c[0])
        if abs(r - 1) <= tol:
            unit.append(c)
        else:
            (outer if r > 1 else inner).append(c)
    out = []
    for mean, group, basis in unit:
        lam = mean / abs(mean)
        m = len(group)
        g = basis.conj().T @ h @ basis
        kk = (basis.conj().T @ b @ basis) / lam
        cay = np.linalg.solve(kk + np.eye(m), kk - np.eye(m))
        for k, delta, v in structured_chains(1j * cay, g, atol / max(abs(mean), 1e-300)):
            d = np.diag([1j ** j for j in range(k)])
            out.append((IsoUnimodular(k, lam, e * delta * (-1) ** (k - 1)), basis @ v @ d))
    for c, partner in _pair_clusters(outer, inner, lambda z: 1 / np.conj(z), tol, "hyperbolic"):
        for k, cols in _dual_side(b, h, c, partner, atol):
            out.append((IsoHyperbolic(k, c[0], e), cols))
    return out


# ---------------------------------------------------------------------------
# public operations

def canonicalize(a: Mat, f: Mat, kind="selfadjoint", policy: TolerancePolicy = DEFAULT_POLICY,
                 seed: int = 0) -> CanonicalForm:
    """Canonical form of (A, F) with witness, for an isometric, selfadjoint or skewadjoint A."""
    k = _kind(kind)
    ac, fc = _to_complex(a), _to_complex(f)
    rep = classify(ac, fc, policy)
    if not rep.has(k):
        raise KindMismatch(f"operator is not {k.value} for the form")
    notes = ()
    if k is OpKind.Skewadjoint:
        ac = ac * 1j
        notes = ("operator_times_i",)
    n = ac.rows
    if n == 0:
        return CanonicalForm((), Mat.zeros(0, 0, CC), "float", k.value, notes, 0.0)
    split = split_cosets(ac, fc, policy, seed)
    s_split = split.s.to_numpy()
    work = _isometric_block if k is OpKind.Isometric else _selfadjoint_block
    pieces = []
    off = 0
    for blk in split.blocks:
        m = blk.size
        h = np.diag([1.0] * blk.p + [-1.0] * blk.q).astype(complex)
        e = complex(blk.e)
        for summand, cols in work(blk.a_block.to_numpy(), h, e, policy):
            pieces.append((normalize(summand, policy), s_split[:, off:off + m] @ cols))
        off += m
    pieces.sort(key=lambda t: sort_key(t[0]))
    summands = tuple(p[0] for p in pieces)
    s = Mat(np.hstack([p[1] for p in pieces]), CC)
    cf = CanonicalForm(summands, s, "float", k.value, notes)
    resid = witness_residual(a, f, cf)
    if resid > policy.structural_tol:
        raise IllConditioned(f"canonical witness residual {resid:.2e} exceeds {policy.structural_tol:.1e}")
    return CanonicalForm(summands, s, "float", k.value, notes, resid)


def witness_residual(a: Mat, f: Mat, cf: CanonicalForm) -> float:
    """max of the relative residuals of S^-1 A S and S* F S against the canonical pair."""
    s = cf.witness.to_numpy()
    ac, fc = cf.materialize()
    aa, ff = a.to_numpy(), f.to_numpy()
    a2 = np.linalg.solve(s, aa @ s)
    f2 = s.conj().T @ ff @ s
    return max(relative_residual(a2, ac.to_numpy()), relative_residual(f2, fc.to_numpy()))


def sign_characteristic(b: Mat, h: Mat, lam, policy: TolerancePolicy = DEFAULT_POLICY):
    """Sorted list of (block size, sign) for the Jordan blocks of b at the real eigenvalue lam.

    For each size k the Hermitian form x -> h(x, (b - lam)^(k-1) x) on
    ker (b - lam)^k has rank equal to the number of size-k blocks and
    signature equal to the sum of their signs.
    """
    bb, hh = _to_complex(b).to_numpy(), _to_complex(h).to_numpy()
    if bb.shape != hh.shape or bb.shape[0] != bb.shape[1]:
        raise DimensionMismatch("operator and form must be square of equal size")
    scale = max(np.linalg.norm(hh), 1e-300)
    if np.linalg.norm(hh - hh.conj().T) > policy.structural_tol * scale:
        raise NotSelfadjoint("form is not Hermitian")
    lhs, rhs = hh @ bb, bb.conj().T @ hh
    if np.linalg.norm(lhs - rhs) > policy.structural_tol * max(np.linalg.norm(lhs), np.linalg.norm(rhs), 1e-300):
        raise NotSelfadjoint("operator is not selfadjoint for the form")
    lam = complex(lam)
    if abs(lam.imag) > policy.cluster_tol:
        raise NotEigenvalue(f"{lam} is not real")
    split = _dense.SpectralSplit(bb, policy.cluster_tol, policy.structural_tol)
    hit = [c for c in split.clusters if abs(c[0] - lam) <= policy.cluster_tol * max(1.0, abs(lam))]
    if not hit:
        raise NotEigenvalue(f"{lam.real:g} is not an eigenvalue")
    mean, group, basis = hit[0]
    g = basis.conj().T @ hh @ basis
    nop = basis.conj().T @ bb @ basis - mean.real * np.eye(len(group))
    kers = _dense.staircase(nop, policy.structural_tol * max(split.scale, 1e-300))
    sizes = _dense.block_sizes_from_dims([k.shape[1] for k in kers])
    out = []
    power = np.eye(len(group), dtype=complex)
    for k in range(1, len(kers) + 1):
        if k > 1:
            power = nop @ power
        count = sizes.count(k)
        if not count:
            continue
        kb = kers[k - 1]
        q = kb.conj().T @ g @ power @ kb
        w = np.linalg.eigvalsh((q + q.conj().T) / 2)
        top = sorted(w, key=abs, reverse=True)[:count]
        pos = sum(1 for x in top if x > 0)
        out += [(k, 1)] * pos + [(k, -1)] * (count - pos)
    return sorted(out, key=lambda t: (t[0], -t[1]))


def _match(s1, s2, tol):
    """Permutation ``perm`` with s2[j] close to s1[perm[j]], or None."""
    free = list(range(len(s1)))
    perm = []
    for t in s2:
        j = next((j for j in free if summands_close(s1[j], t, tol)), None)
        if j is None:
            return None
        free.remove(j)
        perm.append(j)
    return perm if not free else None


def _block_permutation(sizes1, perm):
    """Permutation matrix P with P^-1 (sum of blocks in order 1) P = sum in order ``perm``."""
    starts = np.concatenate([[0], np.cumsum(sizes1)])
    cols = np.concatenate([np.arange(starts[j], starts[j + 1]) for j in perm]) if perm else np.array([], int)
    n = int(starts[-1])
    p = np.zeros((n, n), dtype=complex)
    p[cols, np.arange(n)] = 1
    return p


def isomorphic(a1: Mat, f1: Mat, a2: Mat, f2: Mat, kind="selfadjoint",
               policy: TolerancePolicy = DEFAULT_POLICY, seed: int = 0) -> IsoVerdict:
    """Decide whether the pairs are related by a basis change; return a verified witness."""
    if a1.rows != a2.rows:
        return IsoVerdict(False)
    cf1 = canonicalize(a1, f1, kind, policy, seed)
    cf2 = canonicalize(a2, f2, kind, policy, seed)
    perm = _match(cf1.summands, cf2.summands, policy.cluster_tol)
    if perm is None:
        return IsoVerdict(False)
    p = _block_permutation([s.size for s in cf1.summands], perm)
    s1, s2 = cf1.witness.to_numpy(), cf2.witness.to_numpy()
    w = s1 @ p @ np.linalg.inv(s2)
    resid = transport_residual(a1, f1, a2, f2, w)
    if resid > verify_tolerance(policy, s2):
        raise IllConditioned(f"isomorphism witness residual {resid:.2e} failed verification")
    return IsoVerdict(True, Mat(w, CC), resid)


def verify_tolerance(policy: TolerancePolicy, s2: np.ndarray) -> float:
    """Residual allowance for a composite witness: cluster-level parameter error, amplified by cond(S2)."""
    return max(policy.structural_tol, policy.cluster_tol * 1e-2) * max(1.0, float(np.linalg.cond(s2)))


def transport_residual(a1, f1, a2, f2, w) -> float:
    a1, f1 = _to_complex(a1).to_numpy(), _to_complex(f1).to_numpy()
    a2, f2 = _to_complex(a2).to_numpy(), _to_complex(f2).to_numpy()
    w = w.to_numpy() if isinstance(w, Mat) else w
    return max(relative_residual(np.linalg.solve(w, a1 @ w), a2),
               relative_residual(w.conj().T @ f1 @ w, f2))


def canonical_summands(summands, policy: TolerancePolicy = DEFAULT_POLICY):
    """Normalize and sort declared summands; also return the witness from their direct sum.

    ``transport(materialize(summands), w) == materialize(result)``.
    """
    pieces = [normalization_witness(s, policy) for s in summands]
    if not pieces:
        return (), None
    fl = _common_field([w.field for _, w in pieces])
    ws = [Mat(w.data, fl) if fl.exact else Mat(w.to_numpy(), fl) for _, w in pieces]
    order = sorted(range(len(pieces)), key=lambda j: sort_key(pieces[j][0]))
    perm = _block_permutation([t.size for t, _ in pieces], order)
    w = direct_sum(*ws, field=fl) @ _perm_mat(perm, fl)
    return tuple(pieces[j][0] for j in order), w


def _perm_mat(p: np.ndarray, fl) -> Mat:
    return Mat(p.real.astype(int), fl) if fl.exact else Mat(p if fl.complex else p.real, fl)


def isomorphic_summands(s1, s2, policy: TolerancePolicy = DEFAULT_POLICY) -> IsoVerdict:
    """Isomorphism of two declared direct sums of canonical summands, with witness."""
    c1, w1 = canonical_summands(s1, policy)
    c2, w2 = canonical_summands(s2, policy)
    perm = _match(c1, c2, policy.cluster_tol)
    if perm is None:
        return IsoVerdict(False)
    fl = w1.field
    if w2.field != fl:
        return IsoVerdict(False)
    pm = _perm_mat(_block_permutation([s.size for s in c1], perm), fl)
    w = w1 @ pm @ inv(w2)
    a1, f1 = materialize(s1, fl)
    a2, f2 = materialize(s2, fl)
    if fl.exact:
        t = transport(PairTransport(a1, f1), w)
        ok = t.a == a2 and t.f == f2
        return IsoVerdict(bool(ok), w if ok else None, 0.0 if ok else None)
    resid = transport_residual(a1, f1, a2, f2, w) if fl.conjugating else _bilinear_residual(a1, f1, a2, f2, w)
    ok = resid <= verify_tolerance(policy, w2.to_numpy())
    return IsoVerdict(ok, w if ok else None, resid)


def _bilinear_residual(a1, f1, a2, f2, w) -> float:
    a1, f1, a2, f2 = (m.to_numpy() for m in (a1, f1, a2, f2))
    w = w.to_numpy()
    return max(relative_residual(np.linalg.solve(w, a1 @ w), a2), relative_residual(w.T @ f1 @ w, f2))


def group_factors(f: Mat, target: str = "group", policy: TolerancePolicy = DEFAULT_POLICY,
                  seed: int = 0) -> GroupFactors:
    """Coset signature data [(e, p, q)] of a diagonalizable form, phases ascending."""
    if target not in ("group", "algebra"):
        raise NotApplicable(f"target must be 'group' or 'algebra', got {target!r}")
    fc = f if f.field.conjugating else _to_complex(f)
    split = split_cosets(Mat.identity(fc.rows, fc.field), fc, policy, seed)
    return GroupFactors(tuple(split.signature_data), target)
