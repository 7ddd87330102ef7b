"""Floating-point kernels shared by the spectral and canonical modules.

Everything here works on plain ``complex128`` arrays.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg
from scipy.linalg import lapack

from .errors import IllConditioned

# relative backward error assumed for the dense eigensolver when estimating how
# far a defective eigenvalue of multiplicity m may split: (u * scale)**(1/m)
_SPLIT_U = 1e-12


def opnorm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a, 2)) if a.size else 0.0


def null_space(m: np.ndarray, atol: float) -> np.ndarray:
    """Orthonormal basis of the right kernel; singular values <= atol count as zero."""
    rows, cols = m.shape
    if rows == 0:
        return np.eye(cols, dtype=complex)
    _, s, vh = np.linalg.svd(m)
    r = int(np.sum(s > atol))
    return vh[r:].conj().T


def orth(m: np.ndarray, atol: float) -> np.ndarray:
    if m.shape[1] == 0:
        return np.zeros((m.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    r = int(np.sum(s > atol))
    return u[:, :r]


def complement(basis: np.ndarray, n: int) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of span(basis) in C^n."""
    if basis.shape[1] == 0:
        return np.eye(n, dtype=complex)
    q, _ = np.linalg.qr(basis, mode="complete")
    return q[:, basis.shape[1]:]


def split_allowance(m: int, scale: float, tol: float) -> float:
    """Largest spread a defective cluster of size m may show after rounding."""
    if m <= 1:
        return tol
    return max(tol, 4.0 * (_SPLIT_U * max(scale, 1.0)) ** (1.0 / m))


def cluster_points(values, tol: float, scale: float = 1.0, size: int | None = None):
    """Single-linkage clustering of complex numbers.

    Points join when they lie within ``split_allowance(size, scale, tol)`` of
    each other; ``size=1`` (or None) means the plain radius ``tol``.  Returns
    lists of indices, ordered by their smallest index.
    """
    vals = np.asarray(values, dtype=complex)
    radius = split_allowance(size or 1, scale, tol)
    groups, seen = [], set()
    for i in range(len(vals)):
        if i in seen:
            continue
        grp, stack = [], [i]
        seen.add(i)
        while stack:
            k = stack.pop()
            grp.append(k)
            for j in np.nonzero(np.abs(vals - vals[k]) <= radius)[0]:
                if int(j) not in seen:
                    seen.add(int(j))
                    stack.append(int(j))
        groups.append(sorted(grp))
    return groups


class SpectralSplit:
    """Eigenvalue clusters of a square matrix with orthonormal invariant subspaces."""

    def __init__(self, a: np.ndarray, cluster_tol: float, rank_tol: float):
        self.a = np.asarray(a, dtype=complex)
        self.n = self.a.shape[0]
        self.rank_tol = rank_tol
        self.scale = opnorm(self.a)
        if self.n == 0:
            self.t = self.z = np.zeros((0, 0), dtype=complex)
            self.clusters = []
            return
        self.t, self.z = scipy.linalg.schur(self.a, output="complex")
        eigs = np.diag(self.t)
        self.clusters = []
        scale = max(self.scale, 1.0)
        for g in cluster_points(eigs, cluster_tol, scale, self.n):
            self._accept(g, eigs, cluster_tol, scale)
        self.clusters.sort(key=lambda c: (round(c[0].real, 9), round(c[0].imag, 9)))

    def _accept(self, group, eigs, tol, scale):
        """Keep a cluster whose restriction is scalar plus nilpotent, else refine it.

        Refinement re-clusters with the allowance for one fewer point, so a
        group of m points is split at most m - 1 times.
        """
        mean = complex(np.mean(eigs[group]))
        basis = self.subspace(group)
        local = basis.conj().T @ self.a @ basis - mean * np.eye(len(group))
        dims = staircase_dims(local, self.rank_tol * max(self.scale, 1e-300))
        if dims and dims[-1] == len(group):
            self.clusters.append((mean, group, basis))
            return
        if len(group) == 1:
            raise IllConditioned(f"cannot isolate a nilpotent part near eigenvalue {mean:.6g}")
        size = len(group) - 1
        while True:
            sub = cluster_points(eigs[group], tol, scale, size)
            if len(sub) > 1 or size == 1:
                break
            size -= 1
        if len(sub) == 1:
            sub = [[k] for k in range(len(group))]
        for s in sub:
            self._accept([group[k] for k in s], eigs, tol, scale)

    def subspace(self, group) -> np.ndarray:
        """Orthonormal basis of the invariant subspace for the selected Schur eigenvalues."""
        select = np.zeros(self.n, dtype=np.int32)
        select[list(group)] = 1
        if select.all():
            return self.z.copy()
        ts, qs, _, m, _, _, info = lapack.ztrsen(select, self.t, self.z, job="N")
        if info != 0 or m != len(group):
            raise IllConditioned("Schur reordering failed")
        return qs[:, :m]


def staircase(n_op: np.ndarray, atol: float):
    """Nested kernels K_1 < K_2 < ... of a (numerically) nilpotent matrix.

    Uses one application of ``n_op`` per level instead of matrix powers: K_j is
    the kernel of ``C*  N`` with C an orthonormal basis of the complement of
    K_{j-1}.  Returns the orthonormal bases; stops when the kernel stalls.
    """
    m = n_op.shape[0]
    bases = []
    prev = np.zeros((m, 0), dtype=complex)
    while prev.shape[1] < m:
        c = complement(prev, m)
        k = null_space(c.conj().T @ n_op, atol)
        if k.shape[1] <= prev.shape[1]:
            break
        bases.append(k)
        prev = k
    return bases


def staircase_dims(n_op: np.ndarray, atol: float):
    return [b.shape[1] for b in staircase(n_op, atol)]


def block_sizes_from_dims(dims) -> list[int]:
    """Jordan block sizes (descending) from kernel dimensions dim ker N^j."""
    w = [dims[0]] + [dims[j] - dims[j - 1] for j in range(1, len(dims))]
    if any(w[j] < w[j + 1] for j in range(len(w) - 1)):
        raise IllConditioned(f"kernel dimensions {dims} are not a Weyr sequence")
    sizes = []
    for j in range(len(w)):
        nxt = w[j + 1] if j + 1 < len(w) else 0
        sizes += [j + 1] * (w[j] - nxt)
    return sorted(sizes, reverse=True)


def jordan_chains(n_op: np.ndarray, atol: float):
    """Jordan basis of a nilpotent matrix.

    Returns ``(T, sizes)`` where the columns of T are chains
    ``[N^{k-1} x, ..., N x, x]`` block after block (sizes descending), so that
    ``T^-1 N T`` is the direct sum of upper Jordan blocks J_k(0).
    """
    m = n_op.shape[0]
    if m == 0:
        return np.zeros((0, 0), dtype=complex), []
    kers = staircase(n_op, atol)
    dims = [k.shape[1] for k in kers]
    if not dims or dims[-1] != m:
        raise IllConditioned("operator is not nilpotent at the requested tolerance")
    sizes = block_sizes_from_dims(dims)
    tops = []  # (vector, level)
    for level in range(len(kers), 0, -1):
        count = sizes.count(level)
        if count == 0:
            continue
        spans = [kers[level - 2]] if level >= 2 else []
        for x, lvl in tops:
            spans.append((np.linalg.matrix_power(n_op, lvl - level) @ x)[:, None])
        base = orth(np.hstack(spans), 1e-10) if spans else np.zeros((m, 0), dtype=complex)
        r = kers[level - 1] - base @ (base.conj().T @ kers[level - 1])
        u, s, _ = np.linalg.svd(r, full_matrices=False)
        if len(s) < count or s[count - 1] <= 1e-10:
            raise IllConditioned("could not complete a Jordan chain basis")
        for k in range(count):
            tops.append((u[:, k], level))
    cols = []
    for x, lvl in tops:
        chain = [x]
        for _ in range(lvl - 1):
            chain.append(n_op @ chain[-1])
        cols += chain[::-1]
    return np.column_stack(cols), [lvl for _, lvl in tops]


def hermitian_inertia(h: np.ndarray, atol: float) -> tuple[int, int, int]:
    """(positive, negative, zero) eigenvalue counts of a Hermitian matrix."""
    if h.size == 0:
        return 0, 0, 0
    w = np.linalg.eigvalsh((h + h.conj().T) / 2)
    return int(np.sum(w > atol)), int(np.sum(w < -atol)), int(np.sum(np.abs(w) <= atol))
