"""Dense matrices over a :class:`FieldSpec`.

Exact fields store entries in numpy object arrays of ``Fraction`` or
``GaussianRational`` and are reduced by fraction-exact Gaussian elimination;
floating fields use ``float64``/``complex128`` arrays and LAPACK.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DimensionMismatch, SingularMatrix, SingularTransform
from .numfield import (CC, DEFAULT_POLICY, Base, FieldSpec, GaussianRational,
                       TolerancePolicy)


class Mat:
    """An immutable dense matrix tagged with its scalar field."""

    __slots__ = ("data", "field")

    def __init__(self, entries, field: FieldSpec):
        if isinstance(entries, Mat):
            entries = entries.data
        if field.exact:
            raw = np.asarray(entries, dtype=object)
            if raw.ndim != 2:
                raw = raw.reshape(_shape2(raw))
            data = np.empty(raw.shape, dtype=object)
            for idx, x in np.ndenumerate(raw):
                data[idx] = field.coerce(x)
        else:
            raw = np.asarray(entries)
            if raw.dtype == object:
                raw = np.vectorize(complex, otypes=[np.complex128])(raw) if raw.size else raw.astype(np.complex128)
            if field.base is Base.RealFloat:
                if np.iscomplexobj(raw):
                    if np.any(raw.imag != 0):
                        raise ValueError("complex entries in a real field")
                    raw = raw.real
                data = np.array(raw, dtype=np.float64)
            else:
                data = np.array(raw, dtype=np.complex128)
            if data.ndim != 2:
                data = data.reshape(_shape2(data))
        data.flags.writeable = False
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "field", field)

    def __setattr__(self, name, value):
        raise AttributeError("Mat is immutable")

    @classmethod
    def _wrap(cls, data: np.ndarray, field: FieldSpec) -> "Mat":
        m = object.__new__(cls)
        data = np.array(data, dtype=field.dtype) if not field.exact else data.copy()
        data.flags.writeable = False
        object.__setattr__(m, "data", data)
        object.__setattr__(m, "field", field)
        return m

    @classmethod
    def identity(cls, n: int, field: FieldSpec) -> "Mat":
        return cls(_eye(n, field), field)

    @classmethod
    def zeros(cls, rows: int, cols: int, field: FieldSpec) -> "Mat":
        return cls(_zeros(rows, cols, field), field)

    @property
    def shape(self):
        return self.data.shape

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, idx):
        """``m[i, j]`` is a scalar; any slice or index list yields a 2-D Mat."""
        if not isinstance(idx, tuple) or len(idx) != 2:
            raise IndexError("Mat indices take the form m[rows, cols]")
        r, c = idx
        if isinstance(r, (int, np.integer)) and isinstance(c, (int, np.integer)):
            return self.data[r, c]
        r = slice(r, r + 1) if isinstance(r, (int, np.integer)) else r
        c = slice(c, c + 1) if isinstance(c, (int, np.integer)) else c
        if not isinstance(r, slice) and not isinstance(c, slice):
            out = self.data[np.ix_(r, c)]
        else:
            out = self.data[r][:, c]
        return Mat._wrap(out, self.field)

    def _coerce_other(self, other) -> np.ndarray:
        if isinstance(other, Mat):
            if other.field != self.field:
                raise ValueError(f"field mismatch: {self.field} vs {other.field}")
            return other.data
        return other

    def __matmul__(self, other):
        o = self._coerce_other(other)
        if self.cols != o.shape[0]:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {o.shape}")
        if self.field.exact:
            return Mat(_exact_matmul(self.data, o), self.field)
        return Mat._wrap(self.data @ o, self.field)

    def __add__(self, other):
        o = self._coerce_other(other)
        if self.shape != o.shape:
            raise DimensionMismatch(f"cannot add {self.shape} and {o.shape}")
        return Mat(self.data + o, self.field) if self.field.exact else Mat._wrap(self.data + o, self.field)

    def __sub__(self, other):
        o = self._coerce_other(other)
        if self.shape != o.shape:
            raise DimensionMismatch(f"cannot subtract {o.shape} from {self.shape}")
        return Mat(self.data - o, self.field) if self.field.exact else Mat._wrap(self.data - o, self.field)

    def __neg__(self):
        return Mat(-self.data, self.field) if self.field.exact else Mat._wrap(-self.data, self.field)

    def __mul__(self, scalar):
        if isinstance(scalar, Mat):
            return NotImplemented
        c = self.field.coerce(scalar)
        if self.field.exact:
            return Mat(self.data * c, self.field)
        return Mat._wrap(self.data * c, self.field)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Mat):
            return NotImplemented
        return (self.field == other.field and self.shape == other.shape
                and bool(np.all(self.data == other.data)))

    __hash__ = None

    def transpose(self) -> "Mat":
        return Mat._wrap(self.data.T, self.field)

    @property
    def T(self) -> "Mat":
        return self.transpose()

    def star(self) -> "Mat":
        return star(self)

    def to_numpy(self, dtype=np.complex128) -> np.ndarray:
        if self.field.exact:
            return np.vectorize(complex, otypes=[np.complex128])(self.data).astype(dtype) \
                if self.data.size else np.zeros(self.shape, dtype=dtype)
        return np.array(self.data, dtype=dtype)

    def to_float(self) -> "Mat":
        """Embed into the floating field of the same involution."""
        f = self.field.as_float()
        if not self.field.exact:
            return self
        if f.base is Base.RealFloat:
            return Mat._wrap(np.vectorize(float, otypes=[np.float64])(self.data)
                             if self.data.size else np.zeros(self.shape), f)
        return Mat._wrap(self.to_numpy(), f)

    def norm(self) -> float:
        """Frobenius norm (as a float in every mode)."""
        return float(np.linalg.norm(self.to_numpy()))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.to_numpy()))) if self.data.size else 0.0

    def tolist(self):
        return self.data.tolist()

    def __repr__(self):
        rows = ", ".join("[" + ", ".join(str(x) for x in row) + "]" for row in self.data)
        return f"Mat([{rows}], {self.field})"


def _shape2(a: np.ndarray):
    if a.ndim == 0:
        return (1, 1)
    if a.ndim == 1:
        return (1, a.shape[0]) if a.shape[0] else (0, 0)
    raise DimensionMismatch(f"expected a 2-D array, got shape {a.shape}")


def _eye(n: int, field: FieldSpec) -> np.ndarray:
    if field.exact:
        out = np.empty((n, n), dtype=object)
        z, o = field.zero(), field.one()
        for i in range(n):
            for j in range(n):
                out[i, j] = o if i == j else z
        return out
    return np.eye(n, dtype=field.dtype)


def _zeros(rows: int, cols: int, field: FieldSpec) -> np.ndarray:
    if field.exact:
        out = np.empty((rows, cols), dtype=object)
        z = field.zero()
        for idx in np.ndindex(rows, cols):
            out[idx] = z
        return out
    return np.zeros((rows, cols), dtype=field.dtype)


def _exact_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape[1] == 0:
        out = np.empty((a.shape[0], b.shape[1]), dtype=object)
        out[...] = Fraction(0)
        return out
    return a @ b


def as_mat(x, field: FieldSpec | None = None) -> Mat:
    """Accept a Mat or an array-like (interpreted over ``field``, default CC)."""
    if isinstance(x, Mat):
        return x
    return Mat(x, field or CC)


def star(m: Mat) -> Mat:
    """Involution-transpose: entry (i, j) of the result is conj(m[j, i])."""
    if m.field.conjugating:
        if m.field.exact:
            return Mat._wrap(np.vectorize(lambda x: x.conjugate(), otypes=[object])(m.data.T)
                             if m.data.size else m.data.T, m.field)
        return Mat._wrap(m.data.T.conj(), m.field)
    return m.transpose()


def direct_sum(*mats: Mat, field: FieldSpec | None = None) -> Mat:
    if not mats:
        if field is None:
            raise ValueError("empty direct sum needs a field")
        return Mat.zeros(0, 0, field)
    f = mats[0].field
    r = sum(m.rows for m in mats)
    c = sum(m.cols for m in mats)
    out = _zeros(r, c, f)
    i = j = 0
    for m in mats:
        out[i:i + m.rows, j:j + m.cols] = m.data
        i += m.rows
        j += m.cols
    return Mat._wrap(out, f) if not f.exact else Mat(out, f)


def hstack(mats, field: FieldSpec) -> Mat:
    mats = list(mats)
    if not mats:
        return Mat.zeros(0, 0, field)
    return Mat(np.concatenate([m.data for m in mats], axis=1), field) if field.exact \
        else Mat._wrap(np.concatenate([m.data for m in mats], axis=1), field)


# ---------------------------------------------------------------------------
# exact elimination

def _bits(q: Fraction) -> tuple[int, int]:
    return abs(q.numerator).bit_length(), q.denominator.bit_length()


def _pivot_score(x) -> float:
    if isinstance(x, GaussianRational):
        nr, dr = _bits(x.re)
        ni, di = _bits(x.im)
        return (max(nr, ni) + 1) / (max(dr, di) + 1)
    n, d = _bits(Fraction(x))
    return (n + 1) / (d + 1)


def _rref(a: np.ndarray):
    """Reduced row echelon form over an exact field; returns (R, pivot columns)."""
    r = a.copy()
    rows, cols = r.shape
    pivots = []
    row = 0
    for col in range(cols):
        if row >= rows:
            break
        cand = [i for i in range(row, rows) if r[i, col] != 0]
        if not cand:
            continue
        p = max(cand, key=lambda i: (_pivot_score(r[i, col]), -i))
        if p != row:
            r[[row, p]] = r[[p, row]]
        piv = r[row, col]
        r[row] = [x / piv for x in r[row]]
        for i in range(rows):
            if i != row and r[i, col] != 0:
                c = r[i, col]
                r[i] = [x - c * y for x, y in zip(r[i], r[row])]
        pivots.append(col)
        row += 1
    return r, pivots


def _exact_nullspace(a: np.ndarray, field: FieldSpec) -> np.ndarray:
    rows, cols = a.shape
    r, pivots = _rref(a)
    free = [c for c in range(cols) if c not in pivots]
    basis = _zeros(cols, len(free), field)
    for k, fc in enumerate(free):
        basis[fc, k] = field.one()
        for i, pc in enumerate(pivots):
            basis[pc, k] = -r[i, fc]
    return basis


# ---------------------------------------------------------------------------
# public kernels

def _float_threshold(m: np.ndarray, policy: TolerancePolicy) -> float:
    scale = float(np.max(np.abs(m))) if m.size else 0.0
    return policy.structural_tol * max(scale, np.finfo(float).tiny)


def rank(m: Mat, policy: TolerancePolicy = DEFAULT_POLICY) -> int:
    if m.data.size == 0:
        return 0
    if m.field.exact:
        return len(_rref(m.data)[1])
    s = np.linalg.svd(m.data, compute_uv=False)
    return int(np.sum(s > _float_threshold(m.data, policy) * max(m.shape)))


def is_nonsingular(m: Mat, policy: TolerancePolicy = DEFAULT_POLICY) -> bool:
    return m.is_square and rank(m, policy) == m.rows


def nullspace(m: Mat, policy: TolerancePolicy = DEFAULT_POLICY) -> Mat:
    """Basis of the right kernel as columns."""
    if m.field.exact:
        return Mat(_exact_nullspace(m.data, m.field), m.field)
    if m.rows == 0:
        return Mat.identity(m.cols, m.field)
    _, s, vh = np.linalg.svd(m.data)
    r = int(np.sum(s > _float_threshold(m.data, policy) * max(m.shape)))
    return Mat._wrap(vh[r:].conj().T, m.field)


def det(m: Mat):
    if not m.is_square:
        raise DimensionMismatch("determinant of a non-square matrix")
    if not m.field.exact:
        return np.linalg.det(m.data)
    a = m.data.copy()
    n = m.rows
    d = m.field.one()
    for col in range(n):
        cand = [i for i in range(col, n) if a[i, col] != 0]
        if not cand:
            return m.field.zero()
        p = max(cand, key=lambda i: (_pivot_score(a[i, col]), -i))
        if p != col:
            a[[col, p]] = a[[p, col]]
            d = -d
        piv = a[col, col]
        d = d * piv
        for i in range(col + 1, n):
            if a[i, col] != 0:
                c = a[i, col] / piv
                a[i] = [x - c * y for x, y in zip(a[i], a[col])]
    return d


def solve(m: Mat, b: Mat, policy: TolerancePolicy = DEFAULT_POLICY) -> Mat:
    """Solve ``m @ x = b``; exact over exact fields, partial pivoting otherwise."""
    if not m.is_square:
        raise DimensionMismatch("solve needs a square coefficient matrix")
    if b.rows != m.rows:
        raise DimensionMismatch(f"right-hand side has {b.rows} rows, expected {m.rows}")
    if b.field != m.field:
        raise ValueError("field mismatch")
    n = m.rows
    if m.field.exact:
        aug = np.concatenate([m.data, b.data], axis=1)
        r, pivots = _rref(aug)
        if pivots[:n] != list(range(n)) or len(pivots) > n:
            raise SingularMatrix("matrix is singular")
        return Mat(r[:, n:], m.field)
    if not is_nonsingular(m, policy):
        raise SingularMatrix("matrix is numerically singular")
    import scipy.linalg
    x = scipy.linalg.solve(m.data, b.data, check_finite=False)
    return Mat._wrap(x, m.field)


def inv(m: Mat, policy: TolerancePolicy = DEFAULT_POLICY) -> Mat:
    return solve(m, Mat.identity(m.rows, m.field), policy)


@dataclass(frozen=True)
class PairTransport:
    """An operator matrix ``a`` together with a form matrix ``f``."""

    a: Mat
    f: Mat

    def __post_init__(self):
        if not (self.a.is_square and self.f.is_square):
            raise DimensionMismatch("operator and form must be square")
        if self.a.rows != self.f.rows:
            raise DimensionMismatch(f"operator is {self.a.shape}, form is {self.f.shape}")
        if self.a.field != self.f.field:
            raise ValueError("operator and form live over different fields")

    @property
    def n(self) -> int:
        return self.a.rows

    @property
    def field(self) -> FieldSpec:
        return self.a.field


def transport(p: PairTransport, s: Mat, policy: TolerancePolicy = DEFAULT_POLICY) -> PairTransport:
    """Change of basis ``(A, F) -> (S^-1 A S, S* F S)``."""
    if s.shape != (p.n, p.n):
        raise DimensionMismatch(f"basis change is {s.shape}, pair has size {p.n}")
    try:
        a = solve(s, p.a @ s, policy)
    except SingularMatrix as exc:
        raise SingularTransform(str(exc)) from None
    return PairTransport(a, star(s) @ p.f @ s)


def close(x: Mat, y: Mat, policy: TolerancePolicy = DEFAULT_POLICY, tol: float | None = None) -> bool:
    """Matrix identity check: literal in exact mode, relative Frobenius otherwise."""
    if x.shape != y.shape:
        return False
    if x.field.exact and y.field.exact:
        return bool(np.all(x.data == y.data))
    t = policy.structural_tol if tol is None else tol
    a, b = x.to_numpy(), y.to_numpy()
    scale = max(np.linalg.norm(a), np.linalg.norm(b), 1e-300)
    return float(np.linalg.norm(a - b)) <= t * scale


def relative_residual(x: Mat | np.ndarray, y: Mat | np.ndarray) -> float:
    a = x.to_numpy() if isinstance(x, Mat) else np.asarray(x, dtype=complex)
    b = y.to_numpy() if isinstance(y, Mat) else np.asarray(y, dtype=complex)
    scale = max(np.linalg.norm(a), np.linalg.norm(b), 1e-300)
    return float(np.linalg.norm(a - b)) / scale
