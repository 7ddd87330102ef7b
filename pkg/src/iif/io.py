"""JSON documents for pairs and results (format tag ``iif/1``).

Scalars are encoded by type so that exact values never pass through floating
point: rationals as ``"p/q"``, Gaussian rationals as ``["p/q", "r/s"]``, real
floats as JSON numbers and complex floats as ``[re, im]``.  Every document is
built in a fixed key order, so equal inputs give byte-identical text.
"""

from __future__ import annotations

import json
from dataclasses import replace
from fractions import Fraction

import numpy as np

from .canonical import FAMILIES, CanonicalForm, GroupFactors, IsoVerdict, params
from .errors import DimensionMismatch, ParseError
from .linalg import Mat
from .numfield import DEFAULT_POLICY, Base, FieldSpec, GaussianRational, Involution, TolerancePolicy, parse_exact
from .structure import CosetSplit, FormDiagonalization, StructureReport

VERSION = "iif/1"


# ---------------------------------------------------------------------------
# scalars

def _frac(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def encode_scalar(x):
    """Type-directed encoding; plain ints (signs, sizes) stay JSON integers."""
    if isinstance(x, bool):
        return x
    if isinstance(x, GaussianRational):
        return [_frac(x.re), _frac(x.im)]
    if isinstance(x, Fraction):
        return _frac(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (float, np.floating)):
        return float(x)
    raise TypeError(f"cannot encode {x!r}")


def decode_scalar(v):
    """Inverse of :func:`encode_scalar`."""
    if isinstance(v, bool):
        raise ParseError(f"unexpected boolean {v!r}")
    if isinstance(v, int):
        return v
    if isinstance(v, float):
        return v
    if isinstance(v, str):
        return parse_exact(v)
    if isinstance(v, list) and len(v) == 2:
        if all(isinstance(t, str) for t in v):
            return GaussianRational(parse_exact(v[0]), parse_exact(v[1]))
        if all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in v):
            return complex(float(v[0]), float(v[1]))
    raise ParseError(f"cannot decode scalar {v!r}")


def _rational_part(t) -> Fraction:
    q = parse_exact(t) if isinstance(t, str) else Fraction(int(t))
    if isinstance(q, GaussianRational):
        if q.im != 0:
            raise ValueError(f"{t!r} is not rational")
        q = q.re
    return Fraction(q)


def _entry(v, field: FieldSpec, where: str):
    b = field.base
    try:
        if b is Base.Rational:
            if isinstance(v, float) or isinstance(v, list):
                raise ValueError("rational entries must be \"p/q\" strings or integers")
            return field.coerce(v if isinstance(v, str) else int(v))
        if b is Base.GaussianRational:
            if isinstance(v, list):
                if len(v) != 2 or any(isinstance(t, float) for t in v):
                    raise ValueError("Gaussian entries are [\"p/q\", \"r/s\"]")
                return GaussianRational(_rational_part(v[0]), _rational_part(v[1]))
            if isinstance(v, float):
                raise ValueError("floats are not allowed in an exact document")
            return field.coerce(v if isinstance(v, str) else int(v))
        if b is Base.RealFloat:
            if isinstance(v, (list, str, bool)):
                raise ValueError("real_float entries are JSON numbers")
            return float(v)
        if isinstance(v, list):
            if len(v) != 2 or any(isinstance(t, (str, bool)) for t in v):
                raise ValueError("complex_float entries are [re, im]")
            return complex(float(v[0]), float(v[1]))
        if isinstance(v, (str, bool)):
            raise ValueError("complex_float entries are numbers or [re, im]")
        return complex(v)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise ParseError(f"bad entry {v!r}: {exc}", field=where) from None


# ---------------------------------------------------------------------------
# matrices

def encode_matrix(m: Mat) -> list:
    if m.field.base is Base.RealFloat:
        return [[float(x) for x in row] for row in m.data.tolist()]
    if m.field.base is Base.ComplexFloat:
        return [[[float(complex(x).real), float(complex(x).imag)] for x in row] for row in m.data.tolist()]
    return [[encode_scalar(x) for x in row] for row in m.data.tolist()]


def decode_matrix(rows, field: FieldSpec, where: str) -> Mat:
    if not isinstance(rows, list) or any(not isinstance(r, list) for r in rows):
        raise ParseError("matrix must be a list of rows", field=where)
    n = len(rows)
    width = {len(r) for r in rows}
    if len(width) > 1:
        raise ParseError("rows have different lengths", field=where)
    cols = width.pop() if width else 0
    if n and cols == 0:
        raise ParseError("empty rows", field=where)
    data = np.empty((n, cols), dtype=object)
    for i, r in enumerate(rows):
        for j, v in enumerate(r):
            data[i, j] = _entry(v, field, f"{where}[{i}][{j}]")
    if not field.exact:
        data = np.array(data.tolist(), dtype=field.dtype).reshape(n, cols)
    return Mat(data, field)


def field_doc(field: FieldSpec) -> dict:
    return {"field": field.base.value, "involution": field.involution.value}


def field_from_doc(doc: dict) -> FieldSpec:
    try:
        base = Base(doc.get("field"))
    except ValueError:
        raise ParseError(f"unknown field {doc.get('field')!r}", field="field") from None
    default = "conjugation" if base in (Base.GaussianRational, Base.ComplexFloat) else "identity"
    try:
        inv_ = Involution(doc.get("involution", default))
        return FieldSpec(base, inv_)
    except ValueError as exc:
        raise ParseError(str(exc), field="involution") from None


def encode_mat_doc(m: Mat) -> dict:
    return {**field_doc(m.field), "matrix": encode_matrix(m)}


def decode_mat_doc(doc: dict, where: str = "matrix") -> Mat:
    return decode_matrix(doc.get("matrix"), field_from_doc(doc), where)


# ---------------------------------------------------------------------------
# documents

def dumps(doc: dict) -> str:
    """Canonical text: two-space indent, insertion order, trailing newline."""
    return json.dumps(doc, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def loads(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from None
    if not isinstance(doc, dict):
        raise ParseError("document must be a JSON object")
    v = doc.get("version", VERSION)
    if v != VERSION:
        raise ParseError(f"unsupported version {v!r}", field="version")
    return doc


def _policy(doc: dict, base: TolerancePolicy) -> TolerancePolicy:
    tol = doc.get("tolerance")
    if tol is None:
        return base
    if not isinstance(tol, dict):
        raise ParseError("tolerance must be an object", field="tolerance")
    out = base
    for key, attr in (("structural", "structural_tol"), ("cluster", "cluster_tol")):
        if key in tol:
            v = tol[key]
            if isinstance(v, bool) or not isinstance(v, (int, float)) or v <= 0:
                raise ParseError(f"tolerance {key} must be a positive number", field=f"tolerance.{key}")
            out = replace(out, **{attr: float(v)})
    return out


def parse(text: str, base_policy: TolerancePolicy = DEFAULT_POLICY):
    """Pair document to ``(a, f, field, policy)``; ``base_policy`` supplies tolerances not in the document."""
    doc = loads(text)
    field = field_from_doc(doc)
    for key in ("matrix_a", "matrix_f"):
        if key not in doc:
            raise ParseError("missing key", field=key)
    a = decode_matrix(doc["matrix_a"], field, "matrix_a")
    f = decode_matrix(doc["matrix_f"], field, "matrix_f")
    if not a.is_square or not f.is_square or a.shape != f.shape:
        raise DimensionMismatch(f"matrix_a {a.shape} and matrix_f {f.shape} must be square of equal size")
    return a, f, field, _policy(doc, base_policy)


def parse_seed(text: str):
    """The optional ``seed`` of a pair document."""
    seed = loads(text).get("seed")
    if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int)):
        raise ParseError("seed must be an integer", field="seed")
    return seed


def pair_doc(a: Mat, f: Mat, policy: TolerancePolicy | None = None, seed: int | None = None) -> dict:
    if a.field != f.field:
        raise DimensionMismatch("matrix_a and matrix_f must share a field")
    doc = {"version": VERSION, **field_doc(a.field),
           "matrix_a": encode_matrix(a), "matrix_f": encode_matrix(f)}
    if policy is not None:
        doc["tolerance"] = {"structural": policy.structural_tol, "cluster": policy.cluster_tol}
    if seed is not None:
        doc["seed"] = int(seed)
    return doc


def serialize(a: Mat, f: Mat, policy: TolerancePolicy | None = None, seed: int | None = None) -> str:
    """Pair document text; ``parse`` inverts it."""
    return dumps(pair_doc(a, f, policy, seed))


# ---------------------------------------------------------------------------
# results

def canonical_doc(cf: CanonicalForm) -> dict:
    doc = {"version": VERSION, "type": "canonical_form", "kind": cf.kind, "mode": cf.mode,
           "summands": [{"family": s.family, "n": s.n,
                         "params": {k: encode_scalar(v) for k, v in params(s).items() if k != "n"}}
                        for s in cf.summands],
           "notes": list(cf.notes)}
    if cf.residual is not None:
        doc["residual"] = float(cf.residual)
    if cf.witness is not None:
        doc["witness"] = encode_mat_doc(cf.witness)
    return doc


def serialize_canonical(cf: CanonicalForm) -> str:
    return dumps(canonical_doc(cf))


def summand_from_doc(d: dict):
    try:
        cls = FAMILIES[d["family"]]
        kw = {k: decode_scalar(v) for k, v in d.get("params", {}).items()}
        s = cls(n=int(d["n"]), **kw)
    except KeyError as exc:
        raise ParseError(f"missing or unknown summand key {exc}", field="summands") from None
    except TypeError as exc:
        raise ParseError(str(exc), field="summands") from None
    return s


def parse_canonical(text: str) -> CanonicalForm:
    doc = loads(text)
    summands = tuple(summand_from_doc(d) for d in doc.get("summands", []))
    w = doc.get("witness")
    witness = decode_mat_doc(w, "witness") if w is not None else None
    return CanonicalForm(summands, witness, doc.get("mode", "float"), doc.get("kind", ""),
                         tuple(doc.get("notes", [])), doc.get("residual"))


def report_doc(r: StructureReport) -> dict:
    return {"version": VERSION, "type": "structure_report",
            "form_kind": r.form_kind.name.lower(),
            "eps": r.form_kind.eps,
            "operator_kinds": sorted(k.value for k in r.op_kinds),
            "nondegenerate": bool(r.nondegenerate)}


def diag_doc(fd: FormDiagonalization) -> dict:
    d = [fd.d.data[k, k] for k in range(fd.d.rows)]
    return {"version": VERSION, "type": "form_diagonalization", "downgraded": bool(fd.downgraded),
            "diagonal": [encode_scalar(x) for x in d], "s": encode_mat_doc(fd.s)}


def split_doc(cs: CosetSplit) -> dict:
    return {"version": VERSION, "type": "coset_split", "downgraded": bool(cs.downgraded),
            "leakage": float(cs.leakage),
            "blocks": [{"e": encode_scalar(b.e), "p": b.p, "q": b.q, "a_block": encode_mat_doc(b.a_block)}
                       for b in cs.blocks],
            "s": encode_mat_doc(cs.s)}


def iso_doc(v: IsoVerdict) -> dict:
    doc = {"version": VERSION, "type": "isomorphism", "isomorphic": bool(v.isomorphic)}
    if v.residual is not None:
        doc["residual"] = float(v.residual)
    if v.witness is not None:
        doc["witness"] = encode_mat_doc(v.witness)
    return doc


def group_doc(g: GroupFactors) -> dict:
    return {"version": VERSION, "type": "group_factors", "target": g.target,
            "factors": [{"e": encode_scalar(e), "p": p, "q": q} for e, p, q in g.factors],
            "text": g.render()}


def phi_doc(b) -> dict:
    return {"version": VERSION, "type": "phi_block", "eps": b.eps, "zeta": b.zeta,
            "phi": encode_mat_doc(b.phi), "m": encode_mat_doc(b.m),
            "a_seq": [encode_scalar(x) for x in b.a_seq]}
