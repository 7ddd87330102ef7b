"""Command-line interface: ``iif <subcommand> [options]``.

Every subcommand writes one JSON document to stdout.  Exit status is 0 on
success, 1 when the mathematics refuses the input and 2 for usage or parse
errors.  Tolerances come from ``--tol-struct``/``--tol-cluster``, then the
document, then ``IIF_TOL_STRUCT``/``IIF_TOL_CLUSTER``, then the defaults.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

import numpy as np

from . import io
from .canonical import (FAMILIES, canonicalize, group_factors, isomorphic, make_summand)
from .errors import DomainError, ParseError, UsageError
from .frobenius import CharPoly, make_pair, make_phi
from .harness import InstanceRecipe, make_instance, random_summands
from .linalg import Mat
from .numfield import DEFAULT_POLICY, TolerancePolicy, parse_exact
from .structure import classify, diagonalize_form, split_cosets

ENV_STRUCT = "IIF_TOL_STRUCT"
ENV_CLUSTER = "IIF_TOL_CLUSTER"
KINDS = ("isometric", "selfadjoint", "skewadjoint")
_INT_PARAMS = {"n", "eps", "zeta", "delta"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _env_policy() -> TolerancePolicy:
    pol = DEFAULT_POLICY
    for var, attr in ((ENV_STRUCT, "structural_tol"), (ENV_CLUSTER, "cluster_tol")):
        raw = os.environ.get(var)
        if raw:
            try:
                v = float(raw)
            except ValueError:
                raise UsageError(f"{var} must be a number, got {raw!r}") from None
            if v <= 0:
                raise UsageError(f"{var} must be positive")
            pol = dataclasses.replace(pol, **{attr: v})
    return pol


def _flag_policy(pol: TolerancePolicy, args) -> TolerancePolicy:
    if args.tol_struct is not None:
        pol = dataclasses.replace(pol, structural_tol=args.tol_struct)
    if args.tol_cluster is not None:
        pol = dataclasses.replace(pol, cluster_tol=args.tol_cluster)
    return pol


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load_pair(path: str, args):
    a, f, _, pol = io.parse(_read(path), _env_policy())
    return a, f, _flag_policy(pol, args)


def _positive(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _sign(text: str) -> int:
    if text not in ("1", "-1", "+1"):
        raise argparse.ArgumentTypeError("must be 1 or -1")
    return int(text)


def _coeffs(text: str) -> list:
    try:
        return [parse_exact(t) for t in text.split(",") if t.strip()]
    except ParseError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _param_value(key: str, raw: str):
    raw = raw.strip()
    if key in _INT_PARAMS:
        return int(raw)
    try:
        return parse_exact(raw)
    except ParseError:
        z = complex(raw.replace("i", "j"))
        return z.real if z.imag == 0 and "j" not in raw and "i" not in raw else z


def _parse_params(text: str) -> dict:
    """``n=2,lam=3,mu=-1`` or a JSON object using the document scalar encoding."""
    text = text.strip()
    try:
        if text.startswith("{"):
            doc = json.loads(text)
            return {k: (int(v) if k in _INT_PARAMS else io.decode_scalar(v)) for k, v in doc.items()}
        out = {}
        for item in filter(None, (t.strip() for t in text.split(","))):
            key, _, val = item.partition("=")
            if not val:
                raise ValueError(f"expected key=value, got {item!r}")
            out[key.strip()] = _param_value(key.strip(), val)
        return out
    except (ValueError, json.JSONDecodeError) as exc:
        raise UsageError(f"bad --params: {exc}") from None


# ---------------------------------------------------------------------------
# subcommands

def cmd_check(args):
    a, f, pol = _load_pair(args.input, args)
    return io.report_doc(classify(a, f, pol))


def cmd_diag(args):
    _, f, pol = _load_pair(args.input, args)
    return io.diag_doc(diagonalize_form(f, pol, args.seed))


def cmd_split(args):
    a, f, pol = _load_pair(args.input, args)
    return io.split_doc(split_cosets(a, f, pol, args.seed))


def cmd_canon(args):
    a, f, pol = _load_pair(args.input, args)
    cf = canonicalize(a, f, args.kind, pol, args.seed)
    if not args.witness:
        cf = dataclasses.replace(cf, witness=None)
    return io.canonical_doc(cf)


def cmd_iso(args):
    a1, f1, pol = _load_pair(args.first, args)
    a2, f2, _ = _load_pair(args.second, args)
    return io.iso_doc(isomorphic(a1, f1, a2, f2, args.kind, pol, args.seed))


def _charpoly(args) -> CharPoly:
    if args.factor is not None:
        chi = CharPoly.from_factor(args.factor, args.power)
        if args.charpoly is not None and list(chi.coeffs) != args.charpoly:
            raise UsageError("--charpoly disagrees with --factor^--power")
        return chi
    if args.charpoly is None:
        raise UsageError("--charpoly or --factor is required")
    return CharPoly(tuple(args.charpoly))


def cmd_phi(args):
    return io.phi_doc(make_phi(_charpoly(args), args.eps, args.zeta, args.involution))


def cmd_pair(args):
    a, f = make_pair(_charpoly(args), args.eps, args.zeta, args.f, args.involution)
    return io.pair_doc(a, f)


def cmd_gen(args):
    if args.family not in FAMILIES:
        raise UsageError(f"unknown family {args.family!r}; choose from {', '.join(FAMILIES)}")
    try:
        s = FAMILIES[args.family](**_parse_params(args.params))
    except TypeError as exc:
        raise UsageError(f"bad --params for {args.family}: {exc}") from None
    a, f = make_summand(s)
    return io.pair_doc(a, f)


def cmd_group(args):
    doc = io.loads(_read(args.input))
    if "matrix_a" not in doc and "matrix_f" in doc:
        n = len(doc["matrix_f"])
        doc = {**doc, "matrix_a": [[1 if i == j else 0 for j in range(n)] for i in range(n)]}
    _, f, _, pol = io.parse(io.dumps(doc), _env_policy())
    pol = _flag_policy(pol, args)
    return io.group_doc(group_factors(f, args.target, pol, args.seed))


def cmd_random(args):
    rng = np.random.default_rng(args.seed)
    if args.family in ("isometric", "selfadjoint"):
        summands = random_summands(rng, args.family, args.max_dim)
    elif args.family in ("IsoUnimodular", "IsoHyperbolic", "AdjReal", "AdjPaired"):
        kind = "isometric" if args.family.startswith("Iso") else "selfadjoint"
        summands = ()
        for k in range(64):
            picked = tuple(s for s in random_summands(rng, kind, args.max_dim) if s.family == args.family)
            if picked:
                summands = picked
                break
        if not summands:
            raise DomainError(f"could not draw {args.family} summands")
    else:
        raise UsageError("--family must be isometric, selfadjoint or one of the four complex families")
    recipe = InstanceRecipe(summands, seed=args.seed + 1 if args.conjugate else None, cond_cap=args.cond_cap)
    inst = make_instance(recipe, _flag_policy(_env_policy(), args))
    doc = io.pair_doc(inst.a, inst.f, seed=args.seed)
    doc["ground_truth"] = io.canonical_doc(dataclasses.replace(inst.ground_truth, witness=None))["summands"]
    return doc


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-struct", type=_positive, default=None, help="structural tolerance")
    common.add_argument("--tol-cluster", type=_positive, default=None, help="eigenvalue/phase cluster radius")
    common.add_argument("--seed", type=int, default=0, help="seed for every randomized step (default 0)")

    p = _Parser(prog="iif", description="Canonical forms of operators on spaces with a diagonalizable form.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(fn=fn)
        return sp

    sp = add("check", cmd_check, "classify the form and operator")
    sp.add_argument("input", help="pair document, or - for stdin")
    sp = add("diag", cmd_diag, "diagonalize the form by congruence")
    sp.add_argument("input")
    sp = add("split", cmd_split, "split into coset blocks")
    sp.add_argument("input")
    sp = add("canon", cmd_canon, "canonical form of the pair")
    sp.add_argument("input")
    sp.add_argument("--kind", choices=KINDS, required=True)
    sp.add_argument("--witness", action="store_true", help="include the basis change")
    sp = add("iso", cmd_iso, "decide isomorphism of two pairs")
    sp.add_argument("first")
    sp.add_argument("second")
    sp.add_argument("--kind", choices=KINDS, required=True)
    for name, fn, help_ in (("phi", cmd_phi, "form attached to a Frobenius block"),
                            ("pair", cmd_pair, "indecomposable pair on a Frobenius block")):
        sp = add(name, fn, help_)
        sp.add_argument("--charpoly", type=_coeffs, default=None, help="c_0,...,c_{n-1} of the monic polynomial")
        sp.add_argument("--factor", type=_coeffs, default=None, help="irreducible factor, low to high with leading 1")
        sp.add_argument("--power", type=int, default=1)
        sp.add_argument("--eps", type=_sign, required=True)
        sp.add_argument("--zeta", type=_sign, required=True)
        sp.add_argument("--involution", choices=("identity", "conjugation"), default="identity")
        if name == "pair":
            sp.add_argument("--f", type=_coeffs, default=None, help="f(x) coefficients, low to high")
    sp = add("gen", cmd_gen, "materialize one canonical summand")
    sp.add_argument("--family", required=True)
    sp.add_argument("--params", required=True, help="n=2,lam=3,mu=-1 or a JSON object")
    sp = add("group", cmd_group, "factors of the isometry group or algebra of a form")
    sp.add_argument("input")
    sp.add_argument("--target", choices=("group", "algebra"), default="group")
    sp = add("random", cmd_random, "random transported canonical instance")
    sp.add_argument("--family", required=True)
    sp.add_argument("--conjugate", action="store_true", help="apply a random basis change")
    sp.add_argument("--max-dim", type=int, default=12)
    sp.add_argument("--cond-cap", type=_positive, default=100.0)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        doc = args.fn(args)
    except UsageError as exc:
        print(f"iif: usage error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"iif: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"iif: usage error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(io.dumps(doc))
    return 0
