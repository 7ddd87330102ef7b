"""Canonical summand families and the classification engine."""

from .engine import (CanonicalForm, GroupFactors, IsoVerdict, canonical_summands, canonicalize,
                     group_factors, isomorphic, isomorphic_summands, sign_characteristic,
                     structured_chains, witness_residual)
from .families import (FAMILIES, AdjPaired, AdjReal, GenA, GenB, GenC1, GenC2, IsoHyperbolic,
                       IsoUnimodular, declared_kind, k_matrix, make_summand, materialize,
                       normalization_witness, normalize, params, realified_jordan, sort_key,
                       summand_field, summands_close, z_matrix)

__all__ = [
    "CanonicalForm", "GroupFactors", "IsoVerdict", "canonical_summands", "canonicalize",
    "group_factors", "isomorphic", "isomorphic_summands", "sign_characteristic",
    "structured_chains", "witness_residual", "FAMILIES", "AdjPaired", "AdjReal", "GenA", "GenB",
    "GenC1", "GenC2", "IsoHyperbolic", "IsoUnimodular", "declared_kind", "k_matrix",
    "make_summand", "materialize", "normalization_witness", "normalize", "params",
    "realified_jordan", "sort_key", "summand_field", "summands_close", "z_matrix",
]
