"""Python bindings for the biham bi-Hermitian structure library."""

from ._core import (
    InvalidInput,
    NumericalError,
    analyze,
    bicommutant_dim,
    bi_preserving_algebra_dim,
    check_admissible,
    check_compatible,
    commutant_dim,
    biunitary_sample,
    decompose,
    flow,
    group_signature,
    is_generic_f,
    pencil_member,
    positivity_range,
    recursion_certificate,
    synthesize_pair,
)

__all__ = [
    "InvalidInput",
    "NumericalError",
    "analyze",
    "bicommutant_dim",
    "bi_preserving_algebra_dim",
    "check_admissible",
    "check_compatible",
    "commutant_dim",
    "biunitary_sample",
    "decompose",
    "flow",
    "group_signature",
    "is_generic_f",
    "pencil_member",
    "positivity_range",
    "recursion_certificate",
    "synthesize_pair",
]
