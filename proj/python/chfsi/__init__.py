"""Chebyshev filtered subspace iteration for dense Hermitian eigenproblems."""

from ._chfsi import (
    ContractViolation,
    FilterDegenerate,
    IoError,
    NotConverged,
    NotPositiveDefinite,
    chebyshev_filter,
    generate_sequence,
    lanczos_upper_bound,
    oracle_eig,
    read_matrix,
    solve,
    solve_generalized,
    write_matrix,
)

__all__ = [
    "ContractViolation",
    "FilterDegenerate",
    "IoError",
    "NotConverged",
    "NotPositiveDefinite",
    "chebyshev_filter",
    "generate_sequence",
    "lanczos_upper_bound",
    "oracle_eig",
    "read_matrix",
    "solve",
    "solve_generalized",
    "write_matrix",
]
