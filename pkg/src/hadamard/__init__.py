"""Complex Hadamard matrices: constructions, verification, invariants and
the quantum-permutation side of the theory."""

from .core import (
    ButsonMatrix, DimensionError, EquivalenceMove, ValidationError,
    dephase, dita_deform, fingerprint, is_hadamard, read_matrix,
    tensor, verify_butson_exact, verify_hadamard, write_matrix,
)

__version__ = "0.1.0"
