"""Exact arithmetic for row-and-column-finite matrices modulo finite matrices.

Matrices are finite sums of bands with closed-form coefficient sequences
plus a finite part.  On top of that sit kernels, cokernels and the
algebraic Fredholm index, extensions of Laurent polynomials by finite
matrices, and a small expression language with a command-line front end.
"""

from .bpfmatrix import (
    D2,
    BPFMatrix,
    Band,
    coset_equals,
    diag,
    factorial_diag,
    from_finite,
    geometric_diag,
    identity,
    make_band,
    make_shift,
    make_T,
    make_unit,
)
from .errors import RcfmError
from .expr import evaluate, parse, to_text
from .extensions import (
    ExtensionAlgebra,
    LaurentPoly,
    PullbackElem,
    classify_trivial,
    diag_independence,
    embed,
    equivalence_check,
    family_Tn,
    make_extension,
    matrix_units,
)
from .fredholm import cokernel_basis, exact_inverse, fredholm_inverse, index, index_zero_split, kernel_basis
from .oracle import dense_corank, dense_nullity, stabilized_index
from .seqalg import CoeffSeq, RatFunc, SeqAtom

__version__ = "0.1.0"

__all__ = [
    "D2", "BPFMatrix", "Band", "CoeffSeq", "ExtensionAlgebra", "LaurentPoly", "PullbackElem",
    "RatFunc", "RcfmError", "SeqAtom", "classify_trivial", "cokernel_basis", "coset_equals",
    "dense_corank", "dense_nullity", "diag", "diag_independence", "embed", "equivalence_check",
    "evaluate", "exact_inverse", "factorial_diag", "family_Tn", "fredholm_inverse", "from_finite",
    "geometric_diag", "identity", "index", "index_zero_split", "kernel_basis", "make_T", "make_band",
    "make_extension", "make_shift", "make_unit", "matrix_units", "parse", "stabilized_index", "to_text",
]
